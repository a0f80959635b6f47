// SPDX-License-Identifier: Apache-2.0
//
// dfeval - statistical evaluation toolkit for direction-finding antennas
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "dfeval/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace dfeval {

std::string DoaGrid::describe() const {
    if (kind == Kind::HemisphereQuasiUniform)
        return "hemisphere:" + std::to_string(target_count);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "equiangular:%g", step_deg);
    return buf;
}

DoaGrid hemisphere_grid(std::size_t n) {
    if (n < 4)
        throw std::invalid_argument("hemisphere_grid: need at least 4 points");
    DoaGrid grid;
    grid.kind = DoaGrid::Kind::HemisphereQuasiUniform;
    grid.target_count = n;
    grid.directions.reserve(n);
    // Fibonacci lattice on z in (0, 1]: the half-cell offset keeps points off
    // the pole and off the equator boundary.
    const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double z = 1.0 - (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        const double theta = rad2deg(std::acos(z));
        const double phi = rad2deg(golden_angle * static_cast<double>(i));
        grid.directions.emplace_back(theta, Direction::normalize_phi(phi));
    }
    return grid;
}

DoaGrid equiangular_grid(double step_deg) {
    if (step_deg <= 0.0)
        throw std::invalid_argument("equiangular_grid: step must be positive");
    const double nt = 90.0 / step_deg;
    const double np = 360.0 / step_deg;
    if (std::abs(nt - std::round(nt)) > 1e-9 || std::abs(np - std::round(np)) > 1e-9)
        throw std::invalid_argument("equiangular_grid: step must divide 90 and 360 evenly");
    const auto theta_rows = static_cast<std::size_t>(std::lround(nt));
    const auto phi_cols = static_cast<std::size_t>(std::lround(np));

    DoaGrid grid;
    grid.kind = DoaGrid::Kind::Equiangular;
    grid.step_deg = step_deg;
    grid.directions.emplace_back(0.0, 0.0); // collapsed pole row
    for (std::size_t it = 1; it <= theta_rows; ++it)
        for (std::size_t ip = 0; ip < phi_cols; ++ip)
            grid.directions.emplace_back(step_deg * static_cast<double>(it),
                                         step_deg * static_cast<double>(ip));
    return grid;
}

double great_circle_error(const Direction& a, const Direction& b) {
    const auto u = a.unit_vector();
    const auto v = b.unit_vector();
    const double dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    const double cx = u[1] * v[2] - u[2] * v[1];
    const double cy = u[2] * v[0] - u[0] * v[2];
    const double cz = u[0] * v[1] - u[1] * v[0];
    const double cross = std::sqrt(cx * cx + cy * cy + cz * cz);
    return rad2deg(std::atan2(cross, dot));
}

double azimuth_error(double a_phi_deg, double b_phi_deg) {
    double d = std::fmod(a_phi_deg - b_phi_deg, 360.0);
    if (d <= -180.0)
        d += 360.0;
    else if (d > 180.0)
        d -= 360.0;
    return d;
}

double circular_mean_deg(const std::vector<double>& angles_deg) {
    if (angles_deg.empty())
        throw std::invalid_argument("circular_mean_deg: empty input");
    double s = 0.0, c = 0.0;
    for (double a : angles_deg) {
        s += std::sin(deg2rad(a));
        c += std::cos(deg2rad(a));
    }
    return rad2deg(std::atan2(s, c));
}

void save_grid_csv(const DoaGrid& grid, const std::string& path,
                   const std::vector<std::string>& header_comments) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("save_grid_csv: cannot write " + path);
    for (const auto& c : header_comments)
        out << "# " << c << "\n";
    out << "index,theta_deg,phi_deg\n";
    char buf[96];
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g\n", i, grid.directions[i].theta_deg,
                      grid.directions[i].phi_deg);
        out << buf;
    }
}

} // namespace dfeval
