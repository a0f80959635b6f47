// SPDX-License-Identifier: Apache-2.0
//
// dfeval - statistical evaluation toolkit for direction-finding antennas
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "dfeval/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace dfeval {

namespace {

constexpr double kStepTol = 1e-6; // degrees, lattice uniformity check

bool close(double a, double b, double tol = kStepTol) { return std::abs(a - b) <= tol; }

} // namespace

bool SampledLattice::same_grid(const SampledLattice& o) const {
    return close(theta_min_deg, o.theta_min_deg) && close(theta_step_deg, o.theta_step_deg) &&
           theta_count == o.theta_count && close(phi_step_deg, o.phi_step_deg) &&
           phi_count == o.phi_count;
}

FarFieldPattern FarFieldPattern::fourier(int order) {
    if (order < 0)
        throw std::invalid_argument("fourier pattern: order must be >= 0");
    FarFieldPattern p;
    p.kind_ = Kind::AnalyticFourier;
    p.order_ = order;
    return p;
}

FarFieldPattern FarFieldPattern::monopole() {
    FarFieldPattern p;
    p.kind_ = Kind::AnalyticMonopole;
    return p;
}

FarFieldPattern FarFieldPattern::magnetic_dipole(const std::array<double, 3>& axis) {
    const double norm = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    if (!close(norm, 1.0, 1e-9))
        throw std::invalid_argument("magnetic dipole: axis must be a unit vector");
    if (std::abs(axis[2]) > 1e-9)
        throw std::invalid_argument("magnetic dipole: axis must lie in the ground plane");
    FarFieldPattern p;
    p.kind_ = Kind::AnalyticMagneticDipole;
    p.axis_phi_deg_ = Direction::normalize_phi(rad2deg(std::atan2(axis[1], axis[0])));
    return p;
}

FarFieldPattern FarFieldPattern::sampled(SampledLattice lattice, double frequency_mhz) {
    if (lattice.theta_count < 2 || lattice.phi_count < 2)
        throw std::invalid_argument("sampled pattern: lattice needs at least 2x2 nodes");
    if (lattice.samples.size() != lattice.theta_count * lattice.phi_count)
        throw std::invalid_argument("sampled pattern: sample count does not match lattice");
    FarFieldPattern p;
    p.kind_ = Kind::Sampled;
    p.lattice_ = std::move(lattice);
    p.frequency_mhz_ = frequency_mhz;
    return p;
}

FieldSample FarFieldPattern::evaluate(const Direction& d) const {
    switch (kind_) {
    case Kind::AnalyticFourier:
        return {std::polar(1.0, static_cast<double>(order_) * d.phi_rad()), {0.0, 0.0}};
    case Kind::AnalyticMonopole:
        return {cplx(std::sin(d.theta_rad()), 0.0), {0.0, 0.0}};
    case Kind::AnalyticMagneticDipole:
        // Theta component of an in-plane magnetic dipole: |cos| lobe over
        // azimuth, no elevation dependence, peak 1 toward axis_phi.
        return {cplx(std::cos(d.phi_rad() - deg2rad(axis_phi_deg_)), 0.0), {0.0, 0.0}};
    case Kind::Sampled: {
        const SampledLattice& L = lattice_;
        const double t = (d.theta_deg - L.theta_min_deg) / L.theta_step_deg;
        if (t < -kStepTol || t > static_cast<double>(L.theta_count - 1) + kStepTol)
            throw std::out_of_range("sampled pattern: theta outside sampled range");
        double tc = std::clamp(t, 0.0, static_cast<double>(L.theta_count - 1));
        std::size_t it0 = static_cast<std::size_t>(std::floor(tc));
        if (it0 >= L.theta_count - 1)
            it0 = L.theta_count - 2;
        const double wt = tc - static_cast<double>(it0);

        const double p = d.phi_deg / L.phi_step_deg;
        std::size_t ip0 = static_cast<std::size_t>(std::floor(p)) % L.phi_count;
        const std::size_t ip1 = (ip0 + 1) % L.phi_count; // azimuth wrap
        const double wp = p - std::floor(p);

        auto lerp = [](const cplx& a, const cplx& b, double w) { return a * (1.0 - w) + b * w; };
        FieldSample out;
        out.e_theta = lerp(lerp(L.at(it0, ip0).e_theta, L.at(it0, ip1).e_theta, wp),
                           lerp(L.at(it0 + 1, ip0).e_theta, L.at(it0 + 1, ip1).e_theta, wp), wt);
        out.e_phi = lerp(lerp(L.at(it0, ip0).e_phi, L.at(it0, ip1).e_phi, wp),
                         lerp(L.at(it0 + 1, ip0).e_phi, L.at(it0 + 1, ip1).e_phi, wp), wt);
        return out;
    }
    }
    throw std::logic_error("unreachable pattern kind");
}

FarFieldPattern fourier_pattern(int order) { return FarFieldPattern::fourier(order); }

PortSet fourier_port_set(std::size_t port_count) {
    if (port_count < 2)
        throw std::invalid_argument("fourier port set: need at least 2 ports");
    PortSet ports;
    for (std::size_t p = 0; p < port_count; ++p) {
        ports.patterns.push_back(FarFieldPattern::fourier(static_cast<int>(p)));
        ports.labels.push_back("fourier_p" + std::to_string(p));
    }
    return ports;
}

FarFieldPattern monopole_pattern() { return FarFieldPattern::monopole(); }

FarFieldPattern magnetic_dipole_pattern(const std::array<double, 3>& axis) {
    return FarFieldPattern::magnetic_dipole(axis);
}

PortSet cupola_analytic_port_set() {
    PortSet ports;
    ports.patterns.push_back(monopole_pattern());
    ports.patterns.push_back(magnetic_dipole_pattern({1.0, 0.0, 0.0}));
    ports.patterns.push_back(magnetic_dipole_pattern({0.0, 1.0, 0.0}));
    ports.labels = {"monopole", "magdipole_x", "magdipole_y"};
    return ports;
}

PortSet sample_port_set(const PortSet& ports, double step_deg, bool full_sphere) {
    if (step_deg <= 0.0 || !close(std::fmod(90.0, step_deg), 0.0) ||
        !close(std::fmod(360.0, step_deg), 0.0))
        throw std::invalid_argument("sample_port_set: step must divide 90 and 360");
    const double theta_max = full_sphere ? 180.0 : 90.0;
    SampledLattice proto;
    proto.theta_min_deg = 0.0;
    proto.theta_step_deg = step_deg;
    proto.theta_count = static_cast<std::size_t>(std::lround(theta_max / step_deg)) + 1;
    proto.phi_step_deg = step_deg;
    proto.phi_count = static_cast<std::size_t>(std::lround(360.0 / step_deg));

    PortSet out;
    out.labels = ports.labels;
    for (const auto& pat : ports.patterns) {
        SampledLattice L = proto;
        L.samples.resize(L.theta_count * L.phi_count);
        for (std::size_t it = 0; it < L.theta_count; ++it)
            for (std::size_t ip = 0; ip < L.phi_count; ++ip) {
                Direction d(L.theta_min_deg + step_deg * static_cast<double>(it),
                            L.phi_step_deg * static_cast<double>(ip));
                L.samples[it * L.phi_count + ip] = pat.evaluate(d);
            }
        out.patterns.push_back(FarFieldPattern::sampled(std::move(L), pat.frequency_mhz()));
    }
    return out;
}

namespace {

struct RawRow {
    int port;
    double theta, phi;
    cplx e_theta, e_phi;
};

std::vector<double> sorted_unique(std::set<double> vals) {
    return {vals.begin(), vals.end()};
}

double infer_step(const std::vector<double>& vals, const char* what) {
    if (vals.size() < 2)
        throw std::runtime_error(std::string("pattern file: need at least 2 distinct ") + what +
                                 " values");
    const double step = vals[1] - vals[0];
    for (std::size_t i = 1; i < vals.size(); ++i)
        if (!close(vals[i] - vals[i - 1], step))
            throw std::runtime_error(std::string("pattern file: inconsistent ") + what + " steps");
    return step;
}

} // namespace

PortSet load_pattern_file(const std::string& path, std::size_t expected_port_count) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("pattern file: cannot open " + path);

    std::vector<RawRow> rows;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        if (!header_seen) { // header row
            header_seen = true;
            continue;
        }
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ','))
            fields.push_back(field);
        if (fields.size() != 7)
            throw std::runtime_error("pattern file: malformed row: " + line);
        RawRow r;
        double num[7];
        try {
            for (int i = 0; i < 7; ++i)
                num[i] = std::stod(fields[static_cast<std::size_t>(i)]);
        } catch (const std::exception&) {
            throw std::runtime_error("pattern file: malformed row: " + line);
        }
        for (int i = 1; i < 7; ++i)
            if (!std::isfinite(num[i]))
                throw std::runtime_error("pattern file: non-finite sample in row: " + line);
        r.port = static_cast<int>(num[0]);
        r.theta = num[1];
        r.phi = num[2];
        r.e_theta = {num[3], num[4]};
        r.e_phi = {num[5], num[6]};
        rows.push_back(r);
    }
    if (rows.empty())
        throw std::runtime_error("pattern file: no data rows in " + path);

    std::set<int> port_ids;
    std::set<double> thetas, phis;
    for (const auto& r : rows) {
        port_ids.insert(r.port);
        thetas.insert(r.theta);
        phis.insert(r.phi);
    }
    if (expected_port_count != 0 && port_ids.size() != expected_port_count)
        throw std::runtime_error("pattern file: expected " + std::to_string(expected_port_count) +
                                 " ports, found " + std::to_string(port_ids.size()));

    const auto theta_vals = sorted_unique(thetas);
    const auto phi_vals = sorted_unique(phis);
    SampledLattice proto;
    proto.theta_min_deg = theta_vals.front();
    proto.theta_step_deg = infer_step(theta_vals, "theta");
    proto.theta_count = theta_vals.size();
    proto.phi_step_deg = infer_step(phi_vals, "phi");
    proto.phi_count = phi_vals.size();
    if (!close(phi_vals.front(), 0.0) ||
        !close(phi_vals.back() + proto.phi_step_deg, 360.0))
        throw std::runtime_error("pattern file: phi lattice must cover [0, 360) uniformly");

    auto theta_index = [&](double t) {
        const double x = (t - proto.theta_min_deg) / proto.theta_step_deg;
        const auto i = static_cast<std::size_t>(std::lround(x));
        if (i >= proto.theta_count || !close(x, std::lround(x)))
            throw std::runtime_error("pattern file: theta value off lattice");
        return i;
    };
    auto phi_index = [&](double p) {
        const double x = p / proto.phi_step_deg;
        const auto i = static_cast<std::size_t>(std::lround(x));
        if (i >= proto.phi_count || !close(x, std::lround(x)))
            throw std::runtime_error("pattern file: phi value off lattice");
        return i;
    };

    const std::size_t nodes = proto.theta_count * proto.phi_count;
    std::map<int, std::pair<SampledLattice, std::vector<char>>> per_port;
    for (int id : port_ids) {
        SampledLattice L = proto;
        L.samples.resize(nodes);
        per_port.emplace(id, std::make_pair(std::move(L), std::vector<char>(nodes, 0)));
    }
    for (const auto& r : rows) {
        auto& [L, filled] = per_port.at(r.port);
        const std::size_t idx = theta_index(r.theta) * proto.phi_count + phi_index(r.phi);
        if (filled[idx])
            throw std::runtime_error("pattern file: duplicate lattice point");
        filled[idx] = 1;
        L.samples[idx] = {r.e_theta, r.e_phi};
    }
    for (auto& [id, entry] : per_port)
        if (static_cast<std::size_t>(std::count(entry.second.begin(), entry.second.end(), 1)) !=
            nodes)
            throw std::runtime_error("pattern file: incomplete lattice for port " +
                                     std::to_string(id));

    PortSet ports;
    for (auto& [id, entry] : per_port) {
        ports.patterns.push_back(FarFieldPattern::sampled(std::move(entry.first)));
        ports.labels.push_back("port" + std::to_string(id));
    }
    return ports;
}

void save_pattern_file(const PortSet& ports, const std::string& path,
                       const std::vector<std::string>& header_comments) {
    if (ports.port_count() == 0)
        throw std::invalid_argument("save_pattern_file: empty port set");
    for (const auto& pat : ports.patterns)
        if (pat.kind() != FarFieldPattern::Kind::Sampled)
            throw std::invalid_argument(
                "save_pattern_file: only sampled patterns can be written; sample first");
    const SampledLattice& ref = ports.patterns.front().lattice();
    for (const auto& pat : ports.patterns)
        if (!pat.lattice().same_grid(ref))
            throw std::invalid_argument("save_pattern_file: ports on mismatched lattices");

    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("save_pattern_file: cannot write " + path);
    for (const auto& c : header_comments)
        out << "# " << c << "\n";
    out << "port,theta_deg,phi_deg,re_etheta,im_etheta,re_ephi,im_ephi\n";
    char buf[256];
    for (std::size_t p = 0; p < ports.port_count(); ++p) {
        const SampledLattice& L = ports.patterns[p].lattice();
        for (std::size_t it = 0; it < L.theta_count; ++it)
            for (std::size_t ip = 0; ip < L.phi_count; ++ip) {
                const FieldSample& s = L.at(it, ip);
                std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.12g,%.12g,%.12g,%.12g\n", p + 1,
                              L.theta_min_deg + L.theta_step_deg * static_cast<double>(it),
                              L.phi_step_deg * static_cast<double>(ip), s.e_theta.real(),
                              s.e_theta.imag(), s.e_phi.real(), s.e_phi.imag());
                out << buf;
            }
    }
}

} // namespace dfeval
