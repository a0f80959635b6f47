// SPDX-License-Identifier: Apache-2.0
//
// dfeval - statistical evaluation toolkit for direction-finding antennas
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <string>
#include <vector>

#include "dfeval/direction.hpp"

namespace dfeval {

/// Ordered set of candidate DoAs on the upper hemisphere.
struct DoaGrid {
    enum class Kind { HemisphereQuasiUniform, Equiangular };

    std::vector<Direction> directions;
    Kind kind = Kind::HemisphereQuasiUniform;
    std::size_t target_count = 0; // hemisphere grids
    double step_deg = 0.0;        // equiangular grids

    std::size_t size() const { return directions.size(); }
    std::string describe() const;
};

/// n quasi-uniform directions on the upper hemisphere (theta <= 90 deg),
/// spherical Fibonacci lattice. Deterministic for fixed n.
DoaGrid hemisphere_grid(std::size_t n);

/// Equiangular lattice, theta in {0, step, ..., 90}, phi in {0, step, ...,
/// 360-step}; the pole row collapses to a single direction.
DoaGrid equiangular_grid(double step_deg);

/// Great-circle angle between two directions, degrees in [0, 180].
double great_circle_error(const Direction& a, const Direction& b);

/// Circular azimuth difference a - b wrapped into (-180, 180].
double azimuth_error(double a_phi_deg, double b_phi_deg);

/// Circular mean of angles in degrees (atan2 of summed unit vectors).
double circular_mean_deg(const std::vector<double>& angles_deg);

void save_grid_csv(const DoaGrid& grid, const std::string& path,
                   const std::vector<std::string>& header_comments = {});

} // namespace dfeval
