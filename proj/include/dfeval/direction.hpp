// SPDX-License-Identifier: Apache-2.0
//
// dfeval - statistical evaluation toolkit for direction-finding antennas
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace dfeval {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// A look direction in antenna spherical coordinates, degrees at the
/// interface. theta is the polar angle from zenith (+z), phi the azimuth.
struct Direction {
    double theta_deg = 0.0; // [0, 180]
    double phi_deg = 0.0;   // [0, 360) after normalization

    Direction() = default;
    Direction(double theta, double phi) : theta_deg(theta), phi_deg(normalize_phi(phi)) {
        if (theta < 0.0 || theta > 180.0)
            throw std::invalid_argument("Direction: theta out of [0, 180] degrees");
    }

    static double normalize_phi(double phi) {
        double p = std::fmod(phi, 360.0);
        if (p < 0.0)
            p += 360.0;
        return p;
    }

    double theta_rad() const { return deg2rad(theta_deg); }
    double phi_rad() const { return deg2rad(phi_deg); }

    /// Cartesian unit vector, z toward zenith.
    std::array<double, 3> unit_vector() const {
        const double st = std::sin(theta_rad()), ct = std::cos(theta_rad());
        const double cp = std::cos(phi_rad()), sp = std::sin(phi_rad());
        return {st * cp, st * sp, ct};
    }
};

} // namespace dfeval
