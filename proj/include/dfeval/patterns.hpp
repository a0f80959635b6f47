// SPDX-License-Identifier: Apache-2.0
//
// dfeval - statistical evaluation toolkit for direction-finding antennas
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <complex>
#include <string>
#include <vector>

#include "dfeval/direction.hpp"

namespace dfeval {

using cplx = std::complex<double>;

/// One complex vector far-field sample: Theta- and Phi-polarized components.
struct FieldSample {
    cplx e_theta{0.0, 0.0};
    cplx e_phi{0.0, 0.0};
};

/// Regular (theta, phi) lattice of complex far-field samples. theta spans
/// [theta_min, theta_max] inclusive in steps of theta_step; phi spans
/// [0, 360) in steps of phi_step. Row-major, theta outer, phi inner.
struct SampledLattice {
    double theta_min_deg = 0.0;
    double theta_step_deg = 0.0;
    std::size_t theta_count = 0;
    double phi_step_deg = 0.0;
    std::size_t phi_count = 0;
    std::vector<FieldSample> samples; // theta_count * phi_count

    double theta_max_deg() const {
        return theta_min_deg + theta_step_deg * static_cast<double>(theta_count - 1);
    }
    const FieldSample& at(std::size_t it, std::size_t ip) const {
        return samples[it * phi_count + ip];
    }
    bool same_grid(const SampledLattice& o) const;
};

/// Far-field of a single antenna port or characteristic mode. Analytic kinds
/// evaluate in closed form; sampled kinds interpolate bilinearly with
/// azimuth wrap-around.
class FarFieldPattern {
  public:
    enum class Kind { AnalyticFourier, AnalyticMonopole, AnalyticMagneticDipole, Sampled };

    static FarFieldPattern fourier(int order);
    static FarFieldPattern monopole();
    /// axis: unit vector in the ground plane (z = 0); the Theta-polarized
    /// lobe maximum lies in the azimuth of axis.
    static FarFieldPattern magnetic_dipole(const std::array<double, 3>& axis);
    static FarFieldPattern sampled(SampledLattice lattice, double frequency_mhz = 0.0);

    Kind kind() const { return kind_; }
    int order() const { return order_; }
    double axis_phi_deg() const { return axis_phi_deg_; }
    double frequency_mhz() const { return frequency_mhz_; }
    const SampledLattice& lattice() const { return lattice_; }

    FieldSample evaluate(const Direction& d) const;

  private:
    FarFieldPattern() = default;
    Kind kind_ = Kind::AnalyticFourier;
    int order_ = 0;              // AnalyticFourier
    double axis_phi_deg_ = 0.0;  // AnalyticMagneticDipole
    double frequency_mhz_ = 0.0; // metadata only
    SampledLattice lattice_;     // Sampled
};

/// Ordered list of port far-fields; P = size() is the steering-vector
/// dimension everywhere downstream.
struct PortSet {
    std::vector<FarFieldPattern> patterns;
    std::vector<std::string> labels;

    std::size_t port_count() const { return patterns.size(); }
};

/// Eq.-style idealized phase-mode pattern: E_theta = exp(j p phi), E_phi = 0.
FarFieldPattern fourier_pattern(int order);

/// P idealized phase-mode ports with orders 0 .. P-1.
PortSet fourier_port_set(std::size_t port_count);

/// Electric monopole stand-in: E_theta = sin(theta), peak 1 at the horizon.
FarFieldPattern monopole_pattern();

FarFieldPattern magnetic_dipole_pattern(const std::array<double, 3>& axis);

/// Monopole plus two orthogonal magnetic dipoles, the analytic stand-in for
/// the three selected characteristic modes of the cupola.
PortSet cupola_analytic_port_set();

/// Sample every port of `ports` on a step_deg x step_deg lattice covering
/// theta in [0, 90] (or [0, 180] when full_sphere), keeping analytic values.
PortSet sample_port_set(const PortSet& ports, double step_deg, bool full_sphere = false);

/// Pattern file I/O (CSV schema: port,theta_deg,phi_deg,re_etheta,im_etheta,
/// re_ephi,im_ephi). Loading validates complete rectangular lattices and
/// finite values and fails loudly otherwise.
PortSet load_pattern_file(const std::string& path, std::size_t expected_port_count = 0);
void save_pattern_file(const PortSet& ports, const std::string& path,
                       const std::vector<std::string>& header_comments = {});

} // namespace dfeval
