// SPDX-License-Identifier: Apache-2.0
//
// dfeval - statistical evaluation toolkit for direction-finding antennas
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "dfeval/estimator.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "dfeval/errors.hpp"
#include "dfeval/rng.hpp"

namespace dfeval {

SteeringVector steering_vector(const PortSet& ports, const Direction& d) {
    SteeringVector x;
    x.entries.resize(static_cast<Eigen::Index>(ports.port_count()));
    for (std::size_t p = 0; p < ports.port_count(); ++p)
        x.entries[static_cast<Eigen::Index>(p)] = ports.patterns[p].evaluate(d).e_theta;
    x.source_doa = d;
    x.noisy = false;
    return x;
}

SteeringVector normalize(const SteeringVector& x) {
    const double norm = x.entries.norm();
    if (norm <= 0.0)
        throw std::invalid_argument("normalize: steering vector vanishes at this DoA");
    SteeringVector out = x;
    out.entries /= norm;
    return out;
}

SteeringVector add_noise(const SteeringVector& x, double snr_db, std::uint64_t seed) {
    const auto dim = static_cast<std::size_t>(x.entries.size());
    const double sig_power = x.entries.squaredNorm() / static_cast<double>(dim);
    const double sigma2 = sig_power * std::pow(10.0, -snr_db / 10.0);
    const double sigma_component = std::sqrt(sigma2 / 2.0); // per real component

    Rng rng(seed);
    SteeringVector out = x;
    for (Eigen::Index i = 0; i < out.entries.size(); ++i)
        out.entries[i] += cplx(sigma_component * rng.next_normal(),
                               sigma_component * rng.next_normal());
    out.noisy = true;
    return out;
}

CovarianceMatrix covariance(const SteeringVector& x) {
    CovarianceMatrix r;
    r.entries = x.entries * x.entries.adjoint();
    return r;
}

CovarianceMatrix covariance(const std::vector<SteeringVector>& snapshots) {
    if (snapshots.empty())
        throw std::invalid_argument("covariance: no snapshots");
    CovarianceMatrix r;
    const Eigen::Index dim = snapshots.front().entries.size();
    r.entries = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& s : snapshots) {
        if (s.entries.size() != dim)
            throw std::invalid_argument("covariance: snapshot dimension mismatch");
        r.entries += s.entries * s.entries.adjoint();
    }
    r.entries /= static_cast<double>(snapshots.size());
    return r;
}

NoiseSubspace noise_subspace(const CovarianceMatrix& r) {
    if (r.entries.rows() != r.entries.cols() || r.entries.rows() < 2)
        throw std::invalid_argument("noise_subspace: covariance must be square, P >= 2");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(r.entries);
    if (solver.info() != Eigen::Success)
        throw NumericalError("noise_subspace: eigendecomposition failed to converge");
    const Eigen::Index dim = r.entries.rows();
    NoiseSubspace n;
    // Eigen sorts eigenvalues ascending: the noise subspace is the first P-1
    // columns, the signal eigenvector the last.
    n.basis = solver.eigenvectors().leftCols(dim - 1);
    n.signal_eigenvector = solver.eigenvectors().col(dim - 1);
    n.signal_eigenvalue = solver.eigenvalues()[dim - 1];
    return n;
}

MusicSpectrum music_spectrum(const NoiseSubspace& n,
                             const std::vector<SteeringVector>& candidates) {
    MusicSpectrum spec;
    spec.values.reserve(candidates.size());
    for (const auto& c : candidates) {
        if (c.entries.size() != n.basis.rows())
            throw std::invalid_argument("music_spectrum: candidate dimension mismatch");
        const double denom = (n.basis.adjoint() * c.entries).squaredNorm();
        spec.values.push_back(1.0 / std::max(denom, kSpectrumEpsilon));
    }
    return spec;
}

CandidateSet build_candidates(const PortSet& ports, const DoaGrid& grid) {
    if (grid.size() == 0)
        throw std::invalid_argument("build_candidates: empty grid");
    CandidateSet set;
    set.grid = &grid;
    const auto dim = static_cast<Eigen::Index>(ports.port_count());
    set.vectors.resize(dim, static_cast<Eigen::Index>(grid.size()));
    Eigen::Index col = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        SteeringVector x = steering_vector(ports, grid.directions[k]);
        const double norm = x.entries.norm();
        if (norm <= 0.0) {
            ++set.skipped;
            continue;
        }
        set.vectors.col(col) = x.entries / norm;
        set.grid_indices.push_back(k);
        ++col;
    }
    set.vectors.conservativeResize(dim, col);
    if (set.grid_indices.empty())
        throw std::runtime_error("build_candidates: all candidate steering vectors vanish");
    return set;
}

DoaEstimate estimate_doa(const CandidateSet& candidates, const NoiseSubspace& n,
                         MusicSpectrum* spectrum_out) {
    if (candidates.vectors.rows() != n.basis.rows())
        throw std::invalid_argument("estimate_doa: dimension mismatch");
    const Eigen::Index count = candidates.vectors.cols();
    // denom_k = |N^H x_k|^2; the spectrum maximum is the denominator minimum.
    Eigen::MatrixXcd proj = n.basis.adjoint() * candidates.vectors;
    Eigen::VectorXd denom = proj.colwise().squaredNorm();

    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < count; ++k)
        if (denom[k] < denom[best])
            best = k;

    if (spectrum_out) {
        spectrum_out->values.resize(static_cast<std::size_t>(count));
        for (Eigen::Index k = 0; k < count; ++k)
            spectrum_out->values[static_cast<std::size_t>(k)] =
                1.0 / std::max(denom[k], kSpectrumEpsilon);
    }

    DoaEstimate est;
    est.grid_index = candidates.grid_indices[static_cast<std::size_t>(best)];
    est.direction = candidates.grid->directions[est.grid_index];

    // Flag ties across distinct theta values (elevation unobservable).
    const double top_value = 1.0 / std::max(denom[best], kSpectrumEpsilon);
    for (Eigen::Index k = 0; k < count && !est.elevation_unidentifiable; ++k) {
        if (k == best)
            continue;
        const double v = 1.0 / std::max(denom[k], kSpectrumEpsilon);
        if (std::abs(v - top_value) <= 1e-9 * top_value) {
            const auto& d = candidates.grid->directions[candidates.grid_indices[
                static_cast<std::size_t>(k)]];
            if (std::abs(d.theta_deg - est.direction.theta_deg) > 1e-12)
                est.elevation_unidentifiable = true;
        }
    }
    return est;
}

std::pair<Direction, MusicSpectrum> estimate_doa(const PortSet& ports, const SteeringVector& x,
                                                 const DoaGrid& grid) {
    CandidateSet candidates = build_candidates(ports, grid);
    NoiseSubspace n = noise_subspace(covariance(x));
    MusicSpectrum spec;
    DoaEstimate est = estimate_doa(candidates, n, &spec);
    return {est.direction, std::move(spec)};
}

void save_spectrum_csv(const CandidateSet& candidates, const MusicSpectrum& spectrum,
                       const std::string& path,
                       const std::vector<std::string>& header_comments) {
    if (spectrum.values.size() != candidates.size())
        throw std::invalid_argument("save_spectrum_csv: spectrum/candidate size mismatch");
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("save_spectrum_csv: cannot write " + path);
    for (const auto& c : header_comments)
        out << "# " << c << "\n";
    out << "index,theta_deg,phi_deg,p_music\n";
    char buf[128];
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        const auto& d = candidates.grid->directions[candidates.grid_indices[k]];
        std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.12g\n", candidates.grid_indices[k],
                      d.theta_deg, d.phi_deg, spectrum.values[k]);
        out << buf;
    }
}

} // namespace dfeval
