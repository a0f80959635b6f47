// SPDX-License-Identifier: Apache-2.0
//
// dfeval - statistical evaluation toolkit for direction-finding antennas
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dfeval/geometry.hpp"
#include "dfeval/patterns.hpp"

namespace dfeval {

/// Complex port response to a plane wave from one DoA.
struct SteeringVector {
    Eigen::VectorXcd entries;
    std::optional<Direction> source_doa;
    bool noisy = false;

    std::size_t size() const { return static_cast<std::size_t>(entries.size()); }
};

struct CovarianceMatrix {
    Eigen::MatrixXcd entries; // Hermitian PSD, rank 1 for a single snapshot
};

/// P x (P-1) orthonormal basis of the noise subspace.
struct NoiseSubspace {
    Eigen::MatrixXcd basis;
    Eigen::VectorXcd signal_eigenvector; // unit norm, largest eigenvalue
    double signal_eigenvalue = 0.0;
};

/// Spectrum values aligned with a candidate list / DoaGrid.
struct MusicSpectrum {
    std::vector<double> values;
};

/// Regularization floor for the spectrum denominator; keeps the noise-free
/// case finite without moving the argmax.
inline constexpr double kSpectrumEpsilon = 1e-12;

/// Theta-polarized port responses at d; entry p = E_theta of pattern p.
SteeringVector steering_vector(const PortSet& ports, const Direction& d);

SteeringVector normalize(const SteeringVector& x);

/// x plus i.i.d. circularly-symmetric complex Gaussian noise with per-entry
/// variance (|x|^2 / P) * 10^(-snr_db / 10). Deterministic for a fixed seed.
SteeringVector add_noise(const SteeringVector& x, double snr_db, std::uint64_t seed);

/// Rank-1 single-snapshot covariance x x^H.
CovarianceMatrix covariance(const SteeringVector& x);

/// Averaged covariance over multiple snapshots.
CovarianceMatrix covariance(const std::vector<SteeringVector>& snapshots);

/// Eigendecomposition of R; eigenvectors of the P-1 smallest eigenvalues.
NoiseSubspace noise_subspace(const CovarianceMatrix& r);

MusicSpectrum music_spectrum(const NoiseSubspace& n,
                             const std::vector<SteeringVector>& candidates);

/// Normalized candidate steering vectors for a grid, precomputed once per
/// (ports, grid) pair. Grid points with vanishing steering vectors are
/// skipped and counted.
struct CandidateSet {
    Eigen::MatrixXcd vectors; // P x K, unit-norm columns
    std::vector<std::size_t> grid_indices;
    const DoaGrid* grid = nullptr;
    std::size_t skipped = 0;

    std::size_t size() const { return grid_indices.size(); }
};

CandidateSet build_candidates(const PortSet& ports, const DoaGrid& grid);

struct DoaEstimate {
    Direction direction;
    std::size_t grid_index = 0;
    /// Top spectrum value attained (within 1e-9 relative) at two or more
    /// distinct theta values.
    bool elevation_unidentifiable = false;
};

/// Grid-search MUSIC estimate; ties broken by lowest grid index.
DoaEstimate estimate_doa(const CandidateSet& candidates, const NoiseSubspace& n,
                         MusicSpectrum* spectrum_out = nullptr);

/// Convenience wrapper: builds candidates, covariance and subspace per call.
std::pair<Direction, MusicSpectrum> estimate_doa(const PortSet& ports, const SteeringVector& x,
                                                 const DoaGrid& grid);

void save_spectrum_csv(const CandidateSet& candidates, const MusicSpectrum& spectrum,
                       const std::string& path,
                       const std::vector<std::string>& header_comments = {});

} // namespace dfeval
