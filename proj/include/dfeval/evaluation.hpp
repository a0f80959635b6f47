// SPDX-License-Identifier: Apache-2.0
//
// dfeval - statistical evaluation toolkit for direction-finding antennas
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dfeval/estimator.hpp"

namespace dfeval {

struct TrialResult {
    Direction true_doa;
    Direction estimated_doa;
    double azimuth_error_deg = 0.0;   // (-180, 180]
    double elevation_error_deg = 0.0; // estimated theta - true theta
    double great_circle_error_deg = 0.0;
};

struct MonteCarloConfig {
    double snr_db = -10.0;
    std::size_t trials_per_doa = 1000;
    std::uint64_t master_seed = 1;
    std::size_t snapshots = 1; // covariance averaging extension, default single
    std::size_t workers = 1;
    double histogram_bin_deg = 5.0; // great-circle error bins
    bool keep_trials = false;       // export per-trial rows
    std::string ports_label;
};

/// Per-DoA statistics; histogram bins cover [0, 180] deg of great-circle
/// error at the configured width.
struct DoaStats {
    std::size_t doa_index = 0;
    Direction doa;
    std::size_t trials = 0;
    double rmse_az = 0.0, rmse_el = 0.0, rmse_gc = 0.0;
    double median_abs_az = 0.0, median_abs_el = 0.0;
    std::vector<std::uint64_t> histogram;
};

struct EvalReport {
    MonteCarloConfig config;
    std::string true_grid_label, candidate_grid_label;
    std::vector<DoaStats> per_doa;
    std::vector<std::vector<TrialResult>> trials; // aligned with per_doa
    std::size_t skipped_doas = 0;                 // vanishing steering vectors
    std::size_t candidate_skipped = 0;
    double rmse_az = 0.0, rmse_el = 0.0, rmse_gc = 0.0;
    double median_abs_az = 0.0, median_abs_el = 0.0, median_abs_gc = 0.0;
    double mean_abs_az = 0.0, mean_abs_el = 0.0, mean_abs_gc = 0.0;
};

EvalReport run_monte_carlo(const PortSet& ports, const DoaGrid& true_grid,
                           const DoaGrid& candidate_grid, const MonteCarloConfig& config);

/// Doubles trials_per_doa (starting from config.trials_per_doa) until the
/// per-DoA histograms of consecutive runs agree within tol, or max_doublings
/// is reached. Returns the last report.
EvalReport run_monte_carlo_adaptive(const PortSet& ports, const DoaGrid& true_grid,
                                    const DoaGrid& candidate_grid, MonteCarloConfig config,
                                    double tol = 0.02, std::size_t max_doublings = 6);

/// True iff the maximum absolute difference of normalized per-DoA histogram
/// bins is below tol. Reports must share binning and DoA layout.
bool histogram_stability(const EvalReport& a, const EvalReport& b, double tol);

/// sqrt(mean of squares), degrees in, degrees out.
double rmse(const std::vector<double>& errors_deg);

/// Median via linear interpolation between order statistics.
double median(std::vector<double> values);

void write_report_json(const EvalReport& report, const std::string& path);
void write_report_csv(const EvalReport& report, const std::string& path);
void write_histogram_csv(const EvalReport& report, const std::string& path);
void write_trials_csv(const EvalReport& report, const std::string& path);

} // namespace dfeval
