// SPDX-License-Identifier: Apache-2.0
//
// dfeval - statistical evaluation toolkit for direction-finding antennas
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dfeval/estimator.hpp"

namespace dfeval {

/// One track observation: the true DoA from the intruder position plus
/// either a recorded steering vector or a pre-estimated direction.
struct TrackSample {
    double timestamp = 0.0;
    Direction true_doa;
    std::optional<Direction> estimated;
    std::optional<SteeringVector> steering;
};

struct Track {
    std::vector<TrackSample> samples;
    bool steering_mode = false;
    std::size_t port_count = 0;
};

struct DoaPair {
    Direction true_doa;
    Direction estimated_doa;
};

/// Five-number summary with 1.5*IQR whiskers; quantiles by linear
/// interpolation between order statistics.
struct BoxStats {
    std::size_t count = 0;
    double median = 0.0, q1 = 0.0, q3 = 0.0;
    double whisker_lo = 0.0, whisker_hi = 0.0;
    std::vector<double> outliers;
};

struct BinSummary {
    double lo_deg = 0.0, hi_deg = 0.0;
    std::size_t count = 0;
    BoxStats azimuth;
    BoxStats elevation;
};

struct TrackReport {
    double offset_deg = 0.0; // azimuth offset subtracted from estimates
    double outlier_threshold_deg = 90.0;
    std::vector<double> az_errors_deg; // post-correction, per sample
    std::vector<double> el_errors_deg;
    double rmse_az = 0.0, rmse_el = 0.0;
    double median_abs_az = 0.0, median_abs_el = 0.0;
    double excluded_fraction = 0.0; // |az error| > threshold
    std::optional<double> filtered_rmse_az;
    std::string filtered_absent_reason;
    std::vector<BinSummary> bins;
};

/// Runs the grid-search estimator on steering-vector samples; pre-estimated
/// samples pass through unchanged.
std::vector<DoaPair> replay_track(const std::vector<TrackSample>& samples, const PortSet& ports,
                                  const DoaGrid& candidate_grid);

/// Subtracts the circular-mean azimuth offset from all estimates (refined so
/// the post-correction linear mean of wrapped errors is zero to 1e-9 deg).
std::pair<std::vector<DoaPair>, double> apply_azimuth_offset(const std::vector<DoaPair>& pairs);

/// Raw and outlier-filtered RMSE / median statistics, no offset applied.
TrackReport filtered_stats(const std::vector<DoaPair>& pairs,
                           double azimuth_outlier_threshold_deg = 90.0);

/// Box-plot summaries of azimuth/elevation errors binned by true theta.
std::vector<BinSummary> elevation_binned_boxplots(const std::vector<DoaPair>& pairs,
                                                  const std::vector<double>& bin_edges_deg);

/// Default bins: 10 degrees from 0 to 90.
std::vector<double> default_elevation_bins();

BoxStats box_stats(std::vector<double> values);

Track load_track_csv(const std::string& path);
void write_track_report_json(const TrackReport& report, const std::string& path,
                             const std::string& config_echo = "");
void write_track_bins_csv(const TrackReport& report, const std::string& path,
                          const std::string& config_echo = "");

} // namespace dfeval
