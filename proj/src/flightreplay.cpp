// SPDX-License-Identifier: Apache-2.0
//
// dfeval - statistical evaluation toolkit for direction-finding antennas
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "dfeval/flightreplay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "dfeval/evaluation.hpp"

namespace dfeval {

std::vector<DoaPair> replay_track(const std::vector<TrackSample>& samples, const PortSet& ports,
                                  const DoaGrid& candidate_grid) {
    std::vector<DoaPair> pairs;
    pairs.reserve(samples.size());
    CandidateSet candidates;
    bool have_candidates = false;
    for (const auto& s : samples) {
        DoaPair p;
        p.true_doa = s.true_doa;
        if (s.estimated) {
            p.estimated_doa = *s.estimated;
        } else if (s.steering) {
            if (!have_candidates) {
                candidates = build_candidates(ports, candidate_grid);
                have_candidates = true;
            }
            const NoiseSubspace sub = noise_subspace(covariance(*s.steering));
            p.estimated_doa = estimate_doa(candidates, sub).direction;
        } else {
            throw std::invalid_argument("replay_track: sample has neither estimate nor steering");
        }
        pairs.push_back(p);
    }
    return pairs;
}

std::pair<std::vector<DoaPair>, double> apply_azimuth_offset(const std::vector<DoaPair>& pairs) {
    if (pairs.empty())
        throw std::invalid_argument("apply_azimuth_offset: empty track");
    std::vector<double> errors;
    errors.reserve(pairs.size());
    for (const auto& p : pairs)
        errors.push_back(azimuth_error(p.estimated_doa.phi_deg, p.true_doa.phi_deg));

    // Start from the circular mean, then refine until the linear mean of the
    // wrapped residuals vanishes. Near the +-180 boundary the circular mean
    // alone does not null the linear mean.
    double offset = circular_mean_deg(errors);
    for (int iter = 0; iter < 64; ++iter) {
        double mean = 0.0;
        for (double e : errors)
            mean += azimuth_error(e, offset);
        mean /= static_cast<double>(errors.size());
        if (std::abs(mean) < 1e-12)
            break;
        offset += mean;
    }
    offset = azimuth_error(offset, 0.0);

    std::vector<DoaPair> corrected = pairs;
    for (auto& p : corrected)
        p.estimated_doa.phi_deg = Direction::normalize_phi(p.estimated_doa.phi_deg - offset);
    return {std::move(corrected), offset};
}

TrackReport filtered_stats(const std::vector<DoaPair>& pairs,
                           double azimuth_outlier_threshold_deg) {
    if (pairs.empty())
        throw std::invalid_argument("filtered_stats: empty track");
    TrackReport r;
    r.outlier_threshold_deg = azimuth_outlier_threshold_deg;
    for (const auto& p : pairs) {
        r.az_errors_deg.push_back(azimuth_error(p.estimated_doa.phi_deg, p.true_doa.phi_deg));
        r.el_errors_deg.push_back(p.estimated_doa.theta_deg - p.true_doa.theta_deg);
    }
    r.rmse_az = rmse(r.az_errors_deg);
    r.rmse_el = rmse(r.el_errors_deg);
    std::vector<double> abs_az, abs_el, kept;
    for (double e : r.az_errors_deg) {
        abs_az.push_back(std::abs(e));
        if (std::abs(e) <= azimuth_outlier_threshold_deg)
            kept.push_back(e);
    }
    for (double e : r.el_errors_deg)
        abs_el.push_back(std::abs(e));
    r.median_abs_az = median(abs_az);
    r.median_abs_el = median(abs_el);
    r.excluded_fraction =
        static_cast<double>(pairs.size() - kept.size()) / static_cast<double>(pairs.size());
    if (kept.empty())
        r.filtered_absent_reason = "all samples excluded";
    else
        r.filtered_rmse_az = rmse(kept);
    return r;
}

BoxStats box_stats(std::vector<double> values) {
    BoxStats b;
    b.count = values.size();
    if (values.empty())
        return b;
    std::sort(values.begin(), values.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = static_cast<std::size_t>(std::ceil(pos));
        const double w = pos - std::floor(pos);
        return values[lo] * (1.0 - w) + values[hi] * w;
    };
    b.median = quantile(0.5);
    b.q1 = quantile(0.25);
    b.q3 = quantile(0.75);
    const double iqr = b.q3 - b.q1;
    const double fence_lo = b.q1 - 1.5 * iqr;
    const double fence_hi = b.q3 + 1.5 * iqr;
    b.whisker_lo = b.median;
    b.whisker_hi = b.median;
    bool any_in = false;
    for (double v : values) {
        if (v < fence_lo || v > fence_hi) {
            b.outliers.push_back(v);
        } else {
            if (!any_in) {
                b.whisker_lo = v;
                any_in = true;
            }
            b.whisker_hi = v;
        }
    }
    return b;
}

std::vector<double> default_elevation_bins() {
    return {0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0};
}

std::vector<BinSummary> elevation_binned_boxplots(const std::vector<DoaPair>& pairs,
                                                  const std::vector<double>& bin_edges_deg) {
    if (bin_edges_deg.size() < 2)
        throw std::invalid_argument("elevation_binned_boxplots: need at least 2 bin edges");
    for (std::size_t i = 1; i < bin_edges_deg.size(); ++i)
        if (bin_edges_deg[i] <= bin_edges_deg[i - 1])
            throw std::invalid_argument("elevation_binned_boxplots: bin edges must ascend");
    if (bin_edges_deg.front() < 0.0 || bin_edges_deg.back() > 90.0)
        throw std::invalid_argument("elevation_binned_boxplots: bin edges must lie in [0, 90]");

    const std::size_t n_bins = bin_edges_deg.size() - 1;
    std::vector<std::vector<double>> az(n_bins), el(n_bins);
    for (const auto& p : pairs) {
        const double theta = p.true_doa.theta_deg;
        for (std::size_t b = 0; b < n_bins; ++b) {
            const bool last = b + 1 == n_bins;
            if (theta >= bin_edges_deg[b] &&
                (theta < bin_edges_deg[b + 1] || (last && theta <= bin_edges_deg[b + 1]))) {
                az[b].push_back(azimuth_error(p.estimated_doa.phi_deg, p.true_doa.phi_deg));
                el[b].push_back(p.estimated_doa.theta_deg - p.true_doa.theta_deg);
                break;
            }
        }
    }
    std::vector<BinSummary> bins(n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) {
        bins[b].lo_deg = bin_edges_deg[b];
        bins[b].hi_deg = bin_edges_deg[b + 1];
        bins[b].count = az[b].size();
        bins[b].azimuth = box_stats(std::move(az[b]));
        bins[b].elevation = box_stats(std::move(el[b]));
    }
    return bins;
}

Track load_track_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("track file: cannot open " + path);
    Track track;
    bool mode_seen = false;
    bool header_seen = false;
    std::string line;
    double last_ts = 0.0;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            if (line.rfind("#mode=", 0) == 0) {
                std::string rest = line.substr(6);
                const auto comma = rest.find(',');
                std::string mode = rest.substr(0, comma);
                if (mode == "steering")
                    track.steering_mode = true;
                else if (mode == "estimated")
                    track.steering_mode = false;
                else
                    throw std::runtime_error("track file: unknown mode '" + mode + "'");
                if (comma != std::string::npos) {
                    std::string p = rest.substr(comma + 1);
                    if (p.rfind("P=", 0) != 0)
                        throw std::runtime_error("track file: malformed mode header");
                    track.port_count = std::stoul(p.substr(2));
                }
                if (track.steering_mode && track.port_count < 2)
                    throw std::runtime_error("track file: steering mode requires P>=2");
                mode_seen = true;
            }
            continue;
        }
        if (!mode_seen)
            throw std::runtime_error("track file: missing #mode header");
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::vector<double> f;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ','))
            f.push_back(std::stod(field));
        const std::size_t expected = track.steering_mode ? 3 + 2 * track.port_count : 5;
        if (f.size() != expected)
            throw std::runtime_error("track file: wrong field count in row: " + line);
        TrackSample s;
        s.timestamp = f[0];
        s.true_doa = Direction(f[1], f[2]);
        if (track.steering_mode) {
            SteeringVector x;
            x.entries.resize(static_cast<Eigen::Index>(track.port_count));
            for (std::size_t p = 0; p < track.port_count; ++p)
                x.entries[static_cast<Eigen::Index>(p)] = cplx(f[3 + 2 * p], f[4 + 2 * p]);
            x.noisy = true;
            s.steering = std::move(x);
        } else {
            s.estimated = Direction(f[3], f[4]);
        }
        if (!track.samples.empty() && s.timestamp <= last_ts)
            throw std::runtime_error("track file: timestamps must strictly increase");
        last_ts = s.timestamp;
        track.samples.push_back(std::move(s));
    }
    if (track.samples.empty())
        throw std::runtime_error("track file: no samples in " + path);
    return track;
}

namespace {

nlohmann::ordered_json box_json(const BoxStats& b) {
    nlohmann::ordered_json j;
    j["count"] = b.count;
    j["median"] = b.median;
    j["q1"] = b.q1;
    j["q3"] = b.q3;
    j["whisker_lo"] = b.whisker_lo;
    j["whisker_hi"] = b.whisker_hi;
    j["outliers"] = b.outliers;
    return j;
}

} // namespace

void write_track_report_json(const TrackReport& report, const std::string& path,
                             const std::string& config_echo) {
    nlohmann::ordered_json j;
    if (!config_echo.empty())
        j["config"] = config_echo;
    j["azimuth_offset_deg"] = report.offset_deg;
    j["outlier_threshold_deg"] = report.outlier_threshold_deg;
    j["samples"] = report.az_errors_deg.size();
    j["rmse_az_deg"] = report.rmse_az;
    j["rmse_el_deg"] = report.rmse_el;
    j["median_abs_az_deg"] = report.median_abs_az;
    j["median_abs_el_deg"] = report.median_abs_el;
    j["excluded_fraction"] = report.excluded_fraction;
    if (report.filtered_rmse_az)
        j["filtered_rmse_az_deg"] = *report.filtered_rmse_az;
    else
        j["filtered_rmse_az_deg_absent"] = report.filtered_absent_reason;
    nlohmann::ordered_json bins = nlohmann::ordered_json::array();
    for (const auto& b : report.bins) {
        nlohmann::ordered_json jb;
        jb["lo_deg"] = b.lo_deg;
        jb["hi_deg"] = b.hi_deg;
        jb["count"] = b.count;
        jb["azimuth"] = box_json(b.azimuth);
        jb["elevation"] = box_json(b.elevation);
        bins.push_back(jb);
    }
    j["elevation_bins"] = bins;
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_track_report_json: cannot write " + path);
    out << j.dump(2) << "\n";
}

void write_track_bins_csv(const TrackReport& report, const std::string& path,
                          const std::string& config_echo) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_track_bins_csv: cannot write " + path);
    if (!config_echo.empty())
        out << "# config " << config_echo << "\n";
    out << "bin_lo_deg,bin_hi_deg,count,angle,median,q1,q3,whisker_lo,whisker_hi,outliers\n";
    char buf[256];
    auto emit = [&](const BinSummary& b, const char* angle, const BoxStats& s) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%zu,%s,%.9g,%.9g,%.9g,%.9g,%.9g,%zu\n",
                      b.lo_deg, b.hi_deg, b.count, angle, s.median, s.q1, s.q3, s.whisker_lo,
                      s.whisker_hi, s.outliers.size());
        out << buf;
    };
    for (const auto& b : report.bins) {
        emit(b, "azimuth", b.azimuth);
        emit(b, "elevation", b.elevation);
    }
}

} // namespace dfeval
