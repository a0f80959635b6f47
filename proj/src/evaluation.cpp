// SPDX-License-Identifier: Apache-2.0
//
// dfeval - statistical evaluation toolkit for direction-finding antennas
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "dfeval/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "dfeval/rng.hpp"

namespace dfeval {

double rmse(const std::vector<double>& errors_deg) {
    if (errors_deg.empty())
        throw std::invalid_argument("rmse: empty input");
    double ss = 0.0;
    for (double e : errors_deg)
        ss += e * e;
    return std::sqrt(ss / static_cast<double>(errors_deg.size()));
}

double median(std::vector<double> values) {
    if (values.empty())
        throw std::invalid_argument("median: empty input");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1)
        return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

std::size_t histogram_bin_count(double bin_deg) {
    return static_cast<std::size_t>(std::ceil(180.0 / bin_deg));
}

void fill_doa_stats(DoaStats& st, const std::vector<TrialResult>& trials, double bin_deg) {
    st.trials = trials.size();
    std::vector<double> az, el, gc;
    az.reserve(trials.size());
    el.reserve(trials.size());
    gc.reserve(trials.size());
    for (const auto& t : trials) {
        az.push_back(t.azimuth_error_deg);
        el.push_back(t.elevation_error_deg);
        gc.push_back(t.great_circle_error_deg);
    }
    st.rmse_az = rmse(az);
    st.rmse_el = rmse(el);
    st.rmse_gc = rmse(gc);
    for (auto& v : az)
        v = std::abs(v);
    for (auto& v : el)
        v = std::abs(v);
    st.median_abs_az = median(az);
    st.median_abs_el = median(el);
    st.histogram.assign(histogram_bin_count(bin_deg), 0);
    for (double e : gc) {
        auto bin = static_cast<std::size_t>(e / bin_deg);
        if (bin >= st.histogram.size())
            bin = st.histogram.size() - 1;
        ++st.histogram[bin];
    }
}

} // namespace

EvalReport run_monte_carlo(const PortSet& ports, const DoaGrid& true_grid,
                           const DoaGrid& candidate_grid, const MonteCarloConfig& config) {
    if (config.trials_per_doa < 1)
        throw std::invalid_argument("run_monte_carlo: trials_per_doa must be >= 1");
    if (true_grid.size() == 0 || candidate_grid.size() == 0)
        throw std::invalid_argument("run_monte_carlo: empty grid");
    if (config.snapshots < 1)
        throw std::invalid_argument("run_monte_carlo: snapshots must be >= 1");

    const CandidateSet candidates = build_candidates(ports, candidate_grid);
    const std::size_t n_doa = true_grid.size();

    struct DoaSlot {
        bool skipped = false;
        std::vector<TrialResult> trials;
    };
    std::vector<DoaSlot> slots(n_doa);

    auto run_doa = [&](std::size_t i) {
        const Direction& truth = true_grid.directions[i];
        SteeringVector clean = steering_vector(ports, truth);
        if (clean.entries.norm() <= 0.0) {
            slots[i].skipped = true;
            return;
        }
        auto& trials = slots[i].trials;
        trials.reserve(config.trials_per_doa);
        for (std::size_t t = 0; t < config.trials_per_doa; ++t) {
            const std::uint64_t seed = Rng::derive_seed(config.master_seed, i, t);
            NoiseSubspace sub;
            if (config.snapshots == 1) {
                sub = noise_subspace(covariance(add_noise(clean, config.snr_db, seed)));
            } else {
                std::vector<SteeringVector> snaps;
                snaps.reserve(config.snapshots);
                for (std::size_t s = 0; s < config.snapshots; ++s)
                    snaps.push_back(
                        add_noise(clean, config.snr_db, Rng::derive_seed(seed, s, 0x736e6170ULL)));
                sub = noise_subspace(covariance(snaps));
            }
            const DoaEstimate est = estimate_doa(candidates, sub);
            TrialResult r;
            r.true_doa = truth;
            r.estimated_doa = est.direction;
            r.azimuth_error_deg = azimuth_error(est.direction.phi_deg, truth.phi_deg);
            r.elevation_error_deg = est.direction.theta_deg - truth.theta_deg;
            r.great_circle_error_deg = great_circle_error(est.direction, truth);
            trials.push_back(r);
        }
    };

    const std::size_t workers = std::max<std::size_t>(1, config.workers);
    if (workers == 1 || n_doa == 1) {
        for (std::size_t i = 0; i < n_doa; ++i)
            run_doa(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < std::min(workers, n_doa); ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n_doa; i = next.fetch_add(1))
                    run_doa(i);
            });
        for (auto& th : pool)
            th.join();
    }

    EvalReport report;
    report.config = config;
    report.true_grid_label = true_grid.describe();
    report.candidate_grid_label = candidate_grid.describe();
    report.candidate_skipped = candidates.skipped;

    std::vector<double> all_az, all_el, all_gc;
    for (std::size_t i = 0; i < n_doa; ++i) {
        if (slots[i].skipped) {
            ++report.skipped_doas;
            continue;
        }
        DoaStats st;
        st.doa_index = i;
        st.doa = true_grid.directions[i];
        fill_doa_stats(st, slots[i].trials, config.histogram_bin_deg);
        report.per_doa.push_back(std::move(st));
        for (const auto& t : slots[i].trials) {
            all_az.push_back(t.azimuth_error_deg);
            all_el.push_back(t.elevation_error_deg);
            all_gc.push_back(t.great_circle_error_deg);
        }
        report.trials.push_back(std::move(slots[i].trials));
    }
    if (all_gc.empty())
        throw std::runtime_error("run_monte_carlo: every true DoA was skipped");

    report.rmse_az = rmse(all_az);
    report.rmse_el = rmse(all_el);
    report.rmse_gc = rmse(all_gc);
    double sum_az = 0.0, sum_el = 0.0, sum_gc = 0.0;
    for (std::size_t k = 0; k < all_az.size(); ++k) {
        all_az[k] = std::abs(all_az[k]);
        all_el[k] = std::abs(all_el[k]);
        sum_az += all_az[k];
        sum_el += all_el[k];
        sum_gc += all_gc[k];
    }
    const auto n_all = static_cast<double>(all_az.size());
    report.mean_abs_az = sum_az / n_all;
    report.mean_abs_el = sum_el / n_all;
    report.mean_abs_gc = sum_gc / n_all;
    report.median_abs_az = median(std::move(all_az));
    report.median_abs_el = median(std::move(all_el));
    report.median_abs_gc = median(std::move(all_gc));
    return report;
}

EvalReport run_monte_carlo_adaptive(const PortSet& ports, const DoaGrid& true_grid,
                                    const DoaGrid& candidate_grid, MonteCarloConfig config,
                                    double tol, std::size_t max_doublings) {
    EvalReport prev = run_monte_carlo(ports, true_grid, candidate_grid, config);
    for (std::size_t k = 0; k < max_doublings; ++k) {
        config.trials_per_doa *= 2;
        EvalReport cur = run_monte_carlo(ports, true_grid, candidate_grid, config);
        if (histogram_stability(prev, cur, tol))
            return cur;
        prev = std::move(cur);
    }
    return prev;
}

bool histogram_stability(const EvalReport& a, const EvalReport& b, double tol) {
    if (a.config.histogram_bin_deg != b.config.histogram_bin_deg ||
        a.per_doa.size() != b.per_doa.size())
        throw std::invalid_argument("histogram_stability: mismatched binning or DoA layout");
    double max_diff = 0.0;
    for (std::size_t i = 0; i < a.per_doa.size(); ++i) {
        const auto& ha = a.per_doa[i].histogram;
        const auto& hb = b.per_doa[i].histogram;
        if (ha.size() != hb.size())
            throw std::invalid_argument("histogram_stability: mismatched bin counts");
        const double na = static_cast<double>(a.per_doa[i].trials);
        const double nb = static_cast<double>(b.per_doa[i].trials);
        for (std::size_t j = 0; j < ha.size(); ++j)
            max_diff = std::max(max_diff, std::abs(static_cast<double>(ha[j]) / na -
                                                   static_cast<double>(hb[j]) / nb));
    }
    return max_diff < tol;
}

namespace {

nlohmann::ordered_json config_json(const EvalReport& r) {
    nlohmann::ordered_json j;
    j["ports"] = r.config.ports_label;
    j["true_grid"] = r.true_grid_label;
    j["candidate_grid"] = r.candidate_grid_label;
    j["snr_db"] = r.config.snr_db;
    j["trials_per_doa"] = r.config.trials_per_doa;
    j["master_seed"] = r.config.master_seed;
    j["snapshots"] = r.config.snapshots;
    j["histogram_bin_deg"] = r.config.histogram_bin_deg;
    j["keep_trials"] = r.config.keep_trials;
    return j;
}

std::string config_comment(const EvalReport& r) {
    return "config " + config_json(r).dump();
}

} // namespace

void write_report_json(const EvalReport& report, const std::string& path) {
    nlohmann::ordered_json j;
    j["config"] = config_json(report);
    j["skipped_doas"] = report.skipped_doas;
    j["candidate_skipped"] = report.candidate_skipped;
    j["rmse_az_deg"] = report.rmse_az;
    j["rmse_el_deg"] = report.rmse_el;
    j["rmse_gc_deg"] = report.rmse_gc;
    j["median_abs_az_deg"] = report.median_abs_az;
    j["median_abs_el_deg"] = report.median_abs_el;
    j["median_abs_gc_deg"] = report.median_abs_gc;
    j["mean_abs_az_deg"] = report.mean_abs_az;
    j["mean_abs_el_deg"] = report.mean_abs_el;
    j["mean_abs_gc_deg"] = report.mean_abs_gc;
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_report_json: cannot write " + path);
    out << j.dump(2) << "\n";
}

void write_report_csv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_report_csv: cannot write " + path);
    out << "# " << config_comment(report) << "\n";
    out << "doa_index,theta_deg,phi_deg,trials,rmse_az,rmse_el,rmse_gc,median_az,median_el\n";
    char buf[256];
    for (const auto& st : report.per_doa) {
        std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%zu,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                      st.doa_index, st.doa.theta_deg, st.doa.phi_deg, st.trials, st.rmse_az,
                      st.rmse_el, st.rmse_gc, st.median_abs_az, st.median_abs_el);
        out << buf;
    }
}

void write_histogram_csv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_histogram_csv: cannot write " + path);
    out << "# " << config_comment(report) << "\n";
    out << "doa_index,bin_lo_deg,bin_hi_deg,count\n";
    const double w = report.config.histogram_bin_deg;
    char buf[128];
    for (const auto& st : report.per_doa)
        for (std::size_t j = 0; j < st.histogram.size(); ++j) {
            std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%llu\n", st.doa_index,
                          w * static_cast<double>(j), w * static_cast<double>(j + 1),
                          static_cast<unsigned long long>(st.histogram[j]));
            out << buf;
        }
}

void write_trials_csv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_trials_csv: cannot write " + path);
    out << "# " << config_comment(report) << "\n";
    out << "doa_index,true_theta_deg,true_phi_deg,est_theta_deg,est_phi_deg,"
           "err_az_deg,err_el_deg,err_gc_deg\n";
    char buf[256];
    for (std::size_t i = 0; i < report.trials.size(); ++i)
        for (const auto& t : report.trials[i]) {
            std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                          report.per_doa[i].doa_index, t.true_doa.theta_deg, t.true_doa.phi_deg,
                          t.estimated_doa.theta_deg, t.estimated_doa.phi_deg,
                          t.azimuth_error_deg, t.elevation_error_deg, t.great_circle_error_deg);
            out << buf;
        }
}

} // namespace dfeval
