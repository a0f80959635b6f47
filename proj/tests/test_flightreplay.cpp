// SPDX-License-Identifier: Apache-2.0
//
// dfeval - statistical evaluation toolkit for direction-finding antennas
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "dfeval/flightreplay.hpp"
#include "dfeval/rng.hpp"

using namespace dfeval;

namespace {

std::vector<DoaPair> pairs_with_az_errors(const std::vector<double>& errors) {
    std::vector<DoaPair> pairs;
    for (double e : errors) {
        DoaPair p;
        p.true_doa = Direction(45.0, 100.0);
        p.estimated_doa = Direction(45.0, Direction::normalize_phi(100.0 + e));
        pairs.push_back(p);
    }
    return pairs;
}

} // namespace

TEST_SUITE("flightreplay") {

TEST_CASE("replay passes pre-estimated samples through") {
    std::vector<TrackSample> samples;
    for (int k = 0; k < 5; ++k) {
        TrackSample s;
        s.timestamp = k;
        s.true_doa = Direction(40.0 + k, 10.0 * k);
        s.estimated = Direction(42.0 + k, 10.0 * k + 3.0);
        samples.push_back(s);
    }
    auto pairs = replay_track(samples, PortSet{}, DoaGrid{});
    REQUIRE(pairs.size() == 5);
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(pairs[k].estimated_doa.theta_deg == samples[k].estimated->theta_deg);
        CHECK(pairs[k].estimated_doa.phi_deg == samples[k].estimated->phi_deg);
    }
}

TEST_CASE("replay estimates steering samples on the candidate lattice") {
    PortSet ports = cupola_analytic_port_set();
    DoaGrid grid = equiangular_grid(5.0);
    std::vector<TrackSample> samples;
    for (int k = 0; k < 8; ++k) {
        TrackSample s;
        s.timestamp = k;
        s.true_doa = Direction(30.0 + 5.0 * k, 35.0 * k); // on the 5-degree lattice
        s.steering = steering_vector(ports, s.true_doa);
        samples.push_back(s);
    }
    auto pairs = replay_track(samples, ports, grid);
    for (const auto& p : pairs) {
        // noise-free samples on grid points come back exactly
        CHECK(great_circle_error(p.true_doa, p.estimated_doa) == 0.0);
        // estimates always lie on the lattice
        CHECK(std::fmod(p.estimated_doa.theta_deg, 5.0) == 0.0);
        CHECK(std::fmod(p.estimated_doa.phi_deg, 5.0) == 0.0);
    }
}

TEST_CASE("azimuth offset correction") {
    SUBCASE("constant +8.6 deg error is fully removed") {
        auto pairs = pairs_with_az_errors(std::vector<double>(10, 8.6));
        auto [corrected, offset] = apply_azimuth_offset(pairs);
        CHECK(offset == doctest::Approx(8.6).epsilon(1e-9));
        for (const auto& p : corrected)
            CHECK(std::abs(azimuth_error(p.estimated_doa.phi_deg, p.true_doa.phi_deg)) < 1e-9);
    }
    SUBCASE("zero-mean errors leave the track unchanged") {
        auto pairs = pairs_with_az_errors({-5.0, 5.0, -10.0, 10.0});
        auto [corrected, offset] = apply_azimuth_offset(pairs);
        CHECK(std::abs(offset) < 1e-9);
        for (std::size_t k = 0; k < pairs.size(); ++k)
            CHECK(std::abs(corrected[k].estimated_doa.phi_deg - pairs[k].estimated_doa.phi_deg) <
                  1e-9);
    }
    SUBCASE("wrap boundary handled circularly") {
        // Linear averaging of {+170, -170} would give 0 and correct nothing;
        // the circular mean is +-180 and the corrected errors are +-10.
        auto pairs = pairs_with_az_errors({170.0, -170.0});
        auto [corrected, offset] = apply_azimuth_offset(pairs);
        CHECK(std::abs(std::abs(offset) - 180.0) < 1e-9);
        for (const auto& p : corrected)
            CHECK(std::abs(azimuth_error(p.estimated_doa.phi_deg, p.true_doa.phi_deg)) ==
                  doctest::Approx(10.0).epsilon(1e-9));
    }
    SUBCASE("post-correction mean is zero for random tracks") {
        Rng rng(51);
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<double> errors;
            for (int k = 0; k < 37; ++k)
                errors.push_back(360.0 * rng.next_uniform() - 180.0);
            auto [corrected, offset] = apply_azimuth_offset(pairs_with_az_errors(errors));
            double mean = 0.0;
            for (const auto& p : corrected)
                mean += azimuth_error(p.estimated_doa.phi_deg, p.true_doa.phi_deg);
            mean /= static_cast<double>(corrected.size());
            CHECK(std::abs(mean) < 1e-9);
        }
    }
    SUBCASE("empty track rejected") {
        CHECK_THROWS_AS(static_cast<void>(apply_azimuth_offset({})), std::invalid_argument);
    }
}

TEST_CASE("filtered statistics") {
    SUBCASE("all-zero errors") {
        TrackReport r = filtered_stats(pairs_with_az_errors(std::vector<double>(10, 0.0)));
        CHECK(r.rmse_az == 0.0);
        CHECK(r.median_abs_az == 0.0);
        CHECK(r.excluded_fraction == 0.0);
        REQUIRE(r.filtered_rmse_az.has_value());
        CHECK(*r.filtered_rmse_az == 0.0);
    }
    SUBCASE("synthetic outlier population reproduces the pooled-RMSE identity") {
        // 98.5% of samples at |error| 11.6 deg, 1.5% outliers at the
        // magnitude M solving 20.4^2 = 0.985*11.6^2 + 0.015*M^2.
        const double m = std::sqrt((20.4 * 20.4 - 0.985 * 11.6 * 11.6) / 0.015);
        std::vector<double> errors;
        for (int k = 0; k < 985; ++k)
            errors.push_back(k % 2 == 0 ? 11.6 : -11.6);
        for (int k = 0; k < 15; ++k)
            errors.push_back(m);
        TrackReport r = filtered_stats(pairs_with_az_errors(errors), 90.0);
        CHECK(r.rmse_az == doctest::Approx(20.4).epsilon(1e-9));
        REQUIRE(r.filtered_rmse_az.has_value());
        CHECK(*r.filtered_rmse_az == doctest::Approx(11.6).epsilon(1e-9));
        CHECK(r.excluded_fraction == doctest::Approx(0.015).epsilon(1e-12));
        CHECK(*r.filtered_rmse_az <= r.rmse_az);
    }
    SUBCASE("single excluded pair reports absence") {
        TrackReport r = filtered_stats(pairs_with_az_errors({100.0}), 90.0);
        CHECK(r.excluded_fraction == 1.0);
        CHECK_FALSE(r.filtered_rmse_az.has_value());
        CHECK(r.filtered_absent_reason == "all samples excluded");
    }
}

TEST_CASE("box statistics") {
    SUBCASE("known small population with the linear-interpolation rule") {
        BoxStats b = box_stats({1.0, 2.0, 3.0, 4.0, 100.0});
        CHECK(b.median == 3.0);
        CHECK(b.q1 == 2.0);
        CHECK(b.q3 == 4.0);
        REQUIRE(b.outliers.size() == 1);
        CHECK(b.outliers[0] == 100.0);
        CHECK(b.whisker_hi == 4.0);
        CHECK(b.whisker_lo == 1.0);
    }
    SUBCASE("constant population has zero IQR and no outliers") {
        BoxStats b = box_stats(std::vector<double>(20, 7.0));
        CHECK(b.q3 - b.q1 == 0.0);
        CHECK(b.outliers.empty());
        CHECK(b.median == 7.0);
    }
    SUBCASE("gaussian outlier fraction matches the whisker rule") {
        Rng rng(52);
        std::vector<double> v(10000);
        for (auto& x : v)
            x = rng.next_normal();
        BoxStats b = box_stats(v);
        const double frac = static_cast<double>(b.outliers.size()) / 10000.0;
        CHECK(std::abs(frac - 0.007) < 0.005);
    }
}

TEST_CASE("elevation-binned box plots") {
    std::vector<DoaPair> pairs;
    Rng rng(53);
    for (int k = 0; k < 500; ++k) {
        DoaPair p;
        p.true_doa = Direction(90.0 * rng.next_uniform(), 360.0 * rng.next_uniform());
        p.estimated_doa = Direction(
            std::clamp(p.true_doa.theta_deg + 4.0 * rng.next_normal(), 0.0, 90.0),
            Direction::normalize_phi(p.true_doa.phi_deg + 6.0 * rng.next_normal()));
        pairs.push_back(p);
    }
    auto bins = elevation_binned_boxplots(pairs, default_elevation_bins());
    REQUIRE(bins.size() == 9);
    std::size_t total = 0;
    for (const auto& b : bins) {
        total += b.count;
        CHECK(b.azimuth.count == b.count);
        CHECK(b.elevation.count == b.count);
        if (b.count > 0)
            CHECK(b.azimuth.q1 <= b.azimuth.q3);
    }
    CHECK(total == pairs.size());

    SUBCASE("empty bin reported with count 0") {
        auto narrow = elevation_binned_boxplots(pairs_with_az_errors({1.0}), {0.0, 10.0, 90.0});
        CHECK(narrow[0].count == 0); // true theta 45 falls in the second bin
        CHECK(narrow[1].count == 1);
    }
    SUBCASE("invalid edges rejected") {
        CHECK_THROWS_AS(static_cast<void>(elevation_binned_boxplots(pairs, {10.0, 5.0})),
                        std::invalid_argument);
        CHECK_THROWS_AS(static_cast<void>(elevation_binned_boxplots(pairs, {0.0, 95.0})),
                        std::invalid_argument);
    }
}

TEST_CASE("track csv ingestion") {
    namespace fs = std::filesystem;
    const std::string path = (fs::temp_directory_path() / "dfeval_track.csv").string();

    SUBCASE("estimated mode") {
        std::ofstream(path) << "#mode=estimated\n"
                               "timestamp,true_theta_deg,true_phi_deg,est_theta_deg,est_phi_deg\n"
                               "0.0,40,10,41,12\n"
                               "1.0,45,20,44,19\n";
        Track t = load_track_csv(path);
        CHECK_FALSE(t.steering_mode);
        REQUIRE(t.samples.size() == 2);
        CHECK(t.samples[1].estimated->phi_deg == 19.0);
    }
    SUBCASE("steering mode") {
        std::ofstream(path)
            << "#mode=steering,P=3\n"
               "timestamp,true_theta_deg,true_phi_deg,re_x1,im_x1,re_x2,im_x2,re_x3,im_x3\n"
               "0.0,40,10,1,0,0.5,0.5,0,-1\n";
        Track t = load_track_csv(path);
        CHECK(t.steering_mode);
        CHECK(t.port_count == 3);
        REQUIRE(t.samples.size() == 1);
        CHECK(t.samples[0].steering->entries[2] == cplx(0.0, -1.0));
    }
    SUBCASE("missing mode header rejected") {
        std::ofstream(path) << "timestamp,true_theta_deg,true_phi_deg,est_theta_deg,est_phi_deg\n"
                               "0.0,40,10,41,12\n";
        CHECK_THROWS_WITH_AS(static_cast<void>(load_track_csv(path)),
                             doctest::Contains("#mode"), std::runtime_error);
    }
    SUBCASE("non-increasing timestamps rejected") {
        std::ofstream(path) << "#mode=estimated\n"
                               "timestamp,true_theta_deg,true_phi_deg,est_theta_deg,est_phi_deg\n"
                               "1.0,40,10,41,12\n"
                               "1.0,45,20,44,19\n";
        CHECK_THROWS_WITH_AS(static_cast<void>(load_track_csv(path)),
                             doctest::Contains("timestamps"), std::runtime_error);
    }
    fs::remove(path);
}

} // TEST_SUITE
