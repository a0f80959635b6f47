// SPDX-License-Identifier: Apache-2.0
//
// dfeval - statistical evaluation toolkit for direction-finding antennas
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include <doctest.h>

#include <Eigen/Dense>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "dfeval/patterns.hpp"
#include "dfeval/rng.hpp"

using namespace dfeval;

namespace {

std::string temp_file(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_SUITE("patterns") {

TEST_CASE("fourier pattern closed-form values") {
    CHECK(fourier_pattern(0).evaluate({37.0, 123.0}).e_theta == cplx(1.0, 0.0));
    CHECK(std::abs(fourier_pattern(1).evaluate({45.0, 90.0}).e_theta - cplx(0.0, 1.0)) < 1e-12);
    CHECK(std::abs(fourier_pattern(2).evaluate({10.0, 45.0}).e_theta - cplx(0.0, 1.0)) < 1e-12);
    CHECK(std::abs(fourier_pattern(1).evaluate({45.0, 180.0}).e_theta - cplx(-1.0, 0.0)) <
          1e-12);
    CHECK_THROWS_AS(fourier_pattern(-1), std::invalid_argument);
}

TEST_CASE("fourier patterns are unit-magnitude theta-polarized everywhere") {
    Rng rng(11);
    for (int p = 0; p < 4; ++p) {
        auto pat = fourier_pattern(p);
        for (int k = 0; k < 200; ++k) {
            Direction d(180.0 * rng.next_uniform(), 360.0 * rng.next_uniform());
            auto s = pat.evaluate(d);
            CHECK(std::abs(std::abs(s.e_theta) - 1.0) < 1e-12);
            CHECK(std::abs(s.e_phi) < 1e-12);
        }
    }
}

TEST_CASE("fourier cross-pattern phase is (p-q)*phi") {
    Rng rng(12);
    for (int k = 0; k < 200; ++k) {
        const int p = static_cast<int>(rng.next_u64() % 5);
        const int q = static_cast<int>(rng.next_u64() % 5);
        Direction d(90.0 * rng.next_uniform(), 360.0 * rng.next_uniform());
        const cplx prod =
            fourier_pattern(p).evaluate(d).e_theta * std::conj(fourier_pattern(q).evaluate(d).e_theta);
        double dphase = std::arg(prod) - std::fmod(static_cast<double>(p - q) * d.phi_rad(), 2 * kPi);
        dphase = std::remainder(dphase, 2 * kPi);
        CHECK(std::abs(dphase) < 1e-9);
    }
}

TEST_CASE("fourier port set orders and steering independence") {
    PortSet p3 = fourier_port_set(3);
    REQUIRE(p3.port_count() == 3);
    CHECK(p3.patterns[0].order() == 0);
    CHECK(p3.patterns[1].order() == 1);
    CHECK(p3.patterns[2].order() == 2);

    PortSet p2 = fourier_port_set(2);
    CHECK(p2.patterns[0].order() == 0);
    CHECK(p2.patterns[1].order() == 1);

    CHECK_THROWS_AS(fourier_port_set(1), std::invalid_argument);

    // Gram-matrix rank oracle: pattern functions sampled over many
    // directions must be pairwise linearly independent.
    Rng rng(13);
    Eigen::MatrixXcd m(3, 120);
    for (int k = 0; k < 120; ++k) {
        Direction d(90.0 * rng.next_uniform(), 360.0 * rng.next_uniform());
        for (int p = 0; p < 3; ++p)
            m(p, k) = p3.patterns[static_cast<std::size_t>(p)].evaluate(d).e_theta;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    CHECK(svd.singularValues()(2) > 1.0);
}

TEST_CASE("monopole pattern") {
    auto m = monopole_pattern();
    CHECK(std::abs(std::abs(m.evaluate({90.0, 271.0}).e_theta) - 1.0) < 1e-12);
    CHECK(std::abs(m.evaluate({0.0, 0.0}).e_theta) < 1e-12);
    CHECK(std::abs(std::abs(m.evaluate({30.0, 10.0}).e_theta) - 0.5) < 1e-12);
    CHECK(std::abs(m.evaluate({45.0, 0.0}).e_phi) == 0.0);
}

TEST_CASE("magnetic dipole pattern") {
    auto dx = magnetic_dipole_pattern({1.0, 0.0, 0.0});
    auto dy = magnetic_dipole_pattern({0.0, 1.0, 0.0});
    CHECK(std::abs(std::abs(dx.evaluate({90.0, 0.0}).e_theta) - 1.0) < 1e-12);

    Rng rng(14);
    for (int k = 0; k < 100; ++k) {
        Direction d(90.0 * rng.next_uniform(), 360.0 * rng.next_uniform());
        Direction rot(d.theta_deg, d.phi_deg + 90.0);
        CHECK(std::abs(dx.evaluate(d).e_theta - dy.evaluate(rot).e_theta) < 1e-12);
        // peak normalization bound
        CHECK(std::abs(dx.evaluate(d).e_theta) <= 1.0 + 1e-12);
    }

    CHECK_THROWS_AS(magnetic_dipole_pattern({0.0, 0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(magnetic_dipole_pattern({0.5, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("bilinear interpolation identities") {
    // 2x2-cell lattice with known complex corner values.
    SampledLattice L;
    L.theta_min_deg = 0.0;
    L.theta_step_deg = 30.0;
    L.theta_count = 3;
    L.phi_step_deg = 90.0;
    L.phi_count = 4;
    L.samples.resize(12);
    Rng rng(15);
    for (auto& s : L.samples) {
        s.e_theta = {rng.next_uniform(), rng.next_uniform()};
        s.e_phi = {rng.next_uniform(), rng.next_uniform()};
    }
    auto pat = FarFieldPattern::sampled(L);

    SUBCASE("exact on lattice nodes") {
        for (std::size_t it = 0; it < 3; ++it)
            for (std::size_t ip = 0; ip < 4; ++ip) {
                Direction d(30.0 * static_cast<double>(it), 90.0 * static_cast<double>(ip));
                CHECK(std::abs(pat.evaluate(d).e_theta - L.at(it, ip).e_theta) < 1e-12);
                CHECK(std::abs(pat.evaluate(d).e_phi - L.at(it, ip).e_phi) < 1e-12);
            }
    }
    SUBCASE("cell midpoint is the mean of the 4 corners") {
        const cplx mean = 0.25 * (L.at(0, 0).e_theta + L.at(0, 1).e_theta + L.at(1, 0).e_theta +
                                  L.at(1, 1).e_theta);
        CHECK(std::abs(pat.evaluate({15.0, 45.0}).e_theta - mean) < 1e-12);
    }
    SUBCASE("azimuth wrap-around uses the 0/360 seam") {
        const cplx mean = 0.25 * (L.at(0, 3).e_theta + L.at(0, 0).e_theta + L.at(1, 3).e_theta +
                                  L.at(1, 0).e_theta);
        CHECK(std::abs(pat.evaluate({15.0, 315.0}).e_theta - mean) < 1e-12);
    }
    SUBCASE("theta outside sampled range is rejected") {
        CHECK_THROWS_AS(pat.evaluate({75.0, 0.0}), std::out_of_range);
    }
}

TEST_CASE("interpolated magnitude bounded by surrounding nodes") {
    PortSet sampled = sample_port_set(cupola_analytic_port_set(), 15.0);
    const auto& pat = sampled.patterns[0]; // monopole: real nonnegative samples
    const SampledLattice& L = pat.lattice();
    Rng rng(16);
    for (int k = 0; k < 300; ++k) {
        const double theta = 90.0 * rng.next_uniform();
        const double phi = 360.0 * rng.next_uniform();
        const double v = std::abs(pat.evaluate({theta, phi}).e_theta);
        const auto it0 = std::min<std::size_t>(static_cast<std::size_t>(theta / 15.0),
                                               L.theta_count - 2);
        const auto ip0 = static_cast<std::size_t>(phi / 15.0) % L.phi_count;
        const auto ip1 = (ip0 + 1) % L.phi_count;
        double lo = 1e300, hi = -1e300;
        for (std::size_t it : {it0, it0 + 1})
            for (std::size_t ip : {ip0, ip1}) {
                lo = std::min(lo, std::abs(L.at(it, ip).e_theta));
                hi = std::max(hi, std::abs(L.at(it, ip).e_theta));
            }
        CHECK(v >= lo - 1e-12);
        CHECK(v <= hi + 1e-12);
    }
}

TEST_CASE("pattern file round trip") {
    const std::string path = temp_file("dfeval_patterns_rt.csv");
    PortSet sampled = sample_port_set(fourier_port_set(3), 15.0);
    save_pattern_file(sampled, path, {"config kind=fourier:3 step=15"});
    PortSet loaded = load_pattern_file(path, 3);
    REQUIRE(loaded.port_count() == 3);
    for (std::size_t p = 0; p < 3; ++p) {
        const SampledLattice& a = sampled.patterns[p].lattice();
        const SampledLattice& b = loaded.patterns[p].lattice();
        REQUIRE(a.same_grid(b));
        for (std::size_t i = 0; i < a.samples.size(); ++i) {
            CHECK(std::abs(a.samples[i].e_theta - b.samples[i].e_theta) < 1e-11);
            CHECK(std::abs(a.samples[i].e_phi - b.samples[i].e_phi) < 1e-11);
        }
    }
    std::filesystem::remove(path);
}

TEST_CASE("pattern file validation failures") {
    const std::string path = temp_file("dfeval_patterns_bad.csv");
    PortSet sampled = sample_port_set(fourier_port_set(2), 30.0);
    save_pattern_file(sampled, path);

    SUBCASE("missing lattice point") {
        std::ifstream in(path);
        std::string all, line;
        int n = 0;
        while (std::getline(in, line)) {
            ++n;
            if (n == 5)
                continue; // drop one data row
            all += line + "\n";
        }
        in.close();
        std::ofstream(path) << all;
        CHECK_THROWS_WITH_AS(static_cast<void>(load_pattern_file(path)),
                             doctest::Contains("incomplete lattice"), std::runtime_error);
    }
    SUBCASE("NaN sample") {
        std::ofstream out(path, std::ios::app);
        out << "1,45,30,nan,0,0,0\n";
        out.close();
        CHECK_THROWS_WITH_AS(static_cast<void>(load_pattern_file(path)),
                             doctest::Contains("non-finite"), std::runtime_error);
    }
    SUBCASE("wrong port count expectation") {
        CHECK_THROWS_AS(static_cast<void>(load_pattern_file(path, 5)), std::runtime_error);
    }
    std::filesystem::remove(path);
}

} // TEST_SUITE
