/*
 * Copyright 2026 The pqsense Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "pqs/detection.hpp"
#include "pqs/error.hpp"
#include "pqs/optics.hpp"
#include "pqs/quantum_source.hpp"

using Catch::Approx;
using namespace pqs;

namespace {

TwinBeamMoments g2() { return fwm_moments({.gain = 2.0, .seed_flux = 1.0}); }

// Random physical pair: an amplified seed with excess noise, then loss.
struct Tuple {
    TwinBeamMoments m;
    LossChannel ch;
    double g;
};

Tuple random_tuple(std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    FwmSourceParams p{.gain = 1.0 + 30.0 * u(rng), .seed_flux = 0.1 + 100.0 * u(rng),
                      .excess_correlated = 0.1 * u(rng), .excess_uncorrelated = 0.1 * u(rng)};
    const LossChannel pre{0.05 + 0.95 * u(rng), 0.05 + 0.95 * u(rng)};
    return {apply_loss(fwm_moments(p), pre), {0.05 + 0.95 * u(rng), 0.05 + 0.95 * u(rng)},
            3.0 * u(rng)};
}

} // namespace

TEST_CASE("coherent pair at unit gain gives the shot-noise level", "[detection]") {
    const auto c = TwinBeamMoments::coherent(3.0, 2.0);
    CHECK(difference_noise(c, {1.0, 1.0}, 1.0) == Approx(5.0));
    CHECK(snl_noise(3.0, 2.0, {1.0, 1.0}, 1.0) == Approx(5.0));
    CHECK(squeezing_report(c, {0.4, 0.7}, 1.0).ratio_linear == Approx(1.0));
}

TEST_CASE("zero gain keeps only the probe term", "[detection]") {
    const auto m = g2();
    const LossChannel ch{0.5, 0.9};
    CHECK(difference_noise(m, ch, 0.0) == Approx(0.25 * (6.0 - 2.0) + 0.5 * 2.0));
    CHECK(difference_noise(m, ch, 0.0) == Approx(probe_noise_term(m, ch)));
}

TEST_CASE("G=2 ideal noise, optimal gain and minimum", "[detection]") {
    const auto m = g2();
    CHECK(difference_noise(m, {1.0, 1.0}, 1.0) == Approx(1.0).epsilon(1e-14));
    CHECK(optimal_gain(m, {1.0, 1.0}) == Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(min_difference_noise(m, {1.0, 1.0}) == Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(covariance_from_noise(6.0, 3.0, 1.0) == 4.0);
    CHECK(covariance_from_noise(6.0, 3.0, 9.0) == 0.0);
}

TEST_CASE("g scan agrees with the closed-form optimum", "[detection]") {
    const auto m = g2();
    double best_g = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 30000; ++k) {
        const double g = 1e-4 * k;
        const double v = difference_noise(m, {1.0, 1.0}, g);
        if (v < best) {
            best = v;
            best_g = g;
        }
    }
    CHECK(best_g == Approx(4.0 / 3.0).margin(1e-4));
}

TEST_CASE("uncorrelated conjugate gives zero optimal gain", "[detection]") {
    const auto c = TwinBeamMoments::coherent(3.0, 2.0);
    CHECK(optimal_gain(c, {1.0, 1.0}) == 0.0);
    CHECK(min_difference_noise(c, {1.0, 1.0}) == Approx(probe_noise_term(c, {1.0, 1.0})));
}

TEST_CASE("noiseless conjugate is a numeric error", "[detection]") {
    const TwinBeamMoments m{1.0, 0.0, 1.0, 0.0, 0.0};
    CHECK_THROWS_AS(optimal_gain(m, {1.0, 1.0}), NumericError);
    CHECK_THROWS_AS(snl_noise(0.0, 0.0, {1.0, 1.0}, 1.0), NumericError);
}

TEST_CASE("random tuples: minimum equals noise at the optimal gain", "[detection][property]") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        const auto t = random_tuple(rng);
        const double g = optimal_gain(t.m, t.ch);
        const double direct = difference_noise(t.m, t.ch, g);
        const double closed = min_difference_noise(t.m, t.ch);
        const double scale = probe_noise_term(t.m, t.ch);
        REQUIRE(std::abs(direct - closed) <= 1e-12 * scale);
        REQUIRE(difference_noise(t.m, t.ch, g * 1.001) >= closed - 1e-12 * scale);
        REQUIRE(difference_noise(t.m, t.ch, g * 0.999) >= closed - 1e-12 * scale);
        REQUIRE(difference_noise(t.m, t.ch, t.g) >= closed - 1e-12 * scale);
    }
}

TEST_CASE("random tuples: covariance round-trips", "[detection][property]") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        const auto t = random_tuple(rng);
        const double vd = t.m.var_p + t.m.var_c - 2.0 * t.m.cov;
        REQUIRE(covariance_from_noise(t.m.var_p, t.m.var_c, vd) ==
                Approx(t.m.cov).epsilon(1e-12).margin(1e-12 * (t.m.var_p + t.m.var_c)));
    }
}

TEST_CASE("noise splits into probe and conjugate terms", "[detection][property]") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 500; ++i) {
        auto t = random_tuple(rng);
        t.m.cov = 0.0;
        const double sum = probe_noise_term(t.m, t.ch) + t.g * t.g * conjugate_noise_term(t.m, t.ch);
        REQUIRE(difference_noise(t.m, t.ch, t.g) == Approx(sum).epsilon(1e-14));
    }
}

TEST_CASE("report at the optimal gain", "[detection]") {
    const auto r = squeezing_report(g2(), {1.0, 1.0});
    CHECK(r.gain == Approx(4.0 / 3.0));
    CHECK(r.diff_variance == Approx(2.0 / 3.0));
    CHECK(r.snl == Approx(2.0 + 16.0 / 9.0));
    CHECK(r.ratio_db == Approx(10.0 * std::log10(r.ratio_linear)));
}

TEST_CASE("detector gain in dB", "[detection]") {
    DetectorConfig d{.quantum_efficiency = 0.95, .gain = 0.5};
    CHECK(d.gain_db() == Approx(20.0 * std::log10(2.0)));
    CHECK(d.as_loss().eta_p == 0.95);
    DetectorConfig bad{.quantum_efficiency = 1.5};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}
