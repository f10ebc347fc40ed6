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
#include <vector>

#include "pqs/analysis.hpp"
#include "pqs/detection.hpp"
#include "pqs/error.hpp"
#include "pqs/quantum_source.hpp"

using Catch::Approx;
using namespace pqs;

namespace {

QuadrantReadout readout(QuadrantIndex q, double excess = 0.0) {
    QuadrantReadout r;
    r.quadrant = q;
    r.moments = fwm_moments({.gain = 3.0, .seed_flux = 1e6, .excess_uncorrelated = excess});
    r.channel = {0.5, 0.9};
    r.gain = optimal_gain(r.moments, r.channel);
    r.signal_per_mv2 = 0.2;
    return r;
}

} // namespace

TEST_CASE("signal and SNR basics", "[analysis]") {
    CHECK(signal_estimate(1.0, 1.0) == 0.0);
    CHECK(signal_estimate(2.0, 1.0) == 1.0);
    CHECK(snr(0.0, 1.0).value == 0.0);
    CHECK(snr(3.0, 3.0).value == 1.0);
    CHECK(snr(-1.0, 1.0).value == 0.0);
    CHECK(snr(-1.0, 1.0).clamped);
    CHECK_THROWS_AS(snr(1.0, 0.0), NumericError);
}

TEST_CASE("coherent SNR estimate", "[analysis]") {
    CHECK(snr_coherent(4.0, 1.0, 10.0).value == Approx(snr(4.0, 1.0).value));
    CHECK(snr_coherent(4.0, 2.0, 10.0).value == Approx(snr(4.0, 1.0).value / std::sqrt(2.0)));
    CHECK_FALSE(snr_coherent(4.0, 2.0, 1.0).regime_ok);
    CHECK(optimal_classical_snr(4.0, 1.0).value == Approx(2.0));
}

TEST_CASE("threshold of an exact line", "[analysis]") {
    std::vector<SNRPoint> line;
    for (double v = 0.0; v <= 300.0; v += 10.0) {
        line.push_back({v, 0.0, 0.0, v / 100.0});
    }
    CHECK(threshold_voltage(line).voltage == Approx(100.0));
    CHECK(threshold_voltage(line, ThresholdMethod::least_squares).voltage == Approx(100.0));
    std::vector<SNRPoint> short_line(line.begin(), line.begin() + 5);
    const auto t = threshold_voltage(short_line);
    CHECK(t.extrapolated);
    CHECK(t.voltage == Approx(100.0));
}

TEST_CASE("enhancement percentages", "[analysis]") {
    CHECK(enhancement(250.0, 250.0) == 0.0);
    CHECK(enhancement(307.0, 252.0) == Approx(21.8).margin(0.05));
    CHECK(enhancement(394.0, 319.0) == Approx(23.5).margin(0.05));
}

TEST_CASE("sweep: zero drive gives zero SNR on every curve", "[analysis]") {
    const std::vector<double> v{0.0, 100.0, 200.0};
    const auto c = snr_sweep(readout(0), readout(0), v);
    REQUIRE(c.points.size() == 3);
    CHECK(c.points[0].snr_tb == 0.0);
    CHECK(c.points[0].snr_cs == 0.0);
    CHECK(c.points[0].snr_opt == 0.0);
    CHECK(c.points[2].snr_tb == Approx(2.0 * c.points[1].snr_tb));
}

TEST_CASE("threshold ratio follows the squeezing level", "[analysis][property]") {
    const std::vector<double> v{0.0, 500.0, 1000.0};
    for (double excess : {0.0, 1e-9, 1e-8, 1e-6}) {
        const auto p = readout(0, excess);
        const auto c = snr_sweep(p, p, v);
        const auto rep = enhancement_report(c);
        const double ratio_db = 10.0 * std::log10(c.noise.twin_beam / c.noise.coherent);
        CHECK(rep.v_cs.voltage / rep.v_tb.voltage ==
              Approx(std::pow(10.0, -ratio_db / 20.0)).epsilon(1e-12));
    }
}

TEST_CASE("uncorrelated pairs add in quadrature", "[analysis][property]") {
    const auto p = readout(0, 1e-8);
    const auto c = readout(2, 1e-8);
    const auto n = pair_noise(p, c);
    CHECK_FALSE(n.correlated);
    CHECK(n.gain == p.gain);
    auto uncorr = p.moments;
    uncorr.cov = 0.0;
    const double quad = probe_noise_term(uncorr, p.channel) +
                        p.gain * p.gain * conjugate_noise_term(c.moments, c.channel);
    CHECK(n.twin_beam == Approx(quad).epsilon(1e-15));
    CHECK(n.twin_beam > n.coherent);
    const auto same = pair_noise(p, p);
    CHECK(same.correlated);
    CHECK(same.twin_beam < same.coherent);
}

TEST_CASE("sweep rejects bad voltage lists", "[analysis]") {
    const std::vector<double> empty;
    const std::vector<double> descending{100.0, 50.0};
    const std::vector<double> negative{-1.0, 50.0};
    CHECK_THROWS_AS(snr_sweep(readout(0), readout(0), empty), ValidationError);
    CHECK_THROWS_AS(snr_sweep(readout(0), readout(0), descending), ValidationError);
    CHECK_THROWS_AS(snr_sweep(readout(0), readout(0), negative), ValidationError);
}

TEST_CASE("all sixteen pairs, probe-major", "[analysis]") {
    const auto pairs = all_quadrant_pairs();
    REQUIRE(pairs.size() == 16);
    CHECK(pairs[1] == std::pair<QuadrantIndex, QuadrantIndex>{0, 1});
    CHECK(pairs[15] == std::pair<QuadrantIndex, QuadrantIndex>{3, 3});
}
