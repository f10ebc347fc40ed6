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
#include <cstring>

#include "pqs/error.hpp"
#include "pqs/montecarlo.hpp"
#include "pqs/optics.hpp"
#include "pqs/quantum_source.hpp"
#include "pqs/rng.hpp"

using Catch::Approx;
using namespace pqs;

namespace {

TwinBeamMoments g2() { return fwm_moments({.gain = 2.0, .seed_flux = 1.0}); }

bool within(double x, double expected, double se, double k = 5.0) {
    return std::abs(x - expected) <= k * se;
}

} // namespace

TEST_CASE("counter RNG is a pure function of its counters", "[rng]") {
    CounterRng a(1, 2, 3);
    CounterRng b(1, 2, 3);
    CounterRng c(1, 3, 3);
    CHECK(a.next_u64() == b.next_u64());
    CHECK(a.next_u64() != c.next_u64());
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("single-cell sampler reproduces the G=2 moments", "[montecarlo]") {
    const std::vector<CellMoments> cells{{g2(), 0}};
    const auto batch = sample_photocurrents(cells, 1'000'000, 42);
    const auto e = estimate_moments(batch.probe[0], batch.conj[0]);
    CHECK(within(e.moments.var_p, 6.0, e.se_var_p));
    CHECK(within(e.moments.var_c, 3.0, e.se_var_c));
    CHECK(within(e.moments.cov, 4.0, e.se_cov));
    CHECK(within(e.moments.mean_p, 2.0, e.se_mean_p));
}

TEST_CASE("zero-variance cells give constant samples", "[montecarlo]") {
    const std::vector<CellMoments> cells{{{3.0, 2.0, 0.0, 0.0, 0.0}, 1}};
    const auto batch = sample_photocurrents(cells, 100, 1);
    for (std::size_t i = 0; i < 100; ++i) {
        REQUIRE(batch.probe[1][i] == 3.0);
        REQUIRE(batch.conj[1][i] == 2.0);
    }
    CHECK(batch.probe[0].size() == 100);
    CHECK(batch.probe[0][0] == 0.0);
}

TEST_CASE("non-PSD cell covariance is rejected", "[montecarlo]") {
    const std::vector<CellMoments> cells{{{1.0, 1.0, 1.0, 1.0, 2.0}, 0}};
    CHECK_THROWS_AS(sample_photocurrents(cells, 10, 1), ValidationError);
}

TEST_CASE("sampler output is independent of the worker count", "[montecarlo][determinism]") {
    const auto grid = build_coherence_grid(360.0, 360.0, 120.0, 2160.0);
    const auto beam = fwm_moments({.gain = 2.0, .seed_flux = 1000.0});
    const auto one = sample_photocurrents(grid, beam, 5000, 9, 1);
    const auto eight = sample_photocurrents(grid, beam, 5000, 9, 8);
    for (std::size_t q = 0; q < kQuadrants; ++q) {
        REQUIRE(one.probe[q].size() == eight.probe[q].size());
        CHECK(std::memcmp(one.probe[q].data(), eight.probe[q].data(),
                          one.probe[q].size() * sizeof(double)) == 0);
        CHECK(std::memcmp(one.conj[q].data(), eight.conj[q].data(),
                          one.conj[q].size() * sizeof(double)) == 0);
    }
    const auto pa = sample_pair(beam, 10000, 5, 7, 1);
    const auto pb = sample_pair(beam, 10000, 5, 7, 3);
    CHECK(pa.probe == pb.probe);
    CHECK(pa.conj == pb.conj);
}

TEST_CASE("thinning edge cases", "[montecarlo]") {
    const std::vector<std::int64_t> counts{0, 1, 5, 17};
    CHECK(thinning_loss(counts, 1.0, 1, 1) == counts);
    for (auto k : thinning_loss(counts, 0.0, 1, 1)) {
        CHECK(k == 0);
    }
    const std::vector<double> x{0.0, 2.5, 9.0};
    CHECK(thinning_loss(x, 1.0, 1, 1) == x);
    CHECK_THROWS_AS(thinning_loss(x, 1.5, 1, 1), ValidationError);
}

TEST_CASE("Bernoulli thinning of the G=2 probe matches apply_loss", "[montecarlo][oracle]") {
    const FockDistribution fock(2.0, 1.0, 80);
    std::vector<std::int64_t> np;
    std::vector<std::int64_t> nc;
    fock.sample(400'000, 3, 1, np, nc);
    const auto tp = thinning_loss(np, 0.5, 3, 2);
    const auto tc = thinning_loss(nc, 0.9, 3, 3);
    std::vector<double> p(tp.begin(), tp.end());
    std::vector<double> c(tc.begin(), tc.end());
    const auto e = estimate_moments(p, c);
    const auto full = fock_two_mode_squeezer_moments(2.0, 1.0, 80).moments;
    const auto expect = apply_loss(full, {0.5, 0.9});
    CHECK(within(e.moments.mean_p, expect.mean_p, e.se_mean_p));
    CHECK(within(e.moments.var_p, expect.var_p, e.se_var_p));
    CHECK(within(e.moments.var_c, expect.var_c, e.se_var_c));
    CHECK(within(e.moments.cov, expect.cov, e.se_cov));
}

TEST_CASE("Fock oracle: unit gain leaves the conjugate in vacuum", "[montecarlo][oracle]") {
    const auto f = fock_two_mode_squeezer_moments(1.0, 1.0, 40);
    CHECK(f.moments.mean_c == 0.0);
    CHECK(f.moments.cov == 0.0);
    CHECK(f.moments.mean_p == Approx(1.0).epsilon(1e-9));
    CHECK(f.tail_mass < 1e-10);
}

TEST_CASE("Fock oracle stimulated part equals the closed forms", "[montecarlo][oracle]") {
    for (double g : {1.05, 1.2, 1.3, 2.0}) {
        const auto m = fock_stimulated_moments(g, 1.0, 120);
        const auto ref = fwm_moments({.gain = g, .seed_flux = 1.0});
        CHECK(m.mean_p == Approx(ref.mean_p).epsilon(1e-6));
        CHECK(m.mean_c == Approx(ref.mean_c).epsilon(1e-6));
        CHECK(m.var_p == Approx(ref.var_p).epsilon(1e-6));
        CHECK(m.var_c == Approx(ref.var_c).epsilon(1e-6));
        CHECK(m.cov == Approx(ref.cov).epsilon(1e-6));
    }
}

TEST_CASE("insufficient Fock truncation is reported", "[montecarlo]") {
    CHECK_THROWS_AS(fock_two_mode_squeezer_moments(2.0, 5.0, 10), NumericError);
}

TEST_CASE("difference variance estimate", "[montecarlo]") {
    const auto s = sample_pair(g2(), 500'000, 8, 1);
    const auto v = difference_variance(s.probe, s.conj, 4.0 / 3.0);
    CHECK(within(v.value, 2.0 / 3.0, v.standard_error));
}

TEST_CASE("parallel_for covers every index once", "[montecarlo]") {
    std::vector<int> hits(1001, 0);
    parallel_for(hits.size(), 4, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            ++hits[i];
        }
    });
    for (int h : hits) {
        REQUIRE(h == 1);
    }
}
