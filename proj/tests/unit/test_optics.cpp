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
#include <limits>

#include "pqs/error.hpp"
#include "pqs/optics.hpp"
#include "pqs/quantum_source.hpp"

using Catch::Approx;
using namespace pqs;

namespace {

QuadrantLayout sensor_layout() {
    return {.window_size = 200.0, .gap = 20.0, .tilt_deg = 26.0};
}

TwinBeamMoments g2() { return fwm_moments({.gain = 2.0, .seed_flux = 1.0}); }

} // namespace

TEST_CASE("point beam on the gap cross transmits nothing", "[optics]") {
    const auto t = quadrant_transmission(GaussianBeam::from_diameter(1e-3), sensor_layout());
    CHECK(t.total == Approx(0.0).margin(1e-12));
    CHECK(t.gap == Approx(1.0).margin(1e-12));
}

TEST_CASE("unobstructed layout transmits everything", "[optics]") {
    const auto t = quadrant_transmission(GaussianBeam::from_diameter(330.0),
                                         QuadrantLayout::razor_cut());
    CHECK(t.total == Approx(1.0).margin(1e-14));
    for (double f : t.fractions) {
        CHECK(f == Approx(0.25).margin(1e-14));
    }
}

TEST_CASE("sensor layout near 330 um transmits about 80 percent", "[optics]") {
    const auto t = quadrant_transmission(GaussianBeam::from_diameter(330.0), sensor_layout());
    CHECK(t.total == Approx(0.80).margin(0.02));
    CHECK(t.total + t.gap + t.tail == Approx(1.0).margin(1e-12));
}

TEST_CASE("closed form agrees with the clipped-grid quadrature", "[optics][oracle]") {
    for (double d : {150.0, 330.0, 700.0}) {
        for (double cx : {0.0, 17.0}) {
            const GaussianBeam beam = GaussianBeam::from_diameter(d, {cx, -5.0});
            const auto exact = quadrant_transmission(beam, sensor_layout());
            const auto quad = quadrant_transmission_quadrature(beam, sensor_layout(), 1024);
            CHECK(std::abs(exact.total - quad.total) < 1e-4);
            for (std::size_t q = 0; q < kQuadrants; ++q) {
                CHECK(std::abs(exact.fractions[q] - quad.fractions[q]) < 1e-4);
            }
        }
    }
}

TEST_CASE("window transmissions weight the total", "[optics]") {
    auto layout = sensor_layout();
    const GaussianBeam beam = GaussianBeam::from_diameter(330.0);
    const double open = quadrant_transmission(beam, layout).total;
    layout.window_transmissions = {0.5, 0.5, 0.5, 0.5};
    CHECK(quadrant_transmission(beam, layout).total == Approx(0.5 * open).epsilon(1e-14));
}

TEST_CASE("transmission is scale invariant", "[optics][property]") {
    const auto a = quadrant_transmission(GaussianBeam::from_diameter(330.0), sensor_layout());
    const auto b = quadrant_transmission(GaussianBeam::from_diameter(660.0),
                                         sensor_layout().scaled(2.0));
    CHECK(a.total == Approx(b.total).epsilon(1e-13));
}

TEST_CASE("optimize_waist finds the 330 um optimum", "[optics]") {
    const auto opt = optimize_waist(sensor_layout(), 100.0, 1000.0);
    CHECK(opt.diameter == Approx(330.0).margin(10.0));
    CHECK(opt.total == Approx(0.80).margin(0.02));
    const auto curve = waist_curve(sensor_layout(), 100.0, 1000.0, 901);
    REQUIRE(curve.size() == 901);
    CHECK(curve.front().diameter == 100.0);
    CHECK(curve.back().diameter == 1000.0);
    CHECK(is_unimodal(curve));
    for (const auto &p : curve) {
        CHECK(p.total <= opt.total + 1e-12);
    }
}

TEST_CASE("flat objective returns the smallest diameter", "[optics]") {
    const auto opt = optimize_waist(QuadrantLayout::razor_cut(), 100.0, 1000.0);
    CHECK(opt.diameter == 100.0);
    CHECK(opt.total == Approx(1.0));
}

TEST_CASE("optimum at the range edge is a search error", "[optics]") {
    CHECK_THROWS_AS(optimize_waist(sensor_layout(), 500.0, 1000.0), SearchError);
    CHECK_THROWS_AS(optimize_waist(sensor_layout(), 1000.0, 500.0), ValidationError);
}

TEST_CASE("is_unimodal rejects a second peak", "[optics]") {
    const std::vector<WaistPoint> two_peaks{{1, 0.1}, {2, 0.5}, {3, 0.2}, {4, 0.6}, {5, 0.1}};
    const std::vector<WaistPoint> one_peak{{1, 0.1}, {2, 0.5}, {3, 0.5}, {4, 0.2}};
    CHECK_FALSE(is_unimodal(two_peaks));
    CHECK(is_unimodal(one_peak));
}

TEST_CASE("apply_loss identities", "[optics]") {
    const auto m = g2();
    CHECK(apply_loss(m, {1.0, 1.0}) == m);
    for (double eta : {0.0, 0.3, 0.77}) {
        const auto c = apply_loss(TwinBeamMoments::coherent(5.0, 2.0), {eta, eta});
        CHECK(c.var_p == Approx(c.mean_p).margin(1e-14));
        CHECK(c.var_c == Approx(c.mean_c).margin(1e-14));
    }
    const auto l = apply_loss(m, {0.5, 0.9});
    CHECK(l.mean_p == Approx(1.0));
    CHECK(l.var_p == Approx(0.25 * (6.0 - 2.0) + 1.0));
    CHECK(l.mean_c == Approx(0.9));
    CHECK(l.var_c == Approx(0.81 * (3.0 - 1.0) + 0.9));
    CHECK(l.cov == Approx(0.45 * 4.0));
}

TEST_CASE("loss composes in series", "[optics][property]") {
    const auto m = fwm_moments({.gain = 3.3, .seed_flux = 2.0, .excess_uncorrelated = 0.02});
    const LossChannel a{0.8, 0.6};
    const LossChannel b{0.7, 0.95};
    const auto twice = apply_loss(apply_loss(m, a), b);
    const auto once = apply_loss(m, a.then(b));
    CHECK(twice.var_p == Approx(once.var_p).epsilon(1e-13));
    CHECK(twice.var_c == Approx(once.var_c).epsilon(1e-13));
    CHECK(twice.cov == Approx(once.cov).epsilon(1e-13));
}

TEST_CASE("loss channel rejects transmissions outside [0, 1]", "[optics]") {
    CHECK_THROWS_AS(apply_loss(g2(), {1.2, 0.5}), ValidationError);
    CHECK_THROWS_AS(apply_loss(g2(), {0.5, -0.1}), ValidationError);
}

TEST_CASE("infinitesimal coherence area keeps the squeezing", "[optics]") {
    const auto beam = GaussianBeam::from_diameter(360.0);
    const auto cut = quadrant_cut_detail(g2(), beam, beam, QuadrantLayout::razor_cut(), 0);
    CHECK(cut.straddle_fraction == 0.0);
    CHECK(cut.contained_p == Approx(0.25).epsilon(1e-12));
    CHECK(source_squeezing(cut.moments).linear ==
          Approx(source_squeezing(g2()).linear).epsilon(1e-12));
}

TEST_CASE("one interior cell behaves as a pure selection", "[optics]") {
    const QuadrantLayout layout{.window_size = 200.0, .gap = 20.0, .tilt_deg = 0.0};
    const Point2 c{110.0, 110.0};
    GaussianBeam beam{5.0, 5.0, c};
    const CoherenceGrid grid(beam, beam, 100.0, 1, c);
    const auto cut = quadrant_cut_detail(g2(), grid, layout, 0);
    CHECK(cut.straddle_fraction == Approx(0.0).margin(1e-12));
    CHECK(cut.contained_p == Approx(1.0).margin(1e-12));
    CHECK(source_squeezing(cut.moments).linear ==
          Approx(source_squeezing(g2()).linear).epsilon(1e-9));
}

TEST_CASE("squeezing degrades monotonically with cell size", "[optics][property]") {
    double prev = source_squeezing(g2()).linear;
    for (double dc : {1.0, 5.0, 20.0, 60.0, 150.0}) {
        const auto grid = build_coherence_grid(360.0, 360.0, dc, 2160.0);
        const auto m = quadrant_cut(g2(), grid, QuadrantLayout::razor_cut(), 0);
        const double r = source_squeezing(m).linear;
        CHECK(r >= prev - 1e-12);
        prev = r;
    }
    CHECK(prev > source_squeezing(g2()).linear);
}

TEST_CASE("cut of an empty quadrant is a numeric error", "[optics]") {
    const QuadrantLayout layout{.window_size = 200.0, .gap = 20.0, .tilt_deg = 0.0};
    const Point2 c{110.0, 110.0};
    GaussianBeam beam{5.0, 5.0, c};
    const CoherenceGrid grid(beam, beam, 100.0, 1, c);
    CHECK_THROWS_AS(quadrant_cut(g2(), grid, layout, 2), NumericError);
}

TEST_CASE("straddle fraction solves back to its cell size", "[optics]") {
    const double f = razor_straddle_fraction(360.0, 12.0, 2160.0);
    CHECK(f > 0.0);
    CHECK(f < 1.0);
    const double dc = solve_cell_size_for_straddle(360.0, f, 2160.0);
    CHECK(razor_straddle_fraction(360.0, dc, 2160.0) == Approx(f).epsilon(1e-8));
    CHECK_THROWS_AS(solve_cell_size_for_straddle(360.0, 1.5, 2160.0), Error);
}
