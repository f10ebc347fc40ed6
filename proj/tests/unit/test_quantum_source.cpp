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

#include "pqs/error.hpp"
#include "pqs/quantum_source.hpp"

using Catch::Approx;
using namespace pqs;

TEST_CASE("fwm_moments at unit gain is the coherent seed", "[source]") {
    const auto m = fwm_moments({.gain = 1.0, .seed_flux = 1.0});
    CHECK(m.mean_p == 1.0);
    CHECK(m.mean_c == 0.0);
    CHECK(m.var_p == 1.0);
    CHECK(m.var_c == 0.0);
    CHECK(m.cov == 0.0);
}

TEST_CASE("fwm_moments at G=2 matches the Fock-derived values", "[source]") {
    const auto m = fwm_moments({.gain = 2.0, .seed_flux = 1.0});
    CHECK(m.mean_p == Approx(2.0).epsilon(1e-14));
    CHECK(m.mean_c == Approx(1.0).epsilon(1e-14));
    CHECK(m.var_p == Approx(6.0).epsilon(1e-14));
    CHECK(m.var_c == Approx(3.0).epsilon(1e-14));
    CHECK(m.cov == Approx(4.0).epsilon(1e-14));
}

TEST_CASE("balanced source squeezing is 1/(2G-1)", "[source]") {
    for (double g : {1.0, 1.5, 2.0, 2.14, 7.0}) {
        const auto r = source_squeezing(fwm_moments({.gain = g, .seed_flux = 3.0}));
        CHECK(r.linear == Approx(1.0 / (2.0 * g - 1.0)).epsilon(1e-12));
    }
    const auto g2 = source_squeezing(fwm_moments({.gain = 2.0, .seed_flux = 1.0}));
    CHECK(g2.db == Approx(10.0 * std::log10(1.0 / 3.0)).epsilon(1e-12));
    const auto strong = source_squeezing(fwm_moments({.gain = 2.14, .seed_flux = 1.0}));
    CHECK(strong.db == Approx(-5.16).margin(0.005));
}

TEST_CASE("coherent pair sits at the shot-noise level", "[source]") {
    const auto r = source_squeezing(TwinBeamMoments::coherent(4.0, 2.5));
    CHECK(r.linear == Approx(1.0));
    CHECK(r.db == Approx(0.0).margin(1e-12));
}

TEST_CASE("excess noise degrades the balanced squeezing", "[source][property]") {
    double prev = source_squeezing(fwm_moments({.gain = 3.0, .seed_flux = 1.0})).linear;
    for (double z : {0.01, 0.05, 0.2}) {
        const auto r = source_squeezing(
            fwm_moments({.gain = 3.0, .seed_flux = 1.0, .excess_uncorrelated = z})).linear;
        CHECK(r > prev);
        prev = r;
    }
    // A common-mode term cancels in the balanced difference.
    const auto ideal = fwm_moments({.gain = 3.0, .seed_flux = 1.0});
    const auto common = fwm_moments({.gain = 3.0, .seed_flux = 1.0, .excess_correlated = 0.3});
    CHECK(common.var_p > ideal.var_p);
    CHECK(common.is_valid());
}

TEST_CASE("source parameters are validated", "[source]") {
    CHECK_THROWS_AS(fwm_moments({.gain = 0.5}), ValidationError);
    CHECK_THROWS_AS(fwm_moments({.gain = 2.0, .seed_flux = -1.0}), ValidationError);
    CHECK_THROWS_AS(fwm_moments({.gain = 2.0, .excess_uncorrelated = -0.1}), ValidationError);
    CHECK_THROWS_AS(source_squeezing(TwinBeamMoments{}), NumericError);
}

TEST_CASE("moments validation catches an impossible covariance", "[source]") {
    TwinBeamMoments m{1.0, 1.0, 1.0, 1.0, 2.0};
    CHECK_FALSE(m.is_valid());
    CHECK_THROWS_AS(m.validate(), ValidationError);
}

TEST_CASE("metadata never changes the moments", "[source]") {
    FwmSourceParams a{.gain = 2.5, .seed_flux = 1.0};
    FwmSourceParams b = a;
    b.metadata["two_photon_detuning"] = "-4 MHz";
    CHECK(fwm_moments(a) == fwm_moments(b));
}

TEST_CASE("single-cell grid holds all the power", "[grid]") {
    const auto grid = build_coherence_grid(360.0, 360.0, 2000.0, 2000.0);
    REQUIRE(grid.cell_count() == 1);
    const auto cells = grid.cells();
    CHECK(cells[0].weight_p == Approx(1.0).margin(1e-12));
    CHECK(cells[0].weight_c == Approx(1.0).margin(1e-12));
}

TEST_CASE("grid weights are reflection symmetric and sum to one", "[grid][property]") {
    const auto grid = build_coherence_grid(360.0, 360.0, 40.0, 2000.0);
    const auto cells = grid.cells();
    const std::size_t n = grid.cells_per_side();
    REQUIRE(n % 2 == 1);
    double total = 0.0;
    for (std::size_t iy = 0; iy < n; ++iy) {
        for (std::size_t ix = 0; ix < n; ++ix) {
            const auto &c = cells[iy * n + ix];
            total += c.weight_p;
            CHECK(c.weight_p == Approx(cells[iy * n + (n - 1 - ix)].weight_p).margin(1e-15));
            CHECK(c.weight_p == Approx(cells[(n - 1 - iy) * n + ix].weight_p).margin(1e-15));
        }
    }
    CHECK(total == Approx(1.0).margin(1e-9));
}

TEST_CASE("cell larger than the extent is rejected", "[grid]") {
    CHECK_THROWS_AS(build_coherence_grid(360.0, 360.0, 3000.0, 2000.0), ValidationError);
    CHECK_THROWS_AS(build_coherence_grid(360.0, 360.0, 0.0, 2000.0), ValidationError);
}

TEST_CASE("quadrant_of sends axis points to the positive side", "[grid]") {
    CHECK(CoherenceGrid::quadrant_of({1.0, 1.0}, {}) == 0);
    CHECK(CoherenceGrid::quadrant_of({-1.0, 1.0}, {}) == 1);
    CHECK(CoherenceGrid::quadrant_of({-1.0, -1.0}, {}) == 2);
    CHECK(CoherenceGrid::quadrant_of({1.0, -1.0}, {}) == 3);
    CHECK(CoherenceGrid::quadrant_of({0.0, 0.0}, {}) == 0);
}
