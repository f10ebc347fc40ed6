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
#include "pqs/plasmonic.hpp"
#include "pqs/scenario.hpp"

using Catch::Approx;
using namespace pqs;

TEST_CASE("Lorentzian peak and half width", "[plasmonic]") {
    const EOTResonance r{.lambda0 = 812.0, .linewidth = 58.0, .t_max = 0.69};
    CHECK(transmission_at(r, 812.0) == Approx(0.69));
    CHECK(transmission_at(r, 812.0 + 29.0) == Approx(0.345));
    CHECK(transmission_at(r, 812.0 - 29.0) == Approx(0.345));
    CHECK(transduction_slope(r, 812.0) == Approx(0.0).margin(1e-15));
}

TEST_CASE("slope matches a central difference", "[plasmonic][property]") {
    const EOTResonance r{.lambda0 = 812.0, .linewidth = 58.0, .t_max = 0.69, .dlambda_dn = 300.0};
    for (double l : {760.0, 795.0, 830.0}) {
        const double h = 1e-4;
        const double fd = (transmission_at(r, l + h) - transmission_at(r, l - h)) / (2.0 * h);
        CHECK(transmission_slope_wavelength(r, l) == Approx(fd).epsilon(1e-7));
        CHECK(transduction_slope(r, l) == Approx(-fd * 300.0).epsilon(1e-7));
    }
}

TEST_CASE("default sensors transmit 50 to 55 percent at 795 nm", "[plasmonic]") {
    const auto s = load_scenario(PQS_DEFAULT_SCENARIO);
    for (const auto &r : s.sensors) {
        const double t = transmission_at(r, 795.0);
        CHECK(t >= 0.50);
        CHECK(t <= 0.55);
    }
}

TEST_CASE("modulation signal is quadratic in the drive", "[plasmonic]") {
    const EOTResonance r{.lambda0 = 812.0, .linewidth = 58.0, .t_max = 0.69};
    IndexModulation mod{.drive_mv = 0.0, .volts_to_index = {1e-6, 2e-6, 0.0, 0.0}};
    CHECK(modulation_signal(r, mod, 0, 1e6, 795.0) == 0.0);
    mod.drive_mv = 100.0;
    const double s1 = modulation_signal(r, mod, 0, 1e6, 795.0);
    mod.drive_mv = 200.0;
    CHECK(modulation_signal(r, mod, 0, 1e6, 795.0) == Approx(4.0 * s1));
    CHECK(modulation_signal(r, mod, 1, 1e6, 795.0) == Approx(16.0 * s1));
    const double a = 1e6 * std::abs(transduction_slope(r, 795.0)) * 1e-6 * 100.0 /
                     transmission_at(r, 795.0);
    CHECK(s1 == Approx(a * a / 2.0));
}

TEST_CASE("zero transmission is an unusable operating point", "[plasmonic]") {
    const EOTResonance r{.lambda0 = 812.0, .linewidth = 58.0, .t_max = 0.0};
    IndexModulation mod{.drive_mv = 10.0, .volts_to_index = {1e-6, 0, 0, 0}};
    CHECK_THROWS_AS(modulation_signal(r, mod, 0, 1.0, 795.0), NumericError);
}

TEST_CASE("resonance parameters are validated", "[plasmonic]") {
    EOTResonance r{.linewidth = -1.0};
    CHECK_THROWS_AS(r.validate(), ValidationError);
    r = {.t_max = 1.5};
    CHECK_THROWS_AS(r.validate(), ValidationError);
}

TEST_CASE("resonance scan covers the range inclusively", "[plasmonic]") {
    const auto s = load_scenario(PQS_DEFAULT_SCENARIO);
    const auto scan = resonance_scan(s.sensors, 700.0, 900.0, 401);
    REQUIRE(scan.size() == 401);
    CHECK(scan.front().lambda_nm == 700.0);
    CHECK(scan.back().lambda_nm == 900.0);
    CHECK(scan[190].lambda_nm == Approx(795.0));
}
