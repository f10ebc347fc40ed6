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

#include "pqs/plasmonic.hpp"

#include <cmath>

#include "pqs/error.hpp"

namespace pqs {

void EOTResonance::validate() const {
    detail::require(std::isfinite(lambda0), "resonance lambda0 must be finite");
    detail::require(std::isfinite(linewidth) && linewidth > 0.0, "resonance linewidth must be > 0");
    detail::require(t_max >= 0.0 && t_max <= 1.0, "resonance t_max must lie in [0, 1]");
    detail::require(std::isfinite(dlambda_dn), "resonance dlambda_dn must be finite");
}

void IndexModulation::validate() const {
    detail::require(std::isfinite(frequency_hz) && frequency_hz > 0.0,
                    "modulation frequency must be > 0");
    detail::require(std::isfinite(drive_mv), "drive voltage must be finite");
    for (double k : volts_to_index) {
        detail::require(std::isfinite(k) && k >= 0.0, "index couplings must be >= 0");
    }
}

double transmission_at(const EOTResonance &r, double lambda_nm) {
    r.validate();
    const double hw = 0.5 * r.linewidth;
    const double d = lambda_nm - r.lambda0;
    return r.t_max * hw * hw / (d * d + hw * hw);
}

double transmission_slope_wavelength(const EOTResonance &r, double lambda_nm) {
    r.validate();
    const double hw = 0.5 * r.linewidth;
    const double d = lambda_nm - r.lambda0;
    const double den = d * d + hw * hw;
    return -2.0 * r.t_max * hw * hw * d / (den * den);
}

double transduction_slope(const EOTResonance &r, double lambda_nm) {
    return -transmission_slope_wavelength(r, lambda_nm) * r.dlambda_dn;
}

double modulation_signal(const EOTResonance &r, const IndexModulation &mod, QuadrantIndex q,
                         double probe_mean, double lambda_nm) {
    mod.validate();
    detail::require(q < kQuadrants, "quadrant index out of range");
    detail::require(probe_mean >= 0.0, "probe mean intensity must be >= 0");
    const double t = transmission_at(r, lambda_nm);
    if (!(t > 0.0)) {
        throw NumericError("zero transmission at the operating wavelength");
    }
    const double dn = mod.volts_to_index[q] * mod.drive_mv;
    const double amp = probe_mean * std::abs(transduction_slope(r, lambda_nm)) * dn / t;
    return 0.5 * amp * amp;
}

std::vector<ResonancePoint> resonance_scan(const std::array<EOTResonance, kQuadrants> &sensors,
                                           double lambda_min, double lambda_max,
                                           std::size_t points) {
    detail::require(lambda_max > lambda_min, "wavelength range must be increasing");
    detail::require(points >= 2, "resonance scan needs at least two points");
    std::vector<ResonancePoint> out(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double l = lambda_min + (lambda_max - lambda_min) * static_cast<double>(i) /
                                          static_cast<double>(points - 1);
        out[i].lambda_nm = l;
        for (QuadrantIndex q = 0; q < kQuadrants; ++q) {
            out[i].transmission[q] = transmission_at(sensors[q], l);
        }
    }
    return out;
}

} // namespace pqs
