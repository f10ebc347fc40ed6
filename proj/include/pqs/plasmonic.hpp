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

#pragma once

#include <array>
#include <vector>

#include "pqs/geometry.hpp"

namespace pqs {

/// Lorentzian EOT transmission resonance of one nanohole-array sensor.
/// Wavelengths in nm; `dlambda_dn` is the resonance shift per RIU.
struct EOTResonance {
    double lambda0{795.0};
    double linewidth{50.0};
    double t_max{0.7};
    double dlambda_dn{300.0};

    void validate() const;
};

/// Sinusoidal index drive. `volts_to_index` holds one coupling per sensor in
/// RIU per mV (it encodes the acoustic standing-wave pattern).
struct IndexModulation {
    double frequency_hz{400e3};
    double drive_mv{0.0};
    std::array<double, kQuadrants> volts_to_index{};

    void validate() const;
};

double transmission_at(const EOTResonance &r, double lambda_nm);

/// dT/dlambda at fixed resonance.
double transmission_slope_wavelength(const EOTResonance &r, double lambda_nm);

/// dT/dn: the index shifts the resonance, so dT/dn = (dT/dlambda0) (dlambda0/dn)
/// = -(dT/dlambda) dlambda_dn.
double transduction_slope(const EOTResonance &r, double lambda_nm);

/// Mean-square of the transmitted-intensity modulation, A^2 / 2 with
/// A = I_q |dT/dn| kappa_q V / T. Throws NumericError if T = 0.
double modulation_signal(const EOTResonance &r, const IndexModulation &mod, QuadrantIndex q,
                         double probe_mean, double lambda_nm);

struct ResonancePoint {
    double lambda_nm{0.0};
    std::array<double, kQuadrants> transmission{};
};

std::vector<ResonancePoint> resonance_scan(const std::array<EOTResonance, kQuadrants> &sensors,
                                           double lambda_min, double lambda_max,
                                           std::size_t points);

} // namespace pqs
