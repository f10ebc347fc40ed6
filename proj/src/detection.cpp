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

#include "pqs/detection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pqs/error.hpp"
#include "pqs/units.hpp"

namespace pqs {

namespace {
// Relative slack below zero tolerated as rounding before a negative
// variance is reported as an upstream inconsistency.
constexpr double kNegativeSlack = 1e-12;
} // namespace

void DetectorConfig::validate() const {
    detail::require(quantum_efficiency >= 0.0 && quantum_efficiency <= 1.0,
                    "quantum efficiency must lie in [0, 1]");
    detail::require(std::isfinite(gain) && gain >= 0.0, "detector gain must be >= 0");
}

double DetectorConfig::gain_db() const { return attenuation_db_amplitude(gain); }

double probe_noise_term(const TwinBeamMoments &m, const LossChannel &ch) {
    return ch.eta_p * ch.eta_p * (m.var_p - m.mean_p) + ch.eta_p * m.mean_p;
}

double conjugate_noise_term(const TwinBeamMoments &m, const LossChannel &ch) {
    return ch.eta_c * ch.eta_c * (m.var_c - m.mean_c) + ch.eta_c * m.mean_c;
}

double difference_noise(const TwinBeamMoments &m, const LossChannel &ch, double g) {
    m.validate();
    ch.validate();
    detail::require(std::isfinite(g) && g >= 0.0, "gain must be >= 0");
    const double p = probe_noise_term(m, ch);
    const double c = conjugate_noise_term(m, ch);
    const double x = ch.eta_p * ch.eta_c * m.cov;
    const double v = p + g * g * c - 2.0 * g * x;
    const double scale = std::abs(p) + g * g * std::abs(c) + 2.0 * g * std::abs(x);
    if (v < -kNegativeSlack * scale) {
        std::ostringstream os;
        os << "negative difference noise " << v << " for moments " << m;
        throw NumericError(os.str());
    }
    return std::max(0.0, v);
}

double optimal_gain(const TwinBeamMoments &m, const LossChannel &ch) {
    m.validate();
    ch.validate();
    const double c = conjugate_noise_term(m, ch);
    if (!(c > 0.0)) {
        throw NumericError("optimal gain undefined: conjugate carries no noise");
    }
    return std::max(0.0, ch.eta_p * ch.eta_c * m.cov / c);
}

double min_difference_noise(const TwinBeamMoments &m, const LossChannel &ch) {
    m.validate();
    ch.validate();
    const double c = conjugate_noise_term(m, ch);
    if (!(c > 0.0)) {
        throw NumericError("optimal gain undefined: conjugate carries no noise");
    }
    const double x = ch.eta_p * ch.eta_c * m.cov;
    if (x < 0.0) {
        // Anti-correlated beams: the optimum clamps to g = 0.
        return probe_noise_term(m, ch);
    }
    const double p = probe_noise_term(m, ch);
    const double v = p - x * x / c;
    if (v < -kNegativeSlack * p) {
        std::ostringstream os;
        os << "negative minimum difference noise " << v << " for moments " << m;
        throw NumericError(os.str());
    }
    return std::max(0.0, v);
}

double covariance_from_noise(double var_p, double var_c, double var_diff) noexcept {
    return 0.5 * (var_p + var_c - var_diff);
}

double snl_noise(double mean_p, double mean_c, const LossChannel &ch, double g) {
    ch.validate();
    detail::require(mean_p >= 0.0 && mean_c >= 0.0, "means must be >= 0");
    detail::require(std::isfinite(g) && g >= 0.0, "gain must be >= 0");
    const double v = ch.eta_p * mean_p + g * g * ch.eta_c * mean_c;
    if (!(v > 0.0)) {
        throw NumericError("shot-noise level undefined for zero total power");
    }
    return v;
}

NoiseReport squeezing_report(const TwinBeamMoments &m, const LossChannel &ch,
                             std::optional<double> gain) {
    NoiseReport r;
    r.gain = gain ? *gain : optimal_gain(m, ch);
    r.diff_variance =
        gain ? difference_noise(m, ch, r.gain) : min_difference_noise(m, ch);
    r.snl = snl_noise(m.mean_p, m.mean_c, ch, r.gain);
    r.ratio_linear = r.diff_variance / r.snl;
    r.ratio_db = to_db(r.ratio_linear);
    return r;
}

} // namespace pqs
