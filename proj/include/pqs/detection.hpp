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

#include <optional>

#include "pqs/moments.hpp"
#include "pqs/optics.hpp"

namespace pqs {

/// Photodetection stage. `gain` multiplies the conjugate photocurrent
/// amplitude; its attenuation is reported as 20 log10(1/g).
struct DetectorConfig {
    double quantum_efficiency{0.95};
    double gain{1.0};

    void validate() const;
    [[nodiscard]] double gain_db() const;
    [[nodiscard]] LossChannel as_loss() const noexcept {
        return {quantum_efficiency, quantum_efficiency};
    }
};

struct NoiseReport {
    double diff_variance{0.0};
    double snl{0.0};
    double ratio_linear{1.0};
    double ratio_db{0.0};
    double gain{1.0};
};

/// Probe part of the loss-propagated difference noise,
/// eta_p^2 (var_p - mean_p) + eta_p mean_p.
double probe_noise_term(const TwinBeamMoments &m, const LossChannel &ch);

/// Conjugate counterpart of probe_noise_term (before multiplying by g^2).
double conjugate_noise_term(const TwinBeamMoments &m, const LossChannel &ch);

/// Variance of I_p - g I_c after the channel.
///
/// Throws NumericError if the moments are inconsistent enough to make the
/// variance negative.
double difference_noise(const TwinBeamMoments &m, const LossChannel &ch, double g);

/// Attenuation minimizing difference_noise. Throws NumericError if the
/// conjugate carries no noise.
double optimal_gain(const TwinBeamMoments &m, const LossChannel &ch);

/// difference_noise at optimal_gain, in closed form.
double min_difference_noise(const TwinBeamMoments &m, const LossChannel &ch);

/// Covariance recovered from balanced, lossless noise measurements.
double covariance_from_noise(double var_p, double var_c, double var_diff) noexcept;

/// Shot-noise level: difference noise of coherent beams with the given
/// pre-loss means, read out with attenuation g.
double snl_noise(double mean_p, double mean_c, const LossChannel &ch, double g);

/// Noise, SNL and their ratio. `gain == nullopt` selects the optimal gain.
NoiseReport squeezing_report(const TwinBeamMoments &m, const LossChannel &ch,
                             std::optional<double> gain = std::nullopt);

} // namespace pqs
