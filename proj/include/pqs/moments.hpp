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

#include <iosfwd>

namespace pqs {

/**
 * First and second moments of the probe/conjugate intensity pair.
 *
 * Intensities are in photon-number units per analysis interval, so a
 * coherent beam has `var == mean`. `cov` is <I_p I_c> - <I_p><I_c>.
 */
struct TwinBeamMoments {
    double mean_p{0.0};
    double mean_c{0.0};
    double var_p{0.0};
    double var_c{0.0};
    double cov{0.0};

    /// Throws ValidationError unless means and variances are non-negative
    /// and cov^2 <= var_p var_c (with a small relative slack for rounding).
    void validate() const;

    [[nodiscard]] bool is_valid() const noexcept;

    /// Coherent (Poissonian, uncorrelated) pair with the given means.
    static TwinBeamMoments coherent(double mean_p, double mean_c);

    friend bool operator==(const TwinBeamMoments &, const TwinBeamMoments &) = default;
};

std::ostream &operator<<(std::ostream &os, const TwinBeamMoments &m);

} // namespace pqs
