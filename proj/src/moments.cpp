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

#include "pqs/moments.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "pqs/error.hpp"

namespace pqs {

namespace {
constexpr double kSchwarzSlack = 1e-12;
} // namespace

bool TwinBeamMoments::is_valid() const noexcept {
    const bool finite = std::isfinite(mean_p) && std::isfinite(mean_c) &&
                        std::isfinite(var_p) && std::isfinite(var_c) && std::isfinite(cov);
    if (!finite || mean_p < 0.0 || mean_c < 0.0 || var_p < 0.0 || var_c < 0.0) {
        return false;
    }
    const double bound = var_p * var_c;
    return cov * cov <= bound * (1.0 + kSchwarzSlack) + kSchwarzSlack;
}

void TwinBeamMoments::validate() const {
    if (!is_valid()) {
        std::ostringstream os;
        os << "invalid twin-beam moments " << *this;
        throw ValidationError(os.str());
    }
}

TwinBeamMoments TwinBeamMoments::coherent(double mp, double mc) {
    return {mp, mc, mp, mc, 0.0};
}

std::ostream &operator<<(std::ostream &os, const TwinBeamMoments &m) {
    return os << "{mean_p=" << m.mean_p << ", mean_c=" << m.mean_c << ", var_p=" << m.var_p
              << ", var_c=" << m.var_c << ", cov=" << m.cov << "}";
}

} // namespace pqs
