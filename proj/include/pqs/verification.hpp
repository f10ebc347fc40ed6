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

#include <cstdint>
#include <string>
#include <vector>

#include "pqs/analysis.hpp"
#include "pqs/scenario.hpp"

namespace pqs {

struct CheckResult {
    std::string name;
    bool passed{false};
    /// Worst observed deviation in the units named by `detail`.
    double statistic{0.0};
    double tolerance{0.0};
    std::string detail;
};

struct VerifyOptions {
    std::uint64_t seed{2026};
    /// Draws for the loss-map and difference-noise oracles.
    std::size_t oracle_samples{10'000'000};
    /// Draws for the grid sampler (its cost is per cell).
    std::size_t grid_samples{100'000};
    unsigned workers{1};
};

/// Truncation at which the Fock tail mass drops below 1e-10.
std::size_t fock_truncation_for(double gain, double seed_mean);

CheckResult check_formula_identities(std::uint64_t seed, std::size_t tuples = 10'000);
CheckResult check_fock_closed_forms();
CheckResult check_fock_squeezed_vacuum();
CheckResult check_binomial_thinning(const VerifyOptions &o);
CheckResult check_gaussian_thinning(const VerifyOptions &o);
CheckResult check_difference_noise_sampled(const VerifyOptions &o);
CheckResult check_grid_quadrant_sums(const VerifyOptions &o);
CheckResult check_sampler_determinism(const VerifyOptions &o);
CheckResult check_cell_independence(const VerifyOptions &o);

struct SnlPoint {
    double power_scale{1.0};
    double total_mean{0.0};
    double sampled{0.0};
    double analytic{0.0};
};

struct SnlLinearity {
    std::vector<SnlPoint> points;
    double fitted_slope{0.0};
    double analytic_slope{0.0};
    /// Largest |10 log10(sampled / analytic)| over points and slope.
    double worst_db{0.0};
};

/// Coherent-state difference noise sampled at several total powers for one
/// quadrant readout, with a least-squares line through the origin.
SnlLinearity snl_linearity(const QuadrantReadout &r, const std::vector<double> &power_scales,
                           std::size_t n, std::uint64_t seed, unsigned workers);

CheckResult check_snl_linearity(const Scenario &s, const VerifyOptions &o);

/// Every check above, in a fixed order.
std::vector<CheckResult> run_oracle_suite(const Scenario &s, const VerifyOptions &o);

} // namespace pqs
