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
#include <span>
#include <string>
#include <vector>

#include "pqs/detection.hpp"
#include "pqs/moments.hpp"
#include "pqs/optics.hpp"
#include "pqs/quantum_source.hpp"

namespace pqs {

/// Points along the source-to-detector chain at which squeezing is read.
enum class Stage { source, optics, cut, sensor };

const char *stage_name(Stage s) noexcept;
/// Throws ValidationError for an unknown label.
Stage parse_stage(const std::string &label);

/// An observed squeezing level. A gain value marks a reading taken with the
/// optimized attenuation; the sensor stage is always read that way.
struct StageTarget {
    Stage stage{Stage::source};
    double squeezing_db{0.0};
    /// Attenuation in dB under ChainSettings::gain_convention.
    std::optional<double> gain_db;
};

enum class GainConvention { amplitude, power };

struct ChainSettings {
    double seed_flux{1.0};
    double quantum_efficiency{0.95};
    /// Share of each beam kept by the razor-blade quadrant selection.
    double cut_fraction{0.25};
    LossChannel sensor{0.5, 0.9};
    double gain_max{20.0};
    GainConvention gain_convention{GainConvention::amplitude};
    /// A fit leaving any residual above this is reported as infeasible.
    double infeasible_residual_db{1.0};

    void validate() const;
};

struct ChainParams {
    double gain{1.0};
    double excess_correlated{0.0};
    double excess_uncorrelated{0.0};
    double optics_transmission{1.0};
    double straddle_fraction{0.0};

    [[nodiscard]] FwmSourceParams source(double seed_flux) const;
};

/// Moments before the detector at each stage.
struct ChainStates {
    TwinBeamMoments source;
    TwinBeamMoments optics;
    TwinBeamMoments cut;
};

ChainStates propagate_chain(const ChainParams &p, const ChainSettings &s);

struct StageReading {
    Stage stage{Stage::source};
    /// g = 1, lossless apart from the detector.
    double balanced_db{0.0};
    /// Optimal g (sensor loss included for the sensor stage).
    double optimal_db{0.0};
    double gain{1.0};
    double gain_db{0.0};
};

/// Readings at all four stages, each taken through the detector efficiency.
std::vector<StageReading> chain_readings(const ChainParams &p, const ChainSettings &s);

double gain_to_db(double g, GainConvention c);

struct StageResidual {
    Stage stage{Stage::source};
    double target_db{0.0};
    double model_db{0.0};
    std::optional<double> target_gain_db;
    std::optional<double> model_gain_db;
};

struct CalibrationResult {
    ChainParams params;
    FwmSourceParams source;
    std::vector<StageResidual> residuals;
    bool fitted_optics{false};
    bool fitted_cut{false};
    bool fitted_excess{false};
    /// The fitted gain sits on ChainSettings::gain_max.
    bool gain_bound_active{false};
    double max_abs_residual_db{0.0};
    int evaluations{0};
};

/**
 * Least-squares fit of the chain to observed stage squeezings, in dB with
 * equal weights. G is always free; the optics transmission, straddle
 * fraction and the excess-noise pair are free only when a target constrains
 * them (optics, cut, and an optimized-gain reading respectively). Fixed
 * parameters keep the values in `initial`.
 *
 * Throws ValidationError for an empty or duplicated target list and
 * FitError when balanced targets get more squeezed downstream or the best
 * fit misses a target by more than ChainSettings::infeasible_residual_db.
 */
CalibrationResult calibrate_source(std::span<const StageTarget> targets,
                                   const ChainSettings &settings = {},
                                   const ChainParams &initial = {});

} // namespace pqs
