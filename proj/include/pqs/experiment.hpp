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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pqs/analysis.hpp"
#include "pqs/calibration.hpp"
#include "pqs/montecarlo.hpp"
#include "pqs/optics.hpp"
#include "pqs/scenario.hpp"

namespace pqs {

/// Per-quadrant readout of a scenario: source, optics loss, window
/// selection on the coherence grid, then sensor (probe) or mask (conjugate)
/// transmission and the detector efficiency.
struct QuadrantModel {
    TwinBeamMoments source;
    TwinBeamMoments post_optics;
    std::array<QuadrantCut, kQuadrants> cuts{};
    /// Factor applied to each cut covariance to meet the measured squeezing
    /// (1 when no measured values are configured).
    std::array<double, kQuadrants> covariance_scale{1.0, 1.0, 1.0, 1.0};
    std::array<double, kQuadrants> sensor_transmission{};
    std::array<double, kQuadrants> squeezing_db{};
    std::array<double, kQuadrants> volts_to_index{};
    std::array<QuadrantReadout, kQuadrants> readouts{};
};

QuadrantModel build_quadrant_model(const Scenario &s);

/**
 * Covariance multiplier c making the optimized noise ratio of
 * (m with cov -> c cov) through `ch` equal `target_db`. c is bracketed by
 * 0 and the Cauchy-Schwarz limit; SearchError if the target lies outside.
 */
double fit_covariance_scale(const TwinBeamMoments &m, const LossChannel &ch, double target_db);

/// Index coupling putting the twin-beam SNR = 1 threshold of a correlated
/// pair at `threshold_mv`, in closed form from S = V^2 x signal_per_mv2.
double volts_to_index_for_threshold(const EOTResonance &r, double lambda_nm, double probe_mean,
                                    double noise_floor, double threshold_mv);

std::string pair_label(QuadrantIndex p, QuadrantIndex c);

struct PairResult {
    SNRCurve curve;
    EnhancementReport report;
    std::optional<SampledCurve> sampled;
    std::optional<Threshold> sampled_v_tb;
    std::optional<Threshold> sampled_v_cs;
};

struct Fig4Result {
    QuadrantModel model;
    std::vector<PairResult> pairs;
};

/// 16-pair sweep. With `samples > 0` the correlated pairs are also sampled
/// and their thresholds extracted by least squares.
Fig4Result run_fig4(const Scenario &s, std::size_t samples, std::uint64_t seed, unsigned workers);

struct Fig3Row {
    QuadrantIndex quadrant{0};
    double frequency_hz{0.0};
    double snl_db{0.0};
    double squeezed_db{0.0};
    std::array<double, 2> driven_db{};
};

struct Fig3Result {
    QuadrantModel model;
    std::vector<Fig3Row> rows;
    /// S(drive 0) / S(drive 1) per quadrant, in dB.
    std::array<double, kQuadrants> drive_ratio_db{};
};

/// Averaged noise-power spectra around the modulation frequency, relative
/// to the analytic SNL. Each bin averages `averages` exponential periodogram
/// draws; the signal enters through a Gaussian RBW filter centred on the
/// drive frequency.
Fig3Result run_fig3(const Scenario &s, std::uint64_t seed);

struct BudgetRow {
    std::string stage;
    double gain{1.0};
    double gain_db{0.0};
    double squeezing_db{0.0};
    /// Same state read through the detector efficiency.
    double detected_db{0.0};
};

struct BudgetResult {
    std::vector<BudgetRow> rows;
    std::optional<CalibrationResult> calibration;
    /// Cell size reproducing the fitted straddle fraction on a razor cut.
    std::optional<double> calibrated_cell_size_um;
    QuadrantModel model;
};

BudgetResult run_budget(const Scenario &s);

} // namespace pqs
