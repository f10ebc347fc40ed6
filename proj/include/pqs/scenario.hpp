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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pqs/calibration.hpp"
#include "pqs/geometry.hpp"
#include "pqs/plasmonic.hpp"
#include "pqs/quantum_source.hpp"

namespace pqs {

struct LossTable {
    double optics_transmission{1.0};
    double quantum_efficiency{0.95};
    /// Sensing-plane transmissions seen by the calibration chain.
    double sensor_probe{0.5};
    double sensor_conjugate{0.9};
    /// Conjugate mask window transmission in the quadrant readout.
    double mask_transmission{0.9};
};

struct GeometryConfig {
    double probe_waist_um{360.0};
    double conjugate_waist_um{360.0};
    double window_size_um{200.0};
    double gap_um{20.0};
    double tilt_deg{26.0};
    double grid_extent_um{2160.0};
    double waist_scan_min_um{100.0};
    double waist_scan_max_um{1000.0};
    std::size_t waist_scan_points{901};

    [[nodiscard]] QuadrantLayout layout() const;
};

struct CalibrationConfig {
    std::vector<StageTarget> targets;
    double cut_fraction{0.25};
    double gain_max{20.0};
    GainConvention gain_convention{GainConvention::amplitude};
    double infeasible_residual_db{1.0};
};

struct SweepConfig {
    std::vector<double> voltages_mv;
};

struct AnalysisConfig {
    /// nullopt selects the optimal attenuation.
    std::optional<double> fixed_gain;
    double regime_gate{5.0};
    double rbw_scale{1.0};
    double operating_wavelength_nm{795.0};
    /// Measured residual squeezing per quadrant; when set, each quadrant's
    /// covariance is rescaled so its optimized ratio matches.
    std::optional<std::array<double, kQuadrants>> quadrant_squeezing_db;
    /// When set, the index couplings are solved so the twin-beam SNR = 1
    /// thresholds equal these voltages.
    std::optional<std::array<double, kQuadrants>> target_thresholds_mv;
};

struct Fig3Config {
    std::array<double, 2> drives_mv{120.0, 60.0};
    double span_hz{20e3};
    std::size_t bins{201};
    double rbw_hz{300.0};
    std::size_t averages{200};
};

struct MonteCarloConfig {
    std::size_t samples{100000};
    std::size_t oracle_samples{10000000};
    unsigned workers{1};
};

struct Scenario {
    std::string name{"default"};
    std::uint64_t seed{2026};
    FwmSourceParams source;
    CalibrationConfig calibration;
    LossTable losses;
    GeometryConfig geometry;
    double cell_size_um{1.0};
    std::array<EOTResonance, kQuadrants> sensors{};
    IndexModulation modulation;
    SweepConfig sweep;
    AnalysisConfig analysis;
    Fig3Config fig3;
    MonteCarloConfig montecarlo;
    std::string output_dir{"out"};

    [[nodiscard]] ChainSettings chain_settings() const;
    [[nodiscard]] QuadrantLayout sensor_layout() const { return geometry.layout(); }

    /// Throws ValidationError naming the offending key path.
    void validate() const;
};

/// Parses JSON with // and /* */ comments. Errors carry the key path,
/// e.g. "sensors[2].linewidth_nm: must be > 0".
Scenario parse_scenario(const std::string &text);

/// Throws IoError when the file cannot be read.
Scenario load_scenario(const std::filesystem::path &path);

/// Canonical JSON of every field; parse_scenario(dump_scenario(s)) == s.
std::string dump_scenario(const Scenario &s);

bool operator==(const Scenario &a, const Scenario &b);

} // namespace pqs
