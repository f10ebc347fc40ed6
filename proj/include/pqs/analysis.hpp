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

#include <span>
#include <vector>

#include "pqs/geometry.hpp"
#include "pqs/moments.hpp"
#include "pqs/optics.hpp"

namespace pqs {

/// One point of a noise-power measurement at a given drive.
struct SNRPoint {
    double drive_mv{0.0};
    double s_on{0.0};
    double s_off{0.0};
    double snr{0.0};
};

struct SnrValue {
    double value{0.0};
    /// A negative signal estimate was clamped to zero.
    bool clamped{false};
};

struct CoherentSnr {
    double value{0.0};
    /// SNR_TB at the estimation point met the high-SNR gate.
    bool regime_ok{true};
};

/// S = s_on - s_off.
double signal_estimate(double s_on, double s_off);

/// sqrt(S / s_off). Negative S clamps to zero; s_off <= 0 throws NumericError.
SnrValue snr(double signal, double s_off);

/// Coherent-state SNR from a signal estimated with twin beams. The estimate
/// is trusted only when the twin-beam SNR at the estimation point reaches
/// `regime_gate`.
CoherentSnr snr_coherent(double signal_from_twin_beams, double s_off_cs,
                         double snr_tb_at_estimate, double regime_gate = 5.0);

/// Single-beam coherent probe with no reference arm.
SnrValue optimal_classical_snr(double signal, double probe_only_noise);

/**
 * Everything needed to read out one quadrant: its selected moments before
 * the window/detector losses, the channel, the attenuation chosen for the
 * correlated pair, and the signal power per mV^2 of drive. Noise powers are
 * variances times `rbw_scale`.
 */
struct QuadrantReadout {
    QuadrantIndex quadrant{0};
    TwinBeamMoments moments;
    LossChannel channel;
    double gain{1.0};
    double signal_per_mv2{0.0};
    double rbw_scale{1.0};
};

struct PairNoise {
    double twin_beam{0.0};
    double coherent{0.0};
    double optimal_classical{0.0};
    double gain{1.0};
    bool correlated{true};
};

/// Noise floors of pair (p_i, c_j). For i != j the beams are independent, so
/// the covariance is dropped and the probe's correlated-pair gain is reused.
PairNoise pair_noise(const QuadrantReadout &probe, const QuadrantReadout &conj);

struct SweepPoint {
    double drive_mv{0.0};
    double signal{0.0};
    double snr_tb{0.0};
    double snr_cs{0.0};
    double snr_opt{0.0};
};

struct SNRCurve {
    QuadrantIndex probe{0};
    QuadrantIndex conj{0};
    PairNoise noise;
    std::vector<SweepPoint> points;
    /// Twin-beam SNR at the highest drive met the coherent-estimate gate.
    bool regime_ok{true};

    [[nodiscard]] bool correlated() const noexcept { return probe == conj; }
    enum class Trace { twin_beam, coherent, optimal_classical };
    [[nodiscard]] std::vector<SNRPoint> trace(Trace t) const;
};

/// Analytic SNR sweep. Voltages must be non-negative and strictly increasing.
SNRCurve snr_sweep(const QuadrantReadout &probe, const QuadrantReadout &conj,
                   std::span<const double> voltages, double regime_gate = 5.0);

enum class ThresholdMethod {
    /// Exact for the analytic model: SNR is linear in V.
    highest_point,
    /// Least-squares line through the origin, for sampled curves.
    least_squares,
};

struct Threshold {
    double voltage{0.0};
    /// The curve never reached SNR = 1; the value is extrapolated.
    bool extrapolated{false};
};

Threshold threshold_voltage(std::span<const SNRPoint> curve,
                            ThresholdMethod method = ThresholdMethod::highest_point);

/// (v_cs / v_tb - 1) * 100.
double enhancement(double v_cs, double v_tb);

struct EnhancementReport {
    QuadrantIndex probe{0};
    QuadrantIndex conj{0};
    Threshold v_tb;
    Threshold v_cs;
    Threshold v_opt;
    double enhancement_pct{0.0};
};

EnhancementReport enhancement_report(const SNRCurve &curve,
                                     ThresholdMethod method = ThresholdMethod::highest_point);

/// All 16 (p_i, c_j) combinations, probe-major.
std::vector<std::pair<QuadrantIndex, QuadrantIndex>> all_quadrant_pairs();

} // namespace pqs
