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

#include "pqs/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "pqs/detection.hpp"
#include "pqs/error.hpp"

namespace pqs {

double signal_estimate(double s_on, double s_off) { return s_on - s_off; }

SnrValue snr(double signal, double s_off) {
    if (!(s_off > 0.0)) {
        throw NumericError("SNR undefined for non-positive noise power");
    }
    if (signal < 0.0) {
        return {0.0, true};
    }
    return {std::sqrt(signal / s_off), false};
}

CoherentSnr snr_coherent(double signal_from_twin_beams, double s_off_cs,
                         double snr_tb_at_estimate, double regime_gate) {
    const SnrValue v = snr(signal_from_twin_beams, s_off_cs);
    return {v.value, snr_tb_at_estimate >= regime_gate};
}

SnrValue optimal_classical_snr(double signal, double probe_only_noise) {
    return snr(signal, probe_only_noise);
}

PairNoise pair_noise(const QuadrantReadout &probe, const QuadrantReadout &conj) {
    PairNoise out;
    out.correlated = probe.quadrant == conj.quadrant;
    out.gain = probe.gain;
    const LossChannel ch{probe.channel.eta_p, conj.channel.eta_c};
    const TwinBeamMoments m{probe.moments.mean_p, conj.moments.mean_c, probe.moments.var_p,
                            conj.moments.var_c, out.correlated ? probe.moments.cov : 0.0};
    const double scale = probe.rbw_scale;
    out.twin_beam = scale * difference_noise(m, ch, out.gain);
    out.coherent = scale * snl_noise(m.mean_p, m.mean_c, ch, out.gain);
    out.optimal_classical = scale * snl_noise(m.mean_p, 0.0, ch, 0.0);
    return out;
}

std::vector<SNRPoint> SNRCurve::trace(Trace t) const {
    std::vector<SNRPoint> out;
    out.reserve(points.size());
    for (const SweepPoint &p : points) {
        double floor = noise.twin_beam;
        double value = p.snr_tb;
        if (t == Trace::coherent) {
            floor = noise.coherent;
            value = p.snr_cs;
        } else if (t == Trace::optimal_classical) {
            floor = noise.optimal_classical;
            value = p.snr_opt;
        }
        out.push_back({p.drive_mv, floor + p.signal, floor, value});
    }
    return out;
}

SNRCurve snr_sweep(const QuadrantReadout &probe, const QuadrantReadout &conj,
                   std::span<const double> voltages, double regime_gate) {
    detail::require(!voltages.empty(), "sweep voltages must not be empty");
    for (std::size_t i = 0; i < voltages.size(); ++i) {
        detail::require(std::isfinite(voltages[i]) && voltages[i] >= 0.0,
                        "sweep voltages must be >= 0");
        detail::require(i == 0 || voltages[i] > voltages[i - 1],
                        "sweep voltages must be strictly increasing");
    }
    SNRCurve curve;
    curve.probe = probe.quadrant;
    curve.conj = conj.quadrant;
    curve.noise = pair_noise(probe, conj);
    curve.points.reserve(voltages.size());
    for (double v : voltages) {
        SweepPoint p;
        p.drive_mv = v;
        p.signal = probe.signal_per_mv2 * v * v;
        p.snr_tb = snr(p.signal, curve.noise.twin_beam).value;
        p.snr_opt = optimal_classical_snr(p.signal, curve.noise.optimal_classical).value;
        curve.points.push_back(p);
    }
    const double snr_tb_max = curve.points.empty() ? 0.0 : curve.points.back().snr_tb;
    curve.regime_ok = snr_tb_max >= regime_gate;
    for (SweepPoint &p : curve.points) {
        p.snr_cs = snr_coherent(p.signal, curve.noise.coherent, snr_tb_max, regime_gate).value;
    }
    return curve;
}

Threshold threshold_voltage(std::span<const SNRPoint> curve, ThresholdMethod method) {
    if (curve.empty()) {
        throw SearchError("empty SNR curve");
    }
    double max_snr = 0.0;
    for (const SNRPoint &p : curve) {
        max_snr = std::max(max_snr, p.snr);
    }
    Threshold out;
    out.extrapolated = max_snr < 1.0;

    if (method == ThresholdMethod::highest_point) {
        const auto it = std::max_element(curve.begin(), curve.end(), [](const auto &a, const auto &b) {
            return a.drive_mv < b.drive_mv;
        });
        if (!(it->snr > 0.0) || !(it->drive_mv > 0.0)) {
            throw SearchError("SNR curve has no positive point to scale from");
        }
        out.voltage = it->drive_mv / it->snr;
        return out;
    }
    // SNR = a V, a = sum(V snr) / sum(V^2).
    double num = 0.0;
    double den = 0.0;
    for (const SNRPoint &p : curve) {
        num += p.drive_mv * p.snr;
        den += p.drive_mv * p.drive_mv;
    }
    if (!(num > 0.0) || !(den > 0.0)) {
        throw SearchError("SNR curve has no positive slope");
    }
    out.voltage = den / num;
    return out;
}

double enhancement(double v_cs, double v_tb) {
    detail::require(v_cs > 0.0 && v_tb > 0.0, "thresholds must be > 0");
    return (v_cs / v_tb - 1.0) * 100.0;
}

EnhancementReport enhancement_report(const SNRCurve &curve, ThresholdMethod method) {
    EnhancementReport r;
    r.probe = curve.probe;
    r.conj = curve.conj;
    r.v_tb = threshold_voltage(curve.trace(SNRCurve::Trace::twin_beam), method);
    r.v_cs = threshold_voltage(curve.trace(SNRCurve::Trace::coherent), method);
    r.v_opt = threshold_voltage(curve.trace(SNRCurve::Trace::optimal_classical), method);
    r.enhancement_pct = enhancement(r.v_cs.voltage, r.v_tb.voltage);
    return r;
}

std::vector<std::pair<QuadrantIndex, QuadrantIndex>> all_quadrant_pairs() {
    std::vector<std::pair<QuadrantIndex, QuadrantIndex>> out;
    for (QuadrantIndex i = 0; i < kQuadrants; ++i) {
        for (QuadrantIndex j = 0; j < kQuadrants; ++j) {
            out.emplace_back(i, j);
        }
    }
    return out;
}

} // namespace pqs
