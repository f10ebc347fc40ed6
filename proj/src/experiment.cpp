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

#include "pqs/experiment.hpp"

#include <cmath>
#include <sstream>

#include "pqs/detection.hpp"
#include "pqs/error.hpp"
#include "pqs/plasmonic.hpp"
#include "pqs/rng.hpp"
#include "pqs/units.hpp"

namespace pqs {

double fit_covariance_scale(const TwinBeamMoments &m, const LossChannel &ch, double target_db) {
    m.validate();
    if (!(m.cov > 0.0)) {
        throw SearchError("covariance scale undefined: the cut state carries no covariance");
    }
    const double c_max = std::sqrt(m.var_p * m.var_c) / m.cov;
    auto ratio_db = [&](double c) {
        TwinBeamMoments x = m;
        x.cov = std::min(c * m.cov, std::sqrt(m.var_p * m.var_c));
        return squeezing_report(x, ch).ratio_db;
    };
    double lo = 0.0;
    double hi = c_max;
    const double r_lo = ratio_db(lo);
    const double r_hi = ratio_db(hi);
    if (!(target_db <= r_lo && target_db >= r_hi)) {
        std::ostringstream os;
        os << "squeezing target " << target_db << " dB outside the reachable range [" << r_hi
           << ", " << r_lo << "] dB";
        throw SearchError(os.str());
    }
    // The optimized ratio falls monotonically as the covariance grows.
    for (int i = 0; i < 200 && hi - lo > 1e-15 * c_max; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (ratio_db(mid) > target_db) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double volts_to_index_for_threshold(const EOTResonance &r, double lambda_nm, double probe_mean,
                                    double noise_floor, double threshold_mv) {
    detail::require(threshold_mv > 0.0, "threshold voltage must be > 0");
    detail::require(noise_floor > 0.0, "noise floor must be > 0");
    const double t = transmission_at(r, lambda_nm);
    const double slope = std::abs(transduction_slope(r, lambda_nm));
    if (!(t > 0.0) || !(slope > 0.0) || !(probe_mean > 0.0)) {
        throw NumericError("operating point has no transduction");
    }
    // S(V) = (I |dT/dn| k V / T)^2 / 2 = noise at V = threshold.
    return t * std::sqrt(2.0 * noise_floor) / (probe_mean * slope * threshold_mv);
}

std::string pair_label(QuadrantIndex p, QuadrantIndex c) {
    return "p" + std::to_string(p + 1) + "c" + std::to_string(c + 1);
}

QuadrantModel build_quadrant_model(const Scenario &s) {
    s.validate();
    QuadrantModel out;
    out.source = fwm_moments(s.source);
    out.post_optics = apply_loss(
        out.source, {s.losses.optics_transmission, s.losses.optics_transmission});
    const CoherenceGrid grid =
        build_coherence_grid(s.geometry.probe_waist_um, s.geometry.conjugate_waist_um,
                             s.cell_size_um, s.geometry.grid_extent_um);
    const QuadrantLayout layout = s.sensor_layout();
    const double qe = s.losses.quantum_efficiency;
    const double lambda = s.analysis.operating_wavelength_nm;

    for (QuadrantIndex q = 0; q < kQuadrants; ++q) {
        out.cuts[q] = quadrant_cut_detail(out.post_optics, grid, layout, q);
        out.sensor_transmission[q] = transmission_at(s.sensors[q], lambda);
        const LossChannel ch{out.sensor_transmission[q] * qe, s.losses.mask_transmission * qe};

        TwinBeamMoments m = out.cuts[q].moments;
        if (s.analysis.quadrant_squeezing_db) {
            out.covariance_scale[q] =
                fit_covariance_scale(m, ch, (*s.analysis.quadrant_squeezing_db)[q]);
            m.cov = std::min(m.cov * out.covariance_scale[q], std::sqrt(m.var_p * m.var_c));
        }
        const NoiseReport rep = squeezing_report(m, ch, s.analysis.fixed_gain);
        out.squeezing_db[q] = rep.ratio_db;

        QuadrantReadout &r = out.readouts[q];
        r.quadrant = q;
        r.moments = m;
        r.channel = ch;
        r.gain = rep.gain;
        r.rbw_scale = s.analysis.rbw_scale;
    }

    for (QuadrantIndex q = 0; q < kQuadrants; ++q) {
        QuadrantReadout &r = out.readouts[q];
        const double probe_mean = r.channel.eta_p * r.moments.mean_p;
        double kappa = s.modulation.volts_to_index[q];
        if (s.analysis.target_thresholds_mv) {
            const double floor = pair_noise(r, r).twin_beam;
            kappa = volts_to_index_for_threshold(s.sensors[q], lambda, probe_mean, floor,
                                                 (*s.analysis.target_thresholds_mv)[q]);
        }
        out.volts_to_index[q] = kappa;
        IndexModulation mod = s.modulation;
        mod.volts_to_index[q] = kappa;
        mod.drive_mv = 1.0;
        r.signal_per_mv2 = modulation_signal(s.sensors[q], mod, q, probe_mean, lambda);
    }
    return out;
}

Fig4Result run_fig4(const Scenario &s, std::size_t samples, std::uint64_t seed, unsigned workers) {
    Fig4Result out;
    out.model = build_quadrant_model(s);
    for (const auto &[i, j] : all_quadrant_pairs()) {
        PairResult pr;
        pr.curve = snr_sweep(out.model.readouts[i], out.model.readouts[j], s.sweep.voltages_mv,
                             s.analysis.regime_gate);
        pr.report = enhancement_report(pr.curve);
        if (samples > 0 && i == j) {
            pr.sampled = sampled_snr_sweep(out.model.readouts[i], out.model.readouts[j],
                                           s.sweep.voltages_mv, samples, seed, workers);
            pr.sampled_v_tb = threshold_voltage(pr.sampled->twin_beam, ThresholdMethod::least_squares);
            pr.sampled_v_cs = threshold_voltage(pr.sampled->coherent, ThresholdMethod::least_squares);
        }
        out.pairs.push_back(std::move(pr));
    }
    return out;
}

Fig3Result run_fig3(const Scenario &s, std::uint64_t seed) {
    Fig3Result out;
    out.model = build_quadrant_model(s);
    const Fig3Config &f = s.fig3;
    const double f0 = s.modulation.frequency_hz;
    // Gaussian RBW filter: FWHM = rbw_hz.
    const double sigma = f.rbw_hz / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    constexpr std::uint64_t kStreamFig3 = 0x5000'0000ULL;

    for (QuadrantIndex q = 0; q < kQuadrants; ++q) {
        const QuadrantReadout &r = out.model.readouts[q];
        const PairNoise noise = pair_noise(r, r);
        std::array<double, 2> signal{};
        for (std::size_t d = 0; d < 2; ++d) {
            signal[d] = r.signal_per_mv2 * f.drives_mv[d] * f.drives_mv[d];
        }
        out.drive_ratio_db[q] = signal[1] > 0.0 ? to_db(signal[0] / signal[1]) : 0.0;

        // One averaged periodogram per trace and bin.
        auto averaged = [&](std::uint64_t trace, std::size_t bin) {
            CounterRng rng(seed, kStreamFig3 + q * 16 + trace, bin);
            double acc = 0.0;
            for (std::size_t k = 0; k < f.averages; ++k) {
                acc += -std::log(rng.uniform());
            }
            return acc / static_cast<double>(f.averages);
        };

        for (std::size_t b = 0; b < f.bins; ++b) {
            const double fr = f0 - 0.5 * f.span_hz +
                              f.span_hz * static_cast<double>(b) / static_cast<double>(f.bins - 1);
            const double w = std::exp(-0.5 * (fr - f0) * (fr - f0) / (sigma * sigma));
            Fig3Row row;
            row.quadrant = q;
            row.frequency_hz = fr;
            row.snl_db = to_db(averaged(0, b));
            row.squeezed_db = to_db(noise.twin_beam * averaged(1, b) / noise.coherent);
            for (std::size_t d = 0; d < 2; ++d) {
                const double p = noise.twin_beam * averaged(2 + d, b) + signal[d] * w;
                row.driven_db[d] = to_db(p / noise.coherent);
            }
            out.rows.push_back(row);
        }
    }
    return out;
}

BudgetResult run_budget(const Scenario &s) {
    BudgetResult out;
    const ChainSettings cs = s.chain_settings();
    const double qe = s.losses.quantum_efficiency;
    const LossChannel det{qe, qe};
    const LossChannel sensor{s.losses.sensor_probe, s.losses.sensor_conjugate};

    if (!s.calibration.targets.empty()) {
        out.calibration = calibrate_source(s.calibration.targets, cs);
        if (out.calibration->fitted_cut) {
            out.calibrated_cell_size_um = solve_cell_size_for_straddle(
                s.geometry.probe_waist_um, out.calibration->params.straddle_fraction,
                s.geometry.grid_extent_um);
        }
    }

    const TwinBeamMoments src = fwm_moments(s.source);
    const TwinBeamMoments opt =
        apply_loss(src, {s.losses.optics_transmission, s.losses.optics_transmission});
    const CoherenceGrid grid =
        build_coherence_grid(s.geometry.probe_waist_um, s.geometry.conjugate_waist_um,
                             s.cell_size_um, s.geometry.grid_extent_um);
    const TwinBeamMoments cut = quadrant_cut(opt, grid, QuadrantLayout::razor_cut(), 0);

    auto balanced = [&](const std::string &name, const TwinBeamMoments &m) {
        BudgetRow r;
        r.stage = name;
        r.gain = 1.0;
        r.gain_db = 0.0;
        r.squeezing_db = squeezing_report(m, {1.0, 1.0}, 1.0).ratio_db;
        r.detected_db = squeezing_report(m, det, 1.0).ratio_db;
        return r;
    };
    out.rows.push_back(balanced("source", src));
    out.rows.push_back(balanced("optics", opt));
    out.rows.push_back(balanced("cut", cut));

    const NoiseReport at_sensor = squeezing_report(cut, sensor, s.analysis.fixed_gain);
    const NoiseReport detected = squeezing_report(cut, sensor.then(det), s.analysis.fixed_gain);
    out.rows.push_back({"sensor/mask", at_sensor.gain, gain_to_db(at_sensor.gain, cs.gain_convention),
                        at_sensor.ratio_db, squeezing_report(cut, sensor.then(det), at_sensor.gain).ratio_db});
    out.rows.push_back({"detector", detected.gain, gain_to_db(detected.gain, cs.gain_convention),
                        detected.ratio_db, detected.ratio_db});

    out.model = build_quadrant_model(s);
    for (QuadrantIndex q = 0; q < kQuadrants; ++q) {
        const QuadrantReadout &r = out.model.readouts[q];
        const double db = out.model.squeezing_db[q];
        out.rows.push_back({"quadrant q" + std::to_string(q + 1), r.gain,
                            gain_to_db(r.gain, cs.gain_convention), db, db});
    }
    return out;
}

} // namespace pqs
