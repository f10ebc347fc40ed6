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

#include "pqs/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <Eigen/Core>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "pqs/error.hpp"
#include "pqs/units.hpp"

namespace pqs {

const char *stage_name(Stage s) noexcept {
    switch (s) {
    case Stage::source:
        return "source";
    case Stage::optics:
        return "optics";
    case Stage::cut:
        return "cut";
    case Stage::sensor:
        return "sensor";
    }
    return "?";
}

Stage parse_stage(const std::string &label) {
    for (Stage s : {Stage::source, Stage::optics, Stage::cut, Stage::sensor}) {
        if (label == stage_name(s)) {
            return s;
        }
    }
    throw ValidationError("unknown stage label '" + label + "'");
}

void ChainSettings::validate() const {
    detail::require(std::isfinite(seed_flux) && seed_flux > 0.0, "seed flux must be > 0");
    detail::require(quantum_efficiency > 0.0 && quantum_efficiency <= 1.0,
                    "quantum efficiency must lie in (0, 1]");
    detail::require(cut_fraction > 0.0 && cut_fraction <= 1.0, "cut fraction must lie in (0, 1]");
    sensor.validate();
    detail::require(std::isfinite(gain_max) && gain_max > 1.0, "gain bound must be > 1");
    detail::require(infeasible_residual_db > 0.0, "infeasibility threshold must be > 0");
}

FwmSourceParams ChainParams::source(double seed_flux) const {
    FwmSourceParams p;
    p.gain = gain;
    p.seed_flux = seed_flux;
    p.excess_correlated = excess_correlated;
    p.excess_uncorrelated = excess_uncorrelated;
    return p;
}

ChainStates propagate_chain(const ChainParams &p, const ChainSettings &s) {
    ChainStates out;
    out.source = fwm_moments(p.source(s.seed_flux));
    out.optics = apply_loss(out.source, {p.optics_transmission, p.optics_transmission});
    const double f = s.cut_fraction;
    const TwinBeamMoments &o = out.optics;
    out.cut = {f * o.mean_p, f * o.mean_c, f * o.var_p, f * o.var_c,
               f * (1.0 - p.straddle_fraction) * o.cov};
    return out;
}

double gain_to_db(double g, GainConvention c) {
    return c == GainConvention::amplitude ? attenuation_db_amplitude(g) : attenuation_db_power(g);
}

namespace {

StageReading read_stage(Stage st, const TwinBeamMoments &m, const LossChannel &ch,
                        GainConvention conv) {
    StageReading r;
    r.stage = st;
    r.balanced_db = squeezing_report(m, ch, 1.0).ratio_db;
    const NoiseReport opt = squeezing_report(m, ch);
    r.optimal_db = opt.ratio_db;
    r.gain = opt.gain;
    r.gain_db = gain_to_db(opt.gain, conv);
    return r;
}

} // namespace

std::vector<StageReading> chain_readings(const ChainParams &p, const ChainSettings &s) {
    s.validate();
    const ChainStates st = propagate_chain(p, s);
    const LossChannel qe{s.quantum_efficiency, s.quantum_efficiency};
    return {read_stage(Stage::source, st.source, qe, s.gain_convention),
            read_stage(Stage::optics, st.optics, qe, s.gain_convention),
            read_stage(Stage::cut, st.cut, qe, s.gain_convention),
            read_stage(Stage::sensor, st.cut, s.sensor.then(qe), s.gain_convention)};
}

namespace {

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

double logit(double p) {
    p = std::clamp(p, 1e-9, 1.0 - 1e-9);
    return std::log(p / (1.0 - p));
}

// Free parameters in solver coordinates. Bounded quantities go through a
// logistic, non-negative ones through a square.
struct Layout {
    bool optics{false};
    bool cut{false};
    bool excess{false};
    int size() const { return 1 + (optics ? 1 : 0) + (cut ? 1 : 0) + (excess ? 2 : 0); }
};

ChainParams decode(const Eigen::VectorXd &x, const Layout &l, const ChainParams &fixed,
                   double gain_max) {
    ChainParams p = fixed;
    int k = 0;
    p.gain = 1.0 + (gain_max - 1.0) * logistic(x[k++]);
    if (l.optics) {
        p.optics_transmission = logistic(x[k++]);
    }
    if (l.cut) {
        p.straddle_fraction = logistic(x[k++]);
    }
    if (l.excess) {
        p.excess_correlated = x[k] * x[k];
        ++k;
        p.excess_uncorrelated = x[k] * x[k];
        ++k;
    }
    return p;
}

Eigen::VectorXd encode(const ChainParams &p, const Layout &l, double gain_max) {
    Eigen::VectorXd x(l.size());
    int k = 0;
    x[k++] = logit((p.gain - 1.0) / (gain_max - 1.0));
    if (l.optics) {
        x[k++] = logit(p.optics_transmission);
    }
    if (l.cut) {
        x[k++] = logit(p.straddle_fraction);
    }
    if (l.excess) {
        x[k++] = std::sqrt(std::max(p.excess_correlated, 0.0));
        x[k++] = std::sqrt(std::max(p.excess_uncorrelated, 0.0));
    }
    return x;
}

int residual_count(std::span<const StageTarget> t) {
    int n = 0;
    for (const StageTarget &s : t) {
        n += s.gain_db ? 2 : 1;
    }
    return n;
}

void evaluate(const ChainParams &p, const ChainSettings &s, std::span<const StageTarget> targets,
              Eigen::VectorXd &out, std::vector<StageResidual> *detail) {
    const std::vector<StageReading> r = chain_readings(p, s);
    int k = 0;
    for (const StageTarget &t : targets) {
        const StageReading &rd = r[static_cast<std::size_t>(t.stage)];
        const bool optimized = t.stage == Stage::sensor || t.gain_db.has_value();
        const double model = optimized ? rd.optimal_db : rd.balanced_db;
        out[k++] = model - t.squeezing_db;
        if (t.gain_db) {
            out[k++] = rd.gain_db - *t.gain_db;
        }
        if (detail != nullptr) {
            StageResidual res;
            res.stage = t.stage;
            res.target_db = t.squeezing_db;
            res.model_db = model;
            res.target_gain_db = t.gain_db;
            if (t.gain_db) {
                res.model_gain_db = rd.gain_db;
            }
            detail->push_back(res);
        }
    }
    for (; k < out.size(); ++k) {
        out[k] = 0.0;
    }
}

struct ChainFunctor {
    using Scalar = double;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;

    std::span<const StageTarget> targets;
    ChainSettings settings;
    ChainParams fixed;
    Layout layout;
    int n_values{0};
    mutable int calls{0};

    int inputs() const { return layout.size(); }
    int values() const { return n_values; }

    int operator()(const Eigen::VectorXd &x, Eigen::VectorXd &f) const {
        ++calls;
        try {
            evaluate(decode(x, layout, fixed, settings.gain_max), settings, targets, f, nullptr);
        } catch (const Error &) {
            f.setConstant(1e3);
        }
        return 0;
    }
};

void check_order(std::span<const StageTarget> targets) {
    std::array<bool, 4> seen{};
    for (const StageTarget &t : targets) {
        detail::require(std::isfinite(t.squeezing_db), "target squeezing must be finite");
        detail::require(!t.gain_db || std::isfinite(*t.gain_db), "target gain must be finite");
        auto &flag = seen[static_cast<std::size_t>(t.stage)];
        detail::require(!flag, std::string("duplicate target for stage ") + stage_name(t.stage));
        flag = true;
    }
    // Balanced readings pass through pure loss from stage to stage, which
    // cannot deepen squeezing.
    const StageTarget *prev = nullptr;
    for (Stage st : {Stage::source, Stage::optics, Stage::cut}) {
        for (const StageTarget &t : targets) {
            if (t.stage != st || t.gain_db) {
                continue;
            }
            if (prev != nullptr && t.squeezing_db < prev->squeezing_db) {
                std::ostringstream os;
                os << "infeasible targets: " << stage_name(t.stage) << " at " << t.squeezing_db
                   << " dB is more squeezed than " << stage_name(prev->stage) << " at "
                   << prev->squeezing_db << " dB, but only loss separates them";
                throw FitError(os.str());
            }
            prev = &t;
        }
    }
}

} // namespace

CalibrationResult calibrate_source(std::span<const StageTarget> targets,
                                   const ChainSettings &settings, const ChainParams &initial) {
    settings.validate();
    detail::require(!targets.empty(), "calibration needs at least one target");
    check_order(targets);

    Layout layout;
    for (const StageTarget &t : targets) {
        layout.optics = layout.optics || t.stage == Stage::optics;
        layout.cut = layout.cut || t.stage == Stage::cut;
        layout.excess = layout.excess || t.gain_db.has_value();
    }

    ChainFunctor f;
    f.targets = targets;
    f.settings = settings;
    f.fixed = initial;
    f.layout = layout;
    // The minpack driver needs at least as many residuals as unknowns; the
    // padding entries are identically zero.
    f.n_values = std::max(residual_count(targets), layout.size());

    // Deterministic multi-start over the gain and the excess-noise split.
    double g_guess = 2.0;
    for (const StageTarget &t : targets) {
        if (t.stage == Stage::source && t.squeezing_db < 0.0) {
            const double r = from_db(t.squeezing_db);
            g_guess = 0.5 * (1.0 / r + 1.0);
        }
    }
    std::vector<double> gains{g_guess, 1.5, 4.0, 10.0};
    std::vector<std::array<double, 2>> excess{{initial.excess_correlated, initial.excess_uncorrelated}};
    if (layout.excess) {
        excess = {{0.01, 0.01}, {0.1, 0.001}, {0.001, 0.1}};
    }

    Eigen::NumericalDiff<ChainFunctor, Eigen::Central> nd(f);
    Eigen::VectorXd best;
    double best_cost = std::numeric_limits<double>::infinity();
    int evaluations = 0;
    for (double g0 : gains) {
        for (const auto &z : excess) {
            ChainParams start = initial;
            start.gain = std::clamp(g0, 1.0 + 1e-6, settings.gain_max - 1e-6);
            if (layout.optics) {
                start.optics_transmission = 0.95;
            }
            if (layout.cut) {
                start.straddle_fraction = 0.05;
            }
            start.excess_correlated = z[0];
            start.excess_uncorrelated = z[1];
            Eigen::VectorXd x = encode(start, layout, settings.gain_max);
            Eigen::LevenbergMarquardt<decltype(nd)> lm(nd);
            lm.parameters.xtol = 1e-14;
            lm.parameters.ftol = 1e-14;
            lm.parameters.maxfev = 4000;
            lm.minimize(x);
            evaluations += static_cast<int>(lm.nfev);
            Eigen::VectorXd fv(f.n_values);
            f(x, fv);
            const double cost = fv.squaredNorm();
            if (cost < best_cost) {
                best_cost = cost;
                best = x;
            }
        }
    }

    CalibrationResult out;
    out.params = decode(best, layout, initial, settings.gain_max);
    out.source = out.params.source(settings.seed_flux);
    out.fitted_optics = layout.optics;
    out.fitted_cut = layout.cut;
    out.fitted_excess = layout.excess;
    out.gain_bound_active = out.params.gain > settings.gain_max - 1e-4 * (settings.gain_max - 1.0);
    out.evaluations = evaluations;
    Eigen::VectorXd fv(f.n_values);
    evaluate(out.params, settings, targets, fv, &out.residuals);
    out.max_abs_residual_db = fv.cwiseAbs().maxCoeff();
    if (out.max_abs_residual_db > settings.infeasible_residual_db) {
        std::ostringstream os;
        os << "calibration infeasible: best fit misses targets by up to "
           << out.max_abs_residual_db << " dB (";
        for (const StageResidual &r : out.residuals) {
            os << stage_name(r.stage) << " model " << r.model_db << " vs " << r.target_db << "; ";
        }
        os << "G=" << out.params.gain << ")";
        throw FitError(os.str());
    }
    return out;
}

} // namespace pqs
