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

#include "pqs/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "pqs/detection.hpp"
#include "pqs/error.hpp"
#include "pqs/experiment.hpp"
#include "pqs/montecarlo.hpp"
#include "pqs/optics.hpp"
#include "pqs/quantum_source.hpp"
#include "pqs/rng.hpp"
#include "pqs/units.hpp"

namespace pqs {

namespace {

constexpr double kSigmaTolerance = 5.0;

double rel_err(double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

// Largest |empirical - analytic| / se over the five moments.
double worst_z(const EmpiricalMoments &e, const TwinBeamMoments &a) {
    const double d[5] = {e.moments.mean_p - a.mean_p, e.moments.mean_c - a.mean_c,
                         e.moments.var_p - a.var_p, e.moments.var_c - a.var_c,
                         e.moments.cov - a.cov};
    const double se[5] = {e.se_mean_p, e.se_mean_c, e.se_var_p, e.se_var_c, e.se_cov};
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
        if (se[i] > 0.0) {
            worst = std::max(worst, std::abs(d[i]) / se[i]);
        } else if (d[i] != 0.0) {
            return std::numeric_limits<double>::infinity();
        }
    }
    return worst;
}

CheckResult sigma_check(std::string name, double z, const std::string &what) {
    CheckResult c;
    c.name = std::move(name);
    c.statistic = z;
    c.tolerance = kSigmaTolerance;
    c.passed = z <= kSigmaTolerance;
    c.detail = "worst deviation in standard errors; " + what;
    return c;
}

FwmSourceParams ideal(double g, double n) {
    FwmSourceParams p;
    p.gain = g;
    p.seed_flux = n;
    return p;
}

} // namespace

std::size_t fock_truncation_for(double gain, double seed_mean) {
    for (std::size_t k = 16; k <= 4096; k *= 2) {
        try {
            (void)fock_two_mode_squeezer_moments(gain, seed_mean, k);
            return k;
        } catch (const NumericError &) {
        }
    }
    throw NumericError("no Fock truncation up to 4096 reaches tail mass 1e-10");
}

CheckResult check_formula_identities(std::uint64_t seed, std::size_t tuples) {
    double worst_identity = 0.0;
    double worst_scan = 0.0;
    double worst_cov = 0.0;
    for (std::size_t i = 0; i < tuples; ++i) {
        CounterRng rng(seed, 0x6000'0000ULL, i);
        FwmSourceParams p;
        p.gain = 1.0 + 4.0 * rng.uniform();
        p.seed_flux = std::exp(std::log(0.1) + std::log(1e3) * rng.uniform());
        p.excess_correlated = 0.2 * rng.uniform() * rng.uniform();
        p.excess_uncorrelated = 0.2 * rng.uniform() * rng.uniform();
        TwinBeamMoments m = fwm_moments(p);
        m.cov *= rng.uniform();
        const LossChannel ch{0.01 + 0.99 * rng.uniform(), 0.01 + 0.99 * rng.uniform()};

        const double scale = probe_noise_term(m, ch);
        const double g = optimal_gain(m, ch);
        const double mn = min_difference_noise(m, ch);
        worst_identity = std::max(worst_identity, std::abs(mn - difference_noise(m, ch, g)) / scale);

        for (int k = 0; k <= 200; ++k) {
            const double gs = 3.0 * std::max(g, 1e-3) * k / 200.0;
            const double below = mn - difference_noise(m, ch, gs);
            worst_scan = std::max(worst_scan, below / scale);
        }

        const double vd = difference_noise(m, {1.0, 1.0}, 1.0);
        const double c = covariance_from_noise(m.var_p, m.var_c, vd);
        worst_cov = std::max(worst_cov, std::abs(c - m.cov) / (m.var_p + m.var_c));
    }
    CheckResult r;
    r.name = "formula_identities";
    r.statistic = std::max({worst_identity, worst_scan, worst_cov});
    r.tolerance = 1e-12;
    r.passed = r.statistic <= r.tolerance;
    r.detail = std::to_string(tuples) + " random tuples; min-noise identity " + fmt(worst_identity) +
               ", scan undershoot " + fmt(worst_scan) + ", covariance round trip " +
               fmt(worst_cov) + " (relative to the probe noise term)";
    return r;
}

CheckResult check_fock_closed_forms() {
    double worst = 0.0;
    std::string where;
    const std::pair<double, double> cases[] = {{1.05, 0.5}, {1.1, 1.0}, {1.2, 1.0}, {1.2, 2.0},
                                               {1.3, 4.0},  {1.3, 0.25}, {2.0, 1.0}};
    for (const auto &[g, n] : cases) {
        const std::size_t k = fock_truncation_for(g, n);
        const TwinBeamMoments f = fock_stimulated_moments(g, n, k);
        const TwinBeamMoments a = fwm_moments(ideal(g, n));
        const double e = std::max({rel_err(f.mean_p, a.mean_p), rel_err(f.mean_c, a.mean_c),
                                   rel_err(f.var_p, a.var_p), rel_err(f.var_c, a.var_c),
                                   rel_err(f.cov, a.cov)});
        if (e >= worst) {
            worst = e;
            where = "G=" + fmt(g) + " N=" + fmt(n);
        }
    }
    CheckResult r;
    r.name = "fock_closed_forms";
    r.statistic = worst;
    r.tolerance = 1e-6;
    r.passed = worst <= r.tolerance;
    r.detail = "max relative error of seeded-minus-vacuum Fock moments vs closed forms (worst at " +
               where + ")";
    return r;
}

CheckResult check_fock_squeezed_vacuum() {
    double worst = 0.0;
    for (double g : {1.0, 1.1, 1.3, 2.0}) {
        const std::size_t k = fock_truncation_for(g, 0.0);
        const TwinBeamMoments m = fock_two_mode_squeezer_moments(g, 0.0, k).moments;
        const double scale = std::max(m.var_p, 1.0);
        worst = std::max({worst, std::abs(m.mean_p - (g - 1.0)) / std::max(g - 1.0, 1.0),
                          std::abs(m.mean_c - (g - 1.0)) / std::max(g - 1.0, 1.0),
                          std::abs(m.var_p - m.cov) / scale, std::abs(m.var_c - m.cov) / scale});
    }
    CheckResult r;
    r.name = "fock_squeezed_vacuum";
    r.statistic = worst;
    r.tolerance = 1e-6;
    r.passed = worst <= r.tolerance;
    r.detail = "unseeded squeezer: mean vs G-1 and var vs cov, relative";
    return r;
}

CheckResult check_binomial_thinning(const VerifyOptions &o) {
    const double g = 2.0;
    const double n0 = 1.0;
    const LossChannel ch{0.5, 0.9};
    const std::size_t k = fock_truncation_for(g, n0);
    const FockDistribution dist(g, n0, k);
    std::vector<std::int64_t> np;
    std::vector<std::int64_t> nc;
    dist.sample(o.oracle_samples, o.seed, 1, np, nc);
    const std::vector<std::int64_t> tp = thinning_loss(np, ch.eta_p, o.seed, 2);
    const std::vector<std::int64_t> tc = thinning_loss(nc, ch.eta_c, o.seed, 3);
    const std::vector<double> xp(tp.begin(), tp.end());
    const std::vector<double> xc(tc.begin(), tc.end());
    const TwinBeamMoments full = fock_two_mode_squeezer_moments(g, n0, k).moments;
    const double z = worst_z(estimate_moments(xp, xc), apply_loss(full, ch));
    return sigma_check("binomial_thinning", z,
                       std::to_string(o.oracle_samples) +
                           " Fock photon-number draws (G=2, N=1) thinned with eta = (0.5, 0.9) vs the loss map");
}

CheckResult check_gaussian_thinning(const VerifyOptions &o) {
    // Bright seed: a dim Gaussian pair goes negative and the clamp inside
    // the thinning noise would bias it.
    const TwinBeamMoments m = fwm_moments(ideal(2.0, 1000.0));
    const LossChannel ch{0.5, 0.9};
    const PairSamples s = sample_pair(m, o.oracle_samples, o.seed, 10, o.workers);
    const std::vector<double> tp = thinning_loss(s.probe, ch.eta_p, o.seed, 11);
    const std::vector<double> tc = thinning_loss(s.conj, ch.eta_c, o.seed, 12);
    const double z = worst_z(estimate_moments(tp, tc), apply_loss(m, ch));
    return sigma_check("gaussian_thinning", z,
                       std::to_string(o.oracle_samples) +
                           " Gaussian pairs (G=2, N=1000) thinned with eta = (0.5, 0.9) vs the loss map");
}

CheckResult check_difference_noise_sampled(const VerifyOptions &o) {
    const TwinBeamMoments m = fwm_moments(ideal(2.0, 1.0));
    const LossChannel ch{0.5, 0.9};
    const PairSamples s = sample_pair(apply_loss(m, ch), o.oracle_samples, o.seed, 20, o.workers);
    double worst = 0.0;
    for (double g : {0.0, 1.0, optimal_gain(m, ch)}) {
        const VarianceEstimate v = difference_variance(s.probe, s.conj, g);
        worst = std::max(worst, std::abs(v.value - difference_noise(m, ch, g)) / v.standard_error);
    }
    return sigma_check("difference_noise_sampled", worst,
                       "variance of p - g c for g in {0, 1, g_opt} vs the closed form");
}

namespace {

CoherenceGrid oracle_grid() { return build_coherence_grid(360.0, 360.0, 120.0, 2160.0); }

TwinBeamMoments oracle_beam() {
    FwmSourceParams p = ideal(2.0, 1000.0);
    p.excess_correlated = 1e-4;
    p.excess_uncorrelated = 2e-4;
    return fwm_moments(p);
}

} // namespace

CheckResult check_grid_quadrant_sums(const VerifyOptions &o) {
    const CoherenceGrid grid = oracle_grid();
    const TwinBeamMoments beam = oracle_beam();
    const std::vector<CellMoments> cells = partition_moments(grid, beam);
    std::array<TwinBeamMoments, kQuadrants> want{};
    for (const CellMoments &c : cells) {
        TwinBeamMoments &w = want[c.quadrant];
        w.mean_p += c.moments.mean_p;
        w.mean_c += c.moments.mean_c;
        w.var_p += c.moments.var_p;
        w.var_c += c.moments.var_c;
        w.cov += c.moments.cov;
    }
    const SampleBatch b = sample_photocurrents(cells, o.grid_samples, o.seed, o.workers);
    double z = 0.0;
    for (QuadrantIndex q = 0; q < kQuadrants; ++q) {
        z = std::max(z, worst_z(estimate_moments(b.probe[q], b.conj[q]), want[q]));
    }
    return sigma_check("grid_quadrant_sums", z,
                       std::to_string(o.grid_samples) + " draws over " +
                           std::to_string(cells.size()) +
                           " coherence cells; per-quadrant moments vs the analytic cell sums");
}

CheckResult check_sampler_determinism(const VerifyOptions &o) {
    const CoherenceGrid grid = oracle_grid();
    const TwinBeamMoments beam = oracle_beam();
    const std::size_t n = 2000;
    const SampleBatch a = sample_photocurrents(grid, beam, n, o.seed, 1);
    const SampleBatch b = sample_photocurrents(grid, beam, n, o.seed, 8);
    std::size_t mismatches = 0;
    for (QuadrantIndex q = 0; q < kQuadrants; ++q) {
        for (std::size_t i = 0; i < n; ++i) {
            mismatches += std::memcmp(&a.probe[q][i], &b.probe[q][i], sizeof(double)) != 0;
            mismatches += std::memcmp(&a.conj[q][i], &b.conj[q][i], sizeof(double)) != 0;
        }
    }
    CheckResult r;
    r.name = "sampler_determinism";
    r.statistic = static_cast<double>(mismatches);
    r.tolerance = 0.0;
    r.passed = mismatches == 0;
    r.detail = "bitwise mismatches between 1 and 8 workers";
    return r;
}

CheckResult check_cell_independence(const VerifyOptions &o) {
    const CoherenceGrid grid = oracle_grid();
    const SampleBatch b = sample_photocurrents(grid, oracle_beam(), o.grid_samples, o.seed + 1, o.workers);
    // Distinct quadrants share no cells, so every cross-quadrant covariance
    // must vanish.
    double chi2 = 0.0;
    int dof = 0;
    auto add = [&](const std::vector<double> &x, const std::vector<double> &y) {
        const EmpiricalMoments e = estimate_moments(x, y);
        const double z = e.moments.cov / e.se_cov;
        chi2 += z * z;
        ++dof;
    };
    for (QuadrantIndex i = 0; i < kQuadrants; ++i) {
        for (QuadrantIndex j = 0; j < kQuadrants; ++j) {
            if (i == j) {
                continue;
            }
            add(b.probe[i], b.conj[j]);
            if (i < j) {
                add(b.probe[i], b.probe[j]);
                add(b.conj[i], b.conj[j]);
            }
        }
    }
    // Wilson-Hilferty 0.999 quantile of chi-squared.
    const double k = dof;
    const double zq = 3.090232306;
    const double crit = k * std::pow(1.0 - 2.0 / (9.0 * k) + zq * std::sqrt(2.0 / (9.0 * k)), 3);
    CheckResult r;
    r.name = "cell_independence";
    r.statistic = chi2;
    r.tolerance = crit;
    r.passed = chi2 <= crit;
    r.detail = "chi-squared of " + std::to_string(dof) +
               " cross-quadrant covariances against 0 (0.999 quantile)";
    return r;
}

SnlLinearity snl_linearity(const QuadrantReadout &r, const std::vector<double> &power_scales,
                           std::size_t n, std::uint64_t seed, unsigned workers) {
    detail::require(!power_scales.empty(), "need at least one power");
    SnlLinearity out;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < power_scales.size(); ++k) {
        const double s = power_scales[k];
        detail::require(s > 0.0, "power scales must be > 0");
        const TwinBeamMoments coh =
            TwinBeamMoments::coherent(s * r.moments.mean_p, s * r.moments.mean_c);
        const PairSamples x = sample_pair(apply_loss(coh, r.channel), n, seed, 0x7000'0000ULL + k, workers);
        SnlPoint p;
        p.power_scale = s;
        p.total_mean = coh.mean_p + coh.mean_c;
        p.sampled = difference_variance(x.probe, x.conj, r.gain).value;
        p.analytic = snl_noise(coh.mean_p, coh.mean_c, r.channel, r.gain);
        num += p.total_mean * p.sampled;
        den += p.total_mean * p.total_mean;
        out.worst_db = std::max(out.worst_db, std::abs(to_db(p.sampled / p.analytic)));
        out.points.push_back(p);
    }
    out.fitted_slope = num / den;
    out.analytic_slope = out.points.front().analytic / out.points.front().total_mean;
    out.worst_db = std::max(out.worst_db, std::abs(to_db(out.fitted_slope / out.analytic_slope)));
    return out;
}

CheckResult check_snl_linearity(const Scenario &s, const VerifyOptions &o) {
    const QuadrantModel model = build_quadrant_model(s);
    double worst = 0.0;
    for (QuadrantIndex q = 0; q < kQuadrants; ++q) {
        const SnlLinearity l = snl_linearity(model.readouts[q], {0.25, 0.5, 1.0, 2.0, 4.0},
                                             o.grid_samples, o.seed + 100 + q, o.workers);
        worst = std::max(worst, l.worst_db);
    }
    CheckResult r;
    r.name = "snl_linearity";
    r.statistic = worst;
    r.tolerance = 0.2;
    r.passed = worst <= r.tolerance;
    r.detail = "dB deviation of sampled coherent-state noise and its fitted slope from the "
               "analytic SNL, five powers per quadrant";
    return r;
}

std::vector<CheckResult> run_oracle_suite(const Scenario &s, const VerifyOptions &o) {
    std::vector<CheckResult> out;
    out.push_back(check_formula_identities(o.seed));
    out.push_back(check_fock_closed_forms());
    out.push_back(check_fock_squeezed_vacuum());
    out.push_back(check_binomial_thinning(o));
    out.push_back(check_gaussian_thinning(o));
    out.push_back(check_difference_noise_sampled(o));
    out.push_back(check_grid_quadrant_sums(o));
    out.push_back(check_sampler_determinism(o));
    out.push_back(check_cell_independence(o));
    out.push_back(check_snl_linearity(s, o));
    return out;
}

} // namespace pqs
