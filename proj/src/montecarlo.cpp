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

#include "pqs/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "pqs/detection.hpp"
#include "pqs/error.hpp"
#include "pqs/optics.hpp"
#include "pqs/rng.hpp"

namespace pqs {

namespace {

// Stream tags keep the substreams of different routines apart.
constexpr std::uint64_t kStreamCells = 0x1000'0000ULL;
constexpr std::uint64_t kStreamThinning = 0x2000'0000ULL;
constexpr std::uint64_t kStreamFock = 0x3000'0000ULL;
constexpr std::uint64_t kStreamSweep = 0x4000'0000ULL;

struct Cholesky2 {
    double mean_p, mean_c, l11, l21, l22;
};

Cholesky2 factor(const TwinBeamMoments &m) {
    m.validate();
    const double l11 = std::sqrt(m.var_p);
    const double l21 = l11 > 0.0 ? m.cov / l11 : 0.0;
    const double rem = m.var_c - l21 * l21;
    if (rem < -1e-12 * std::max(m.var_c, 1.0)) {
        throw ValidationError("cell covariance matrix is not positive semidefinite");
    }
    return {m.mean_p, m.mean_c, l11, l21, std::sqrt(std::max(rem, 0.0))};
}

struct Neumaier {
    double sum{0.0};
    double comp{0.0};
    void add(double x) noexcept {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    [[nodiscard]] double value() const noexcept { return sum + comp; }
};

double log_choose(std::size_t n, std::size_t k) {
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

// |<n_p, n_c| S(G) |alpha, 0>|^2 on the truncated basis, row-major in n_p.
std::vector<double> fock_probabilities(double gain, double seed_mean, std::size_t k) {
    detail::require(std::isfinite(gain) && gain >= 1.0, "gain must be >= 1");
    detail::require(std::isfinite(seed_mean) && seed_mean >= 0.0, "seed mean must be >= 0");
    detail::require(k >= 2, "Fock truncation must be >= 2");
    std::vector<double> prob(k * k, 0.0);
    const double log_g = std::log(gain);
    const double log_t = gain > 1.0 ? std::log((gain - 1.0) / gain) : 0.0;
    for (std::size_t np = 0; np < k; ++np) {
        for (std::size_t nc = 0; nc <= np; ++nc) {
            if (gain == 1.0 && nc > 0) {
                break;
            }
            const std::size_t n = np - nc;
            double log_seed = 0.0;
            if (seed_mean > 0.0) {
                log_seed = -seed_mean + static_cast<double>(n) * std::log(seed_mean) -
                           std::lgamma(static_cast<double>(n) + 1.0);
            } else if (n > 0) {
                continue;
            }
            const double lp = log_seed + log_choose(np, nc) + static_cast<double>(nc) * log_t -
                              static_cast<double>(n + 1) * log_g;
            prob[np * k + nc] = std::exp(lp);
        }
    }
    return prob;
}

double tail_of(const std::vector<double> &prob) {
    Neumaier s;
    for (double p : prob) {
        s.add(p);
    }
    return std::max(0.0, 1.0 - s.value());
}

} // namespace

void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t, std::size_t)> &fn) {
    if (n == 0) {
        return;
    }
    const std::size_t w = std::clamp<std::size_t>(workers == 0 ? 1 : workers, 1, n);
    if (w == 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(w);
    std::vector<std::exception_ptr> errors(w);
    const std::size_t chunk = (n + w - 1) / w;
    for (std::size_t t = 0; t < w; ++t) {
        const std::size_t b = t * chunk;
        const std::size_t e = std::min(n, b + chunk);
        if (b >= e) {
            break;
        }
        pool.emplace_back([&, t, b, e] {
            try {
                fn(b, e);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
    for (auto &err : errors) {
        if (err) {
            std::rethrow_exception(err);
        }
    }
}

std::vector<CellMoments> partition_moments(const CoherenceGrid &grid, const TwinBeamMoments &beam) {
    beam.validate();
    const std::vector<GridCell> cells = grid.cells();
    std::vector<CellMoments> out;
    out.reserve(cells.size());
    for (const GridCell &c : cells) {
        if (c.weight_p <= 0.0 && c.weight_c <= 0.0) {
            continue;
        }
        CellMoments cm;
        cm.quadrant = CoherenceGrid::quadrant_of(c.center, grid.center());
        cm.moments = {beam.mean_p * c.weight_p, beam.mean_c * c.weight_c, beam.var_p * c.weight_p,
                      beam.var_c * c.weight_c, beam.cov * std::sqrt(c.weight_p * c.weight_c)};
        out.push_back(cm);
    }
    return out;
}

SampleBatch sample_photocurrents(std::span<const CellMoments> cells, std::size_t n,
                                 std::uint64_t seed, unsigned workers) {
    std::vector<Cholesky2> chol;
    chol.reserve(cells.size());
    for (const CellMoments &c : cells) {
        detail::require(c.quadrant < kQuadrants, "cell quadrant out of range");
        chol.push_back(factor(c.moments));
    }
    SampleBatch batch;
    batch.n_samples = n;
    batch.seed = seed;
    for (QuadrantIndex q = 0; q < kQuadrants; ++q) {
        batch.probe[q].assign(n, 0.0);
        batch.conj[q].assign(n, 0.0);
    }
    parallel_for(n, workers, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            std::array<double, kQuadrants> sp{};
            std::array<double, kQuadrants> sc{};
            for (std::size_t k = 0; k < chol.size(); ++k) {
                CounterRng rng(seed, kStreamCells + k, i);
                const double z1 = rng.normal();
                const double z2 = rng.normal();
                const Cholesky2 &f = chol[k];
                sp[cells[k].quadrant] += f.mean_p + f.l11 * z1;
                sc[cells[k].quadrant] += f.mean_c + f.l21 * z1 + f.l22 * z2;
            }
            for (QuadrantIndex q = 0; q < kQuadrants; ++q) {
                batch.probe[q][i] = sp[q];
                batch.conj[q][i] = sc[q];
            }
        }
    });
    return batch;
}

SampleBatch sample_photocurrents(const CoherenceGrid &grid, const TwinBeamMoments &beam,
                                 std::size_t n, std::uint64_t seed, unsigned workers) {
    const std::vector<CellMoments> cells = partition_moments(grid, beam);
    return sample_photocurrents(cells, n, seed, workers);
}

PairSamples sample_pair(const TwinBeamMoments &m, std::size_t n, std::uint64_t seed,
                        std::uint64_t stream, unsigned workers) {
    const Cholesky2 f = factor(m);
    PairSamples out;
    out.probe.assign(n, 0.0);
    out.conj.assign(n, 0.0);
    parallel_for(n, workers, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            CounterRng rng(seed, stream, i);
            const double z1 = rng.normal();
            const double z2 = rng.normal();
            out.probe[i] = f.mean_p + f.l11 * z1;
            out.conj[i] = f.mean_c + f.l21 * z1 + f.l22 * z2;
        }
    });
    return out;
}

std::vector<double> thinning_loss(std::span<const double> samples, double eta, std::uint64_t seed,
                                  std::uint64_t stream) {
    detail::require(eta >= 0.0 && eta <= 1.0, "transmission must lie in [0, 1]");
    std::vector<double> out(samples.size());
    const double s = eta * (1.0 - eta);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        CounterRng rng(seed, kStreamThinning + stream, i);
        const double z = rng.normal();
        out[i] = eta * samples[i] + std::sqrt(s * std::max(samples[i], 0.0)) * z;
    }
    return out;
}

std::vector<std::int64_t> thinning_loss(std::span<const std::int64_t> counts, double eta,
                                        std::uint64_t seed, std::uint64_t stream) {
    detail::require(eta >= 0.0 && eta <= 1.0, "transmission must lie in [0, 1]");
    std::vector<std::int64_t> out(counts.size(), 0);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        detail::require(counts[i] >= 0, "photon counts must be >= 0");
        if (eta == 1.0) {
            out[i] = counts[i];
            continue;
        }
        if (eta == 0.0) {
            continue;
        }
        CounterRng rng(seed, kStreamThinning + stream, i);
        std::int64_t kept = 0;
        for (std::int64_t t = 0; t < counts[i]; ++t) {
            kept += rng.uniform() < eta ? 1 : 0;
        }
        out[i] = kept;
    }
    return out;
}

FockMoments fock_two_mode_squeezer_moments(double gain, double seed_mean, std::size_t truncation) {
    const std::vector<double> prob = fock_probabilities(gain, seed_mean, truncation);
    FockMoments out;
    out.truncation = truncation;
    out.tail_mass = tail_of(prob);
    if (!(out.tail_mass < 1e-10)) {
        throw NumericError("Fock truncation too small: tail mass " + std::to_string(out.tail_mass));
    }
    Neumaier sp, sc, spp, scc, spc;
    for (std::size_t np = 0; np < truncation; ++np) {
        for (std::size_t nc = 0; nc <= np; ++nc) {
            const double p = prob[np * truncation + nc];
            if (p == 0.0) {
                continue;
            }
            const double a = static_cast<double>(np);
            const double b = static_cast<double>(nc);
            sp.add(p * a);
            sc.add(p * b);
            spp.add(p * a * a);
            scc.add(p * b * b);
            spc.add(p * a * b);
        }
    }
    const double mp = sp.value();
    const double mc = sc.value();
    out.moments = {mp, mc, spp.value() - mp * mp, scc.value() - mc * mc, spc.value() - mp * mc};
    return out;
}

TwinBeamMoments fock_stimulated_moments(double gain, double seed_mean, std::size_t truncation) {
    const TwinBeamMoments s = fock_two_mode_squeezer_moments(gain, seed_mean, truncation).moments;
    const TwinBeamMoments v = fock_two_mode_squeezer_moments(gain, 0.0, truncation).moments;
    return {s.mean_p - v.mean_p, s.mean_c - v.mean_c, s.var_p - v.var_p, s.var_c - v.var_c,
            s.cov - v.cov};
}

FockDistribution::FockDistribution(double gain, double seed_mean, std::size_t truncation)
    : k_(truncation), prob_(fock_probabilities(gain, seed_mean, truncation)) {
    tail_ = tail_of(prob_);
    if (!(tail_ < 1e-10)) {
        throw NumericError("Fock truncation too small: tail mass " + std::to_string(tail_));
    }
    cdf_.resize(prob_.size());
    Neumaier s;
    for (std::size_t i = 0; i < prob_.size(); ++i) {
        s.add(prob_[i]);
        cdf_[i] = s.value();
    }
}

double FockDistribution::probability(std::size_t n_p, std::size_t n_c) const {
    detail::require(n_p < k_ && n_c < k_, "Fock index outside the truncated basis");
    return prob_[n_p * k_ + n_c];
}

void FockDistribution::sample(std::size_t n, std::uint64_t seed, std::uint64_t stream,
                              std::vector<std::int64_t> &n_p,
                              std::vector<std::int64_t> &n_c) const {
    n_p.assign(n, 0);
    n_c.assign(n, 0);
    const double total = cdf_.back();
    for (std::size_t i = 0; i < n; ++i) {
        CounterRng rng(seed, kStreamFock + stream, i);
        const double u = rng.uniform() * total;
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.end()) {
            --it;
        }
        const auto idx = static_cast<std::size_t>(it - cdf_.begin());
        n_p[i] = static_cast<std::int64_t>(idx / k_);
        n_c[i] = static_cast<std::int64_t>(idx % k_);
    }
}

EmpiricalMoments estimate_moments(std::span<const double> p, std::span<const double> c) {
    detail::require(p.size() == c.size(), "sample arrays must have equal length");
    detail::require(p.size() >= 2, "need at least two samples");
    const auto n = static_cast<double>(p.size());
    Neumaier sp, sc;
    for (std::size_t i = 0; i < p.size(); ++i) {
        sp.add(p[i]);
        sc.add(c[i]);
    }
    const double mp = sp.value() / n;
    const double mc = sc.value() / n;
    Neumaier vp, vc, cv, m4p, m4c, m22;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double a = p[i] - mp;
        const double b = c[i] - mc;
        vp.add(a * a);
        vc.add(b * b);
        cv.add(a * b);
        m4p.add(a * a * a * a);
        m4c.add(b * b * b * b);
        m22.add(a * a * b * b);
    }
    EmpiricalMoments out;
    const double var_p = vp.value() / n;
    const double var_c = vc.value() / n;
    const double cov = cv.value() / n;
    out.moments = {mp, mc, var_p, var_c, cov};
    out.se_mean_p = std::sqrt(var_p / n);
    out.se_mean_c = std::sqrt(var_c / n);
    out.se_var_p = std::sqrt(std::max(m4p.value() / n - var_p * var_p, 0.0) / n);
    out.se_var_c = std::sqrt(std::max(m4c.value() / n - var_c * var_c, 0.0) / n);
    out.se_cov = std::sqrt(std::max(m22.value() / n - cov * cov, 0.0) / n);
    return out;
}

VarianceEstimate difference_variance(std::span<const double> p, std::span<const double> c,
                                     double g) {
    detail::require(p.size() == c.size(), "sample arrays must have equal length");
    detail::require(p.size() >= 2, "need at least two samples");
    const auto n = static_cast<double>(p.size());
    Neumaier s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        s.add(p[i] - g * c[i]);
    }
    const double mean = s.value() / n;
    Neumaier v, v4;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] - g * c[i] - mean;
        v.add(d * d);
        v4.add(d * d * d * d);
    }
    const double var = v.value() / n;
    return {var, std::sqrt(std::max(v4.value() / n - var * var, 0.0) / n)};
}

namespace {

// Noise power of the detected pair with an optional sinusoidal signal of
// mean square `signal` riding on the difference current.
double sampled_power(const TwinBeamMoments &detected, double g, double rbw, double signal,
                     std::size_t n, std::uint64_t seed, std::uint64_t stream, unsigned workers) {
    const Cholesky2 f = factor(detected);
    const double amp = std::sqrt(2.0 * std::max(signal, 0.0));
    const double root_rbw = std::sqrt(rbw);
    std::vector<double> d(n);
    parallel_for(n, workers, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            CounterRng rng(seed, stream, i);
            const double z1 = rng.normal();
            const double z2 = rng.normal();
            const double p = f.l11 * z1;
            const double c = f.l21 * z1 + f.l22 * z2;
            const double phi = 2.0 * std::numbers::pi * rng.uniform();
            d[i] = root_rbw * (p - g * c) + amp * std::sin(phi);
        }
    });
    Neumaier s;
    for (double x : d) {
        s.add(x * x);
    }
    return s.value() / static_cast<double>(n);
}

} // namespace

SampledCurve sampled_snr_sweep(const QuadrantReadout &probe, const QuadrantReadout &conj,
                               std::span<const double> voltages, std::size_t n,
                               std::uint64_t seed, unsigned workers) {
    detail::require(n >= 2, "need at least two samples per point");
    for (std::size_t i = 0; i < voltages.size(); ++i) {
        detail::require(std::isfinite(voltages[i]) && voltages[i] >= 0.0,
                        "sweep voltages must be >= 0");
        detail::require(i == 0 || voltages[i] > voltages[i - 1],
                        "sweep voltages must be strictly increasing");
    }
    const bool correlated = probe.quadrant == conj.quadrant;
    const LossChannel ch{probe.channel.eta_p, conj.channel.eta_c};
    const TwinBeamMoments pre{probe.moments.mean_p, conj.moments.mean_c, probe.moments.var_p,
                              conj.moments.var_c, correlated ? probe.moments.cov : 0.0};
    const TwinBeamMoments tb = apply_loss(pre, ch);
    const TwinBeamMoments cs = apply_loss(TwinBeamMoments::coherent(pre.mean_p, pre.mean_c), ch);
    const double g = probe.gain;
    const double rbw = probe.rbw_scale;

    const std::uint64_t pair_stream =
        kStreamSweep + (static_cast<std::uint64_t>(probe.quadrant) * kQuadrants + conj.quadrant) *
                           0x10000ULL;
    SampledCurve out;
    out.probe = probe.quadrant;
    out.conj = conj.quadrant;
    const double off_tb = sampled_power(tb, g, rbw, 0.0, n, seed, pair_stream, workers);
    const double off_cs = sampled_power(cs, g, rbw, 0.0, n, seed, pair_stream + 1, workers);
    for (std::size_t k = 0; k < voltages.size(); ++k) {
        const double v = voltages[k];
        const double s = probe.signal_per_mv2 * v * v;
        const std::uint64_t st = pair_stream + 2 * (k + 1);
        const double on_tb = sampled_power(tb, g, rbw, s, n, seed, st, workers);
        const double on_cs = sampled_power(cs, g, rbw, s, n, seed, st + 1, workers);
        const SnrValue r_tb = snr(signal_estimate(on_tb, off_tb), off_tb);
        const SnrValue r_cs = snr(signal_estimate(on_cs, off_cs), off_cs);
        out.clamped_points += (r_tb.clamped ? 1 : 0) + (r_cs.clamped ? 1 : 0);
        out.twin_beam.push_back({v, on_tb, off_tb, r_tb.value});
        out.coherent.push_back({v, on_cs, off_cs, r_cs.value});
    }
    return out;
}

} // namespace pqs
