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
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pqs/analysis.hpp"
#include "pqs/geometry.hpp"
#include "pqs/moments.hpp"
#include "pqs/quantum_source.hpp"

namespace pqs {

/// Runs fn(begin, end) over [0, n) split into contiguous chunks on up to
/// `workers` threads. Workers write disjoint slots; callers reduce serially.
void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t, std::size_t)> &fn);

struct SampleBatch {
    std::size_t n_samples{0};
    std::uint64_t seed{0};
    std::array<std::vector<double>, kQuadrants> probe;
    std::array<std::vector<double>, kQuadrants> conj;
};

/// Twin-beam moments of one coherence cell plus its quadrant.
struct CellMoments {
    TwinBeamMoments moments;
    QuadrantIndex quadrant{0};
};

/// Cell moments obtained by splitting `beam` over the grid: means and
/// variances scale with each cell's weight, the covariance with
/// sqrt(w_p w_c).
std::vector<CellMoments> partition_moments(const CoherenceGrid &grid, const TwinBeamMoments &beam);

/**
 * Gaussian photocurrent samples: each cell draws an independent bivariate
 * normal with its 2x2 covariance, and quadrant intensities are the sums
 * over their cells. Substream key is (seed, cell index, sample index).
 *
 * Throws ValidationError for a non-PSD cell covariance.
 */
SampleBatch sample_photocurrents(std::span<const CellMoments> cells, std::size_t n,
                                 std::uint64_t seed, unsigned workers = 1);

SampleBatch sample_photocurrents(const CoherenceGrid &grid, const TwinBeamMoments &beam,
                                 std::size_t n, std::uint64_t seed, unsigned workers = 1);

struct PairSamples {
    std::vector<double> probe;
    std::vector<double> conj;
};

/// n draws of a single bivariate-normal intensity pair.
PairSamples sample_pair(const TwinBeamMoments &m, std::size_t n, std::uint64_t seed,
                        std::uint64_t stream, unsigned workers = 1);

/// Gaussian-equivalent thinning of continuous intensities: mean eta x,
/// added variance eta (1 - eta) x (x clamped at 0 inside the square root).
std::vector<double> thinning_loss(std::span<const double> samples, double eta,
                                  std::uint64_t seed, std::uint64_t stream);

/// Binomial thinning of photon counts.
std::vector<std::int64_t> thinning_loss(std::span<const std::int64_t> counts, double eta,
                                        std::uint64_t seed, std::uint64_t stream);

struct FockMoments {
    TwinBeamMoments moments;
    double tail_mass{0.0};
    std::size_t truncation{0};
};

/**
 * Photon-number moments of a two-mode squeezer with gain G acting on a
 * coherent probe seed of mean photon number `seed_mean` and a vacuum
 * conjugate. Amplitudes <n_p, n_c|S|alpha, 0> are summed on the truncated
 * basis n_p, n_c < truncation. Throws NumericError when the probability
 * outside the basis is 1e-10 or more.
 */
FockMoments fock_two_mode_squeezer_moments(double gain, double seed_mean, std::size_t truncation);

/// Seed-induced part of the Fock moments: seeded minus unseeded. This is
/// the bright-beam quantity that fwm_moments models.
TwinBeamMoments fock_stimulated_moments(double gain, double seed_mean, std::size_t truncation);

/// Joint photon-number distribution P(n_p, n_c) on the truncated basis.
class FockDistribution {
  public:
    FockDistribution(double gain, double seed_mean, std::size_t truncation);

    [[nodiscard]] std::size_t truncation() const noexcept { return k_; }
    [[nodiscard]] double probability(std::size_t n_p, std::size_t n_c) const;
    [[nodiscard]] double tail_mass() const noexcept { return tail_; }

    /// Inverse-CDF draws of (n_p, n_c) pairs.
    void sample(std::size_t n, std::uint64_t seed, std::uint64_t stream,
                std::vector<std::int64_t> &n_p, std::vector<std::int64_t> &n_c) const;

  private:
    std::size_t k_;
    std::vector<double> prob_;
    std::vector<double> cdf_;
    double tail_{0.0};
};

struct EmpiricalMoments {
    TwinBeamMoments moments;
    double se_mean_p{0.0};
    double se_mean_c{0.0};
    double se_var_p{0.0};
    double se_var_c{0.0};
    double se_cov{0.0};
};

/// Sample moments (population normalization) with standard errors from the
/// fourth central moments.
EmpiricalMoments estimate_moments(std::span<const double> p, std::span<const double> c);

struct VarianceEstimate {
    double value{0.0};
    double standard_error{0.0};
};

/// Variance of p - g c.
VarianceEstimate difference_variance(std::span<const double> p, std::span<const double> c,
                                     double g);

struct SampledCurve {
    QuadrantIndex probe{0};
    QuadrantIndex conj{0};
    std::vector<SNRPoint> twin_beam;
    std::vector<SNRPoint> coherent;
    std::size_t clamped_points{0};
};

/**
 * SNR sweep from sampled noise powers. s_off comes from one batch of n
 * Gaussian draws of the detected pair; each drive point draws a fresh batch
 * with a sinusoidal signal of mean square S added at a uniform random phase.
 */
SampledCurve sampled_snr_sweep(const QuadrantReadout &probe, const QuadrantReadout &conj,
                               std::span<const double> voltages, std::size_t n,
                               std::uint64_t seed, unsigned workers = 1);

} // namespace pqs
