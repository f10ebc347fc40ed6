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
#include <span>
#include <vector>

#include "pqs/geometry.hpp"
#include "pqs/moments.hpp"
#include "pqs/quantum_source.hpp"

namespace pqs {

/// Power transmissions of the probe and conjugate paths.
struct LossChannel {
    double eta_p{1.0};
    double eta_c{1.0};

    void validate() const;

    /// Series composition: transmissions multiply.
    [[nodiscard]] LossChannel then(const LossChannel &next) const noexcept {
        return {eta_p * next.eta_p, eta_c * next.eta_c};
    }
};

/// Power bookkeeping of a beam on a quadrant layout.
struct QuadrantTransmission {
    /// Geometric fraction of beam power inside each window.
    std::array<double, kQuadrants> fractions{};
    /// Sum of fraction * window transmission.
    double total{0.0};
    /// Power landing on the opaque cross between windows (inside the footprint).
    double gap{0.0};
    /// Power outside the layout footprint.
    double tail{0.0};
    /// Estimated absolute integration error (0 for the closed form).
    double error_estimate{0.0};
};

/// Exact transmission: windows are rectangles in the beam frame and the
/// Gaussian is separable, so each window is a product of erf differences.
QuadrantTransmission quadrant_transmission(const GaussianBeam &beam, const QuadrantLayout &layout);

/**
 * Independent 2-D quadrature route: an N x N midpoint grid over +-8 sigma in
 * which each grid cell is clipped against the window rectangles. A second
 * pass at N/2 provides the Richardson error estimate. Summation is serial in
 * row-major order with Neumaier compensation.
 */
QuadrantTransmission quadrant_transmission_quadrature(const GaussianBeam &beam,
                                                      const QuadrantLayout &layout,
                                                      std::size_t n = 2048);

struct WaistPoint {
    double diameter{0.0};
    double total{0.0};
};

struct WaistOptimum {
    double diameter{0.0};
    double total{0.0};
};

/// Transmission total on an evenly spaced diameter grid (inclusive ends).
std::vector<WaistPoint> waist_curve(const QuadrantLayout &layout, double d_min, double d_max,
                                    std::size_t points, Point2 center = {});

/**
 * Diameter maximizing the layout's total transmission for a round beam.
 *
 * A 257-point scan locates the maximum, which must lie strictly inside the
 * range (SearchError otherwise), then golden-section search refines it to
 * `tol_um`. A flat objective returns the smallest diameter.
 */
WaistOptimum optimize_waist(const QuadrantLayout &layout, double d_min, double d_max,
                            double tol_um = 1e-3, Point2 center = {});

/// True when the curve rises (weakly) to a single peak and then falls.
/// Changes below `tol` are treated as flat.
bool is_unimodal(std::span<const WaistPoint> curve, double tol = 1e-12);

/// Beam-splitter loss: mean' = eta mean, var' = eta^2 (var - mean) + eta mean,
/// cov' = eta_p eta_c cov.
TwinBeamMoments apply_loss(const TwinBeamMoments &m, const LossChannel &ch);

struct QuadrantCut {
    TwinBeamMoments moments;
    double contained_p{0.0};
    double contained_c{0.0};
    /// Fraction of the quadrant's probe power in cells crossing a window edge.
    double straddle_fraction{0.0};
    /// sum over interior cells of sqrt(w_p w_c); multiplies cov.
    double correlated_weight{0.0};
};

/**
 * Selects the part of a multi-spatial-mode twin beam falling inside window
 * q. Coherence cells are independent twin beams, so means and variances
 * scale with the contained power; a cell crossing a window edge loses its
 * partner and contributes no covariance. Window transmissions are not
 * applied here (follow with apply_loss).
 *
 * Throws NumericError when the window holds no power.
 */
QuadrantCut quadrant_cut_detail(const TwinBeamMoments &m, const CoherenceGrid &grid,
                                const QuadrantLayout &layout, QuadrantIndex q);

TwinBeamMoments quadrant_cut(const TwinBeamMoments &m, const CoherenceGrid &grid,
                             const QuadrantLayout &layout, QuadrantIndex q);

/// Infinitesimal coherence area: no straddling cells.
QuadrantCut quadrant_cut_detail(const TwinBeamMoments &m, const GaussianBeam &probe,
                                const GaussianBeam &conjugate, const QuadrantLayout &layout,
                                QuadrantIndex q);

/// Straddle fraction of quadrant 1 for a razor-blade cut through the beam
/// centre with coherence cells of side `cell_size_um`.
double razor_straddle_fraction(double waist_um, double cell_size_um, double extent_um);

/// Cell size at which the razor-cut straddle fraction equals `target`
/// (bisection, 1e-9 relative). Throws SearchError if unreachable in
/// (0, extent].
double solve_cell_size_for_straddle(double waist_um, double target, double extent_um);

} // namespace pqs
