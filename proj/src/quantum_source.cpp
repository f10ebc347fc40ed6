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

#include "pqs/quantum_source.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pqs/error.hpp"
#include "pqs/units.hpp"

namespace pqs {

void FwmSourceParams::validate() const {
    detail::require(std::isfinite(gain) && gain >= 1.0, "source gain must be >= 1");
    detail::require(std::isfinite(seed_flux) && seed_flux > 0.0, "seed_flux must be > 0");
    detail::require(std::isfinite(excess_correlated) && excess_correlated >= 0.0,
                    "excess_correlated must be >= 0");
    detail::require(std::isfinite(excess_uncorrelated) && excess_uncorrelated >= 0.0,
                    "excess_uncorrelated must be >= 0");
}

TwinBeamMoments fwm_moments(const FwmSourceParams &params) {
    params.validate();
    const double g = params.gain;
    const double ns = params.seed_flux;
    const double excess = params.excess_correlated + params.excess_uncorrelated;

    TwinBeamMoments m;
    m.mean_p = g * ns;
    m.mean_c = (g - 1.0) * ns;
    m.var_p = g * (2.0 * g - 1.0) * ns + excess * m.mean_p * m.mean_p;
    m.var_c = (g - 1.0) * (2.0 * g - 1.0) * ns + excess * m.mean_c * m.mean_c;
    m.cov = 2.0 * g * (g - 1.0) * ns + params.excess_correlated * m.mean_p * m.mean_c;
    return m;
}

SqueezingRatio source_squeezing(const TwinBeamMoments &m) {
    m.validate();
    const double total = m.mean_p + m.mean_c;
    if (!(total > 0.0)) {
        throw NumericError("shot-noise level undefined for zero total mean");
    }
    const double diff = std::max(0.0, m.var_p + m.var_c - 2.0 * m.cov);
    const double r = diff / total;
    return {r, to_db(r)};
}

CoherenceGrid::CoherenceGrid(GaussianBeam probe, GaussianBeam conjugate, double cell_size,
                             std::size_t cells_per_side, Point2 center)
    : probe_(probe), conj_(conjugate), cell_size_(cell_size), per_side_(cells_per_side),
      center_(center) {
    probe_.validate();
    conj_.validate();
    detail::require(std::isfinite(cell_size_) && cell_size_ > 0.0, "cell size must be > 0");
    detail::require(per_side_ >= 1 && per_side_ % 2 == 1, "cells per side must be odd");
}

double CoherenceGrid::span() const noexcept {
    return static_cast<double>(per_side_) * cell_size_;
}

Interval CoherenceGrid::span_x() const noexcept {
    return {edge_x(0), edge_x(per_side_)};
}

Interval CoherenceGrid::span_y() const noexcept {
    return {edge_y(0), edge_y(per_side_)};
}

double CoherenceGrid::edge_x(std::size_t k) const noexcept {
    const double half = 0.5 * static_cast<double>(per_side_);
    return center_.x + (static_cast<double>(k) - half) * cell_size_;
}

double CoherenceGrid::edge_y(std::size_t k) const noexcept {
    const double half = 0.5 * static_cast<double>(per_side_);
    return center_.y + (static_cast<double>(k) - half) * cell_size_;
}

std::vector<GridCell> CoherenceGrid::cells(std::size_t max_cells) const {
    if (cell_count() > max_cells) {
        throw ValidationError("coherence grid has " + std::to_string(cell_count()) +
                              " cells, above the materialization limit");
    }
    // Per-axis masses; the Gaussian is separable so cell weight = wx * wy.
    std::vector<double> px(per_side_), py(per_side_), cx(per_side_), cy(per_side_);
    std::vector<double> mid_x(per_side_), mid_y(per_side_);
    for (std::size_t k = 0; k < per_side_; ++k) {
        const Interval ix{edge_x(k), edge_x(k + 1)};
        const Interval iy{edge_y(k), edge_y(k + 1)};
        px[k] = probe_.power_in_x(ix);
        py[k] = probe_.power_in_y(iy);
        cx[k] = conj_.power_in_x(ix);
        cy[k] = conj_.power_in_y(iy);
        mid_x[k] = 0.5 * (ix.lo + ix.hi);
        mid_y[k] = 0.5 * (iy.lo + iy.hi);
    }
    std::vector<GridCell> out;
    out.reserve(cell_count());
    for (std::size_t j = 0; j < per_side_; ++j) {
        for (std::size_t i = 0; i < per_side_; ++i) {
            out.push_back({{mid_x[i], mid_y[j]}, px[i] * py[j], cx[i] * cy[j]});
        }
    }
    return out;
}

QuadrantIndex CoherenceGrid::quadrant_of(Point2 p, Point2 origin) noexcept {
    const bool right = p.x >= origin.x;
    const bool top = p.y >= origin.y;
    if (right && top) {
        return 0;
    }
    if (!right && top) {
        return 1;
    }
    if (!right) {
        return 2;
    }
    return 3;
}

CoherenceGrid build_coherence_grid(double waist_p_um, double waist_c_um, double cell_size_um,
                                   double extent_um, Point2 center) {
    detail::require(std::isfinite(waist_p_um) && waist_p_um > 0.0, "probe waist must be > 0");
    detail::require(std::isfinite(waist_c_um) && waist_c_um > 0.0,
                    "conjugate waist must be > 0");
    detail::require(std::isfinite(cell_size_um) && cell_size_um > 0.0,
                    "coherence cell size must be > 0");
    detail::require(std::isfinite(extent_um) && extent_um > 0.0, "grid extent must be > 0");
    detail::require(cell_size_um <= extent_um, "coherence cell size exceeds the grid extent");
    detail::require(extent_um >= 4.0 * std::max(waist_p_um, waist_c_um) * (1.0 - 1e-12),
                    "grid extent must cover at least four beam diameters");

    auto per_side = static_cast<std::size_t>(std::ceil(extent_um / cell_size_um - 1e-9));
    per_side = std::max<std::size_t>(per_side, 1);
    if (per_side % 2 == 0) {
        ++per_side;
    }
    return {GaussianBeam::from_diameter(waist_p_um, center),
            GaussianBeam::from_diameter(waist_c_um, center), cell_size_um, per_side, center};
}

} // namespace pqs
