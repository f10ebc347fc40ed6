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

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "pqs/geometry.hpp"
#include "pqs/moments.hpp"

namespace pqs {

/**
 * Parameters of a seeded two-mode amplifier with classical excess noise.
 *
 * Excess noise is intensity-proportional: `excess_correlated` adds a
 * perfectly correlated common-mode term, `excess_uncorrelated` an
 * independent term on each beam. Both scale with the mean squared.
 */
struct FwmSourceParams {
    double gain{1.0};
    double seed_flux{1.0};
    double excess_correlated{0.0};
    double excess_uncorrelated{0.0};
    /// Carried through configs and reports; never used in computation.
    std::map<std::string, std::string> metadata;

    void validate() const;
};

/// Moments of the amplified seed and its conjugate.
///
/// With no excess noise the balanced difference noise equals the seed flux
/// exactly, and the balanced squeezing ratio is 1/(2G-1).
TwinBeamMoments fwm_moments(const FwmSourceParams &params);

struct SqueezingRatio {
    double linear{1.0};
    double db{0.0};
};

/// Balanced (g = 1), lossless intensity-difference noise relative to the
/// shot-noise level of the same total power.
SqueezingRatio source_squeezing(const TwinBeamMoments &m);

struct GridCell {
    Point2 center;
    double weight_p{0.0};
    double weight_c{0.0};
};

/**
 * Square lattice of coherence cells of side `cell_size` centred on the beam
 * axis. The cell count per side is odd, so one cell sits on the axis and
 * the lattice is symmetric under reflections. Weights are the fraction of
 * each beam's power falling in a cell.
 *
 * The lattice is stored implicitly; `cells()` materializes the table.
 */
class CoherenceGrid {
  public:
    CoherenceGrid(GaussianBeam probe, GaussianBeam conjugate, double cell_size,
                  std::size_t cells_per_side, Point2 center);

    [[nodiscard]] double cell_size() const noexcept { return cell_size_; }
    [[nodiscard]] std::size_t cells_per_side() const noexcept { return per_side_; }
    [[nodiscard]] std::size_t cell_count() const noexcept { return per_side_ * per_side_; }
    [[nodiscard]] Point2 center() const noexcept { return center_; }
    [[nodiscard]] const GaussianBeam &probe_beam() const noexcept { return probe_; }
    [[nodiscard]] const GaussianBeam &conjugate_beam() const noexcept { return conj_; }

    /// Side length of the tiled square (cells_per_side * cell_size).
    [[nodiscard]] double span() const noexcept;
    [[nodiscard]] Interval span_x() const noexcept;
    [[nodiscard]] Interval span_y() const noexcept;

    /// Edge k (0..cells_per_side) of the lattice along x or y.
    [[nodiscard]] double edge_x(std::size_t k) const noexcept;
    [[nodiscard]] double edge_y(std::size_t k) const noexcept;

    /// Row-major table (y outer, x inner). Throws ValidationError above
    /// `max_cells` to keep accidental sub-micron grids from exhausting memory.
    [[nodiscard]] std::vector<GridCell> cells(std::size_t max_cells = 25'000'000) const;

    /// Quadrant of a cell centre; points on an axis go to the +x / +y side.
    [[nodiscard]] static QuadrantIndex quadrant_of(Point2 p, Point2 origin) noexcept;

  private:
    GaussianBeam probe_;
    GaussianBeam conj_;
    double cell_size_;
    std::size_t per_side_;
    Point2 center_;
};

/**
 * Builds the coherence grid for round probe/conjugate beams with the given
 * 1/e^2 diameters. `extent` is the side of the square to tile; it must be at
 * least four diameters of the larger beam. Throws ValidationError when the
 * cell size exceeds the extent.
 */
CoherenceGrid build_coherence_grid(double waist_p_um, double waist_c_um, double cell_size_um,
                                   double extent_um, Point2 center = {});

} // namespace pqs
