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

namespace pqs {

/// Quadrant index 0..3, labelled 1..4 in reports:
/// q1 (+x,+y), q2 (-x,+y), q3 (-x,-y), q4 (+x,-y).
using QuadrantIndex = std::size_t;
inline constexpr std::size_t kQuadrants = 4;

struct Point2 {
    double x{0.0};
    double y{0.0};
};

/// Closed interval on one transverse axis. Either end may be infinite.
struct Interval {
    double lo{0.0};
    double hi{0.0};

    [[nodiscard]] bool empty() const noexcept { return !(hi > lo); }
    [[nodiscard]] Interval intersect(const Interval &o) const noexcept;
};

/// Axis-aligned rectangle in the beam frame.
struct Rect {
    Interval x;
    Interval y;
};

/// Elliptical Gaussian intensity profile (lengths in micrometres).
struct GaussianBeam {
    double sigma_x{1.0};
    double sigma_y{1.0};
    Point2 center{};

    /// Round beam from its 1/e^2 intensity diameter (D = 4 sigma).
    static GaussianBeam from_diameter(double diameter_um, Point2 center = {});

    [[nodiscard]] double diameter_x() const noexcept { return 4.0 * sigma_x; }
    [[nodiscard]] double diameter_y() const noexcept { return 4.0 * sigma_y; }

    void validate() const;

    /// Fraction of the beam power inside `r` (exact, separable erf form).
    [[nodiscard]] double power_in(const Rect &r) const noexcept;
    [[nodiscard]] double power_in_x(const Interval &i) const noexcept;
    [[nodiscard]] double power_in_y(const Interval &i) const noexcept;
};

/**
 * Four square windows in a 2x2 arrangement separated by a cross-shaped gap,
 * tilted about the y axis. Window size may be +inf (razor-blade quadrant
 * cut). Transmissions are indexed by quadrant.
 */
struct QuadrantLayout {
    double window_size{200.0};
    double gap{20.0};
    double tilt_deg{0.0};
    std::array<double, kQuadrants> window_transmissions{1.0, 1.0, 1.0, 1.0};

    void validate() const;

    /// Window of quadrant q projected onto the beam plane (x scaled by
    /// cos(tilt)).
    [[nodiscard]] Rect window(QuadrantIndex q) const;

    /// Bounding box of the four windows and the gap between them.
    [[nodiscard]] Rect footprint() const;

    /// Same geometry with every length multiplied by `s`.
    [[nodiscard]] QuadrantLayout scaled(double s) const;

    /// Gapless, unbounded, untilted, fully transmitting quadrant split.
    static QuadrantLayout razor_cut();
};

} // namespace pqs
