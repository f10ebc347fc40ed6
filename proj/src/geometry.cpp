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

#include "pqs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pqs/error.hpp"

namespace pqs {

namespace {

// Gaussian mass of [a, b] for mean mu and standard deviation s. Uses erfc on
// the far tail so thin slivers deep in the wings keep relative accuracy.
double normal_mass(double a, double b, double mu, double s) noexcept {
    if (!(b > a)) {
        return 0.0;
    }
    const double k = 1.0 / (std::numbers::sqrt2 * s);
    const double za = (a - mu) * k;
    const double zb = (b - mu) * k;
    if (za >= 0.0) {
        return 0.5 * (std::erfc(za) - std::erfc(zb));
    }
    if (zb <= 0.0) {
        return 0.5 * (std::erfc(-zb) - std::erfc(-za));
    }
    return 0.5 * (std::erf(zb) - std::erf(za));
}

double quadrant_sign_x(QuadrantIndex q) { return (q == 0 || q == 3) ? 1.0 : -1.0; }
double quadrant_sign_y(QuadrantIndex q) { return (q == 0 || q == 1) ? 1.0 : -1.0; }

Interval signed_span(double sign, double inner, double outer) {
    return sign > 0.0 ? Interval{inner, outer} : Interval{-outer, -inner};
}

} // namespace

Interval Interval::intersect(const Interval &o) const noexcept {
    return {std::max(lo, o.lo), std::min(hi, o.hi)};
}

GaussianBeam GaussianBeam::from_diameter(double diameter_um, Point2 center) {
    return {diameter_um / 4.0, diameter_um / 4.0, center};
}

void GaussianBeam::validate() const {
    detail::require(std::isfinite(sigma_x) && sigma_x > 0.0, "beam sigma_x must be > 0");
    detail::require(std::isfinite(sigma_y) && sigma_y > 0.0, "beam sigma_y must be > 0");
    detail::require(std::isfinite(center.x) && std::isfinite(center.y),
                    "beam center must be finite");
}

double GaussianBeam::power_in_x(const Interval &i) const noexcept {
    return normal_mass(i.lo, i.hi, center.x, sigma_x);
}

double GaussianBeam::power_in_y(const Interval &i) const noexcept {
    return normal_mass(i.lo, i.hi, center.y, sigma_y);
}

double GaussianBeam::power_in(const Rect &r) const noexcept {
    return power_in_x(r.x) * power_in_y(r.y);
}

void QuadrantLayout::validate() const {
    detail::require(window_size > 0.0 && !std::isnan(window_size), "window_size must be > 0");
    detail::require(std::isfinite(gap) && gap >= 0.0, "gap must be >= 0");
    detail::require(std::isfinite(tilt_deg) && tilt_deg >= 0.0 && tilt_deg < 90.0,
                    "tilt_deg must lie in [0, 90)");
    for (double t : window_transmissions) {
        detail::require(t >= 0.0 && t <= 1.0, "window transmissions must lie in [0, 1]");
    }
}

Rect QuadrantLayout::window(QuadrantIndex q) const {
    detail::require(q < kQuadrants, "quadrant index out of range");
    const double c = std::cos(tilt_deg * std::numbers::pi / 180.0);
    const double inner = 0.5 * gap;
    const double outer = inner + window_size;
    return {signed_span(quadrant_sign_x(q), inner * c, outer * c),
            signed_span(quadrant_sign_y(q), inner, outer)};
}

Rect QuadrantLayout::footprint() const {
    const double c = std::cos(tilt_deg * std::numbers::pi / 180.0);
    const double outer = 0.5 * gap + window_size;
    return {{-outer * c, outer * c}, {-outer, outer}};
}

QuadrantLayout QuadrantLayout::scaled(double s) const {
    QuadrantLayout out = *this;
    out.window_size *= s;
    out.gap *= s;
    return out;
}

QuadrantLayout QuadrantLayout::razor_cut() {
    return {std::numeric_limits<double>::infinity(), 0.0, 0.0, {1.0, 1.0, 1.0, 1.0}};
}

} // namespace pqs
