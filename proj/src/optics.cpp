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

#include "pqs/optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pqs/error.hpp"

namespace pqs {

namespace {

struct Neumaier {
    double sum{0.0};
    double comp{0.0};

    void add(double v) noexcept {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    [[nodiscard]] double value() const noexcept { return sum + comp; }
};

// Window overlap of a grid cell along one axis, weighted by the Gaussian
// density at the midpoint of the overlap.
double axis_overlap_weight(double a, double b, const Interval &w, double mu, double s) {
    const double lo = std::max(a, w.lo);
    const double hi = std::min(b, w.hi);
    if (!(hi > lo)) {
        return 0.0;
    }
    const double z = (0.5 * (lo + hi) - mu) / s;
    return (hi - lo) * std::exp(-0.5 * z * z);
}

struct QuadratureSums {
    std::array<double, kQuadrants> windows{};
    double footprint{0.0};
};

QuadratureSums quadrature_pass(const GaussianBeam &beam, const QuadrantLayout &layout,
                               std::size_t n) {
    constexpr double kHalfWidth = 8.0;
    const double x0 = beam.center.x - kHalfWidth * beam.sigma_x;
    const double y0 = beam.center.y - kHalfWidth * beam.sigma_y;
    const double hx = 2.0 * kHalfWidth * beam.sigma_x / static_cast<double>(n);
    const double hy = 2.0 * kHalfWidth * beam.sigma_y / static_cast<double>(n);
    const double norm = 1.0 / (2.0 * std::numbers::pi * beam.sigma_x * beam.sigma_y);

    std::array<Rect, kQuadrants + 1> rects{};
    for (QuadrantIndex q = 0; q < kQuadrants; ++q) {
        rects[q] = layout.window(q);
    }
    rects[kQuadrants] = layout.footprint();

    // Column weights do not depend on the row; precompute them once per
    // rectangle.
    std::vector<std::array<double, kQuadrants + 1>> col(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = x0 + static_cast<double>(i) * hx;
        for (std::size_t r = 0; r <= kQuadrants; ++r) {
            col[i][r] = axis_overlap_weight(a, a + hx, rects[r].x, beam.center.x, beam.sigma_x);
        }
    }

    std::array<Neumaier, kQuadrants + 1> acc{};
    for (std::size_t j = 0; j < n; ++j) {
        const double b = y0 + static_cast<double>(j) * hy;
        std::array<double, kQuadrants + 1> row{};
        for (std::size_t r = 0; r <= kQuadrants; ++r) {
            row[r] = axis_overlap_weight(b, b + hy, rects[r].y, beam.center.y, beam.sigma_y);
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t r = 0; r <= kQuadrants; ++r) {
                if (row[r] != 0.0 && col[i][r] != 0.0) {
                    acc[r].add(norm * col[i][r] * row[r]);
                }
            }
        }
    }
    QuadratureSums out;
    for (QuadrantIndex q = 0; q < kQuadrants; ++q) {
        out.windows[q] = acc[q].value();
    }
    out.footprint = acc[kQuadrants].value();
    return out;
}

QuadrantTransmission bookkeeping(const std::array<double, kQuadrants> &fractions,
                                 double footprint, const QuadrantLayout &layout) {
    QuadrantTransmission t;
    t.fractions = fractions;
    double inside = 0.0;
    for (QuadrantIndex q = 0; q < kQuadrants; ++q) {
        t.total += fractions[q] * layout.window_transmissions[q];
        inside += fractions[q];
    }
    t.gap = std::max(0.0, footprint - inside);
    t.tail = std::max(0.0, 1.0 - footprint);
    return t;
}

// Sum over lattice columns k in [k_lo, k_hi) of sqrt(p_k c_k), where p_k
// and c_k are the per-column masses of the two beams along one axis.
template <typename EdgeFn, typename MassP, typename MassC>
double sqrt_mass_sum(std::size_t k_lo, std::size_t k_hi, EdgeFn edge, MassP mp, MassC mc) {
    Neumaier acc;
    for (std::size_t k = k_lo; k < k_hi; ++k) {
        const Interval cell{edge(k), edge(k + 1)};
        acc.add(std::sqrt(mp(cell) * mc(cell)));
    }
    return acc.value();
}

struct AxisCut {
    double contained_p{0.0};
    double contained_c{0.0};
    double interior_p{0.0};
    double correlated{0.0};
};

template <typename EdgeFn, typename MassP, typename MassC>
AxisCut cut_axis(const Interval &window, const Interval &span, std::size_t per_side,
                 double cell, EdgeFn edge, MassP mp, MassC mc, bool same_beam) {
    AxisCut out;
    const Interval clipped = window.intersect(span);
    if (clipped.empty()) {
        return out;
    }
    out.contained_p = mp(clipped);
    out.contained_c = mc(clipped);

    // A cell whose edge coincides with a window edge (within rounding) is
    // fully inside.
    const double tol = 1e-9 * cell;
    const double e0 = edge(0);
    const auto n = static_cast<double>(per_side);
    const double lo_idx = std::clamp(std::ceil((window.lo - e0 - tol) / cell), 0.0, n);
    const double hi_idx = std::clamp(std::floor((window.hi - e0 + tol) / cell), 0.0, n);
    if (!(hi_idx > lo_idx)) {
        return out;
    }
    const auto k_lo = static_cast<std::size_t>(lo_idx);
    const auto k_hi = static_cast<std::size_t>(hi_idx);
    const Interval interior{edge(k_lo), edge(k_hi)};
    out.interior_p = mp(interior);
    out.correlated = same_beam ? out.interior_p : sqrt_mass_sum(k_lo, k_hi, edge, mp, mc);
    return out;
}

bool same_profile(const GaussianBeam &a, const GaussianBeam &b) {
    return a.sigma_x == b.sigma_x && a.sigma_y == b.sigma_y && a.center.x == b.center.x &&
           a.center.y == b.center.y;
}

QuadrantCut finish_cut(const TwinBeamMoments &m, double contained_p, double contained_c,
                       double interior_p, double correlated) {
    if (!(contained_p > 0.0) || !(contained_c > 0.0)) {
        throw NumericError("quadrant window holds no beam power; moments undefined");
    }
    QuadrantCut out;
    out.contained_p = contained_p;
    out.contained_c = contained_c;
    out.correlated_weight = correlated;
    out.straddle_fraction = std::clamp(1.0 - interior_p / contained_p, 0.0, 1.0);
    out.moments = {contained_p * m.mean_p, contained_c * m.mean_c, contained_p * m.var_p,
                   contained_c * m.var_c, correlated * m.cov};
    return out;
}

// Overlap integral of sqrt(N(mu, s1) N(mu, s2)) over [a, b]: a Gaussian of
// variance 2 s1^2 s2^2 / (s1^2 + s2^2) scaled by the Bhattacharyya
// coefficient.
double sqrt_density_mass(const Interval &w, double mu, double s1, double s2) {
    const double v = s1 * s1 + s2 * s2;
    const double coeff = std::sqrt(2.0 * s1 * s2 / v);
    const double s = std::sqrt(2.0 * s1 * s1 * s2 * s2 / v);
    const GaussianBeam g{s, s, {mu, mu}};
    return coeff * g.power_in_x(w);
}

} // namespace

void LossChannel::validate() const {
    detail::require(eta_p >= 0.0 && eta_p <= 1.0, "eta_p must lie in [0, 1]");
    detail::require(eta_c >= 0.0 && eta_c <= 1.0, "eta_c must lie in [0, 1]");
}

QuadrantTransmission quadrant_transmission(const GaussianBeam &beam,
                                           const QuadrantLayout &layout) {
    beam.validate();
    layout.validate();
    std::array<double, kQuadrants> f{};
    for (QuadrantIndex q = 0; q < kQuadrants; ++q) {
        f[q] = beam.power_in(layout.window(q));
    }
    return bookkeeping(f, beam.power_in(layout.footprint()), layout);
}

QuadrantTransmission quadrant_transmission_quadrature(const GaussianBeam &beam,
                                                      const QuadrantLayout &layout,
                                                      std::size_t n) {
    beam.validate();
    layout.validate();
    detail::require(n >= 16 && n % 2 == 0, "quadrature resolution must be even and >= 16");
    const QuadratureSums fine = quadrature_pass(beam, layout, n);
    const QuadratureSums coarse = quadrature_pass(beam, layout, n / 2);

    QuadrantTransmission t = bookkeeping(fine.windows, fine.footprint, layout);
    double err = std::abs(fine.footprint - coarse.footprint);
    for (QuadrantIndex q = 0; q < kQuadrants; ++q) {
        err = std::max(err, std::abs(fine.windows[q] - coarse.windows[q]));
    }
    // Midpoint rule is second order: e(N) ~ (Q_N - Q_{N/2}) / 3.
    t.error_estimate = err / 3.0;
    return t;
}

std::vector<WaistPoint> waist_curve(const QuadrantLayout &layout, double d_min, double d_max,
                                    std::size_t points, Point2 center) {
    detail::require(d_min > 0.0 && d_max > d_min, "diameter range must satisfy 0 < min < max");
    detail::require(points >= 2, "waist curve needs at least two points");
    std::vector<WaistPoint> out;
    out.reserve(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double d =
            d_min + (d_max - d_min) * static_cast<double>(i) / static_cast<double>(points - 1);
        out.push_back({d, quadrant_transmission(GaussianBeam::from_diameter(d, center), layout).total});
    }
    return out;
}

WaistOptimum optimize_waist(const QuadrantLayout &layout, double d_min, double d_max,
                            double tol_um, Point2 center) {
    layout.validate();
    detail::require(tol_um > 0.0, "waist tolerance must be > 0");
    const auto scan = waist_curve(layout, d_min, d_max, 257, center);

    const auto [lo_it, hi_it] = std::minmax_element(
        scan.begin(), scan.end(),
        [](const WaistPoint &a, const WaistPoint &b) { return a.total < b.total; });
    if (hi_it->total - lo_it->total <= 1e-12) {
        return {scan.front().diameter, scan.front().total};
    }
    // max_element returns the first maximum; ties resolve to the smaller D.
    const auto best = std::max_element(
        scan.begin(), scan.end(),
        [](const WaistPoint &a, const WaistPoint &b) { return a.total < b.total; });
    if (best == scan.begin() || best == scan.end() - 1) {
        throw SearchError("diameter range does not bracket a transmission maximum");
    }

    auto objective = [&](double d) {
        return quadrant_transmission(GaussianBeam::from_diameter(d, center), layout).total;
    };
    double a = (best - 1)->diameter;
    double b = (best + 1)->diameter;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = objective(c);
    double fd = objective(d);
    while (b - a > tol_um) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, objective(x)};
}

TwinBeamMoments apply_loss(const TwinBeamMoments &m, const LossChannel &ch) {
    m.validate();
    ch.validate();
    const double ep = ch.eta_p;
    const double ec = ch.eta_c;
    return {ep * m.mean_p, ec * m.mean_c, ep * ep * (m.var_p - m.mean_p) + ep * m.mean_p,
            ec * ec * (m.var_c - m.mean_c) + ec * m.mean_c, ep * ec * m.cov};
}

QuadrantCut quadrant_cut_detail(const TwinBeamMoments &m, const CoherenceGrid &grid,
                                const QuadrantLayout &layout, QuadrantIndex q) {
    m.validate();
    layout.validate();
    const Rect w = layout.window(q);
    const GaussianBeam &p = grid.probe_beam();
    const GaussianBeam &c = grid.conjugate_beam();
    const bool same = same_profile(p, c);
    const double cell = grid.cell_size();
    const std::size_t n = grid.cells_per_side();

    const AxisCut ax = cut_axis(
        w.x, grid.span_x(), n, cell, [&](std::size_t k) { return grid.edge_x(k); },
        [&](const Interval &i) { return p.power_in_x(i); },
        [&](const Interval &i) { return c.power_in_x(i); }, same);
    const AxisCut ay = cut_axis(
        w.y, grid.span_y(), n, cell, [&](std::size_t k) { return grid.edge_y(k); },
        [&](const Interval &i) { return p.power_in_y(i); },
        [&](const Interval &i) { return c.power_in_y(i); }, same);

    return finish_cut(m, ax.contained_p * ay.contained_p, ax.contained_c * ay.contained_c,
                      ax.interior_p * ay.interior_p, ax.correlated * ay.correlated);
}

TwinBeamMoments quadrant_cut(const TwinBeamMoments &m, const CoherenceGrid &grid,
                             const QuadrantLayout &layout, QuadrantIndex q) {
    return quadrant_cut_detail(m, grid, layout, q).moments;
}

QuadrantCut quadrant_cut_detail(const TwinBeamMoments &m, const GaussianBeam &probe,
                                const GaussianBeam &conjugate, const QuadrantLayout &layout,
                                QuadrantIndex q) {
    m.validate();
    probe.validate();
    conjugate.validate();
    layout.validate();
    detail::require(probe.center.x == conjugate.center.x && probe.center.y == conjugate.center.y,
                    "probe and conjugate must share a centre");
    const Rect w = layout.window(q);
    const double fp = probe.power_in(w);
    const double fc = conjugate.power_in(w);
    const double corr = sqrt_density_mass(w.x, probe.center.x, probe.sigma_x, conjugate.sigma_x) *
                        sqrt_density_mass(w.y, probe.center.y, probe.sigma_y, conjugate.sigma_y);
    return finish_cut(m, fp, fc, fp, corr);
}

double razor_straddle_fraction(double waist_um, double cell_size_um, double extent_um) {
    const CoherenceGrid grid = build_coherence_grid(waist_um, waist_um, cell_size_um, extent_um);
    const TwinBeamMoments unit = TwinBeamMoments::coherent(1.0, 1.0);
    return quadrant_cut_detail(unit, grid, QuadrantLayout::razor_cut(), 0).straddle_fraction;
}

double solve_cell_size_for_straddle(double waist_um, double target, double extent_um) {
    detail::require(target >= 0.0 && target < 1.0, "straddle target must lie in [0, 1)");
    if (target == 0.0) {
        throw SearchError("zero straddle fraction needs an infinitesimal coherence cell");
    }
    double lo = extent_um * 1e-9;
    double hi = extent_um;
    if (razor_straddle_fraction(waist_um, lo, extent_um) > target ||
        razor_straddle_fraction(waist_um, hi, extent_um) < target) {
        throw SearchError("straddle fraction target not reachable within the grid extent");
    }
    // Bisection in log(d): the straddle fraction grows roughly linearly in d.
    for (int it = 0; it < 200 && hi / lo > 1.0 + 1e-10; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (razor_straddle_fraction(waist_um, mid, extent_um) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::sqrt(lo * hi);
}

} // namespace pqs

namespace pqs {

bool is_unimodal(std::span<const WaistPoint> curve, double tol) {
    bool falling = false;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const double d = curve[i].total - curve[i - 1].total;
        if (d < -tol) {
            falling = true;
        } else if (d > tol && falling) {
            return false;
        }
    }
    return true;
}

} // namespace pqs
