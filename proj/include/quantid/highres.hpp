// SPDX-License-Identifier: Apache-2.0
//
// quantid - optimal output quantizers for least-squares FIR identification
// Copyright (C) 2026 The quantid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// High-resolution designs: the optimal density g(phi1) of quantizer cells
// per unit length of phi1, under a cell-count budget (fixed rate) or an
// output-entropy budget (variable rate), and the companding map from g to
// concrete breakpoints.
//
// In the high-resolution regime the identification cost V[U^T E]/N is
//     (theta1^2 / 12) * int sigma^2 f / g^2,
// which `cost_functional` evaluates for any candidate g.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quantid/density.hpp"
#include "quantid/error.hpp"
#include "quantid/quadrature.hpp"
#include "quantid/quantizer.hpp"

namespace quantid
{

enum class RateMode
{
    fixed,
    variable,
};

inline std::string_view to_string(RateMode mode)
{
    return mode == RateMode::fixed ? "fixed" : "variable";
}

namespace detail
{

inline constexpr QuadratureOptions design_quadrature{.max_intervals = 4000, .rel_tol = 1e-11};

/// Density break points with 0 added (sigma can have a kink there).
inline std::vector<double> design_breakpoints(const MarginalDensity &f)
{
    auto b = f.breakpoints();
    if (f.lo() < 0.0 && f.hi() > 0.0 && std::find(b.begin(), b.end(), 0.0) == b.end())
    {
        b.push_back(0.0);
        std::sort(b.begin(), b.end());
    }
    return b;
}

template <class Fn>
double integrate_design(const Fn &fn, std::span<const double> breakpoints)
{
    return integrate_piecewise(fn, breakpoints, 1e-14, design_quadrature);
}

} // namespace detail

/// Cell density g with its cumulative G(x) = int_lo^x g, tabulated on a
/// sub-grid of the support and refined by quadrature on demand.
class SubsectionDensity
{
public:
    SubsectionDensity(std::function<double(double)> g, std::vector<double> breakpoints,
                      int subdivisions = 32)
        : g_(std::move(g))
    {
        detail::require(breakpoints.size() >= 2, "subsection density: support needs two end points");
        for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        {
            const double a = breakpoints[i], b = breakpoints[i + 1];
            for (int k = 0; k < subdivisions; ++k)
                grid_.push_back(a + (b - a) * k / subdivisions);
        }
        grid_.push_back(breakpoints.back());
        cumulative_.assign(grid_.size(), 0.0);
        for (std::size_t i = 1; i < grid_.size(); ++i)
            cumulative_[i] = cumulative_[i - 1] + piece(grid_[i - 1], grid_[i]);
    }

    double operator()(double x) const
    {
        return (x < lo() || x > hi()) ? 0.0 : g_(x);
    }

    double lo() const { return grid_.front(); }
    double hi() const { return grid_.back(); }
    double total_count() const { return cumulative_.back(); }

    double cumulative(double x) const
    {
        if (x <= lo())
            return 0.0;
        if (x >= hi())
            return total_count();
        const auto i = segment_of(x);
        return cumulative_[i] + piece(grid_[i], x);
    }

    /// x with G(x) = mass, by safeguarded Newton steps inside one grid segment.
    double inverse(double mass) const
    {
        if (mass <= 0.0)
            return lo();
        if (mass >= total_count())
            return hi();
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), mass);
        const auto i = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
        double a = grid_[i], b = grid_[i + 1];
        const double need = mass - cumulative_[i];
        const double seg = cumulative_[i + 1] - cumulative_[i];
        if (!(seg > 0.0))
            throw NumericFailure("subsection density: cumulative is not invertible", a);
        double x = a + (b - a) * (need / seg);
        for (int iter = 0; iter < 60; ++iter)
        {
            const double residual = piece(grid_[i], x) - need;
            if (residual > 0.0)
                b = x;
            else
                a = x;
            if (std::abs(residual) <= 1e-13 * std::max(1.0, total_count()) || b - a <= 1e-15 * std::abs(x))
                break;
            const double slope = g_(x);
            double next = slope > 0.0 ? x - residual / slope : 0.5 * (a + b);
            if (!(next > a && next < b))
                next = 0.5 * (a + b);
            x = next;
        }
        return x;
    }

private:
    double piece(double a, double b) const
    {
        if (b <= a)
            return 0.0;
        return integrate(g_, a, b, 1e-15, detail::design_quadrature);
    }

    std::size_t segment_of(double x) const
    {
        auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
        return static_cast<std::size_t>(it - grid_.begin()) - 1;
    }

    std::function<double(double)> g_;
    std::vector<double> grid_;
    std::vector<double> cumulative_;
};

struct DesignReport
{
    RateMode mode = RateMode::fixed;
    int M = 0;
    double D = 0.0;              ///< int sigma^{2/3} f^{1/3}
    double K = 0.0;              ///< M / D (fixed) or exp(L) (variable)
    double L = 0.0;              ///< int f log(f / sigma)
    double theta_tilde_1 = 1.0;
    double predicted_cost = 0.0; ///< high-resolution V[U^T E]/N at theta_tilde_1
    double entropy_H = std::numeric_limits<double>::quiet_NaN(); ///< H(f, g), variable rate only
};

struct Design
{
    SubsectionDensity g;
    DesignReport report;
};

struct DesignOptions
{
    double theta_tilde_1 = 1.0;
    /// Reject truncated heavy tails whose D keeps growing with the truncation.
    bool check_tail = true;
    double tail_tolerance = 0.01;
};

/// D = int sigma^{2/3} f^{1/3} over the support of f.
inline double fixed_rate_integral(const MarginalDensity &f, const ConditionalSpread &spread)
{
    const auto b = detail::design_breakpoints(f);
    return detail::integrate_design([&](double x) { return std::cbrt(spread(x) * f(x)); }, b);
}

/// L = int f log(f / sigma).
inline double variable_rate_integral(const MarginalDensity &f, const ConditionalSpread &spread)
{
    const auto b = detail::design_breakpoints(f);
    return detail::integrate_design(
        [&](double x) {
            const double v = f(x);
            return v > 0.0 ? v * (std::log(v) - 0.5 * std::log(spread(x))) : 0.0;
        },
        b);
}

struct TailGrowth
{
    double D;
    double D_widened;
    double relative_change;
    bool feasible;
};

/// Recomputes D on a support with doubled truncation. A relative change
/// above `tolerance` means D has no finite limit on the untruncated support.
inline TailGrowth tail_growth_test(const MarginalDensity &f, const ConditionalSpread &spread,
                                   double tolerance = 0.01)
{
    const double D = fixed_rate_integral(f, spread);
    if (!f.truncated_tail())
        return {D, D, 0.0, true};
    const double wide = fixed_rate_integral(f.widened(2.0), spread);
    const double change = std::abs(wide - D) / D;
    return {D, wide, change, change <= tolerance};
}

/// g_f = (M / D) sigma^{2/3} f^{1/3}.
inline Design design_fixed_rate(const MarginalDensity &f, const ConditionalSpread &spread, int M,
                                const DesignOptions &opts = {})
{
    detail::require(M >= 2, "design_fixed_rate: M must be at least 2");
    double D;
    if (opts.check_tail)
    {
        const auto growth = tail_growth_test(f, spread, opts.tail_tolerance);
        if (!growth.feasible)
            throw InfeasibleDesign("marginal case, companding support unbounded: D grows by " +
                                   std::to_string(100.0 * growth.relative_change) +
                                   "% when the truncation doubles");
        D = growth.D;
    }
    else
    {
        D = fixed_rate_integral(f, spread);
    }
    if (!(D > 0.0) || !std::isfinite(D))
        throw InvalidArgument("design_fixed_rate: degenerate spread and density (D = 0)");

    DesignReport r;
    r.mode = RateMode::fixed;
    r.M = M;
    r.D = D;
    r.K = M / D;
    r.L = variable_rate_integral(f, spread);
    r.theta_tilde_1 = opts.theta_tilde_1;
    r.predicted_cost = opts.theta_tilde_1 * opts.theta_tilde_1 * D * D * D / (12.0 * M * M);

    const double K = r.K;
    SubsectionDensity g([f, spread, K](double x) { return K * std::cbrt(spread(x) * f(x)); },
                        detail::design_breakpoints(f));
    return {std::move(g), r};
}

/// g_v = exp(L) M sigma. The expected cell count int g_v is not M; the
/// entropy of the quantized output is log M nats.
inline Design design_variable_rate(const MarginalDensity &f, const ConditionalSpread &spread, int M,
                                   const DesignOptions &opts = {})
{
    detail::require(M >= 2, "design_variable_rate: M must be at least 2");
    if (spread.quadratic == 0.0 && spread.offset == 0.0)
        throw InvalidArgument("design_variable_rate: conditional spread vanishes identically");

    DesignReport r;
    r.mode = RateMode::variable;
    r.M = M;
    r.D = fixed_rate_integral(f, spread);
    r.L = variable_rate_integral(f, spread);
    if (!std::isfinite(r.L))
        throw NumericFailure("design_variable_rate: log-ratio integral is not finite", r.L);
    r.K = std::exp(r.L);
    r.theta_tilde_1 = opts.theta_tilde_1;
    r.predicted_cost = opts.theta_tilde_1 * opts.theta_tilde_1 * std::exp(-2.0 * r.L) / (12.0 * M * M);

    const double scale = r.K * M;
    SubsectionDensity g([spread, scale](double x) { return scale * spread.sigma(x); },
                        detail::design_breakpoints(f));
    r.entropy_H = differential_entropy(f) +
                  detail::integrate_design(
                      [&](double x) {
                          const double v = f(x);
                          return v > 0.0 ? v * std::log(scale * spread.sigma(x)) : 0.0;
                      },
                      detail::design_breakpoints(f));
    return {std::move(g), r};
}

/// Breakpoints with equal g-mass per cell on the positive half, mapped to
/// the output scale y = theta1 * phi1. Odd M keeps (M - 1) / 2 positive cells
/// and the zero cell {0}.
inline Quantizer companding_breakpoints(const SubsectionDensity &g, int M, RepsRule rule,
                                        double theta_tilde_1 = 1.0)
{
    const auto budget = QuantizerBudget::from_total(M);
    detail::require(theta_tilde_1 > 0.0, "companding: theta_tilde_1 must be positive");
    detail::require(g.lo() < 0.0 && g.hi() > 0.0, "companding: support must straddle the origin");

    const double origin = g.cumulative(0.0);
    const double half = g.total_count() - origin;
    if (!(half > 0.0))
        throw NumericFailure("companding: no cell mass on the positive half", half);

    const int cells = budget.M_prime;
    std::vector<double> d(static_cast<std::size_t>(cells) + 1, 0.0);
    for (int j = 1; j < cells; ++j)
        d[static_cast<std::size_t>(j)] = theta_tilde_1 * g.inverse(origin + half * j / cells);
    d.back() = theta_tilde_1 * g.hi();
    for (std::size_t j = 1; j < d.size(); ++j)
        if (!(d[j] > d[j - 1]))
            throw NumericFailure("companding: cumulative is not invertible (repeated breakpoint)", d[j]);

    auto reps = make_reps(d, rule);
    if (rule == RepsRule::midpoint)
    {
        // The outer edge is wherever the support was truncated, so the
        // geometric centre of the last cell sits far out in the tail. Use the
        // point holding half of the cell's g-mass instead.
        const double x = g.inverse(origin + half * (cells - 0.5) / cells);
        reps.back() = std::clamp(theta_tilde_1 * x, std::nextafter(d[d.size() - 2], d.back()), d.back());
    }
    return Quantizer(std::move(d), std::move(reps));
}

/// int sigma^2(phi1) (q(theta1 phi1) - theta1 phi1)^2 f(phi1) over the
/// support, cell by cell; values beyond the last breakpoint are clamped.
inline double exact_quantized_cost(const MarginalDensity &f, const ConditionalSpread &spread,
                                   const Quantizer &q, double theta_tilde_1)
{
    detail::require(theta_tilde_1 > 0.0, "exact_quantized_cost: theta_tilde_1 must be positive");
    std::vector<double> edges = detail::design_breakpoints(f);
    for (double d : q.positive_breakpoints())
    {
        const double x = d / theta_tilde_1;
        for (double s : {x, -x})
            if (s > f.lo() && s < f.hi())
                edges.push_back(s);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    CompensatedSum total;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    {
        const double a = edges[i], b = edges[i + 1];
        const double rep = q(theta_tilde_1 * 0.5 * (a + b));
        total.add(integrate(
            [&](double x) {
                const double e = rep - theta_tilde_1 * x;
                return spread(x) * e * e * f(x);
            },
            a, b, 1e-18, detail::design_quadrature));
    }
    return total.sum();
}

/// (theta1^2 / 12) int sigma^2 f / g^2 for an arbitrary positive cell density.
template <class G>
double cost_functional(const MarginalDensity &f, const ConditionalSpread &spread, const G &g,
                       double theta_tilde_1 = 1.0)
{
    const auto b = detail::design_breakpoints(f);
    const double integral = detail::integrate_design(
        [&](double x) {
            const double v = f(x);
            if (v <= 0.0)
                return 0.0;
            const double gx = g(x);
            return spread(x) * v / (gx * gx);
        },
        b);
    return theta_tilde_1 * theta_tilde_1 * integral / 12.0;
}

/// H(f, g) = H_d(f) + int f log g, the output entropy in nats.
template <class G>
double subsection_entropy(const MarginalDensity &f, const G &g)
{
    const auto b = detail::design_breakpoints(f);
    return differential_entropy(f) + detail::integrate_design(
                                         [&](double x) {
                                             const double v = f(x);
                                             return v > 0.0 ? v * std::log(g(x)) : 0.0;
                                         },
                                         b);
}

/// int g over the support of f.
template <class G>
double subsection_count(const MarginalDensity &f, const G &g)
{
    const auto b = detail::design_breakpoints(f);
    return detail::integrate_design([&](double x) { return g(x); }, b);
}

/// Evenly spaced (phi1, f, g) rows over [lo, hi] for plotting.
inline std::vector<std::array<double, 3>> design_grid(const MarginalDensity &f,
                                                      const SubsectionDensity &g, double lo,
                                                      double hi, int points)
{
    detail::require(points >= 2 && hi > lo, "design_grid: need at least two points on a proper range");
    std::vector<std::array<double, 3>> rows(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
    {
        const double x = i == points - 1 ? hi : lo + (hi - lo) * i / (points - 1);
        rows[static_cast<std::size_t>(i)] = {x, f(x), g(x)};
    }
    return rows;
}

} // namespace quantid
