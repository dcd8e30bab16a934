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

// Coarse-resolution optimal quantizers for uniformly distributed regressor
// coordinates on [-kappa, kappa].
//
// Breakpoints are parameterized by ratios d_j = r_j d_{j+1} with d_{M'} =
// kappa_y. With bias-free representatives, the cost of the j innermost
// cells scales as d^5 (the phi1^2 part of sigma^2) and d^3 (the part coming
// from the other n - 1 coordinates), and adding one more cell outside maps
// the accumulated coefficients through psi(r; .) and xi(r; .).

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "quantid/error.hpp"
#include "quantid/minimize.hpp"
#include "quantid/quantizer.hpp"
#include "quantid/random.hpp"

namespace quantid
{

/// psi(r; alpha) = alpha r^5 - 18(1-r)^5 + 45(1+r)^2(1-r)^3 + 5(1-r)^7/(1+r)^2.
/// Generic so that exact rational types can be used.
template <class T>
T psi(const T &r, const T &alpha)
{
    const T one(1);
    const T s = one - r;
    const T p = one + r;
    const T s2 = s * s;
    const T s3 = s2 * s;
    const T s5 = s3 * s2;
    const T r2 = r * r;
    return alpha * (r2 * r2 * r) - T(18) * s5 + T(45) * (p * p) * s3 + T(5) * (s5 * s2) / (p * p);
}

/// xi(r; alpha) = alpha r^3 + 3(1-r)^3 + (1-r)^5/(1+r)^2.
template <class T>
T xi(const T &r, const T &alpha)
{
    const T one(1);
    const T s = one - r;
    const T p = one + r;
    const T s3 = s * s * s;
    return alpha * (r * r * r) + T(3) * s3 + (s3 * s * s) / (p * p);
}

inline constexpr double psi_initial = 32.0;
inline constexpr double xi_initial = 4.0;

enum class CoarseMode
{
    n1,      ///< scalar model, psi recursion
    general, ///< any order, dynamic program over the outer boundary
    n_inf,   ///< large-order limit, xi recursion
};

inline std::string_view to_string(CoarseMode mode)
{
    switch (mode)
    {
    case CoarseMode::n1: return "n1";
    case CoarseMode::general: return "general";
    case CoarseMode::n_inf: return "n_inf";
    }
    return "unknown";
}

/// Ratios r_1 .. r_{M'-1} (index 0 holds r_1) and the accumulated cost
/// coefficients psi_0 .. psi_{M'-1}, xi_0 .. xi_{M'-1} along them.
struct RatioSequence
{
    CoarseMode mode = CoarseMode::n1;
    std::vector<double> ratios;
    std::vector<double> psi_min;
    std::vector<double> xi_min;

    int positive_cells() const { return static_cast<int>(ratios.size()) + 1; }
};

namespace detail
{

template <class Step>
RatioSequence run_recursion(int M_prime, double initial, CoarseMode mode, Step step,
                            std::vector<double> RatioSequence::*values)
{
    detail::require(M_prime >= 1, "coarse recursion: M' must be at least 1");
    RatioSequence seq;
    seq.mode = mode;
    seq.ratios.reserve(static_cast<std::size_t>(M_prime - 1));
    auto &vals = seq.*values;
    vals.reserve(static_cast<std::size_t>(M_prime));
    vals.push_back(initial);
    for (int j = 1; j < M_prime; ++j)
    {
        const double alpha = vals.back();
        const auto best = minimize_scalar([&](double r) { return step(r, alpha); });
        seq.ratios.push_back(best.argmin);
        vals.push_back(best.value);
    }
    return seq;
}

} // namespace detail

/// Accumulated psi and xi coefficients along an arbitrary ratio chain.
inline void fill_chain_values(RatioSequence &seq)
{
    seq.psi_min.assign(1, psi_initial);
    seq.xi_min.assign(1, xi_initial);
    for (double r : seq.ratios)
    {
        seq.psi_min.push_back(psi(r, seq.psi_min.back()));
        seq.xi_min.push_back(xi(r, seq.xi_min.back()));
    }
}

/// n = 1: r_j = argmin_r psi(r; psi_{j-1}), psi_j = psi(r_j; psi_{j-1}).
inline RatioSequence solve_n1(int M_prime)
{
    return detail::run_recursion(
        M_prime, psi_initial, CoarseMode::n1, [](double r, double a) { return psi(r, a); },
        &RatioSequence::psi_min);
}

/// n >> 1: the same recursion on xi.
inline RatioSequence solve_ninf(int M_prime)
{
    return detail::run_recursion(
        M_prime, xi_initial, CoarseMode::n_inf, [](double r, double a) { return xi(r, a); },
        &RatioSequence::xi_min);
}

struct GeneralSolverOptions
{
    int grid_points = 2000;
    double grid_floor = 1e-4; ///< smallest grid boundary, as a fraction of kappa_y
    unsigned threads = 0;
};

struct GeneralSolution
{
    RatioSequence sequence;
    std::vector<std::string> warnings;
};

namespace detail
{

/// Value function tabulated on a log-spaced grid, interpolated in log-log
/// coordinates and extrapolated as a power law below the grid.
class LogGridFunction
{
public:
    LogGridFunction(double log_lo, double log_step, std::vector<double> log_values)
        : log_lo_(log_lo), log_step_(log_step), log_values_(std::move(log_values)) {}

    double operator()(double d) const
    {
        if (!(d > 0.0))
            return 0.0;
        const double pos = (std::log(d) - log_lo_) / log_step_;
        const auto last = static_cast<double>(log_values_.size() - 1);
        std::size_t i;
        if (pos <= 0.0)
            i = 0;
        else if (pos >= last)
            i = log_values_.size() - 2;
        else
            i = static_cast<std::size_t>(pos);
        const double t = pos - static_cast<double>(i);
        return std::exp(log_values_[i] + t * (log_values_[i + 1] - log_values_[i]));
    }

private:
    double log_lo_;
    double log_step_;
    std::vector<double> log_values_;
};

} // namespace detail

/// Dynamic program for any model order n. W_0(d) is the cost of the single
/// cell (0, d]; W_j(d) = min_r W_{j-1}(r d) + cost of the outer cell (r d, d].
/// Costs are per side and per unit N, scaled by theta1^2 (constant factors
/// do not move the minimizers).
inline GeneralSolution solve_general(int M_prime, int n, double kappa_y,
                                     const GeneralSolverOptions &opts = {})
{
    detail::require(M_prime >= 1, "solve_general: M' must be at least 1");
    detail::require(n >= 1, "solve_general: model order must be at least 1");
    detail::require(kappa_y > 0.0, "solve_general: kappa_y must be positive");
    detail::require(opts.grid_points >= 2, "solve_general: grid needs at least two points");

    const double c = 1.0 / (2160.0 * 2.0 * kappa_y);
    const double spread_weight = 20.0 * kappa_y * kappa_y * static_cast<double>(n - 1);
    auto outer_cell = [&](double d, double r) {
        const double d2 = d * d, d3 = d2 * d;
        return c * (d3 * d2 * psi(r, 0.0) + spread_weight * d3 * xi(r, 0.0));
    };

    const int points = opts.grid_points;
    const double log_lo = std::log(opts.grid_floor * kappa_y);
    const double log_hi = std::log(kappa_y);
    const double log_step = (log_hi - log_lo) / (points - 1);
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        grid[static_cast<std::size_t>(i)] = i == points - 1 ? kappa_y : std::exp(log_lo + i * log_step);

    std::vector<detail::LogGridFunction> stages;
    stages.reserve(static_cast<std::size_t>(M_prime));
    {
        std::vector<double> w0(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
        {
            const double d = grid[i];
            w0[i] = std::log(c * (psi_initial * std::pow(d, 5) + 4.0 * spread_weight * d * d * d));
        }
        stages.emplace_back(log_lo, log_step, std::move(w0));
    }
    for (int j = 1; j + 1 < M_prime; ++j)
    {
        const auto &prev = stages.back();
        auto values = run_trials(
            grid.size(),
            [&](std::size_t i) {
                const double d = grid[i];
                const auto best =
                    minimize_scalar([&](double r) { return prev(r * d) + outer_cell(d, r); });
                return std::log(best.value);
            },
            opts.threads);
        stages.emplace_back(log_lo, log_step, std::move(values));
    }

    GeneralSolution out;
    out.sequence.mode = CoarseMode::general;
    out.sequence.ratios.assign(static_cast<std::size_t>(M_prime - 1), 0.0);
    double d = kappa_y;
    const double floor = opts.grid_floor * kappa_y;
    for (int j = M_prime - 1; j >= 1; --j)
    {
        const auto &prev = stages[static_cast<std::size_t>(j - 1)];
        const auto best = minimize_scalar([&](double r) { return prev(r * d) + outer_cell(d, r); });
        out.sequence.ratios[static_cast<std::size_t>(j - 1)] = best.argmin;
        const double inner = best.argmin * d;
        if (d - inner <= 1e-12 * kappa_y)
            out.warnings.push_back("breakpoints d_" + std::to_string(j) + " and d_" +
                                   std::to_string(j + 1) + " collide; M' exceeds the grid resolution");
        else if (inner < floor && inner > 0.0)
            out.warnings.push_back("breakpoint d_" + std::to_string(j) +
                                   " lies below the grid; value function extrapolated");
        d = inner;
    }
    fill_chain_values(out.sequence);
    return out;
}

struct CoarseDesign
{
    Quantizer quantizer;
    CoarseMode mode;
    double optimal_cost; ///< V[U^T E] / N
    double kappa_y;
    double theta_tilde_1;
    int n;
    RatioSequence sequence;
    std::vector<std::string> warnings;
};

/// V[U^T E]/N of the chain for model order n on the phi1 scale.
inline double coarse_cost_per_sample(const RatioSequence &seq, double kappa_y, double theta_tilde_1,
                                     int n)
{
    detail::require(kappa_y > 0.0 && theta_tilde_1 > 0.0,
                    "coarse cost: kappa_y and theta_tilde_1 must be positive");
    const double k4 = std::pow(kappa_y, 4);
    const double t2 = theta_tilde_1 * theta_tilde_1;
    const double others = static_cast<double>(n - 1);
    switch (seq.mode)
    {
    case CoarseMode::n1:
        return k4 * seq.psi_min.back() / (2160.0 * t2);
    case CoarseMode::n_inf:
        return k4 * others * seq.xi_min.back() / (108.0 * t2);
    case CoarseMode::general:
        return k4 * (seq.psi_min.back() + 20.0 * others * seq.xi_min.back()) / (2160.0 * t2);
    }
    return 0.0;
}

/// Breakpoints d_{M'} = kappa_y, d_j = r_j d_{j+1}, with bias-free representatives.
inline CoarseDesign build_coarse_quantizer(RatioSequence seq, double kappa_y, double theta_tilde_1,
                                           int n)
{
    detail::require(kappa_y > 0.0, "build_coarse_quantizer: kappa_y must be positive");
    detail::require(n >= 1, "build_coarse_quantizer: model order must be at least 1");
    const std::size_t cells = seq.ratios.size() + 1;
    std::vector<double> d(cells + 1, 0.0);
    d[cells] = kappa_y;
    for (std::size_t j = cells - 1; j >= 1; --j)
    {
        const double r = seq.ratios[j - 1];
        if (!(r > 0.0))
            throw InvalidArgument("build_coarse_quantizer: zero ratio gives a degenerate cell");
        d[j] = r * d[j + 1];
    }
    if (seq.mode == CoarseMode::general && (seq.psi_min.size() != cells || seq.xi_min.size() != cells))
        fill_chain_values(seq);
    const double cost = coarse_cost_per_sample(seq, kappa_y, theta_tilde_1, n);
    return {Quantizer(std::move(d), RepsRule::bias_free), seq.mode, cost, kappa_y, theta_tilde_1, n,
            std::move(seq), {}};
}

/// Solves and builds in one step.
inline CoarseDesign design_coarse(int M, double kappa, double theta_tilde_1, int n, CoarseMode mode,
                                  const GeneralSolverOptions &opts = {})
{
    const auto budget = QuantizerBudget::from_total(M);
    const double kappa_y = kappa * theta_tilde_1;
    switch (mode)
    {
    case CoarseMode::n1:
        return build_coarse_quantizer(solve_n1(budget.M_prime), kappa_y, theta_tilde_1, n);
    case CoarseMode::n_inf:
        return build_coarse_quantizer(solve_ninf(budget.M_prime), kappa_y, theta_tilde_1, n);
    case CoarseMode::general:
    {
        auto solution = solve_general(budget.M_prime, n, kappa_y, opts);
        auto design = build_coarse_quantizer(std::move(solution.sequence), kappa_y, theta_tilde_1, n);
        design.warnings = std::move(solution.warnings);
        return design;
    }
    }
    throw InvalidArgument("design_coarse: unknown mode");
}

/// Mode used when none is requested: the exact recursion for n = 1 and the
/// dynamic program otherwise.
inline CoarseMode default_coarse_mode(int n) { return n == 1 ? CoarseMode::n1 : CoarseMode::general; }

struct AsymptoticFit
{
    double C;                     ///< psi_j ~ C (j - B)^{-2}
    double B;
    double recurrence_deviation;  ///< max |(psi_j - psi_{j-1}) / psi_{j-1}^{3/2} - a| / |a|
    int first_checked;            ///< first j in the recurrence check
};

/// a = -5 * 3^{-5/2}, the limiting coefficient of psi_j - psi_{j-1} ~ a psi_{j-1}^{3/2}.
inline double recurrence_coefficient() { return -5.0 * std::pow(3.0, -2.5); }

/// Fits psi_j ~ C (j - B)^{-2} by regressing psi_j^{-1/2} on j over the tail
/// half, and checks the increment recurrence for j >= first_checked (tail
/// half when negative).
inline AsymptoticFit asymptotic_fit(const std::vector<double> &psi_min, int first_checked = -1)
{
    if (psi_min.size() < 50)
        throw InvalidArgument("asymptotic_fit: sequence too short (need at least 50 values)");
    const auto len = static_cast<int>(psi_min.size());
    const int start = len / 2;

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(len - start);
    for (int j = start; j < len; ++j)
    {
        const double x = j;
        const double y = 1.0 / std::sqrt(psi_min[static_cast<std::size_t>(j)]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / m;

    const double a = recurrence_coefficient();
    if (first_checked < 1)
        first_checked = start;
    first_checked = std::clamp(first_checked, 1, len - 1);
    double worst = 0.0;
    for (int j = first_checked; j < len; ++j)
    {
        const double prev = psi_min[static_cast<std::size_t>(j - 1)];
        const double ratio = (psi_min[static_cast<std::size_t>(j)] - prev) / std::pow(prev, 1.5);
        worst = std::max(worst, std::abs(ratio - a) / std::abs(a));
    }
    return {1.0 / (slope * slope), -intercept / slope, worst, first_checked};
}

/// Least-squares slope of log psi_j against log j for j in [lo, hi].
inline double loglog_slope(const std::vector<double> &psi_min, int lo, int hi)
{
    detail::require(lo >= 1 && hi > lo && hi < static_cast<int>(psi_min.size()),
                    "loglog_slope: range outside the sequence");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = hi - lo + 1;
    for (int j = lo; j <= hi; ++j)
    {
        const double x = std::log(static_cast<double>(j));
        const double y = std::log(psi_min[static_cast<std::size_t>(j)]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

/// First j (1-based) at which prod_{i <= j} 1/r_i exceeds `threshold`, or 0.
inline int ratio_product_crossing(const std::vector<double> &ratios, double threshold)
{
    double log_product = 0.0;
    const double target = std::log(threshold);
    for (std::size_t j = 0; j < ratios.size(); ++j)
    {
        log_product -= std::log(ratios[j]);
        if (log_product > target)
            return static_cast<int>(j) + 1;
    }
    return 0;
}

} // namespace quantid
