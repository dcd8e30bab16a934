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

// Globally adaptive Gauss-Kronrod (7/15) quadrature.
//
// The 15-point rule never evaluates the interval end points, so integrable
// end-point singularities such as log|x| at x = 0 are handled without
// special casing.

#pragma once

#include <array>
#include <algorithm>
#include <cmath>
#include <queue>
#include <span>
#include <sstream>
#include <string>

#include "quantid/error.hpp"

namespace quantid
{

struct QuadratureOptions
{
    int max_intervals = 2000;
    double rel_tol = 0.0; // optional relative tolerance, used when larger than the absolute one
};

namespace detail
{

struct KronrodEstimate
{
    double value;
    double error;
};

template <class Fn>
KronrodEstimate gauss_kronrod_15(const Fn &fn, double a, double b)
{
    // Abscissae of the 15-point Kronrod rule; odd indices are shared with the 7-point Gauss rule.
    static constexpr std::array<double, 8> xk = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static constexpr std::array<double, 8> wk = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr std::array<double, 4> wg = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = fn(center);
    double kronrod = wk[7] * fc;
    double gauss = wg[3] * fc;
    for (int i = 0; i < 7; ++i)
    {
        const double dx = half * xk[i];
        const double pair = fn(center - dx) + fn(center + dx);
        kronrod += wk[i] * pair;
        if (i % 2 == 1)
            gauss += wg[i / 2] * pair;
    }
    return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

struct Piece
{
    double a;
    double b;
    KronrodEstimate estimate;

    bool operator<(const Piece &other) const { return estimate.error < other.estimate.error; }
};

} // namespace detail

/// Integrates `fn` over [a, b] to an absolute error target `tol`.
///
/// Globally adaptive: the sub-interval with the largest error estimate is
/// bisected until the summed estimate meets the target. Throws
/// NumericFailure (carrying the partial estimate) when the interval budget
/// runs out first.
template <class Fn>
double integrate(const Fn &fn, double a, double b, double tol = 1e-10,
                 const QuadratureOptions &opts = {})
{
    if (!(a <= b))
        throw InvalidArgument("integrate: lower limit exceeds upper limit");
    if (!(tol > 0.0))
        throw InvalidArgument("integrate: tolerance must be positive");
    if (a == b)
        return 0.0;

    std::priority_queue<detail::Piece> pieces;
    pieces.push({a, b, detail::gauss_kronrod_15(fn, a, b)});
    double value = pieces.top().estimate.value;
    double error = pieces.top().estimate.error;
    // Pieces too narrow to split further; their error is accepted as is.
    double frozen_value = 0.0;

    auto target = [&] { return opts.rel_tol > 0.0 ? std::max(tol, opts.rel_tol * std::abs(value)) : tol; };
    int count = 1;
    while (error > target() && !pieces.empty())
    {
        if (count >= opts.max_intervals)
        {
            std::ostringstream msg;
            msg << "integrate: no convergence on [" << a << ", " << b << "] (partial estimate " << value
                << ", error estimate " << error << ")";
            throw NumericFailure(msg.str(), value);
        }
        const auto worst = pieces.top();
        pieces.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
        {
            frozen_value += worst.estimate.value;
            if (pieces.empty())
                break;
            continue;
        }
        const auto left = detail::gauss_kronrod_15(fn, worst.a, mid);
        const auto right = detail::gauss_kronrod_15(fn, mid, worst.b);
        value += left.value + right.value - worst.estimate.value;
        error += left.error + right.error - worst.estimate.error;
        pieces.push({worst.a, mid, left});
        pieces.push({mid, worst.b, right});
        ++count;
    }

    // Re-add from scratch to shed the rounding picked up by the running updates.
    double total = frozen_value;
    for (; !pieces.empty(); pieces.pop())
        total += pieces.top().estimate.value;
    if (!std::isfinite(total))
        throw NumericFailure("integrate: non-finite value on [" + std::to_string(a) + ", " +
                                 std::to_string(b) + "]",
                             total);
    return total;
}

/// Integrates over consecutive breakpoints, splitting the tolerance evenly.
/// Use this when `fn` has kinks at known places (tabulated densities, cell edges).
template <class Fn>
double integrate_piecewise(const Fn &fn, std::span<const double> breakpoints, double tol = 1e-10,
                           const QuadratureOptions &opts = {})
{
    if (breakpoints.size() < 2)
        return 0.0;
    const double share = tol / static_cast<double>(breakpoints.size() - 1);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        total += integrate(fn, breakpoints[i], breakpoints[i + 1], share, opts);
    return total;
}

} // namespace quantid
