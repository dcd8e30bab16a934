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

#pragma once

#include <algorithm>
#include <cmath>

namespace quantid
{

struct ScalarMinimum
{
    double argmin;
    double value;
};

struct ScalarSearchOptions
{
    int grid_points = 2001;
    double x_tol = 1e-10;
};

/// Golden-section search for a minimum of `fn` inside [lo, hi].
template <class Fn>
ScalarMinimum golden_section(const Fn &fn, double lo, double hi, double x_tol = 1e-10)
{
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = fn(c);
    double fd = fn(d);
    while (hi - lo > x_tol)
    {
        if (fc <= fd)
        {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = fn(c);
        }
        else
        {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = fn(d);
        }
    }
    const double x = 0.5 * (lo + hi);
    return {x, fn(x)};
}

/// Global minimum of `fn` over [0, 1]: a uniform grid scan (end points
/// included) followed by golden-section refinement of the best bracket.
/// The end points stay candidates since the coarse-resolution minimizer can sit at r = 1.
template <class Fn>
ScalarMinimum minimize_scalar(const Fn &fn, const ScalarSearchOptions &opts = {})
{
    const int n = std::max(opts.grid_points, 3);
    const double step = 1.0 / static_cast<double>(n - 1);
    int best = 0;
    double best_value = fn(0.0);
    for (int i = 1; i < n; ++i)
    {
        const double value = fn(i == n - 1 ? 1.0 : i * step);
        if (value < best_value)
        {
            best_value = value;
            best = i;
        }
    }

    ScalarMinimum result{best == n - 1 ? 1.0 : best * step, best_value};
    const double lo = std::max(0, best - 1) * step;
    const double hi = std::min(1.0, std::min(n - 1, best + 1) * step);
    const auto refined = golden_section(fn, lo, hi, opts.x_tol);
    if (refined.value < result.value)
        result = refined;
    return result;
}

} // namespace quantid
