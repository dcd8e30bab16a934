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

// Symmetric memoryless quantizers.
//
// A quantizer is stored by its positive half: breakpoints 0 = d_0 < d_1 <
// ... < d_{M'} and one representative per cell S_j = (d_{j-1}, d_j]. The
// negative half mirrors it and the origin maps to itself, so q(-y) = -q(y)
// holds bit-exactly.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string_view>
#include <vector>

#include "quantid/error.hpp"

namespace quantid
{

/// How cell representatives are placed.
enum class RepsRule
{
    midpoint,  ///< (d_{j-1} + d_j) / 2
    bias_free, ///< zero cell correlation between y and the error under a flat density
};

inline std::string_view to_string(RepsRule rule)
{
    return rule == RepsRule::midpoint ? "midpoint" : "bias_free";
}

/// Total cell count M and the positive-side count M'.
/// Odd M has the zero-width cell {0} in the middle, so M' = (M - 1) / 2.
struct QuantizerBudget
{
    int M;
    int M_prime;

    static QuantizerBudget from_total(int M)
    {
        if (M < 2)
            throw InvalidArgument("quantizer budget: M must be at least 2");
        return {M, M % 2 == 0 ? M / 2 : (M - 1) / 2};
    }
};

namespace detail
{
inline void check_breakpoints(std::span<const double> d)
{
    if (d.size() < 2)
        throw InvalidArgument("breakpoints: need at least d_0 = 0 and one positive breakpoint");
    if (d[0] != 0.0)
        throw InvalidArgument("breakpoints: d_0 must be 0");
    for (std::size_t j = 1; j < d.size(); ++j)
        if (!(d[j] > d[j - 1]) || !std::isfinite(d[j]))
            throw InvalidArgument("breakpoints: must be strictly increasing and finite");
}
} // namespace detail

/// y'_j = (2/3)(a^2 + ab + b^2)/(a + b) for the cell (a, b].
///
/// This zeroes the integral of y (y'_j - y) over the cell, i.e. midpoint plus
/// an offset (2/3) k^2 / (a + b) with half-width k = (b - a)/2.
inline std::vector<double> bias_free_reps(std::span<const double> breakpoints)
{
    detail::check_breakpoints(breakpoints);
    std::vector<double> reps(breakpoints.size() - 1);
    for (std::size_t j = 1; j < breakpoints.size(); ++j)
    {
        const double a = breakpoints[j - 1];
        const double b = breakpoints[j];
        reps[j - 1] = (2.0 / 3.0) * (a * a + a * b + b * b) / (a + b);
    }
    return reps;
}

inline std::vector<double> midpoint_reps(std::span<const double> breakpoints)
{
    detail::check_breakpoints(breakpoints);
    std::vector<double> reps(breakpoints.size() - 1);
    for (std::size_t j = 1; j < breakpoints.size(); ++j)
        reps[j - 1] = 0.5 * (breakpoints[j - 1] + breakpoints[j]);
    return reps;
}

inline std::vector<double> make_reps(std::span<const double> breakpoints, RepsRule rule)
{
    return rule == RepsRule::midpoint ? midpoint_reps(breakpoints) : bias_free_reps(breakpoints);
}

class Quantizer
{
public:
    Quantizer(std::vector<double> breakpoints, std::vector<double> reps)
        : breakpoints_(std::move(breakpoints)), reps_(std::move(reps))
    {
        detail::check_breakpoints(breakpoints_);
        if (reps_.size() + 1 != breakpoints_.size())
            throw InvalidArgument("quantizer: need exactly one representative per positive cell");
        for (std::size_t j = 0; j < reps_.size(); ++j)
            if (!(reps_[j] > breakpoints_[j] && reps_[j] <= breakpoints_[j + 1]))
                throw InvalidArgument("quantizer: representative outside its cell");
    }

    Quantizer(std::vector<double> breakpoints, RepsRule rule)
        : Quantizer(breakpoints, make_reps(breakpoints, rule)) {}

    /// q(y). Values beyond the last breakpoint fall into the outermost cell.
    double operator()(double y) const
    {
        if (y == 0.0)
            return 0.0;
        const double a = std::abs(y);
        auto it = std::lower_bound(breakpoints_.begin() + 1, breakpoints_.end(), a);
        if (it == breakpoints_.end())
            --it;
        const double rep = reps_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
        return y < 0.0 ? -rep : rep;
    }

    /// Index j >= 1 of the positive cell containing |y| (0 for y = 0).
    int cell_index(double y) const
    {
        if (y == 0.0)
            return 0;
        auto it = std::lower_bound(breakpoints_.begin() + 1, breakpoints_.end(), std::abs(y));
        if (it == breakpoints_.end())
            --it;
        return static_cast<int>(it - breakpoints_.begin());
    }

    const std::vector<double> &positive_breakpoints() const { return breakpoints_; }
    const std::vector<double> &positive_reps() const { return reps_; }
    int positive_cells() const { return static_cast<int>(reps_.size()); }
    int total_cells() const { return 2 * positive_cells(); }
    double support_edge() const { return breakpoints_.back(); }

    double max_width() const
    {
        double w = 0.0;
        for (std::size_t j = 1; j < breakpoints_.size(); ++j)
            w = std::max(w, breakpoints_[j] - breakpoints_[j - 1]);
        return w;
    }

    friend bool operator==(const Quantizer &, const Quantizer &) = default;

private:
    std::vector<double> breakpoints_;
    std::vector<double> reps_;
};

inline double quantize(const Quantizer &q, double y) { return q(y); }

/// M/2 equal cells on (0, kappa_y]. Odd M must be reduced by the caller
/// (the middle cell collapses to {0}).
inline Quantizer uniform_quantizer(double kappa_y, int M, RepsRule rule = RepsRule::bias_free)
{
    if (!(kappa_y > 0.0))
        throw InvalidArgument("uniform_quantizer: kappa_y must be positive");
    if (M < 2 || M % 2 != 0)
        throw InvalidArgument("uniform_quantizer: M must be even and at least 2");
    const int cells = M / 2;
    std::vector<double> d(static_cast<std::size_t>(cells) + 1);
    for (int j = 0; j <= cells; ++j)
        d[static_cast<std::size_t>(j)] = kappa_y * static_cast<double>(j) / cells;
    d.back() = kappa_y;
    return Quantizer(std::move(d), rule);
}

} // namespace quantid
