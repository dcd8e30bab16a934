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

// One-dimensional marginal densities f(phi1) of the regressor coordinate
// along theta, the conditional spread sigma^2(phi1) = E[sum_k phi_k^2 | phi1],
// and differential entropy.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string_view>
#include <vector>

#include "quantid/error.hpp"
#include "quantid/quadrature.hpp"
#include "quantid/random.hpp"

namespace quantid
{

enum class DensityKind
{
    uniform,
    normal,
    power_law,
    tabulated,
};

inline std::string_view to_string(DensityKind kind)
{
    switch (kind)
    {
    case DensityKind::uniform: return "uniform";
    case DensityKind::normal: return "normal";
    case DensityKind::power_law: return "power_law";
    case DensityKind::tabulated: return "tabulated";
    }
    return "unknown";
}

/// Symmetric density on a finite support [lo, hi].
///
/// Kinds with unbounded natural support are truncated: the normal at
/// +-8 sigma (tail mass below 1.3e-15) and the power law at 1e3 core widths.
/// `widened(s)` rebuilds the same family with the truncation scaled by s,
/// which is what the heavy-tail feasibility test needs.
class MarginalDensity
{
public:
    static constexpr double normal_truncation = 8.0;
    static constexpr double power_law_truncation = 1e3;

    static MarginalDensity uniform(double kappa)
    {
        detail::require(kappa > 0.0, "uniform density: kappa must be positive");
        MarginalDensity f(DensityKind::uniform);
        f.scale_ = kappa;
        f.lo_ = -kappa;
        f.hi_ = kappa;
        return f;
    }

    static MarginalDensity normal(double sigma, double truncation = normal_truncation)
    {
        detail::require(sigma > 0.0, "normal density: sigma must be positive");
        detail::require(truncation > 0.0, "normal density: truncation must be positive");
        MarginalDensity f(DensityKind::normal);
        f.scale_ = sigma;
        f.truncation_ = truncation;
        f.lo_ = -truncation * sigma;
        f.hi_ = truncation * sigma;
        return f;
    }

    /// Flat core of half-width w, tail proportional to (w/x)^2, cut at truncation * w.
    static MarginalDensity power_law(double core_width, double truncation = power_law_truncation)
    {
        detail::require(core_width > 0.0, "power-law density: core width must be positive");
        detail::require(truncation > 1.0, "power-law density: truncation must exceed the core");
        MarginalDensity f(DensityKind::power_law);
        f.scale_ = core_width;
        f.truncation_ = truncation;
        f.hi_ = truncation * core_width;
        f.lo_ = -f.hi_;
        f.level_ = 1.0 / (2.0 * core_width * (2.0 - 1.0 / truncation));
        return f;
    }

    /// Piecewise-linear density through (x_i, f_i); zero outside the grid.
    static MarginalDensity tabulated(std::vector<double> x, std::vector<double> density)
    {
        detail::require(x.size() >= 2 && x.size() == density.size(),
                        "tabulated density: need at least two (value, density) pairs");
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            detail::require(std::isfinite(x[i]) && std::isfinite(density[i]),
                            "tabulated density: non-finite entry");
            detail::require(density[i] >= 0.0, "tabulated density: negative density");
            if (i > 0)
                detail::require(x[i] > x[i - 1], "tabulated density: values must be increasing");
        }
        MarginalDensity f(DensityKind::tabulated);
        f.grid_x_ = std::move(x);
        f.grid_f_ = std::move(density);
        f.lo_ = f.grid_x_.front();
        f.hi_ = f.grid_x_.back();
        f.grid_cdf_.assign(f.grid_x_.size(), 0.0);
        for (std::size_t i = 1; i < f.grid_x_.size(); ++i)
            f.grid_cdf_[i] = f.grid_cdf_[i - 1] + 0.5 * (f.grid_f_[i] + f.grid_f_[i - 1]) *
                                                     (f.grid_x_[i] - f.grid_x_[i - 1]);
        if (std::abs(f.grid_cdf_.back() - 1.0) > 1e-6)
            throw InvalidArgument("tabulated density: does not integrate to 1 within 1e-6");
        return f;
    }

    double operator()(double x) const
    {
        if (x < lo_ || x > hi_)
            return 0.0;
        switch (kind_)
        {
        case DensityKind::uniform:
            return 0.5 / scale_;
        case DensityKind::normal:
        {
            const double z = x / scale_;
            return std::exp(-0.5 * z * z) / (scale_ * std::sqrt(2.0 * std::numbers::pi));
        }
        case DensityKind::power_law:
        {
            const double a = std::abs(x);
            if (a <= scale_)
                return level_;
            const double r = scale_ / a;
            return level_ * r * r;
        }
        case DensityKind::tabulated:
        {
            auto it = std::upper_bound(grid_x_.begin(), grid_x_.end(), x);
            if (it == grid_x_.end())
                return grid_f_.back();
            const auto i = static_cast<std::size_t>(it - grid_x_.begin());
            const double t = (x - grid_x_[i - 1]) / (grid_x_[i] - grid_x_[i - 1]);
            return (1.0 - t) * grid_f_[i - 1] + t * grid_f_[i];
        }
        }
        return 0.0;
    }

    DensityKind kind() const { return kind_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }

    /// kappa (uniform), sigma (normal) or core width (power law); 0 for tabulated.
    double scale() const { return scale_; }
    double truncation() const { return truncation_; }

    /// Support split at the places where the density has kinks or changes form.
    std::vector<double> breakpoints() const
    {
        switch (kind_)
        {
        case DensityKind::uniform: return {lo_, 0.0, hi_};
        case DensityKind::normal: return {lo_, -scale_, 0.0, scale_, hi_};
        case DensityKind::power_law:
        {
            std::vector<double> b{lo_};
            for (double v = hi_ / 4.0; v > scale_; v /= 4.0)
                b.insert(b.begin() + 1, -v);
            b.push_back(-scale_);
            b.push_back(0.0);
            b.push_back(scale_);
            for (double v = 4.0 * scale_; v < hi_; v *= 4.0)
                b.push_back(v);
            b.push_back(hi_);
            std::sort(b.begin(), b.end());
            return b;
        }
        case DensityKind::tabulated: return grid_x_;
        }
        return {lo_, hi_};
    }

    /// True when the truncation is artificial (the family has an infinite tail).
    bool truncated_tail() const
    {
        return kind_ == DensityKind::normal || kind_ == DensityKind::power_law;
    }

    MarginalDensity widened(double factor) const
    {
        switch (kind_)
        {
        case DensityKind::normal: return normal(scale_, truncation_ * factor);
        case DensityKind::power_law: return power_law(scale_, truncation_ * factor);
        default: return *this;
        }
    }

    /// E[x^2] (the mean is zero for every supported kind but tabulated, where it is computed).
    double variance() const
    {
        switch (kind_)
        {
        case DensityKind::uniform: return scale_ * scale_ / 3.0;
        case DensityKind::normal: return scale_ * scale_;
        case DensityKind::power_law:
        {
            const double w = scale_, L = hi_;
            return 2.0 * level_ * (w * w * w / 3.0 + w * w * (L - w));
        }
        case DensityKind::tabulated:
        {
            const double mean = moment(1);
            return moment(2) - mean * mean;
        }
        }
        return 0.0;
    }

    /// eta = V[x^2].
    double variance_of_square() const
    {
        switch (kind_)
        {
        case DensityKind::uniform:
        {
            const double k2 = scale_ * scale_;
            return 4.0 * k2 * k2 / 45.0;
        }
        case DensityKind::normal:
        {
            const double s2 = scale_ * scale_;
            return 2.0 * s2 * s2;
        }
        case DensityKind::power_law:
        {
            const double w = scale_, L = hi_;
            const double m4 = 2.0 * level_ * (std::pow(w, 5) / 5.0 + w * w * (L * L * L - w * w * w) / 3.0);
            const double m2 = variance();
            return m4 - m2 * m2;
        }
        case DensityKind::tabulated:
        {
            const double m2 = moment(2);
            return moment(4) - m2 * m2;
        }
        }
        return 0.0;
    }

    /// Raw moment E[x^k] by quadrature over the support.
    double moment(int k) const
    {
        const auto b = breakpoints();
        return integrate_piecewise([&](double x) { return std::pow(x, k) * (*this)(x); }, b, 1e-12,
                                   {.max_intervals = 4000, .rel_tol = 1e-12});
    }

    /// One draw. Normal draws are not truncated.
    double sample(Rng &rng) const
    {
        switch (kind_)
        {
        case DensityKind::uniform:
            return std::uniform_real_distribution<double>(-scale_, scale_)(rng);
        case DensityKind::normal:
            return std::normal_distribution<double>(0.0, scale_)(rng);
        case DensityKind::power_law:
        {
            const double v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            const double sign = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < 0.5 ? -1.0 : 1.0;
            const double core_mass = 2.0 * level_ * scale_;
            if (v <= core_mass)
                return sign * v / (2.0 * level_);
            const double inv = 1.0 / scale_ - (v - core_mass) / (2.0 * level_ * scale_ * scale_);
            return sign * std::min(1.0 / inv, hi_);
        }
        case DensityKind::tabulated:
        {
            const double v = std::uniform_real_distribution<double>(0.0, grid_cdf_.back())(rng);
            auto it = std::upper_bound(grid_cdf_.begin(), grid_cdf_.end(), v);
            if (it == grid_cdf_.end())
                return hi_;
            const auto i = static_cast<std::size_t>(it - grid_cdf_.begin());
            const double x0 = grid_x_[i - 1], h = grid_x_[i] - x0;
            const double f0 = grid_f_[i - 1], slope = (grid_f_[i] - f0) / h;
            const double need = v - grid_cdf_[i - 1];
            // Solve f0 t + slope t^2 / 2 = need for t in [0, h].
            double t;
            if (std::abs(slope) < 1e-300)
                t = f0 > 0.0 ? need / f0 : 0.0;
            else
                t = (-f0 + std::sqrt(std::max(0.0, f0 * f0 + 2.0 * slope * need))) / slope;
            return x0 + std::clamp(t, 0.0, h);
        }
        }
        return 0.0;
    }

    const std::vector<double> &grid_values() const { return grid_x_; }
    const std::vector<double> &grid_densities() const { return grid_f_; }

private:
    explicit MarginalDensity(DensityKind kind) : kind_(kind) {}

    DensityKind kind_;
    double scale_ = 0.0;
    double truncation_ = 0.0;
    double lo_ = 0.0;
    double hi_ = 0.0;
    double level_ = 0.0;
    std::vector<double> grid_x_, grid_f_, grid_cdf_;
};

/// sigma^2(phi1) = quadratic * phi1^2 + offset.
///
/// Every built-in joint gives this form: the orthogonal coordinates
/// phi_2..phi_n are independent of phi1 with a common second moment m2, so
/// offset = (n - 1) m2. `std_error` is nonzero only when m2 was estimated.
struct ConditionalSpread
{
    double quadratic = 1.0;
    double offset = 0.0;
    double std_error = 0.0;

    double operator()(double phi1) const { return quadratic * phi1 * phi1 + offset; }
    double sigma(double phi1) const { return std::sqrt((*this)(phi1)); }

    /// n = 1: sigma^2 = phi1^2.
    static ConditionalSpread scalar() { return {1.0, 0.0, 0.0}; }
    /// sigma^2 = phi1^2 + c.
    static ConditionalSpread with_offset(double c)
    {
        detail::require(c >= 0.0, "conditional spread: offset must be non-negative");
        return {1.0, c, 0.0};
    }
    /// sigma^2 = c, the large-order approximation n sigma_o^2.
    static ConditionalSpread constant(double c)
    {
        detail::require(c > 0.0, "conditional spread: constant must be positive");
        return {0.0, c, 0.0};
    }
};

/// Conditional spread of an n-th order model whose orthogonal coordinates are
/// i.i.d. with the shape of `f`. Closed forms for the built-in kinds; a Monte
/// Carlo estimate of the second moment (with standard error) for tabulated ones.
inline ConditionalSpread conditional_spread(const MarginalDensity &f, int n,
                                            std::uint64_t seed = 0x5eed,
                                            std::size_t samples = 200000)
{
    detail::require(n >= 1, "conditional spread: model order must be at least 1");
    if (n == 1)
        return ConditionalSpread::scalar();
    const double others = static_cast<double>(n - 1);
    switch (f.kind())
    {
    case DensityKind::uniform:
    case DensityKind::normal:
    case DensityKind::power_law:
        return {1.0, others * f.variance(), 0.0};
    case DensityKind::tabulated:
    {
        Rng rng(seed);
        std::vector<double> squares(samples);
        for (auto &s : squares)
        {
            const double x = f.sample(rng);
            s = x * x;
        }
        const auto summary = summarize(squares);
        return {1.0, others * summary.mean, others * summary.std_error};
    }
    }
    throw InvalidArgument("conditional spread: unknown density kind");
}

inline double sigma_squared(const MarginalDensity &f, int n, double phi1)
{
    return conditional_spread(f, n)(phi1);
}

/// H_d(f) = -int f log f, in nats. Zero-density regions contribute nothing.
inline double differential_entropy(const MarginalDensity &f, double tol = 1e-10)
{
    const auto b = f.breakpoints();
    return integrate_piecewise(
        [&](double x) {
            const double v = f(x);
            return v > 0.0 ? -v * std::log(v) : 0.0;
        },
        b, tol);
}

} // namespace quantid
