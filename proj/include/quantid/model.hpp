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

// FIR plant y(t) = phi(t) theta, regressor generation and the orthogonal
// change of coordinates that puts theta on the first axis.

#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <string_view>

#include <Eigen/Dense>

#include "quantid/density.hpp"
#include "quantid/error.hpp"
#include "quantid/quantizer.hpp"
#include "quantid/random.hpp"

namespace quantid
{

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct FirParameters
{
    Vector theta;

    explicit FirParameters(Vector t) : theta(std::move(t))
    {
        detail::require(theta.size() >= 1, "FIR parameters: model order must be at least 1");
        if (!(theta.norm() > 0.0))
            throw InvalidArgument("degenerate parameter vector");
    }

    int order() const { return static_cast<int>(theta.size()); }
};

/// T orthogonal with T^T theta = (|theta|, 0, ..., 0).
struct TransformedBasis
{
    Matrix T;
    double theta_tilde_1;
};

/// Householder reflector with first column theta/|theta|.
///
/// With u = theta/|theta|, w = u - e1 gives H e1 = u directly but cancels
/// badly when u is close to e1. In that case w = u + e1 is used and the sign
/// of H flipped, which also gives first column u. u = e1 maps to I.
inline TransformedBasis build_transform(const Vector &theta)
{
    const auto n = theta.size();
    detail::require(n >= 1, "build_transform: empty parameter vector");
    const double norm = theta.norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw InvalidArgument("degenerate parameter vector");

    const Vector u = theta / norm;
    Matrix T = Matrix::Identity(n, n);
    if (u(0) == 1.0 && u.tail(n - 1).isZero(0.0))
        return {std::move(T), norm};

    const bool flip = u(0) > 0.0;
    Vector w = u;
    w(0) += flip ? 1.0 : -1.0;
    T -= (2.0 / w.squaredNorm()) * (w * w.transpose());
    if (flip)
        T = -T;
    return {std::move(T), norm};
}

enum class SourceKind
{
    uniform,
    normal,
    power_law,
    tabulated,
};

/// i.i.d. scalar input u(t).
class SignalSource
{
public:
    static SignalSource uniform(double kappa) { return SignalSource(MarginalDensity::uniform(kappa)); }
    static SignalSource normal(double sigma) { return SignalSource(MarginalDensity::normal(sigma)); }
    static SignalSource power_law(double core_width)
    {
        return SignalSource(MarginalDensity::power_law(core_width));
    }
    static SignalSource tabulated(std::vector<double> x, std::vector<double> f)
    {
        return SignalSource(MarginalDensity::tabulated(std::move(x), std::move(f)));
    }
    explicit SignalSource(MarginalDensity shape) : shape_(std::move(shape)) {}

    SourceKind kind() const { return static_cast<SourceKind>(shape_.kind()); }
    const MarginalDensity &shape() const { return shape_; }
    double variance() const { return shape_.variance(); }
    double sample(Rng &rng) const { return shape_.sample(rng); }

private:
    MarginalDensity shape_;
};

/// How rows of the regressor matrix relate to each other.
enum class RegressorLayout
{
    shift,            ///< phi(t) = [u(t) ... u(t-n+1)], consecutive rows overlap
    independent_rows, ///< every entry drawn independently
    rotated_iid,      ///< phi~(t) i.i.d. per coordinate, U = U~ T^T
};

inline std::string_view to_string(RegressorLayout layout)
{
    switch (layout)
    {
    case RegressorLayout::shift: return "shift";
    case RegressorLayout::independent_rows: return "independent_rows";
    case RegressorLayout::rotated_iid: return "rotated_iid";
    }
    return "unknown";
}

/// Shift-structured N x n matrix from N + n - 1 draws. Row t holds
/// u(t), u(t-1), ..., u(t-n+1), so U(t, i) == U(t+1, i+1).
inline Matrix generate_regressors(const SignalSource &source, int N, int n, std::uint64_t seed)
{
    detail::require(n >= 1, "generate_regressors: model order must be at least 1");
    if (N < n)
        throw InvalidArgument("insufficient data length");
    Rng rng(derive_seed(seed, 0));
    // history[k] = u(k - n + 1); row t uses history[t + n - 1 - i].
    std::vector<double> history(static_cast<std::size_t>(N + n - 1));
    for (auto &u : history)
        u = source.sample(rng);
    Matrix U(N, n);
    for (int t = 0; t < N; ++t)
        for (int i = 0; i < n; ++i)
            U(t, i) = history[static_cast<std::size_t>(t + n - 1 - i)];
    return U;
}

inline Matrix generate_independent_regressors(const SignalSource &source, int N, int n,
                                              std::uint64_t seed)
{
    detail::require(n >= 1, "generate_regressors: model order must be at least 1");
    if (N < n)
        throw InvalidArgument("insufficient data length");
    Rng rng(derive_seed(seed, 0));
    Matrix U(N, n);
    for (int t = 0; t < N; ++t)
        for (int i = 0; i < n; ++i)
            U(t, i) = source.sample(rng);
    return U;
}

/// Draws phi~ with i.i.d. coordinates and maps it back, U = U~ T^T.
inline Matrix generate_transformed_regressors(const SignalSource &source, int N,
                                              const TransformedBasis &basis, std::uint64_t seed)
{
    const auto n = static_cast<int>(basis.T.rows());
    Matrix tilde = generate_independent_regressors(source, N, n, seed);
    return tilde * basis.T.transpose();
}

inline Matrix generate_regressors(const SignalSource &source, int N, int n, std::uint64_t seed,
                                  RegressorLayout layout, const TransformedBasis *basis = nullptr)
{
    switch (layout)
    {
    case RegressorLayout::shift: return generate_regressors(source, N, n, seed);
    case RegressorLayout::independent_rows:
        return generate_independent_regressors(source, N, n, seed);
    case RegressorLayout::rotated_iid:
        detail::require(basis != nullptr && basis->T.rows() == n,
                        "generate_regressors: rotated layout needs a matching transform");
        return generate_transformed_regressors(source, N, *basis, seed);
    }
    throw InvalidArgument("generate_regressors: unknown layout");
}

/// U~ = U T.
inline Matrix transform_regressors(const Matrix &U, const TransformedBasis &basis)
{
    if (U.cols() != basis.T.rows())
        throw InvalidArgument("transform_regressors: dimension mismatch");
    return U * basis.T;
}

enum class NoiseKind
{
    normal,
    uniform,
};

struct SimulatedOutput
{
    Vector Y;  ///< noise-free plant output U theta
    Vector Yq; ///< quantized output
    Vector Yo; ///< observed output Yq + W
    Vector E;  ///< quantization error Yq - Y
    Vector W;  ///< additive noise
};

/// Noise is zero-mean with standard deviation sigma_w, drawn from its own stream of `seed`.
inline SimulatedOutput simulate_output(const Matrix &U, const FirParameters &params,
                                       const Quantizer *q, double sigma_w, std::uint64_t seed,
                                       NoiseKind noise = NoiseKind::normal)
{
    if (U.cols() != params.order())
        throw InvalidArgument("simulate_output: regressor columns do not match the model order");
    detail::require(sigma_w >= 0.0, "simulate_output: noise level must be non-negative");

    SimulatedOutput out;
    out.Y = U * params.theta;
    out.Yq = out.Y;
    if (q != nullptr)
        for (Eigen::Index t = 0; t < out.Y.size(); ++t)
            out.Yq(t) = (*q)(out.Y(t));
    out.E = out.Yq - out.Y;

    out.W = Vector::Zero(out.Y.size());
    if (sigma_w > 0.0)
    {
        Rng rng(derive_seed(seed, 1));
        if (noise == NoiseKind::normal)
        {
            std::normal_distribution<double> dist(0.0, sigma_w);
            for (Eigen::Index t = 0; t < out.W.size(); ++t)
                out.W(t) = dist(rng);
        }
        else
        {
            const double half = sigma_w * std::sqrt(3.0);
            std::uniform_real_distribution<double> dist(-half, half);
            for (Eigen::Index t = 0; t < out.W.size(); ++t)
                out.W(t) = dist(rng);
        }
    }
    out.Yo = out.Yq + out.W;
    return out;
}

inline SimulatedOutput simulate_output(const Matrix &U, const FirParameters &params,
                                       const std::optional<Quantizer> &q, double sigma_w,
                                       std::uint64_t seed)
{
    return simulate_output(U, params, q ? &*q : nullptr, sigma_w, seed);
}

} // namespace quantid
