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

// Least-squares identification from quantized output and the Monte Carlo
// harnesses built on it.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "quantid/coarse.hpp"
#include "quantid/error.hpp"
#include "quantid/model.hpp"
#include "quantid/quantizer.hpp"
#include "quantid/random.hpp"

namespace quantid
{

inline constexpr double max_gram_condition = 1e12;

/// Column-pivoted QR of U, reused for every right-hand side.
class LeastSquares
{
public:
    explicit LeastSquares(const Matrix &U) : qr_(U), rows_(U.rows())
    {
        if (U.rows() < U.cols() || U.cols() == 0)
            throw NumericFailure("rank-deficient regressors", 0.0);
        const Matrix gram = U.transpose() * U;
        Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        condition_ = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
        if (!(condition_ < max_gram_condition))
            throw NumericFailure("rank-deficient regressors", condition_);
    }

    Vector solve(const Vector &rhs) const
    {
        if (rhs.size() != rows_)
            throw InvalidArgument("least squares: right-hand side length does not match the regressors");
        return qr_.solve(rhs);
    }

    double gram_condition() const { return condition_; }

private:
    Eigen::ColPivHouseholderQR<Matrix> qr_;
    Eigen::Index rows_;
    double condition_ = 0.0;
};

/// theta_hat = (U^T U)^{-1} U^T Yo.
inline Vector least_squares(const Matrix &U, const Vector &Yo) { return LeastSquares(U).solve(Yo); }

struct ErrorTerms
{
    Vector delta_E;
    Vector delta_W;
};

inline ErrorTerms decompose_error(const Matrix &U, const Vector &E, const Vector &W)
{
    const LeastSquares ls(U);
    return {ls.solve(E), ls.solve(W)};
}

struct EstimationResult
{
    Vector theta_hat;
    Vector delta_E;
    Vector delta_W;
    double bias_stat = 0.0;      ///< sum_t phi1(t) e(t), phi1 = phi(t) theta / |theta|
    double delta_E_sq = 0.0;     ///< |delta_E|^2
    double delta_W_sq = 0.0;     ///< |delta_W|^2
    double error_sq = 0.0;       ///< |theta_hat - theta|^2
};

/// Least-squares estimate and error decomposition for one data set.
inline EstimationResult estimate(const Matrix &U, const FirParameters &params,
                                 const SimulatedOutput &data)
{
    const LeastSquares ls(U);
    EstimationResult r;
    r.theta_hat = ls.solve(data.Yo);
    r.delta_E = ls.solve(data.E);
    r.delta_W = ls.solve(data.W);
    const Vector direction = params.theta / params.theta.norm();
    r.bias_stat = (U * direction).dot(data.E);
    r.delta_E_sq = r.delta_E.squaredNorm();
    r.delta_W_sq = r.delta_W.squaredNorm();
    r.error_sq = (r.theta_hat - params.theta).squaredNorm();
    return r;
}

struct ComparisonOptions
{
    /// Representative rule of the uniform baseline.
    RepsRule baseline_rule = RepsRule::midpoint;
    RegressorLayout layout = RegressorLayout::rotated_iid;
    std::optional<CoarseMode> mode; ///< defaults to default_coarse_mode(n)
    unsigned threads = 0;
    /// Replaces the uniform baseline when set.
    std::optional<Quantizer> baseline;
};

struct ComparisonTrial
{
    double bias_optimal;  ///< |sum phi1 e| with the optimal quantizer
    double bias_uniform;
    double error_optimal; ///< |delta_E|^2 with the optimal quantizer
    double error_uniform;
};

struct ComparisonTable
{
    double bias_ratio = 0.0;  ///< mean over trials of bias_optimal / bias_uniform
    double error_ratio = 0.0; ///< mean over trials of error_optimal / error_uniform
    int trials = 0;
    std::vector<ComparisonTrial> per_trial;
    std::optional<CoarseDesign> optimal;
    std::optional<Quantizer> baseline;
};

/// Same data, two quantizers: the coarse-optimal design and an M-level
/// uniform quantizer on [-kappa_y, kappa_y]. Noise-free, uniform input.
inline ComparisonTable run_comparison(const FirParameters &params, double kappa, int M, int N,
                                      int trials, std::uint64_t seed,
                                      const ComparisonOptions &opts = {})
{
    detail::require(trials >= 1, "run_comparison: need at least one trial");
    detail::require(kappa > 0.0, "run_comparison: kappa must be positive");
    const auto basis = build_transform(params.theta);
    const int n = params.order();
    const CoarseMode mode = opts.mode.value_or(default_coarse_mode(n));
    auto design = design_coarse(M, kappa, basis.theta_tilde_1, n, mode);
    const double kappa_y = kappa * basis.theta_tilde_1;
    Quantizer baseline = opts.baseline ? *opts.baseline
                                       : uniform_quantizer(kappa_y, 2 * QuantizerBudget::from_total(M).M_prime,
                                                           opts.baseline_rule);
    const auto source = SignalSource::uniform(kappa);

    ComparisonTable table;
    table.trials = trials;
    table.per_trial = run_trials(
        static_cast<std::size_t>(trials),
        [&](std::size_t i) {
            const auto trial_seed = derive_seed(seed, i);
            const Matrix U = generate_regressors(source, N, n, trial_seed, opts.layout, &basis);
            const auto a = estimate(U, params, simulate_output(U, params, &design.quantizer, 0.0, trial_seed));
            const auto b = estimate(U, params, simulate_output(U, params, &baseline, 0.0, trial_seed));
            return ComparisonTrial{std::abs(a.bias_stat), std::abs(b.bias_stat), a.delta_E_sq,
                                   b.delta_E_sq};
        },
        opts.threads);

    CompensatedSum bias, error;
    for (const auto &t : table.per_trial)
    {
        bias.add(t.bias_optimal / t.bias_uniform);
        error.add(t.error_optimal / t.error_uniform);
    }
    table.bias_ratio = bias.mean();
    table.error_ratio = error.mean();
    table.optimal = std::move(design);
    table.baseline = std::move(baseline);
    return table;
}

struct EmpiricalOptions
{
    RegressorLayout layout = RegressorLayout::rotated_iid;
    int block = 100; ///< batch-means block length
    unsigned threads = 0;
};

struct EmpiricalCost
{
    double naive_cost = 0.0;      ///< mean over trials of |U^T E|^2 / N
    double naive_std_error = 0.0;
    double batch_cost = 0.0;      ///< batch-means estimate of V[U^T E] / N
    double batch_std_error = 0.0;
    double scaled_error = 0.0;    ///< mean over trials of N |delta_E|^2
    Vector mean_bias;             ///< trial mean of U^T E / N
    Vector bias_std_error;
};

namespace detail
{
struct TrialMoments
{
    double naive;
    double scaled_error;
    Vector bias;
    std::vector<double> blocks;
};
} // namespace detail

/// Monte Carlo estimates of V[U^T E]/N for a fixed quantizer.
///
/// The per-trial |U^T E|^2/N is chi-square-like with n degrees of freedom,
/// so its mean converges slowly; the batch-means estimate pools
/// |sum_{block} phi e|^2 / block over all blocks of all trials.
inline EmpiricalCost empirical_cost(const FirParameters &params, const Quantizer &q,
                                    const SignalSource &source, int N, int trials, std::uint64_t seed,
                                    const EmpiricalOptions &opts = {})
{
    detail::require(trials >= 1, "empirical_cost: need at least one trial");
    detail::require(opts.block >= 1 && opts.block <= N, "empirical_cost: block length out of range");
    const auto basis = build_transform(params.theta);
    const int n = params.order();

    const auto moments = run_trials(
        static_cast<std::size_t>(trials),
        [&](std::size_t i) {
            const auto trial_seed = derive_seed(seed, i);
            const Matrix U = generate_regressors(source, N, n, trial_seed, opts.layout, &basis);
            const auto data = simulate_output(U, params, &q, 0.0, trial_seed);
            const Vector ute = U.transpose() * data.E;
            const auto r = estimate(U, params, data);
            detail::TrialMoments m;
            m.naive = ute.squaredNorm() / N;
            m.scaled_error = static_cast<double>(N) * r.delta_E_sq;
            m.bias = ute / N;
            const int blocks = N / opts.block;
            m.blocks.reserve(static_cast<std::size_t>(blocks));
            for (int b = 0; b < blocks; ++b)
            {
                const auto rows = U.middleRows(static_cast<Eigen::Index>(b) * opts.block, opts.block);
                const auto e = data.E.segment(static_cast<Eigen::Index>(b) * opts.block, opts.block);
                m.blocks.push_back((rows.transpose() * e).squaredNorm() / opts.block);
            }
            return m;
        },
        opts.threads);

    EmpiricalCost out;
    std::vector<double> naive, blocks;
    CompensatedSum scaled;
    for (const auto &m : moments)
    {
        naive.push_back(m.naive);
        scaled.add(m.scaled_error);
        blocks.insert(blocks.end(), m.blocks.begin(), m.blocks.end());
    }
    const auto ns = summarize(naive);
    const auto bs = summarize(blocks);
    out.naive_cost = ns.mean;
    out.naive_std_error = ns.std_error;
    out.batch_cost = bs.mean;
    out.batch_std_error = bs.std_error;
    out.scaled_error = scaled.mean();
    out.mean_bias = Vector::Zero(n);
    out.bias_std_error = Vector::Zero(n);
    for (int k = 0; k < n; ++k)
    {
        std::vector<double> comp;
        comp.reserve(moments.size());
        for (const auto &m : moments)
            comp.push_back(m.bias(k));
        const auto s = summarize(comp);
        out.mean_bias(k) = s.mean;
        out.bias_std_error(k) = s.std_error;
    }
    return out;
}

struct CrossTermRatio
{
    Vector ratio;     ///< per transformed coordinate k
    Vector std_error; ///< delta-method standard error of each ratio
};

/// E[(sum_t phi~_k(t) e(t))^2] / (N E[phi~_k^2 e^2]) for each k, with the
/// numerator estimated by batch means over blocks of length `block`.
/// Equals 1 when products at different times are uncorrelated.
inline CrossTermRatio cross_term_ratio(const FirParameters &params, const Quantizer &q,
                                       const SignalSource &source, int N, int trials,
                                       std::uint64_t seed, const EmpiricalOptions &opts = {})
{
    detail::require(trials >= 1, "cross_term_ratio: need at least one trial");
    detail::require(opts.block >= 1 && opts.block <= N, "cross_term_ratio: block length out of range");
    const auto basis = build_transform(params.theta);
    const int n = params.order();

    struct Moments
    {
        std::vector<std::vector<double>> blocks; // [k][block]
        Vector pointwise;                        // sum_t phi~_k^2 e^2
    };
    const auto moments = run_trials(
        static_cast<std::size_t>(trials),
        [&](std::size_t i) {
            const auto trial_seed = derive_seed(seed, i);
            const Matrix U = generate_regressors(source, N, n, trial_seed, opts.layout, &basis);
            const auto data = simulate_output(U, params, &q, 0.0, trial_seed);
            const Matrix tilde = transform_regressors(U, basis);
            Moments m;
            m.blocks.assign(static_cast<std::size_t>(n), {});
            m.pointwise = Vector::Zero(n);
            const int blocks = N / opts.block;
            for (int k = 0; k < n; ++k)
            {
                const Vector prod = tilde.col(k).cwiseProduct(data.E);
                m.pointwise(k) = prod.squaredNorm();
                for (int b = 0; b < blocks; ++b)
                {
                    const double s = prod.segment(static_cast<Eigen::Index>(b) * opts.block, opts.block).sum();
                    m.blocks[static_cast<std::size_t>(k)].push_back(s * s / opts.block);
                }
            }
            return m;
        },
        opts.threads);

    CrossTermRatio out{Vector::Zero(n), Vector::Zero(n)};
    const double samples = static_cast<double>(N) * trials;
    for (int k = 0; k < n; ++k)
    {
        std::vector<double> blocks;
        CompensatedSum pointwise;
        for (const auto &m : moments)
        {
            const auto &b = m.blocks[static_cast<std::size_t>(k)];
            blocks.insert(blocks.end(), b.begin(), b.end());
            pointwise.add(m.pointwise(k));
        }
        const auto s = summarize(blocks);
        const double denom = pointwise.sum() / samples;
        out.ratio(k) = s.mean / denom;
        out.std_error(k) = s.std_error / denom;
    }
    return out;
}

struct SlutskyReport
{
    double gram_deviation;    ///< mean over seeds of max |(1/N) U~^T U~ - s I| / s
    double inverse_offdiag;   ///< mean over seeds of max |off-diagonal| / mean diagonal of N (U~^T U~)^{-1}
    double inverse_deviation; ///< mean over seeds of max |N (U~^T U~)^{-1} - I / s| * s
};

/// Convergence of the sample Gram matrix for i.i.d. uniform input.
inline SlutskyReport slutsky_check(const SignalSource &source, int N, int n, int seeds,
                                   std::uint64_t seed, RegressorLayout layout = RegressorLayout::shift,
                                   unsigned threads = 0)
{
    detail::require(seeds >= 1, "slutsky_check: need at least one seed");
    const double s = source.variance();
    // The Gram matrix of phi~ rows has the same law whether or not they are rotated back.
    const auto rows = layout == RegressorLayout::rotated_iid ? RegressorLayout::independent_rows : layout;
    const auto reports = run_trials(
        static_cast<std::size_t>(seeds),
        [&](std::size_t i) {
            const Matrix U = generate_regressors(source, N, n, derive_seed(seed, i), rows);
            const Matrix gram = U.transpose() * U / static_cast<double>(N);
            const Matrix inv = gram.inverse();
            const Matrix I = Matrix::Identity(n, n);
            SlutskyReport r;
            r.gram_deviation = (gram - s * I).cwiseAbs().maxCoeff() / s;
            double off = 0.0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    if (a != b)
                        off = std::max(off, std::abs(inv(a, b)));
            r.inverse_offdiag = off / inv.diagonal().mean();
            r.inverse_deviation = (inv - I / s).cwiseAbs().maxCoeff() * s;
            return r;
        },
        threads);

    CompensatedSum g, o, d;
    for (const auto &r : reports)
    {
        g.add(r.gram_deviation);
        o.add(r.inverse_offdiag);
        d.add(r.inverse_deviation);
    }
    return {g.mean(), o.mean(), d.mean()};
}

} // namespace quantid
