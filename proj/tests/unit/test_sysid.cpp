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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "quantid/coarse.hpp"
#include "quantid/model.hpp"
#include "quantid/sysid.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace quantid;

namespace
{
Vector vec(std::initializer_list<double> xs)
{
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs)
        v(i++) = x;
    return v;
}
} // namespace

TEST_CASE("least squares on small examples", "[sysid]")
{
    Matrix U(2, 1);
    U << 1.0, 2.0;
    CHECK_THAT(least_squares(U, vec({2.0, 4.0}))(0), WithinAbs(2.0, 1e-14));

    // Normal equations as the reference.
    const Matrix A = generate_regressors(SignalSource::normal(1.0), 40, 3, 4);
    const Vector y = A * vec({0.5, -1.0, 2.0}) + generate_regressors(SignalSource::normal(0.1), 40, 1, 5).col(0);
    const Vector ref = (A.transpose() * A).ldlt().solve(A.transpose() * y);
    CHECK((least_squares(A, y) - ref).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(LeastSquares(A).solve(Vector::Zero(3)), InvalidArgument);
}

TEST_CASE("rank-deficient regressors are rejected", "[sysid]")
{
    Matrix U(4, 2);
    U << 1, 1, 2, 2, 3, 3, 4, 4;
    CHECK_THROWS_AS(LeastSquares(U), NumericFailure);
    CHECK_THROWS_WITH(LeastSquares(U), "rank-deficient regressors");
    CHECK_THROWS_AS(LeastSquares(Matrix::Ones(1, 2)), NumericFailure);
    CHECK(LeastSquares(Matrix::Identity(3, 3)).gram_condition() == 1.0);
}

TEST_CASE("estimation error splits into quantization and noise parts", "[sysid]")
{
    const FirParameters params(vec({0.8, -0.3, 0.1}));
    const Matrix U = generate_regressors(SignalSource::uniform(1.0), 500, 3, 11);
    const auto q = uniform_quantizer(1.2, 6, RepsRule::midpoint);
    const auto data = simulate_output(U, params, &q, 0.05, 12);
    const auto r = estimate(U, params, data);
    CHECK((r.theta_hat - params.theta - r.delta_E - r.delta_W).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THAT(r.delta_E_sq, WithinRel(r.delta_E.squaredNorm(), 1e-15));
    CHECK_THAT(r.error_sq, WithinRel((r.theta_hat - params.theta).squaredNorm(), 1e-15));
    const Vector direction = params.theta / params.theta.norm();
    CHECK_THAT(r.bias_stat, WithinAbs((U * direction).dot(data.E), 1e-10));

    // The rotated error has the same length.
    const auto basis = build_transform(params.theta);
    CHECK_THAT((basis.T.transpose() * r.delta_E).norm(), WithinRel(r.delta_E.norm(), 1e-12));
}

TEST_CASE("noise-free unquantized data is fitted exactly", "[sysid]")
{
    const FirParameters params(vec({0.3, -1.2, 0.7}));
    const Matrix U = generate_regressors(SignalSource::normal(1.0), 100, 3, 2);
    const auto r = estimate(U, params, simulate_output(U, params, nullptr, 0.0, 3));
    CHECK((r.theta_hat - params.theta).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(r.delta_E.isZero(0.0));
    CHECK(r.delta_W.isZero(0.0));
}

TEST_CASE("fine uniform quantization leaves a vanishing error", "[sysid]")
{
    const FirParameters params(vec({1.0, 0.5}));
    const Matrix U = generate_regressors(SignalSource::uniform(1.0), 2000, 2, 3);
    double prev = std::numeric_limits<double>::infinity();
    for (int M : {16, 256, 65536})
    {
        const auto q = uniform_quantizer(1.5, M, RepsRule::midpoint);
        const auto r = estimate(U, params, simulate_output(U, params, &q, 0.0, 4));
        CHECK(r.delta_E_sq < prev);
        prev = r.delta_E_sq;
    }
    // n Delta^2 / (12 N sigma_u^2) at Delta = 3 / 65536, up to chi-square spread.
    const double delta = 3.0 / 65536.0;
    CHECK(prev < 10.0 * 2.0 * delta * delta / 12.0 / (2000.0 / 3.0));
}

TEST_CASE("comparison harness", "[sysid]")
{
    const FirParameters params(vec({1.0}));
    ComparisonOptions opts;
    opts.threads = 1;
    const auto one = run_comparison(params, 1.0, 8, 2000, 40, 21, opts);
    opts.threads = 4;
    const auto four = run_comparison(params, 1.0, 8, 2000, 40, 21, opts);
    REQUIRE(one.per_trial.size() == 40);
    CHECK(one.bias_ratio == four.bias_ratio);
    CHECK(one.error_ratio == four.error_ratio);
    CHECK(one.error_ratio < 0.5);
    CHECK(one.bias_ratio < 1.0);
    REQUIRE(one.optimal.has_value());
    CHECK(one.optimal->mode == CoarseMode::n1);
    CHECK(one.baseline->total_cells() == 8);

    // The same quantizer on both sides.
    opts.baseline = one.optimal->quantizer;
    const auto same = run_comparison(params, 1.0, 8, 2000, 10, 22, opts);
    CHECK(same.bias_ratio == 1.0);
    CHECK(same.error_ratio == 1.0);
}

TEST_CASE("empirical cost agrees with the coarse cost formula", "[sysid]")
{
    const FirParameters params(vec({1.0}));
    const auto design = design_coarse(8, 1.0, 1.0, 1, CoarseMode::n1);
    const auto source = SignalSource::uniform(1.0);
    const auto cost = empirical_cost(params, design.quantizer, source, 10000, 40, 5);
    CHECK(std::abs(cost.batch_cost - design.optimal_cost) < 4.0 * cost.batch_std_error);

    // Bias-free representatives: E[phi e] = 0.
    CHECK(std::abs(cost.mean_bias(0)) < 4.0 * cost.bias_std_error(0));

    // N |delta_E|^2 ~ V / sigma_u^4.
    const double s = source.variance();
    CHECK_THAT(cost.scaled_error, WithinRel(cost.batch_cost / (s * s), 0.15));

    CHECK_THROWS_AS(empirical_cost(params, design.quantizer, source, 100, 2, 5, {.block = 1000}),
                    InvalidArgument);
}

TEST_CASE("independent rows have no cross terms", "[sysid]")
{
    const FirParameters params(vec({std::sqrt(3.0) / 2.0, 0.5}));
    const auto design = design_coarse(8, 1.0, 1.0, 2, CoarseMode::general);
    const auto ratio = cross_term_ratio(params, design.quantizer, SignalSource::uniform(1.0), 10000, 20, 9);
    for (int k = 0; k < 2; ++k)
        CHECK(std::abs(ratio.ratio(k) - 1.0) < 4.0 * ratio.std_error(k));
}

TEST_CASE("sample Gram matrix concentrates", "[sysid]")
{
    const auto small = slutsky_check(SignalSource::uniform(1.0), 1000, 3, 8, 1);
    const auto large = slutsky_check(SignalSource::uniform(1.0), 100000, 3, 8, 1);
    CHECK(large.gram_deviation < small.gram_deviation);
    CHECK(large.gram_deviation < 0.01);
    CHECK(large.inverse_offdiag < 0.01);
    CHECK(large.inverse_deviation < 0.02);
}

TEST_CASE("N^2 sigma^4 |delta_E|^2 / |U^T E|^2 approaches 1", "[sysid]")
{
    const FirParameters params(vec({2.0}));
    const auto design = design_coarse(10, 4.0, 2.0, 1, CoarseMode::n1);
    const auto source = SignalSource::uniform(4.0);
    const double s = source.variance();
    std::vector<double> gaps;
    for (int N : {1000, 10000, 100000})
    {
        double gap = 0.0;
        const int trials = 20;
        for (int i = 0; i < trials; ++i)
        {
            const Matrix U = generate_regressors(source, N, 1, derive_seed(31, static_cast<std::uint64_t>(i)));
            const auto data = simulate_output(U, params, &design.quantizer, 0.0, 0);
            const auto r = estimate(U, params, data);
            const double ute = (U.transpose() * data.E).squaredNorm();
            gap += std::abs(double(N) * N * s * s * r.delta_E_sq / ute - 1.0) / trials;
        }
        gaps.push_back(gap);
    }
    CHECK(gaps[1] < gaps[0]);
    CHECK(gaps[2] < gaps[1]);
    CHECK(gaps[2] < 0.02);
}

TEST_CASE("fine quantizer cost is negligible against the coarse one", "[sysid]")
{
    const FirParameters params(vec({2.0}));
    const auto source = SignalSource::uniform(4.0);
    const auto coarse = design_coarse(10, 4.0, 2.0, 1, CoarseMode::n1);
    const auto fine = uniform_quantizer(8.0, 4096, RepsRule::bias_free);
    const auto a = empirical_cost(params, coarse.quantizer, source, 20000, 4, 1);
    const auto b = empirical_cost(params, fine, source, 20000, 4, 1);
    CHECK(b.batch_cost < 1e-4 * a.batch_cost);
}

TEST_CASE("cross terms fade as the quantizer gets finer on shifted data", "[sysid]")
{
    // Overlapping regressor rows make phi~_k(t) e(t) correlated across t;
    // the correlation shrinks with the widest cell.
    const FirParameters params(vec({1.0, 0.0}));
    const auto source = SignalSource::normal(1.0);
    EmpiricalOptions opts;
    opts.layout = RegressorLayout::shift;
    opts.block = 1000;
    std::vector<double> deviation;
    for (int M : {4, 8, 16})
    {
        const auto q = uniform_quantizer(8.0, M, RepsRule::midpoint);
        const auto ratio = cross_term_ratio(params, q, source, 100000, 10, 3, opts);
        deviation.push_back((ratio.ratio.array() - 1.0).abs().maxCoeff());
    }
    CHECK(deviation[1] < deviation[0]);
    CHECK(deviation[2] < deviation[1]);
}
