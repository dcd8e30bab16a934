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

// Chebyshev-type bounds on the transformed estimation errors,
//     Prob(|delta_E~|_inf <= eps1 eps2) >= 1 - beta1 - beta2,
// and the trade-off between quantizer resolution M and data length N at a
// fixed bit budget N log2 M.

#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "quantid/density.hpp"
#include "quantid/error.hpp"
#include "quantid/highres.hpp"
#include "quantid/model.hpp"
#include "quantid/sysid.hpp"

namespace quantid
{

struct BoundInputs
{
    double sigma_phi1_sq = 1.0; ///< V[phi1]
    double eta = 2.0;           ///< V[phi1^2]
    int n = 1;
    long long N = 1;
    int M = 2;
    double beta1 = 0.1;
    double beta2 = 0.1;
    double theta_tilde_1 = 1.0;
    double D = 1.0;             ///< fixed-rate design integral
    double sigma_w = 0.0;
};

namespace detail
{
inline void check_reliability(const BoundInputs &in)
{
    require(in.beta1 > 0.0 && in.beta1 < 1.0 && in.beta2 > 0.0 && in.beta2 < 1.0,
            "bounds: beta1 and beta2 must lie in (0, 1)");
    require(1.0 - in.beta1 - in.beta2 > 0.0, "bounds: beta1 + beta2 must be below 1");
    require(in.n >= 1 && in.N >= 1, "bounds: n and N must be positive");
}

inline double epsilon1_denominator(const BoundInputs &in)
{
    const double N = static_cast<double>(in.N);
    return in.sigma_phi1_sq * N - in.n * std::sqrt(N / in.beta1) *
                                      (std::sqrt(in.eta) + (in.n - 1) * in.sigma_phi1_sq);
}
} // namespace detail

inline bool epsilon1_feasible(const BoundInputs &in) { return detail::epsilon1_denominator(in) > 0.0; }

/// eps1 = 1 / (s N - n sqrt(N / beta1) (sqrt(eta) + (n - 1) s)), s = V[phi1].
inline double epsilon1(const BoundInputs &in)
{
    detail::check_reliability(in);
    const double denom = detail::epsilon1_denominator(in);
    if (!(denom > 0.0))
        throw InfeasibleDesign("N too small for beta1");
    return 1.0 / denom;
}

/// eps2 = (1/M) sqrt(theta1^2 D^3 / 12) sqrt(n N / beta2).
inline double epsilon2_quantization(const BoundInputs &in)
{
    detail::check_reliability(in);
    detail::require(in.M >= 1 && in.D > 0.0, "epsilon2_quantization: need M >= 1 and D > 0");
    const double t = in.theta_tilde_1;
    return std::sqrt(t * t * in.D * in.D * in.D / 12.0) *
           std::sqrt(in.n * static_cast<double>(in.N) / in.beta2) / in.M;
}

/// eps2 = sigma_phi1 sigma_w sqrt(n N / beta2).
inline double epsilon2_noise(const BoundInputs &in)
{
    detail::check_reliability(in);
    detail::require(in.sigma_w >= 0.0, "epsilon2_noise: sigma_w must be non-negative");
    return std::sqrt(in.sigma_phi1_sq) * in.sigma_w * std::sqrt(in.n * static_cast<double>(in.N) / in.beta2);
}

struct TradeoffRow
{
    int M;
    long long N;
    bool feasible;
    double eps1 = 0.0;
    double eps2_quant = 0.0;
    double eps2_noise = 0.0;
    double product_quant = 0.0;
    double product_noise = 0.0;
};

struct TradeoffTable
{
    double K_bits;
    std::vector<TradeoffRow> rows;
    bool quant_decreasing = true; ///< over consecutive feasible rows
    bool noise_increasing = true;
};

/// For each M, N = floor(K / log2 M) and the two bound products at that N.
inline TradeoffTable budget_tradeoff(double K_bits, const std::vector<int> &candidate_Ms,
                                     BoundInputs inputs)
{
    detail::require(K_bits > 0.0, "budget_tradeoff: bit budget must be positive");
    TradeoffTable table{K_bits, {}, true, true};
    const TradeoffRow *prev = nullptr;
    for (int M : candidate_Ms)
    {
        detail::require(M >= 2, "budget_tradeoff: every M must be at least 2");
        inputs.M = M;
        inputs.N = static_cast<long long>(std::floor(K_bits / std::log2(static_cast<double>(M))));
        TradeoffRow row{M, inputs.N, inputs.N >= 1 && epsilon1_feasible(inputs)};
        if (row.feasible)
        {
            row.eps1 = epsilon1(inputs);
            row.eps2_quant = epsilon2_quantization(inputs);
            row.eps2_noise = epsilon2_noise(inputs);
            row.product_quant = row.eps1 * row.eps2_quant;
            row.product_noise = row.eps1 * row.eps2_noise;
        }
        table.rows.push_back(row);
        if (row.feasible)
        {
            if (prev != nullptr)
            {
                table.quant_decreasing = table.quant_decreasing && row.product_quant < prev->product_quant;
                table.noise_increasing = table.noise_increasing && row.product_noise > prev->product_noise;
            }
            prev = &table.rows.back();
        }
    }
    return table;
}

struct CoverageConfig
{
    SignalSource source = SignalSource::uniform(1.0);
    Vector theta = Vector::Ones(1);
    int M = 256;
    int N = 10000;
    double beta1 = 0.1;
    double beta2 = 0.1;
    double sigma_w = 0.0;
    bool quantize = true;
    RegressorLayout layout = RegressorLayout::rotated_iid;
    unsigned threads = 0;
};

struct CoverageReport
{
    int trials = 0;
    double target = 0.0;           ///< 1 - beta1 - beta2
    BoundInputs inputs;
    double bound_quant = 0.0;      ///< eps1 * eps2 for delta_E~
    double bound_noise = 0.0;      ///< eps1 * eps2 for delta_W~
    double coverage_quant = 0.0;   ///< fraction with |delta_E~|_inf <= bound_quant
    double coverage_noise = 0.0;
    double max_ratio_quant = 0.0;  ///< largest |delta_E~|_inf / bound seen
    double max_ratio_noise = 0.0;
};

/// Runs the full pipeline (fixed-rate high-resolution quantizer built for
/// the source, least squares) and counts how often each error lands inside
/// its bound.
inline CoverageReport coverage_test(const CoverageConfig &cfg, int trials, std::uint64_t seed)
{
    detail::require(trials >= 1, "coverage_test: need at least one trial");
    const FirParameters params(cfg.theta);
    const auto basis = build_transform(params.theta);
    const int n = params.order();
    const auto &f = cfg.source.shape();
    const auto spread = conditional_spread(f, n);

    BoundInputs in;
    in.sigma_phi1_sq = f.variance();
    in.eta = f.variance_of_square();
    in.n = n;
    in.N = cfg.N;
    in.M = cfg.M;
    in.beta1 = cfg.beta1;
    in.beta2 = cfg.beta2;
    in.theta_tilde_1 = basis.theta_tilde_1;
    in.sigma_w = cfg.sigma_w;

    std::optional<Quantizer> q;
    if (cfg.quantize)
    {
        auto design = design_fixed_rate(f, spread, cfg.M, {.theta_tilde_1 = basis.theta_tilde_1});
        in.D = design.report.D;
        q = companding_breakpoints(design.g, cfg.M, RepsRule::midpoint, basis.theta_tilde_1);
    }
    else
    {
        in.D = fixed_rate_integral(f, spread);
    }

    CoverageReport report;
    report.trials = trials;
    report.target = 1.0 - cfg.beta1 - cfg.beta2;
    report.inputs = in;
    const double eps1 = epsilon1(in);
    report.bound_quant = eps1 * epsilon2_quantization(in);
    report.bound_noise = eps1 * epsilon2_noise(in);

    struct Outcome
    {
        double quant;
        double noise;
    };
    const auto outcomes = run_trials(
        static_cast<std::size_t>(trials),
        [&](std::size_t i) {
            const auto trial_seed = derive_seed(seed, i);
            const Matrix U = generate_regressors(cfg.source, cfg.N, n, trial_seed, cfg.layout, &basis);
            const auto data = simulate_output(U, params, q, cfg.sigma_w, trial_seed);
            const auto terms = decompose_error(U, data.E, data.W);
            const Vector dE = basis.T.transpose() * terms.delta_E;
            const Vector dW = basis.T.transpose() * terms.delta_W;
            return Outcome{dE.cwiseAbs().maxCoeff(), dW.cwiseAbs().maxCoeff()};
        },
        cfg.threads);

    int inside_q = 0, inside_w = 0;
    for (const auto &o : outcomes)
    {
        inside_q += o.quant <= report.bound_quant ? 1 : 0;
        inside_w += o.noise <= report.bound_noise ? 1 : 0;
        if (report.bound_quant > 0.0)
            report.max_ratio_quant = std::max(report.max_ratio_quant, o.quant / report.bound_quant);
        if (report.bound_noise > 0.0)
            report.max_ratio_noise = std::max(report.max_ratio_noise, o.noise / report.bound_noise);
    }
    report.coverage_quant = static_cast<double>(inside_q) / trials;
    report.coverage_noise = static_cast<double>(inside_w) / trials;
    return report;
}

} // namespace quantid
