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
#include <numbers>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "quantid/highres.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace quantid;

TEST_CASE("fixed-rate integral of the unit normal", "[highres]")
{
    const auto f = MarginalDensity::normal(1.0);
    const double D = fixed_rate_integral(f, ConditionalSpread::constant(1.0));
    CHECK_THAT(D * D * D, WithinRel(6.0 * std::sqrt(3.0) * std::numbers::pi, 1e-4));

    // Independent check with Simpson on the same truncated support.
    const double ref = oracle::simpson(
        [](double x) { return std::cbrt(std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi)); }, -8.0,
        8.0, 20000);
    CHECK_THAT(D, WithinRel(ref, 1e-9));
}

TEST_CASE("fixed-rate cell density integrates to M", "[highres]")
{
    for (int M : {16, 128, 1000})
    {
        const auto f = MarginalDensity::normal(1.0);
        const auto spread = ConditionalSpread::with_offset(1.0);
        const auto design = design_fixed_rate(f, spread, M);
        CHECK_THAT(subsection_count(f, design.g), WithinRel(static_cast<double>(M), 1e-8));
        CHECK_THAT(design.g.total_count(), WithinRel(static_cast<double>(M), 1e-8));
        CHECK_THAT(cost_functional(f, spread, design.g), WithinRel(design.report.predicted_cost, 1e-8));
    }
}

TEST_CASE("variable-rate design has entropy log M", "[highres]")
{
    for (const auto &f : {MarginalDensity::uniform(4.0), MarginalDensity::normal(1.0)})
        for (int M : {8, 256})
        {
            const auto spread = ConditionalSpread::with_offset(1.0);
            const auto design = design_variable_rate(f, spread, M);
            CHECK_THAT(subsection_entropy(f, design.g), WithinAbs(std::log(M), 1e-8));
            CHECK_THAT(design.report.entropy_H, WithinAbs(std::log(M), 1e-8));
            CHECK_THAT(cost_functional(f, spread, design.g), WithinRel(design.report.predicted_cost, 1e-8));
        }

    // Scalar case (n = 1): the log-singular integrand at 0 still converges.
    const auto scalar = design_variable_rate(MarginalDensity::uniform(1.0), ConditionalSpread::scalar(), 64);
    CHECK_THAT(scalar.report.entropy_H, WithinAbs(std::log(64.0), 1e-7));
    // L = int f log f - int f log|x| = -log 2 + 1 for uniform on [-1, 1].
    CHECK_THAT(scalar.report.L, WithinAbs(1.0 - std::log(2.0), 1e-9));
}

TEST_CASE("variable rate beats fixed rate at equal M", "[highres]")
{
    const auto f = MarginalDensity::normal(1.0);
    const auto spread = ConditionalSpread::with_offset(1.0);
    const auto fixed = design_fixed_rate(f, spread, 64);
    const auto variable = design_variable_rate(f, spread, 64);
    CHECK(variable.report.predicted_cost < fixed.report.predicted_cost);
}

TEST_CASE("designs are stationary under admissible perturbations", "[highres]")
{
    const auto f = MarginalDensity::normal(1.0);
    const auto spread = ConditionalSpread::with_offset(1.0);
    const int M = 64;
    const auto fixed = design_fixed_rate(f, spread, M);
    const auto variable = design_variable_rate(f, spread, M);
    const double fixed_cost = cost_functional(f, spread, fixed.g);
    const double variable_cost = cost_functional(f, spread, variable.g);

    const std::vector<std::function<double(double)>> shapes = {
        [](double x) { return std::cos(x); },
        [](double x) { return x * x / (1.0 + x * x); },
        [](double x) { return std::exp(-std::abs(x)); },
    };
    for (const auto &h : shapes)
        for (double eps : {0.05, -0.05, 0.2})
        {
            // Fixed rate: keep the cell count at M.
            auto raw = [&](double x) { return fixed.g(x) * std::exp(eps * h(x)); };
            const double count = subsection_count(f, raw);
            auto perturbed = [&](double x) { return raw(x) * M / count; };
            CHECK(cost_functional(f, spread, perturbed) >= fixed_cost * (1.0 - 1e-10));

            // Variable rate: keep the entropy at log M.
            const double shift =
                subsection_entropy(f, [&](double x) { return variable.g(x) * std::exp(eps * h(x)); }) -
                std::log(M);
            auto same_entropy = [&](double x) { return variable.g(x) * std::exp(eps * h(x) - shift); };
            REQUIRE_THAT(subsection_entropy(f, same_entropy), WithinAbs(std::log(M), 1e-8));
            CHECK(cost_functional(f, spread, same_entropy) >= variable_cost * (1.0 - 1e-10));
        }
}

TEST_CASE("companding with g proportional to |x|^(2/3)", "[highres]")
{
    const SubsectionDensity g([](double x) { return std::cbrt(x * x); }, {-1.0, 0.0, 1.0});
    const int M = 20;
    const auto q = companding_breakpoints(g, M, RepsRule::bias_free);
    const auto &d = q.positive_breakpoints();
    REQUIRE(d.size() == 11);
    for (int j = 0; j <= 10; ++j)
        CHECK_THAT(d[static_cast<std::size_t>(j)], WithinAbs(std::pow(j / 10.0, 0.6), 1e-10));

    // Scaling by theta1 stretches every breakpoint.
    const auto q2 = companding_breakpoints(g, M, RepsRule::bias_free, 2.5);
    for (std::size_t j = 0; j < d.size(); ++j)
        CHECK_THAT(q2.positive_breakpoints()[j], WithinAbs(2.5 * d[j], 1e-9));
}

TEST_CASE("constant g gives uniform cells of width 1/g", "[highres]")
{
    const auto f = MarginalDensity::uniform(4.0);
    const int M = 512;
    const auto design = design_fixed_rate(f, ConditionalSpread::constant(1.0), M);
    CHECK_THAT(design.g(1.3), WithinRel(M / 8.0, 1e-12));
    const auto q = companding_breakpoints(design.g, M, RepsRule::midpoint);
    const auto &d = q.positive_breakpoints();
    REQUIRE(d.size() == 257);
    for (std::size_t j = 1; j < d.size(); ++j)
        CHECK_THAT(d[j] - d[j - 1], WithinRel(1.0 / design.g(0.5), 1e-8));
}

TEST_CASE("exact cost of a uniform quantizer is Delta^2/12", "[highres]")
{
    const auto f = MarginalDensity::uniform(1.0);
    for (int M : {4, 16, 64})
    {
        const auto q = uniform_quantizer(1.0, M, RepsRule::midpoint);
        const double delta = 2.0 / M;
        CHECK_THAT(exact_quantized_cost(f, ConditionalSpread::constant(1.0), q, 1.0),
                   WithinRel(delta * delta / 12.0, 1e-9));
    }
}

TEST_CASE("companded quantizer cost approaches the high-resolution prediction", "[highres]")
{
    const auto f = MarginalDensity::normal(1.0);
    const auto spread = ConditionalSpread::scalar();
    const int M = 128;
    const auto design = design_fixed_rate(f, spread, M);
    const auto q = companding_breakpoints(design.g, M, RepsRule::midpoint);
    const double exact = exact_quantized_cost(f, spread, q, 1.0);
    CHECK(std::abs(exact - design.report.predicted_cost) / design.report.predicted_cost < 0.10);

    // Cost scales like M^-2.
    const auto design2 = design_fixed_rate(f, spread, 2 * M);
    const auto q2 = companding_breakpoints(design2.g, 2 * M, RepsRule::midpoint);
    const double exact2 = exact_quantized_cost(f, spread, q2, 1.0);
    CHECK_THAT(exact / exact2, WithinRel(4.0, 0.05));
}

TEST_CASE("cell-density shapes", "[highres]")
{
    const auto spread = ConditionalSpread::with_offset(1.0);

    // Uniform input: g grows with |phi1| like (phi1^2 + 1)^(1/3).
    const auto uni = design_fixed_rate(MarginalDensity::uniform(4.0), spread, 64);
    CHECK_THAT(uni.g(4.0) / uni.g(0.0), WithinRel(std::cbrt(17.0), 1e-12));
    CHECK(uni.g(2.0) > uni.g(1.0));

    // Normal input: peak at |phi1| = 1.
    const auto nor = design_fixed_rate(MarginalDensity::normal(1.0), spread, 64);
    CHECK_THAT(nor.g(3.0) / nor.g(1.0), WithinAbs(0.4507, 1e-4));
    CHECK_THAT(nor.g(4.0) / nor.g(1.0), WithinAbs(0.1675, 1e-4));
    CHECK(nor.g(0.9) < nor.g(1.0));
    CHECK(nor.g(1.1) < nor.g(1.0));

    // Power-law input: flat tail.
    DesignOptions loose;
    loose.check_tail = false;
    const auto pl = design_fixed_rate(MarginalDensity::power_law(1.0), spread, 64, loose);
    CHECK_THAT(pl.g(200.0) / pl.g(400.0), WithinAbs(1.0, 1e-4));
}

TEST_CASE("heavy tails with a flat cell density are infeasible", "[highres]")
{
    const auto f = MarginalDensity::power_law(1.0);
    const auto spread = ConditionalSpread::with_offset(1.0);
    const auto growth = tail_growth_test(f, spread);
    CHECK_FALSE(growth.feasible);
    CHECK(growth.relative_change > 0.01);
    CHECK_THROWS_AS(design_fixed_rate(f, spread, 32), InfeasibleDesign);
    CHECK_THROWS_WITH(design_fixed_rate(f, spread, 32), ContainsSubstring("marginal case"));

    // f^(1/3) alone decays like |x|^(-2/3), which is not integrable either.
    CHECK_FALSE(tail_growth_test(f, ConditionalSpread::constant(1.0)).feasible);
    CHECK(tail_growth_test(MarginalDensity::normal(1.0), spread).feasible);
    CHECK(tail_growth_test(MarginalDensity::uniform(2.0), spread).feasible);
}

TEST_CASE("design argument checks", "[highres]")
{
    const auto f = MarginalDensity::uniform(1.0);
    CHECK_THROWS_AS(design_fixed_rate(f, ConditionalSpread::constant(1.0), 1), InvalidArgument);
    CHECK_THROWS_AS(design_variable_rate(f, ConditionalSpread::constant(0.0), 8), InvalidArgument);
    CHECK_THROWS_AS(design_grid(f, design_fixed_rate(f, ConditionalSpread::constant(1.0), 8).g, 1.0, 0.0, 10),
                    InvalidArgument);
    const auto rows = design_grid(f, design_fixed_rate(f, ConditionalSpread::constant(1.0), 8).g, -1.0, 1.0, 5);
    REQUIRE(rows.size() == 5);
    CHECK(rows.back()[0] == 1.0);
    CHECK_THAT(rows[2][2], WithinRel(4.0, 1e-12));
}
