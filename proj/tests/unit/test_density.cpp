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
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "quantid/density.hpp"
#include "quantid/io.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace quantid;

namespace
{
double total_mass(const MarginalDensity &f)
{
    const auto b = f.breakpoints();
    return integrate_piecewise([&](double x) { return f(x); }, b, 1e-12);
}
} // namespace

TEST_CASE("built-in densities are normalized", "[density]")
{
    CHECK_THAT(total_mass(MarginalDensity::uniform(4.0)), WithinAbs(1.0, 1e-10));
    CHECK_THAT(total_mass(MarginalDensity::normal(2.0)), WithinAbs(1.0, 1e-10));
    CHECK_THAT(total_mass(MarginalDensity::power_law(1.5)), WithinAbs(1.0, 1e-9));
    CHECK_THAT(total_mass(MarginalDensity::power_law(1.0, 50.0)), WithinAbs(1.0, 1e-9));
}

TEST_CASE("power-law density has an inverse-square tail", "[density]")
{
    const auto f = MarginalDensity::power_law(1.0);
    CHECK(f(0.3) == f(0.9));
    CHECK_THAT(f(10.0) / f(20.0), WithinRel(4.0, 1e-14));
    CHECK_THAT(f(-10.0), WithinRel(f(10.0), 1e-15));
    CHECK(f(1001.0) == 0.0);
}

TEST_CASE("differential entropy matches closed forms", "[density]")
{
    CHECK_THAT(differential_entropy(MarginalDensity::normal(1.0)),
               WithinAbs(0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e), 1e-4));
    CHECK_THAT(differential_entropy(MarginalDensity::uniform(4.0)), WithinAbs(std::log(8.0), 1e-6));
    // Scaling by c shifts the entropy by log c.
    for (double c : {0.5, 3.0})
    {
        CHECK_THAT(differential_entropy(MarginalDensity::normal(c)) - differential_entropy(MarginalDensity::normal(1.0)),
                   WithinAbs(std::log(c), 1e-8));
        CHECK_THAT(differential_entropy(MarginalDensity::uniform(2.0 * c)) -
                       differential_entropy(MarginalDensity::uniform(2.0)),
                   WithinAbs(std::log(c), 1e-10));
    }
}

TEST_CASE("conditional spread closed forms", "[density]")
{
    // n = 1 reduces to phi1^2 for every kind.
    CHECK(sigma_squared(MarginalDensity::uniform(4.0), 1, 2.0) == 4.0);
    CHECK(sigma_squared(MarginalDensity::normal(1.0), 1, 2.0) == 4.0);
    CHECK_THAT(sigma_squared(MarginalDensity::normal(1.0), 5, 0.0), WithinAbs(4.0, 1e-14));
    CHECK_THAT(sigma_squared(MarginalDensity::uniform(4.0), 2, 1.0), WithinRel(1.0 + 16.0 / 3.0, 1e-14));

    // Monte Carlo over the cube.
    const double mc = oracle::cube_conditional_second_moment(1.0, 4.0, 2, 400000, 17);
    CHECK_THAT(sigma_squared(MarginalDensity::uniform(4.0), 2, 1.0), WithinRel(mc, 0.01));

    const auto s = ConditionalSpread::with_offset(2.0);
    for (double x : {-3.0, 0.0, 0.5, 4.0})
    {
        CHECK(s(x) >= x * x);
        CHECK(s(x) == s(-x));
    }
    CHECK_THROWS_AS(conditional_spread(MarginalDensity::uniform(1.0), 0), InvalidArgument);
}

TEST_CASE("sigma^2 f has a bounded derivative for built-in kinds", "[density]")
{
    for (const auto &f : {MarginalDensity::uniform(2.0), MarginalDensity::normal(1.0)})
    {
        const auto s = conditional_spread(f, 3);
        const double h = 1e-4;
        double worst = 0.0;
        for (double x = f.lo() + 0.01; x < f.hi() - 0.01; x += 0.01)
            worst = std::max(worst, std::abs(s(x + h) * f(x + h) - s(x - h) * f(x - h)) / (2 * h));
        CHECK(std::isfinite(worst));
        CHECK(worst < 100.0);
    }
}

TEST_CASE("moments of the built-in densities", "[density]")
{
    const auto u = MarginalDensity::uniform(4.0);
    CHECK_THAT(u.variance(), WithinRel(16.0 / 3.0, 1e-14));
    CHECK_THAT(u.variance_of_square(), WithinRel(4.0 * 256.0 / 45.0, 1e-14));
    CHECK_THAT(u.moment(4) - std::pow(u.moment(2), 2), WithinRel(u.variance_of_square(), 1e-9));

    const auto n = MarginalDensity::normal(2.0);
    CHECK_THAT(n.variance_of_square(), WithinRel(2.0 * 16.0, 1e-14));
    CHECK_THAT(n.moment(2), WithinRel(4.0, 1e-9));

    const auto p = MarginalDensity::power_law(1.0, 20.0);
    CHECK_THAT(p.variance(), WithinRel(p.moment(2), 1e-8));
    CHECK_THAT(p.variance_of_square(), WithinRel(p.moment(4) - std::pow(p.moment(2), 2), 1e-8));
}

TEST_CASE("sampling reproduces the density", "[density]")
{
    Rng rng(3);
    const auto p = MarginalDensity::power_law(1.0, 10.0);
    const int draws = 200000;
    int core = 0;
    for (int i = 0; i < draws; ++i)
        core += std::abs(p.sample(rng)) <= 1.0 ? 1 : 0;
    const double expected = 2.0 * p(0.0);
    CHECK_THAT(static_cast<double>(core) / draws, WithinAbs(expected, 4.0 * std::sqrt(expected / draws)));

    const auto t = MarginalDensity::tabulated({-1.0, 0.0, 1.0}, {0.0, 1.0, 0.0});
    double sum_sq = 0.0;
    for (int i = 0; i < draws; ++i)
    {
        const double x = t.sample(rng);
        REQUIRE(std::abs(x) <= 1.0);
        sum_sq += x * x;
    }
    CHECK_THAT(sum_sq / draws, WithinAbs(1.0 / 6.0, 0.003));
}

TEST_CASE("tabulated densities interpolate linearly and are checked", "[density]")
{
    const auto t = MarginalDensity::tabulated({-1.0, 0.0, 1.0}, {0.0, 1.0, 0.0});
    CHECK_THAT(t(0.25), WithinAbs(0.75, 1e-15));
    CHECK(t(2.0) == 0.0);
    CHECK_THAT(differential_entropy(t), WithinAbs(0.5, 1e-8)); // triangle: 1/2 - log(1) = 0.5

    CHECK_THROWS_AS(MarginalDensity::tabulated({-1.0, 1.0}, {0.5, 0.6}), InvalidArgument);
    CHECK_THROWS_AS(MarginalDensity::tabulated({1.0, -1.0}, {0.5, 0.5}), InvalidArgument);
    CHECK_THROWS_AS(MarginalDensity::tabulated({-1.0, 1.0}, {-0.5, 1.5}), InvalidArgument);

    const auto spread = conditional_spread(t, 3, 11, 100000);
    CHECK_THAT(spread.offset, WithinAbs(2.0 / 6.0, 6.0 * spread.std_error));
    CHECK(spread.std_error > 0.0);
}

TEST_CASE("tabulated densities load from CSV", "[density]")
{
    const auto path = std::filesystem::temp_directory_path() / "quantid_tabulated_test.csv";
    {
        std::ofstream out(path);
        out << "value,density\n# triangle\n-1,0\n0,1\n1,0\n";
    }
    const auto f = read_tabulated_density(path.string());
    CHECK(f.kind() == DensityKind::tabulated);
    CHECK_THAT(f(0.5), WithinAbs(0.5, 1e-15));
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_tabulated_density("/nonexistent/file.csv"), InvalidArgument);
}
