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

#include "oracles.hpp"
#include "quantid/coarse.hpp"
#include "quantid/minimize.hpp"

using Catch::Matchers::WithinAbs;
using namespace quantid;

TEST_CASE("minimize_scalar finds an interior quadratic minimum", "[minimize]")
{
    const auto m = minimize_scalar([](double r) { return (r - 0.3) * (r - 0.3); });
    CHECK_THAT(m.argmin, WithinAbs(0.3, 1e-9));
    CHECK_THAT(m.value, WithinAbs(0.0, 1e-17));
}

TEST_CASE("minimize_scalar returns end points when the function is monotone", "[minimize]")
{
    CHECK(minimize_scalar([](double r) { return -r; }).argmin == 1.0);
    CHECK(minimize_scalar([](double r) { return r * r + r; }).argmin == 0.0);
}

TEST_CASE("minimize_scalar on psi(.; 32) agrees with a 1e7-point grid", "[minimize]")
{
    auto fn = [](double r) { return psi(r, 32.0); };
    const auto m = minimize_scalar(fn);
    const auto [grid_x, grid_v] = oracle::grid_argmin(fn, 0.0, 1.0, 10'000'001);
    CHECK_THAT(m.argmin, WithinAbs(grid_x, 1e-6));
    CHECK(m.value <= grid_v + 1e-12);
}

TEST_CASE("minimize_scalar prefers the global minimum over a local one", "[minimize]")
{
    // Two wells; the deeper one sits at 0.8.
    auto fn = [](double r) { return std::min((r - 0.2) * (r - 0.2), (r - 0.8) * (r - 0.8) - 0.01); };
    CHECK_THAT(minimize_scalar(fn).argmin, WithinAbs(0.8, 1e-8));
}

TEST_CASE("golden_section brackets a unimodal minimum", "[minimize]")
{
    const auto m = golden_section([](double x) { return std::cosh(x - 1.5); }, -3.0, 4.0, 1e-12);
    // cosh is flat to machine precision within ~1e-8 of its minimum.
    CHECK_THAT(m.argmin, WithinAbs(1.5, 1e-7));
    CHECK_THAT(m.value, WithinAbs(1.0, 1e-14));
}
