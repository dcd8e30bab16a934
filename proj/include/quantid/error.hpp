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

#include <stdexcept>
#include <string>

namespace quantid
{

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on the arguments was violated (bad shapes, non-monotone breakpoints, ...).
class InvalidArgument : public Error
{
public:
    using Error::Error;
};

/// The requested quantizer design does not exist for the given inputs.
class InfeasibleDesign : public Error
{
public:
    using Error::Error;
};

/// A numerical routine failed to reach its tolerance.
/// `partial` carries the best estimate available when the routine gave up.
class NumericFailure : public Error
{
public:
    NumericFailure(const std::string &what, double partial = 0.0)
        : Error(what), partial_(partial) {}

    double partial() const noexcept { return partial_; }

private:
    double partial_;
};

namespace detail
{
inline void require(bool condition, const char *message)
{
    if (!condition)
        throw InvalidArgument(message);
}
} // namespace detail

} // namespace quantid
