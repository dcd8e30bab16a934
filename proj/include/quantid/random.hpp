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

// Seeding, trial-level parallelism and compensated accumulation.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

namespace quantid
{

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; maps (master seed, stream index) to a well-mixed seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream)
{
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Neumaier-compensated running sum.
class CompensatedSum
{
public:
    void add(double x)
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            carry_ += (sum_ - t) + x;
        else
            carry_ += (x - t) + sum_;
        sum_ = t;
        ++count_;
    }

    double sum() const { return sum_ + carry_; }
    std::size_t count() const { return count_; }
    double mean() const { return count_ ? sum() / static_cast<double>(count_) : 0.0; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
    std::size_t count_ = 0;
};

/// Mean and standard error of a sample.
struct SampleSummary
{
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
};

inline SampleSummary summarize(const std::vector<double> &xs)
{
    SampleSummary s;
    s.count = xs.size();
    if (xs.empty())
        return s;
    CompensatedSum sum;
    for (double x : xs)
        sum.add(x);
    s.mean = sum.mean();
    if (xs.size() > 1)
    {
        CompensatedSum sq;
        for (double x : xs)
            sq.add((x - s.mean) * (x - s.mean));
        const double var = sq.sum() / static_cast<double>(xs.size() - 1);
        s.std_error = std::sqrt(var / static_cast<double>(xs.size()));
    }
    return s;
}

/// Number of worker threads used by trial loops; 0 means hardware concurrency.
inline unsigned &default_threads()
{
    static unsigned threads = 0;
    return threads;
}

/// Runs `trial(i)` for i in [0, count) and returns results in index order.
/// Results never depend on the thread count: each trial derives its own seed.
template <class Fn>
auto run_trials(std::size_t count, Fn trial, unsigned threads = 0)
    -> std::vector<decltype(trial(std::size_t{}))>
{
    using Result = decltype(trial(std::size_t{}));
    std::vector<Result> results(count);
    if (threads == 0)
        threads = default_threads();
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));

    if (threads <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
            results[i] = trial(i);
        return results;
    }

    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w)
    {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += threads)
            {
                try
                {
                    results[i] = trial(i);
                }
                catch (...)
                {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto &t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
    return results;
}

} // namespace quantid
