// SPDX-License-Identifier: Apache-2.0
//
// risfaultsim: RIS-aided uplink localization testbed with faulty elements
// Copyright (C) 2026 The risfaultsim Authors
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

#include <atomic>
#include <cstdlib>
#include <set>
#include <stdexcept>

#include "doctest.h"

#include "risfault/parallel.hpp"
#include "risfault/rng.hpp"

using namespace risfault;

TEST_CASE("engine output is the standard mt19937_64 sequence")
{
    // The standard fixes the 10000th output of a default-seeded mt19937_64.
    Rng rng(5489u);
    std::uint64_t v = 0;
    for (int i = 0; i < 10000; ++i)
        v = rng.next_u64();
    CHECK(v == 9981545732273789042ULL);
}

TEST_CASE("derived seeds separate indices and domains")
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t domain = 0; domain < 4; ++domain)
        for (std::uint64_t i = 0; i < 1000; ++i)
            seen.insert(derive_seed(42, i, domain));
    CHECK(seen.size() == 4000);
    CHECK(derive_seed(42, 7, 1) == derive_seed(42, 7, 1));
    CHECK(derive_seed(42, 7) != derive_seed(43, 7));
}

TEST_CASE("uniform draws stay in range and are reproducible")
{
    Rng a(9), b(9);
    for (int i = 0; i < 10000; ++i)
    {
        const double u = a.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(u == b.uniform());
    }
}

TEST_CASE("uniform_index covers every value about equally")
{
    Rng rng(3);
    std::vector<int> counts(7, 0);
    const int n = 70000;
    for (int i = 0; i < n; ++i)
        ++counts[rng.uniform_index(7)];
    // chi-square with 6 degrees of freedom; 22.46 is the 0.999 quantile
    double chi2 = 0.0;
    for (int c : counts)
        chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
    CHECK(chi2 < 22.46);
}

TEST_CASE("normal and complex normal moments")
{
    Rng rng(11);
    const int n = 200000;
    double s = 0.0, s2 = 0.0, c2 = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const double x = rng.normal();
        s += x;
        s2 += x * x;
        c2 += std::norm(rng.complex_normal(2.5));
    }
    // standard errors: mean 1/sqrt(n) ~ 0.0022, variance sqrt(2/n) ~ 0.0032
    CHECK(std::abs(s / n) < 0.012);
    CHECK(std::abs(s2 / n - 1.0) < 0.016);
    CHECK(std::abs(c2 / n - 2.5) < 0.04);
}

TEST_CASE("thread count resolution")
{
    CHECK(resolve_thread_count(3u) == 3u);
    ::setenv("RISFAULTSIM_THREADS", "5", 1);
    CHECK(resolve_thread_count() == 5u);
    ::unsetenv("RISFAULTSIM_THREADS");
    CHECK(resolve_thread_count() >= 1u);
}

TEST_CASE("parallel_for visits each index once and forwards exceptions")
{
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
    for (auto &h : hits)
        CHECK(h.load() == 1);

    CHECK_THROWS_AS(parallel_for(100, 4,
                                 [](std::size_t i) {
                                     if (i == 57)
                                         throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}
