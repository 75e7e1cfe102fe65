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

#include <set>

#include "doctest.h"

#include "risfault/channelgeom.hpp"
#include "risfault/error.hpp"
#include "risfault/fault.hpp"
#include "risfault/rng.hpp"

using namespace risfault;

TEST_CASE("status vectors hold only 0 and 1")
{
    CHECK_THROWS_AS(FaultStatusVector({1, 2, 0}), InvalidInputError);
    const FaultStatusVector b{1, 0, 1, 0};
    CHECK(b.fault_count() == 2);
    CHECK(b.with(1, 1).fault_count() == 1);
    CHECK_THROWS_AS(b.with(4, 0), IndexError);
}

TEST_CASE("phase profiles are unit modulus")
{
    cvec w(2);
    w << std::polar(1.0, 0.3), std::complex<double>(0.5, 0.0);
    CHECK_THROWS_AS(PhaseProfile{w}, InvalidInputError);
    CHECK(PhaseProfile::unity(5).values() == cvec::Ones(5));
}

TEST_CASE("effective profile is zero exactly at faulty elements")
{
    Rng rng(8);
    cvec w(12);
    for (Eigen::Index i = 0; i < 12; ++i)
        w[i] = std::polar(1.0, 6.28 * rng.uniform());
    const PhaseProfile phases(w);
    for (int t = 0; t < 200; ++t)
    {
        const auto b = sample_fault_scenario(rng, 12, 6);
        const auto v = effective_profile(phases, b).values();
        for (std::size_t i = 0; i < 12; ++i)
        {
            const auto e = static_cast<Eigen::Index>(i);
            if (b[i] == 0)
                CHECK(v[e] == std::complex<double>(0.0, 0.0));
            else
                CHECK(v[e] == w[e]);
        }
    }
    CHECK_THROWS_AS(effective_profile(phases, FaultStatusVector::all_healthy(11)), DimensionError);
}

TEST_CASE("threshold classification")
{
    const FaultModelParams p;
    CHECK(classify_element(0.0, p) == 0);
    CHECK(classify_element(1e-12, p) == 0);
    CHECK(classify_element(1.0000001e-12, p) == 1);
    CHECK(classify_element(1e-9, p) == 1);
    CHECK_THROWS_AS(classify_element(-1.0, p), InvalidInputError);

    cvec y(3);
    y << std::complex<double>(1e-3, 0.0), 0.0, std::complex<double>(0.0, 1e-7);
    // powers 1e-6, 0, 1e-14
    CHECK(classify_elements(y, p) == FaultStatusVector{1, 0, 0});

    FaultModelParams bad;
    bad.strength_threshold = 1e-11;
    CHECK_THROWS_AS(bad.validate(), InvalidInputError);
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("9x9 panel splits into nine 3x3 tiles")
{
    const auto part = sa_partition(UpaGeometry::half_wavelength(9, 9, 90e9), 9);
    CHECK(part.k_count() == 9);
    CHECK(part.sa_size() == 9);
    for (std::size_t m = 0; m < 9; ++m)
        for (std::size_t n = 0; n < 9; ++n)
            CHECK(part.sa_of(m * 9 + n) == (m / 3) * 3 + n / 3);
    const std::vector<std::size_t> centre{30, 31, 32, 39, 40, 41, 48, 49, 50};
    CHECK(part.elements_of(4) == centre);
}

TEST_CASE("other partitions")
{
    const auto p6 = sa_partition(UpaGeometry::half_wavelength(6, 6, 90e9), 4);
    for (std::size_t m = 0; m < 6; ++m)
        for (std::size_t n = 0; n < 6; ++n)
            CHECK(p6.sa_of(m * 6 + n) == (m / 3) * 2 + n / 3);

    // no tile grid for a 1x6 panel with K = 3 except 1x3 column blocks
    const auto p = sa_partition(UpaGeometry::half_wavelength(1, 6, 90e9), 3);
    CHECK(p.elements_of(1) == std::vector<std::size_t>{2, 3});

    CHECK_THROWS_AS(sa_partition(UpaGeometry::half_wavelength(1, 7, 90e9), 3), PartitionError);
    CHECK_THROWS_AS(sa_partition(UpaGeometry::half_wavelength(3, 3, 90e9), 0), PartitionError);
    CHECK_THROWS_AS(sa_partition(UpaGeometry::half_wavelength(3, 3, 90e9), 10), PartitionError);
    CHECK_THROWS_AS(SaPartition(2, {0, 0, 1}), PartitionError);
}

TEST_CASE("sub-array status is the AND of its members under random flips")
{
    const auto part = sa_partition(UpaGeometry::half_wavelength(9, 9, 90e9), 9);
    Rng rng(21);
    auto b = FaultStatusVector::all_healthy(81);
    int violations = 0;
    for (int flip = 0; flip < 10000; ++flip)
    {
        const auto before = sa_statuses(b, part);
        const auto i = static_cast<std::size_t>(rng.uniform_index(81));
        const std::uint8_t v = b[i] == 0 ? 1 : 0;
        b = b.with(i, v);
        const auto after = sa_statuses(b, part);
        for (std::size_t k = 0; k < 9; ++k)
        {
            std::uint8_t all = 1;
            for (auto e : part.elements_of(k))
                all &= b[e];
            violations += after[k] != all;
            // only the flipped element's sub-array may change, and only in the
            // direction of the flip
            if (k != part.sa_of(i))
                violations += after[k] != before[k];
            else if (v == 0)
                violations += after[k] > before[k];
            else
                violations += after[k] < before[k];
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("fault scenario sampling")
{
    Rng rng(5);
    std::vector<int> counts(16, 0);
    for (int t = 0; t < 16000; ++t)
    {
        const auto b = sample_fault_scenario(rng, 81, 15);
        REQUIRE(b.size() == 81);
        REQUIRE(b.fault_count() <= 15);
        ++counts[b.fault_count()];
    }
    for (int c : counts)
        CHECK(c == doctest::Approx(1000).epsilon(0.15));

    Rng a(77), c(77);
    CHECK(sample_fault_scenario(a, 81, 15) == sample_fault_scenario(c, 81, 15));
    CHECK_THROWS_AS(sample_fault_scenario(a, 4, 5), InvalidInputError);
}

TEST_CASE("isolation mask keeps only the target sub-array")
{
    const auto part = sa_partition(UpaGeometry::half_wavelength(6, 6, 90e9), 4);
    Rng rng(3);
    const auto b = sample_fault_scenario(rng, 36, 10);
    const auto m = sa_isolation_mask(part, 2, b);
    for (std::size_t i = 0; i < 36; ++i)
        CHECK(m[i] == (part.sa_of(i) == 2 ? b[i] : 0));
    CHECK_THROWS_AS(sa_isolation_mask(part, 4, b), IndexError);
}
