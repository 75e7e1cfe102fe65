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

#include <cmath>

#include "doctest.h"

#include "oracles.hpp"
#include "risfault/channelgeom.hpp"
#include "risfault/error.hpp"
#include "risfault/rng.hpp"

using namespace risfault;

namespace
{

const UpaGeometry kRis = UpaGeometry::half_wavelength(9, 9, 90e9);
const UpaGeometry kBs = UpaGeometry::half_wavelength(4, 4, 90e9);

} // namespace

TEST_CASE("90 GHz half-wavelength geometry")
{
    const double lambda = 299792458.0 / 90e9;
    CHECK(kRis.wavelength() == doctest::Approx(lambda).epsilon(1e-15));
    CHECK(kRis.spacing() == doctest::Approx(lambda / 2).epsilon(1e-15));
    CHECK(kRis.size() == 81);
    CHECK(kBs.size() == 16);
    CHECK_THROWS_AS(UpaGeometry(0, 4, 1e-3, 2e-3), InvalidGeometryError);
    CHECK_THROWS_AS(UpaGeometry(4, 4, -1e-3, 2e-3), InvalidGeometryError);
    CHECK_THROWS_AS(UpaGeometry(4, 4, 1e-3, 0.0), InvalidGeometryError);
    CHECK_THROWS_AS(UpaGeometry::half_wavelength(2, 2, -1.0), InvalidGeometryError);
}

TEST_CASE("steering vector matches the element-wise phase formula")
{
    Rng rng(1);
    for (int i = 0; i < 200; ++i)
    {
        const double theta = oracle::kPi * (1.0 - rng.uniform());
        const double phi = oracle::kPi * (1.0 - rng.uniform());
        const cvec a = steering_vector(kRis, PathAngles(theta, phi));
        const auto ref = oracle::steering(9, 9, kRis.spacing(), kRis.wavelength(), theta, phi);
        REQUIRE(a.size() == 81);
        CHECK(oracle::max_abs_diff(a, ref) < 1e-12);
    }
}

TEST_CASE("steering vector is the Kronecker product of its factors")
{
    const UpaGeometry g = UpaGeometry::half_wavelength(3, 5, 90e9);
    const double theta = 1.1, phi = 0.4;
    const cvec e = elevation_response(g, theta);
    const cvec z = azimuth_response(g, theta, phi);
    const cvec a = steering_vector(g, PathAngles(theta, phi));
    for (Eigen::Index m = 0; m < 3; ++m)
        for (Eigen::Index n = 0; n < 5; ++n)
            CHECK(std::abs(a[m * 5 + n] - e[m] * z[n]) < 1e-15);
    CHECK(a[0] == std::complex<double>(1.0, 0.0));
    for (Eigen::Index i = 0; i < a.size(); ++i)
        CHECK(std::abs(std::abs(a[i]) - 1.0) < 1e-14);
}

TEST_CASE("broadside arrival gives an all-ones response")
{
    const cvec a = steering_vector(kRis, PathAngles(oracle::kPi / 2, oracle::kPi / 2));
    CHECK(oracle::max_abs_diff(a, cvec::Ones(81)) < 1e-12);
}

TEST_CASE("angle validation")
{
    CHECK_THROWS_AS(PathAngles(0.0, 1.0), InvalidInputError);
    CHECK_THROWS_AS(PathAngles(1.0, 3.2), InvalidInputError);
    CHECK_THROWS_AS(PathAngles(std::nan(""), 1.0), InvalidInputError);
    CHECK_NOTHROW(PathAngles(oracle::kPi, oracle::kPi));
}

TEST_CASE("angles between points")
{
    const Position3D o(0, 0, 0);
    const auto up = angles_between(o, Position3D(0, 0, 2));
    CHECK(up.elevation() == kMinAngle);

    const auto east = angles_between(o, Position3D(3, 0, 0));
    CHECK(east.elevation() == doctest::Approx(oracle::kPi / 2));
    CHECK(east.azimuth() == kMinAngle);

    // -y direction folds onto +pi/2; the response depends only on cos(phi)
    const auto south = angles_between(o, Position3D(0, -1, 0));
    CHECK(south.azimuth() == doctest::Approx(oracle::kPi / 2));

    const Position3D p(1, -2, 0.5);
    const auto ang = angles_between(o, p);
    const double r = std::sqrt(1 + 4 + 0.25);
    CHECK(ang.elevation() == doctest::Approx(std::acos(0.5 / r)).epsilon(1e-14));
    const double phi_signed = std::atan2(-2.0, 1.0);
    const auto ref = oracle::steering(9, 9, kRis.spacing(), kRis.wavelength(), ang.elevation(), phi_signed);
    CHECK(oracle::max_abs_diff(steering_vector(kRis, ang), ref) < 1e-12);

    CHECK_THROWS_AS(angles_between(p, p), DegenerateGeometryError);
    CHECK_THROWS_AS(Position3D(std::nan(""), 0, 0), InvalidInputError);
}

TEST_CASE("path set validation")
{
    CHECK_THROWS_AS(PathSet({}), InvalidPathSetError);
    const PathAngles ang(1.0, 1.0);
    CHECK_THROWS_AS(PathSet({Path{{1.0, 0.0}, ang, ang}, Path{{1.0, 0.0}, ang, std::nullopt}}), InvalidPathSetError);
    CHECK_THROWS_AS(PathSet({Path{{std::nan(""), 0.0}, ang, std::nullopt}}), InvalidPathSetError);
}

TEST_CASE("channels match term-by-term accumulation")
{
    for (std::uint64_t seed = 0; seed < 50; ++seed)
    {
        Rng rng(seed);
        const PathSet mu = sample_path_set(rng, 10, std::nullopt, 1.0);
        const PathSet rb = sample_path_set(rng, 10, std::nullopt, 1.0, true);
        const cvec g = mu_ris_channel(mu, kRis);
        const cmat h = ris_bs_channel(rb, kBs, kRis);

        std::vector<std::complex<double>> g_ref(81, 0.0);
        for (const auto &p : mu.paths())
        {
            const auto a = oracle::steering(9, 9, kRis.spacing(), kRis.wavelength(), p.arrival.elevation(), p.arrival.azimuth());
            for (std::size_t n = 0; n < 81; ++n)
                g_ref[n] += p.gain * a[n];
        }
        CHECK(oracle::max_abs_diff(g, g_ref) < 1e-12);

        double worst = 0.0;
        for (Eigen::Index m = 0; m < 16; ++m)
            for (Eigen::Index n = 0; n < 81; ++n)
            {
                std::complex<double> acc = 0.0;
                for (const auto &p : rb.paths())
                {
                    const auto ab = oracle::steering(4, 4, kBs.spacing(), kBs.wavelength(), p.arrival.elevation(), p.arrival.azimuth());
                    const auto ar = oracle::steering(9, 9, kRis.spacing(), kRis.wavelength(), p.departure->elevation(), p.departure->azimuth());
                    acc += p.gain * ab[static_cast<std::size_t>(m)] * std::conj(ar[static_cast<std::size_t>(n)]);
                }
                worst = std::max(worst, std::abs(h(m, n) - acc));
            }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("channel assembly rejects the wrong kind of path set")
{
    Rng rng(2);
    const PathSet with = sample_path_set(rng, 3, std::nullopt, 1.0, true);
    const PathSet without = sample_path_set(rng, 3, std::nullopt, 1.0, false);
    CHECK_THROWS_AS(mu_ris_channel(with, kRis), InvalidPathSetError);
    CHECK_THROWS_AS(ris_bs_channel(without, kBs, kRis), InvalidPathSetError);
}

TEST_CASE("anchored sampling follows the link geometry")
{
    const Position3D mu(30, 6, 0.5), ris(15, 0, 2), bs(0, 10, 1.5);
    Rng rng(4);
    const PathSet a = sample_path_set(rng, 10, LinkAnchor{mu, ris}, 1.0);
    CHECK(a[0].arrival == angles_between(ris, mu));
    CHECK_FALSE(a.has_departure());

    const PathSet b = sample_path_set(rng, 10, LinkAnchor{ris, bs}, 1.0, true);
    CHECK(b[0].arrival == angles_between(bs, ris));
    CHECK(*b[0].departure == angles_between(ris, bs));

    // geometric path carries ten times the scattered per-path power
    double p0 = 0.0, p1 = 0.0;
    const int draws = 20000;
    for (int i = 0; i < draws; ++i)
    {
        const PathSet s = sample_path_set(rng, 2, LinkAnchor{mu, ris}, 2.0);
        p0 += std::norm(s[0].gain);
        p1 += std::norm(s[1].gain);
    }
    CHECK(p1 / draws == doctest::Approx(4.0).epsilon(0.05));
    CHECK(p0 / p1 == doctest::Approx(10.0).epsilon(0.06));
}

TEST_CASE("panel side test")
{
    const Position3D ris(15, 0, 2);
    CHECK(in_front_of_panel(ris, Position3D(30, 6, 0.5)));
    CHECK_FALSE(in_front_of_panel(ris, Position3D(30, -1, 0.5)));
    CHECK_FALSE(in_front_of_panel(ris, Position3D(30, 0, 0.5)));
}
