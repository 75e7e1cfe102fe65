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
#include "risfault/estimators.hpp"
#include "risfault/evaluation.hpp"
#include "risfault/rng.hpp"

using namespace risfault;

namespace
{

cmat random_matrix(Rng &rng, Eigen::Index rows, Eigen::Index cols)
{
    cmat a(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            a(i, j) = rng.complex_normal(1.0);
    return a;
}

BsSignal planted(const cmat &a, const PhaseProfile &w, const FaultStatusVector &b)
{
    return {a * effective_profile(w, b).values()};
}

LocalizationSample fp_sample(std::initializer_list<std::complex<double>> bs, std::initializer_list<std::complex<double>> ris, Position3D p)
{
    LocalizationSample s;
    s.bs_signal.samples = Eigen::Map<const cvec>(bs.begin(), static_cast<Eigen::Index>(bs.size()));
    s.ris_signal_complete.samples = Eigen::Map<const cvec>(ris.begin(), static_cast<Eigen::Index>(ris.size()));
    s.element_statuses = FaultStatusVector::all_healthy(ris.size());
    s.mu_position = p;
    return s;
}

} // namespace

TEST_CASE("exhaustive search recovers a planted mask")
{
    Rng rng(1);
    const cmat a = random_matrix(rng, 4, 4);
    const auto w = PhaseProfile::unity(4);
    const FaultStatusVector truth{1, 0, 1, 1};
    const auto r = detect_faults_exhaustive(planted(a, w, truth), a, w);
    CHECK(r.estimated_statuses == truth);
    CHECK(r.residual_norm < 1e-12);
    CHECK_FALSE(r.ambiguous);
}

TEST_CASE("a zero signal maps to the all-off mask")
{
    Rng rng(2);
    const cmat a = random_matrix(rng, 5, 5);
    const auto r = detect_faults_exhaustive(BsSignal{cvec::Zero(5)}, a, PhaseProfile::unity(5));
    CHECK(r.estimated_statuses == FaultStatusVector{0, 0, 0, 0, 0});
}

TEST_CASE("single element picks the nearer candidate")
{
    cmat a(3, 1);
    a << std::complex<double>(1, 2), std::complex<double>(-1, 0), std::complex<double>(0, 3);
    const auto w = PhaseProfile::unity(1);
    CHECK(detect_faults_exhaustive(BsSignal{a.col(0)}, a, w).estimated_statuses == FaultStatusVector{1});
    CHECK(detect_faults_exhaustive(BsSignal{cvec::Zero(3)}, a, w).estimated_statuses == FaultStatusVector{0});
    CHECK(detect_faults_exhaustive(BsSignal{cvec(0.4 * a.col(0))}, a, w).estimated_statuses == FaultStatusVector{0});
    CHECK(detect_faults_exhaustive(BsSignal{cvec(0.6 * a.col(0))}, a, w).estimated_statuses == FaultStatusVector{1});
}

TEST_CASE("exhaustive minimum agrees with re-enumeration on noisy input")
{
    Rng rng(3);
    for (int t = 0; t < 20; ++t)
    {
        const cmat a = random_matrix(rng, 6, 8);
        cvec wv(8);
        for (Eigen::Index i = 0; i < 8; ++i)
            wv[i] = std::polar(1.0, 6.283 * rng.uniform());
        const PhaseProfile w(wv);
        cvec y = a * wv;
        for (Eigen::Index i = 0; i < 6; ++i)
            y[i] += rng.complex_normal(0.5);
        const auto r = detect_faults_exhaustive(BsSignal{y}, a, w);
        CHECK(r.residual_norm == doctest::Approx(oracle::best_residual(y, a, wv)).epsilon(1e-12));
    }
}

TEST_CASE("ties go to fewer faults, then to the smaller status vector")
{
    Rng rng(4);
    cmat a = random_matrix(rng, 4, 3);
    a.col(1) = a.col(0);
    const auto w = PhaseProfile::unity(3);
    // y = c0 + c2 is reproduced by masks 101 and 011, each with one fault
    const auto r = detect_faults_exhaustive(BsSignal{cvec(a.col(0) + a.col(2))}, a, w);
    CHECK(r.estimated_statuses == FaultStatusVector{0, 1, 1});
    CHECK(r.ambiguous);
}

TEST_CASE("exhaustive search refuses large panels")
{
    Rng rng(5);
    const cmat a = random_matrix(rng, 4, 23);
    CHECK_THROWS_AS(detect_faults_exhaustive(BsSignal{cvec::Zero(4)}, a, PhaseProfile::unity(23)), SizeLimitError);
    CHECK_THROWS_AS(detect_faults_exhaustive(BsSignal{cvec::Zero(3)}, random_matrix(rng, 4, 3), PhaseProfile::unity(3)),
                    DimensionError);
}

TEST_CASE("greedy stops immediately without faults")
{
    Rng rng(6);
    const cmat a = random_matrix(rng, 8, 6);
    const auto w = PhaseProfile::unity(6);
    const BsSignal y = planted(a, w, FaultStatusVector::all_healthy(6));
    const auto r = detect_faults_greedy(y, a, w, 2, greedy_tolerance(y, INFINITY));
    CHECK(r.estimated_statuses == FaultStatusVector::all_healthy(6));
    CHECK(r.converged);
    CHECK_THROWS_AS(detect_faults_greedy(y, a, w, 7, 0.0), InvalidInputError);
}

TEST_CASE("greedy matches the exhaustive oracle on noiseless channel instances")
{
    auto cfg = SweepConfig::desk(10, 16);
    cfg.max_faulty = 2;
    int agree = 0;
    for (std::uint64_t t = 0; t < 100; ++t)
    {
        const auto trial = make_detection_trial(cfg, 2024, t);
        const BsSignal y{trial.y_noiseless};
        const auto g = detect_faults_greedy(y, trial.a, trial.phases, 2, greedy_tolerance(y, INFINITY));
        const auto e = detect_faults_exhaustive(y, trial.a, trial.phases);
        agree += g.estimated_statuses == e.estimated_statuses;
        CHECK(e.estimated_statuses == trial.truth);
    }
    CHECK(agree == 100);
}

TEST_CASE("greedy stays close to the oracle at 30 dB")
{
    auto cfg = SweepConfig::desk(16, 16);
    cfg.max_faulty = 2;
    const std::vector<double> snr{30.0};
    const auto g = snr_sweep(cfg, snr, greedy_solver(), 200, 99, 1);
    const auto e = snr_sweep(cfg, snr, exhaustive_solver(), 200, 99, 1);
    MESSAGE("greedy " << g[0].report.scenario_accuracy << ", exhaustive " << e[0].report.scenario_accuracy);
    CHECK(std::abs(g[0].report.scenario_accuracy - e[0].report.scenario_accuracy) <= 0.05);
}

TEST_CASE("tolerance tracks the noise norm")
{
    const BsSignal y{cvec::Constant(16, {1.0, 0.0})};
    CHECK(greedy_tolerance(y, INFINITY) == doctest::Approx(4e-9));
    // |y| = 4; at 0 dB half of the power is noise
    CHECK(greedy_tolerance(y, 0.0, 1.0) == doctest::Approx(4.0 * std::sqrt(0.5)));
    CHECK(greedy_tolerance(y, 20.0, 2.0) == doctest::Approx(2.0 * 4.0 * std::sqrt(0.01 / 1.01)));
}

TEST_CASE("least-squares reconstruction is exact on active elements")
{
    const auto ris = UpaGeometry::half_wavelength(3, 3, 90e9);
    const auto bs = UpaGeometry::half_wavelength(4, 4, 90e9);
    for (std::uint64_t seed = 0; seed < 100; ++seed)
    {
        Rng rng(seed);
        const cvec g = mu_ris_channel(sample_path_set(rng, 10, std::nullopt, 1.0), ris);
        const cmat h = ris_bs_channel(sample_path_set(rng, 10, std::nullopt, 1.0, true), bs, ris);
        cvec wv(9);
        for (Eigen::Index i = 0; i < 9; ++i)
            wv[i] = std::polar(1.0, 6.283 * rng.uniform());
        const PhaseProfile w(wv);
        const auto b = sample_fault_scenario(rng, 9, 8);
        const BsSignal y{h * effective_profile(w, b).values().cwiseProduct(g)};
        const RisSignal v = reconstruct_ris_ls(y, h, w, b, 0.0);
        for (Eigen::Index n = 0; n < 9; ++n)
        {
            if (b[static_cast<std::size_t>(n)])
                CHECK(std::abs(v.samples[n] - g[n]) <= 1e-8 * std::max(1.0, std::abs(g[n])));
            else
                CHECK(v.samples[n] == std::complex<double>(0.0, 0.0));
        }
    }
}

TEST_CASE("reconstruction edge cases")
{
    Rng rng(7);
    const cmat h = random_matrix(rng, 4, 3);
    const auto w = PhaseProfile::unity(3);
    CHECK_THROWS_AS(reconstruct_ris_ls(BsSignal{cvec::Zero(4)}, h, w, FaultStatusVector{0, 0, 0}, 0.0), NoActiveElementsError);
    CHECK_THROWS_AS(reconstruct_ris_ls(BsSignal{cvec::Zero(4)}, h, w, FaultStatusVector{1, 1, 1}, -1.0), InvalidInputError);

    // ridge shrinks the solution towards zero
    const cvec truth = cvec::Ones(3);
    const BsSignal y{h * truth};
    const auto exact = reconstruct_ris_ls(y, h, w, FaultStatusVector{1, 1, 1}, 0.0);
    const auto ridged = reconstruct_ris_ls(y, h, w, FaultStatusVector{1, 1, 1}, 10.0);
    CHECK((exact.samples - truth).norm() < 1e-10);
    CHECK(ridged.samples.norm() < exact.samples.norm());
}

TEST_CASE("fingerprint database lookup")
{
    const std::vector<LocalizationSample> db_samples{
        fp_sample({{1, 0}}, {{0, 0}, {1, 0}}, Position3D(0, 1, 0)),
        fp_sample({{2, 0}}, {{0, 1}, {1, 0}}, Position3D(2, 1, 0)),
        fp_sample({{4, 0}}, {{5, 0}, {0, 0}}, Position3D(4, 3, 1)),
    };
    const auto db = build_fingerprint_db(db_samples, FingerprintKind::ris);
    CHECK(db.size() == 3);
    CHECK(db.fingerprint_length() == 2);

    // exact match returns the stored position
    CHECK(fingerprint_localize_nn(db, db_samples[1].ris_signal_complete.samples, 1).estimate == Position3D(2, 1, 0));

    // k = size gives the mean position
    const auto mean = fingerprint_localize_nn(db, db_samples[0].ris_signal_complete.samples, 3).estimate;
    CHECK(mean.x == doctest::Approx(2.0));
    CHECK(mean.y == doctest::Approx(5.0 / 3.0));
    CHECK(mean.z == doctest::Approx(1.0 / 3.0));

    // equidistant from entries 0 and 1: lower index wins
    cvec q(2);
    q << std::complex<double>(0, 0.5), std::complex<double>(1, 0);
    CHECK(nearest_entries(db, q, 1) == std::vector<std::size_t>{0});
    CHECK(nearest_entries(db, q, 2) == std::vector<std::size_t>{0, 1});

    CHECK_THROWS_AS(nearest_entries(db, q, 0), InvalidInputError);
    CHECK_THROWS_AS(nearest_entries(db, q, 4), InvalidInputError);
    CHECK_THROWS_AS(nearest_entries(db, cvec::Zero(3), 1), DimensionError);
    CHECK_THROWS_AS(build_fingerprint_db(std::vector<LocalizationSample>{}, FingerprintKind::bs), InvalidInputError);

    auto mixed = db_samples;
    mixed.push_back(fp_sample({{1, 0}}, {{1, 0}}, Position3D(0, 0, 0)));
    CHECK_THROWS_AS(build_fingerprint_db(mixed, FingerprintKind::ris), DimensionError);

    const auto bs_db = build_fingerprint_db(db_samples, FingerprintKind::bs);
    cvec qb(1);
    qb << std::complex<double>(3.2, 0.0);
    CHECK(fingerprint_localize_nn(bs_db, qb, 1).estimate == Position3D(4, 3, 1));
}

TEST_CASE("nmse definition and invariances")
{
    const std::vector<Position3D> truth{{0, 0, 0}, {2, 0, 0}, {0, 2, 0}, {2, 2, 1}};
    CHECK(nmse(truth, truth) == 0.0);

    std::vector<Position3D> est = truth;
    est[0] = Position3D(1, 0, 0);
    // error 1; spread around the mean (1, 1, 0.25): 4 * 2 + 0.75
    CHECK(nmse(est, truth) == doctest::Approx(1.0 / 8.75));

    auto shift = [](std::vector<Position3D> v) {
        for (auto &p : v)
            p = Position3D(p.x + 100, p.y - 7, p.z + 3);
        return v;
    };
    CHECK(nmse(shift(est), shift(truth)) == doctest::Approx(nmse(est, truth)).epsilon(1e-12));

    const std::vector<Position3D> same_spot(3, Position3D(1, 1, 1));
    CHECK_THROWS_AS(nmse(same_spot, same_spot), DegenerateNormalizationError);
    CHECK_THROWS_AS(nmse(std::vector<Position3D>(2), truth), DimensionError);
}
