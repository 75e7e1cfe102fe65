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

#pragma once

#include <complex>
#include <optional>

#include "risfault/channelgeom.hpp"
#include "risfault/fault.hpp"
#include "risfault/rng.hpp"

namespace risfault
{

/// Pilot symbol transmitted by the MU; must be non-zero.
class Pilot
{
  public:
    Pilot() = default;
    explicit Pilot(std::complex<double> symbol); // throws InvalidInputError for |s| = 0

    std::complex<double> symbol() const noexcept { return s_; }

  private:
    std::complex<double> s_{1.0, 0.0};
};

struct RisSignal
{
    cvec samples; ///< y_r, length N
};

struct BsSignal
{
    cvec samples; ///< y, length M
};

/// Noise level as SNR in dB: per-receive-antenna average power of the
/// noiseless signal over the noise variance. +inf is accepted and capped at
/// kMaxSnrDb.
class NoiseSpec
{
  public:
    static constexpr double kMaxSnrDb = 300.0;

    explicit NoiseSpec(double snr_db); // throws InvalidInputError for NaN / -inf

    double snr_db() const noexcept { return snr_db_; }

  private:
    double snr_db_;
};

struct NoiseDraw
{
    NoiseSpec spec;
    Rng *rng;
};

/// y_r = g_ur s, the complete (fault-independent) RIS signal.
RisSignal ris_received(const cvec &g_ur, const Pilot &pilot);

/// y_r (Hadamard) B: what the RIS elements physically capture.
RisSignal incomplete_ris_signal(const RisSignal &complete, const FaultStatusVector &statuses);

/// y = H_rb diag(varpi) g_ur s + n. Without `noise`, n = 0.
BsSignal bs_received(const cmat &h_rb,
                     const EffectiveProfile &profile,
                     const cvec &g_ur,
                     const Pilot &pilot,
                     const std::optional<NoiseDraw> &noise = std::nullopt);

/// A = H_rb diag(g_ur) s, so that the noiseless BS signal equals A varpi.
cmat effective_bs_matrix(const cmat &h_rb, const cvec &g_ur, const Pilot &pilot);

/// Per-entry noise variance (|signal|^2 / length) 10^(-snr/10).
double noise_variance(const cvec &signal, const NoiseSpec &spec);

/// Adds i.i.d. CN(0, noise_variance) noise. Throws DegenerateSnrError for an
/// all-zero signal.
cvec add_awgn(const cvec &signal, const NoiseSpec &spec, Rng &rng);

/// As add_awgn, with the noise variance taken from `reference` whenever
/// `signal` is all zero (a fully switched-off panel).
cvec add_awgn_or_reference(const cvec &signal, const cvec &reference, const NoiseSpec &spec, Rng &rng);

} // namespace risfault
