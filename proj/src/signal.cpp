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

#include "risfault/signal.hpp"

#include <cmath>
#include <limits>

#include "risfault/error.hpp"

namespace risfault
{

Pilot::Pilot(std::complex<double> symbol) : s_(symbol)
{
    if (!(std::abs(symbol) > 0.0) || !std::isfinite(std::abs(symbol)))
        throw InvalidInputError("Pilot: symbol must be finite and non-zero");
}

NoiseSpec::NoiseSpec(double snr_db) : snr_db_(snr_db)
{
    if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity())
        throw InvalidInputError("NoiseSpec: SNR must be a number above -inf");
    if (snr_db_ > kMaxSnrDb)
        snr_db_ = kMaxSnrDb;
}

RisSignal ris_received(const cvec &g_ur, const Pilot &pilot)
{
    return {g_ur * pilot.symbol()};
}

RisSignal incomplete_ris_signal(const RisSignal &complete, const FaultStatusVector &statuses)
{
    if (static_cast<std::size_t>(complete.samples.size()) != statuses.size())
        throw DimensionError("incomplete_ris_signal: length mismatch");
    cvec y = complete.samples;
    for (std::size_t i = 0; i < statuses.size(); ++i)
        if (statuses[i] == 0)
            y[static_cast<Eigen::Index>(i)] = 0.0;
    return {std::move(y)};
}

BsSignal bs_received(const cmat &h_rb,
                     const EffectiveProfile &profile,
                     const cvec &g_ur,
                     const Pilot &pilot,
                     const std::optional<NoiseDraw> &noise)
{
    const auto n = static_cast<Eigen::Index>(profile.size());
    if (h_rb.cols() != n || g_ur.size() != n)
        throw DimensionError("bs_received: H_rb, profile and g_ur disagree on N");
    cvec y = h_rb * (profile.values().cwiseProduct(g_ur) * pilot.symbol());
    if (noise)
        y = add_awgn(y, noise->spec, *noise->rng);
    return {std::move(y)};
}

cmat effective_bs_matrix(const cmat &h_rb, const cvec &g_ur, const Pilot &pilot)
{
    if (h_rb.cols() != g_ur.size())
        throw DimensionError("effective_bs_matrix: H_rb columns and g_ur length differ");
    return h_rb * (g_ur * pilot.symbol()).asDiagonal();
}

double noise_variance(const cvec &signal, const NoiseSpec &spec)
{
    if (signal.size() == 0)
        throw InvalidInputError("noise_variance: empty signal");
    const double power = signal.squaredNorm() / static_cast<double>(signal.size());
    if (!(power > 0.0))
        throw DegenerateSnrError("noise_variance: SNR is undefined for an all-zero signal");
    return power * std::pow(10.0, -spec.snr_db() / 10.0);
}

namespace
{

cvec add_noise(const cvec &signal, double var, Rng &rng)
{
    cvec out = signal;
    for (Eigen::Index i = 0; i < out.size(); ++i)
        out[i] += rng.complex_normal(var);
    return out;
}

} // namespace

cvec add_awgn(const cvec &signal, const NoiseSpec &spec, Rng &rng)
{
    return add_noise(signal, noise_variance(signal, spec), rng);
}

cvec add_awgn_or_reference(const cvec &signal, const cvec &reference, const NoiseSpec &spec, Rng &rng)
{
    if (reference.size() != signal.size())
        throw DimensionError("add_awgn_or_reference: reference length differs");
    const cvec &basis = signal.squaredNorm() > 0.0 ? signal : reference;
    return add_noise(signal, noise_variance(basis, spec), rng);
}

} // namespace risfault
