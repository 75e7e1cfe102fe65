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

#include "risfault/fault.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace risfault
{

namespace
{

constexpr double kUnitTolerance = 1e-9;

bool is_unit(const std::complex<double> &z)
{
    return std::abs(std::abs(z) - 1.0) <= kUnitTolerance;
}

} // namespace

PhaseProfile::PhaseProfile(cvec phases) : w_(std::move(phases))
{
    for (Eigen::Index i = 0; i < w_.size(); ++i)
        if (!is_unit(w_[i]))
            throw InvalidInputError("PhaseProfile: entry " + std::to_string(i) + " is not unit modulus");
}

PhaseProfile PhaseProfile::unity(std::size_t n)
{
    return PhaseProfile(cvec::Ones(static_cast<Eigen::Index>(n)));
}

EffectiveProfile::EffectiveProfile(cvec values) : v_(std::move(values))
{
    for (Eigen::Index i = 0; i < v_.size(); ++i)
        if (v_[i] != std::complex<double>(0.0) && !is_unit(v_[i]))
            throw InvalidInputError("EffectiveProfile: entry " + std::to_string(i) + " is neither zero nor unit modulus");
}

void FaultModelParams::validate() const
{
    if (!(strength_threshold > 0.0) || !std::isfinite(min_receive_power) || !(strength_threshold * 1e3 <= min_receive_power))
        throw InvalidInputError("FaultModelParams: need 0 < threshold <= 1e-3 * min_receive_power");
}

SaPartition::SaPartition(std::size_t k_count, std::vector<std::size_t> element_to_sa)
    : k_count_(k_count), sa_size_(0), element_to_sa_(std::move(element_to_sa)), members_(k_count)
{
    if (k_count == 0 || element_to_sa_.empty())
        throw PartitionError("SaPartition: empty partition");
    for (std::size_t e = 0; e < element_to_sa_.size(); ++e)
    {
        if (element_to_sa_[e] >= k_count)
            throw PartitionError("SaPartition: element " + std::to_string(e) + " maps outside [0, K)");
        members_[element_to_sa_[e]].push_back(e);
    }
    sa_size_ = members_.front().size();
    for (const auto &m : members_)
        if (m.size() != sa_size_ || m.empty())
            throw PartitionError("SaPartition: sub-arrays must be non-empty and equally sized");
}

const std::vector<std::size_t> &SaPartition::elements_of(std::size_t k) const
{
    if (k >= k_count_)
        throw IndexError("SaPartition: sub-array index out of range");
    return members_[k];
}

std::uint8_t classify_element(double strength, const FaultModelParams &params)
{
    if (!(strength >= 0.0))
        throw InvalidInputError("classify_element: strength must be non-negative");
    return strength <= params.strength_threshold ? 0 : 1;
}

FaultStatusVector classify_elements(const cvec &ris_signal, const FaultModelParams &params)
{
    std::vector<std::uint8_t> s(static_cast<std::size_t>(ris_signal.size()));
    for (Eigen::Index i = 0; i < ris_signal.size(); ++i)
        s[static_cast<std::size_t>(i)] = classify_element(std::norm(ris_signal[i]), params);
    return FaultStatusVector(std::move(s));
}

EffectiveProfile effective_profile(const PhaseProfile &phases, const FaultStatusVector &statuses)
{
    if (phases.size() != statuses.size())
        throw DimensionError("effective_profile: phase and status lengths differ");
    cvec v = phases.values();
    for (std::size_t i = 0; i < statuses.size(); ++i)
        if (statuses[i] == 0)
            v[static_cast<Eigen::Index>(i)] = 0.0;
    return EffectiveProfile(std::move(v));
}

FaultStatusVector sample_fault_scenario(Rng &rng, std::size_t n_elements, std::size_t max_faulty)
{
    if (max_faulty > n_elements)
        throw InvalidInputError("sample_fault_scenario: max_faulty exceeds element count");
    const std::size_t faults = static_cast<std::size_t>(rng.uniform_index(max_faulty + 1));

    // Partial Fisher-Yates: the first `faults` slots form a uniform subset.
    std::vector<std::size_t> order(n_elements);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<std::uint8_t> s(n_elements, 1);
    for (std::size_t i = 0; i < faults; ++i)
    {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(n_elements - i));
        std::swap(order[i], order[j]);
        s[order[i]] = 0;
    }
    return FaultStatusVector(std::move(s));
}

SaPartition sa_partition(const UpaGeometry &ris_geom, std::size_t k_count)
{
    const std::size_t rows = ris_geom.n_elev();
    const std::size_t cols = ris_geom.n_azim();
    const std::size_t n = ris_geom.size();
    if (k_count == 0 || k_count > n)
        throw PartitionError("sa_partition: K must lie in [1, N]");

    std::size_t best_kr = 0;
    std::size_t best_skew = std::numeric_limits<std::size_t>::max();
    for (std::size_t kr = 1; kr <= k_count; ++kr)
    {
        if (k_count % kr != 0)
            continue;
        const std::size_t kc = k_count / kr;
        if (rows % kr != 0 || cols % kc != 0)
            continue;
        const std::size_t tr = rows / kr;
        const std::size_t tc = cols / kc;
        const std::size_t skew = tr > tc ? tr - tc : tc - tr;
        if (skew < best_skew)
        {
            best_skew = skew;
            best_kr = kr;
        }
    }

    std::vector<std::size_t> map(n);
    if (best_kr != 0)
    {
        const std::size_t kc = k_count / best_kr;
        const std::size_t tr = rows / best_kr;
        const std::size_t tc = cols / kc;
        for (std::size_t m = 0; m < rows; ++m)
            for (std::size_t c = 0; c < cols; ++c)
                map[m * cols + c] = (m / tr) * kc + c / tc;
    }
    else if (n % k_count == 0)
    {
        const std::size_t chunk = n / k_count;
        for (std::size_t e = 0; e < n; ++e)
            map[e] = e / chunk;
    }
    else
    {
        throw PartitionError("sa_partition: K = " + std::to_string(k_count) + " does not divide N = " + std::to_string(n));
    }
    return SaPartition(k_count, std::move(map));
}

SaStatusVector sa_statuses(const FaultStatusVector &statuses, const SaPartition &partition)
{
    if (statuses.size() != partition.element_count())
        throw DimensionError("sa_statuses: status length does not match partition");
    std::vector<std::uint8_t> c(partition.k_count(), 1);
    for (std::size_t e = 0; e < statuses.size(); ++e)
        if (statuses[e] == 0)
            c[partition.sa_of(e)] = 0;
    return SaStatusVector(std::move(c));
}

FaultStatusVector sa_isolation_mask(const SaPartition &partition, std::size_t target_sa, const FaultStatusVector &statuses)
{
    if (target_sa >= partition.k_count())
        throw IndexError("sa_isolation_mask: target sub-array out of range");
    if (statuses.size() != partition.element_count())
        throw DimensionError("sa_isolation_mask: status length does not match partition");
    std::vector<std::uint8_t> s(statuses.size(), 0);
    for (auto e : partition.elements_of(target_sa))
        s[e] = statuses[e];
    return FaultStatusVector(std::move(s));
}

} // namespace risfault
