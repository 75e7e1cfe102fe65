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

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "risfault/channelgeom.hpp"
#include "risfault/error.hpp"
#include "risfault/rng.hpp"

namespace risfault
{

/// Binary status vector; 1 = healthy, 0 = faulty. The tag keeps element
/// statuses and sub-array statuses apart at compile time.
template <class Tag>
class StatusVector
{
  public:
    StatusVector() = default;

    explicit StatusVector(std::vector<std::uint8_t> statuses) : s_(std::move(statuses))
    {
        for (auto v : s_)
            if (v > 1)
                throw InvalidInputError("status entries must be 0 or 1");
    }

    StatusVector(std::initializer_list<std::uint8_t> statuses) : StatusVector(std::vector<std::uint8_t>(statuses)) {}

    static StatusVector all_healthy(std::size_t n) { return StatusVector(std::vector<std::uint8_t>(n, 1)); }

    std::size_t size() const noexcept { return s_.size(); }
    std::uint8_t operator[](std::size_t i) const { return s_[i]; }
    const std::vector<std::uint8_t> &values() const noexcept { return s_; }

    std::size_t fault_count() const noexcept
    {
        std::size_t c = 0;
        for (auto v : s_)
            c += v == 0;
        return c;
    }

    /// Copy with entry i replaced.
    StatusVector with(std::size_t i, std::uint8_t v) const
    {
        if (i >= s_.size())
            throw IndexError("status index out of range");
        auto s = s_;
        s[i] = v;
        return StatusVector(std::move(s));
    }

    friend bool operator==(const StatusVector &, const StatusVector &) = default;
    friend auto operator<=>(const StatusVector &, const StatusVector &) = default;

  private:
    std::vector<std::uint8_t> s_;
};

struct ElementTag;
struct SubArrayTag;

using FaultStatusVector = StatusVector<ElementTag>;
using SaStatusVector = StatusVector<SubArrayTag>;

/// RIS phase-shift vector; unit-modulus entries.
class PhaseProfile
{
  public:
    explicit PhaseProfile(cvec phases); // throws InvalidInputError
    static PhaseProfile unity(std::size_t n);

    const cvec &values() const noexcept { return w_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(w_.size()); }

  private:
    cvec w_;
};

/// Phase profile after masking; every entry is zero or unit modulus.
class EffectiveProfile
{
  public:
    explicit EffectiveProfile(cvec values); // throws InvalidInputError

    const cvec &values() const noexcept { return v_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(v_.size()); }

  private:
    cvec v_;
};

/// Threshold model for element status.
struct FaultModelParams
{
    double strength_threshold = 1e-12; ///< zeta_r, W
    double min_receive_power = 1e-9;   ///< W; must exceed the threshold by three orders

    void validate() const;
};

/// Partition of the RIS elements into K equally sized sub-arrays.
class SaPartition
{
  public:
    SaPartition(std::size_t k_count, std::vector<std::size_t> element_to_sa); // throws PartitionError

    std::size_t k_count() const noexcept { return k_count_; }
    std::size_t sa_size() const noexcept { return sa_size_; }
    std::size_t element_count() const noexcept { return element_to_sa_.size(); }
    std::size_t sa_of(std::size_t element) const { return element_to_sa_.at(element); }
    const std::vector<std::size_t> &element_to_sa() const noexcept { return element_to_sa_; }

    /// Element indices of sub-array k in ascending order.
    const std::vector<std::size_t> &elements_of(std::size_t k) const;

  private:
    std::size_t k_count_;
    std::size_t sa_size_;
    std::vector<std::size_t> element_to_sa_;
    std::vector<std::vector<std::size_t>> members_;
};

/// 0 when the received strength is at or below the threshold, else 1.
std::uint8_t classify_element(double strength, const FaultModelParams &params);

/// Labels every entry of a received RIS signal by its power |y_n|^2.
FaultStatusVector classify_elements(const cvec &ris_signal, const FaultModelParams &params);

/// omega (Hadamard) B.
EffectiveProfile effective_profile(const PhaseProfile &phases, const FaultStatusVector &statuses);

/// Fault count uniform on {0, ..., max_faulty}; positions a uniform subset.
FaultStatusVector sample_fault_scenario(Rng &rng, std::size_t n_elements, std::size_t max_faulty);

/// Contiguous sub-array partition.
///
/// The panel is cut into a kr x kc grid of rectangular tiles (kr * kc = K,
/// kr dividing n_elev, kc dividing n_azim), choosing the most nearly square
/// tile; tiles are numbered row-major. When no such grid exists but K
/// divides N, sub-arrays are consecutive index chunks of N / K elements.
/// Anything else throws PartitionError.
SaPartition sa_partition(const UpaGeometry &ris_geom, std::size_t k_count);

/// C_k = 0 iff sub-array k holds at least one faulty element.
SaStatusVector sa_statuses(const FaultStatusVector &statuses, const SaPartition &partition);

/// Statuses with every element outside `target_sa` switched off.
FaultStatusVector sa_isolation_mask(const SaPartition &partition, std::size_t target_sa, const FaultStatusVector &statuses);

} // namespace risfault
