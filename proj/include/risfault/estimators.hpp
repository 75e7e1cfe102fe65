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
#include <span>
#include <vector>

#include "risfault/channelgeom.hpp"
#include "risfault/dataset.hpp"
#include "risfault/fault.hpp"
#include "risfault/signal.hpp"

namespace risfault
{

// -- fault detection -------------------------------------------------------------

struct DetectionResult
{
    FaultStatusVector estimated_statuses;
    double residual_norm = 0.0; ///< |y - A (omega . B_hat)|
    /// Exhaustive search: more than one mask reproduces y to within the tie
    /// tolerance, so the minimizer is not identifiable.
    bool ambiguous = false;
    /// Greedy search: stopped at max_faulty with the residual above tolerance.
    bool converged = true;
};

inline constexpr std::size_t kMaxExhaustiveElements = 22;

/// Global minimizer of |y - A (omega . B)| over all 2^N masks. Ties (within
/// a relative 1e-9) go to fewer faults, then to the lexicographically
/// smallest status vector. Throws SizeLimitError for N > 22.
DetectionResult detect_faults_exhaustive(const BsSignal &y, const cmat &a, const PhaseProfile &phases);

/// Orthogonal matching pursuit on the fault indicator x = 1 - B, using the
/// residual r = A omega - y = A diag(omega) x - n. Picks the column with the
/// largest normalized correlation, refits the support by least squares, and
/// stops at |r| <= tol or after max_faulty picks. If tol was not reached, single
/// atom exchanges refine the support while they lower |r|, and the pursuit is
/// restarted from up to kGreedyRestarts other strong first picks. x is
/// rounded to {0, 1}.
DetectionResult detect_faults_greedy(const BsSignal &y, const cmat &a, const PhaseProfile &phases, std::size_t max_faulty, double tol);

inline constexpr std::size_t kGreedyRestarts = 8;

inline constexpr double kGreedyToleranceMargin = 1.0;

/// Stopping tolerance for detect_faults_greedy: `margin` times the expected
/// noise norm implied by the measured |y| at the given SNR. Noiseless input
/// (snr >= 300 dB or +inf) gets 1e-9 |y|.
double greedy_tolerance(const BsSignal &y, double snr_db, double margin = kGreedyToleranceMargin);

// -- RIS signal reconstruction ---------------------------------------------------

/// Tikhonov-regularized solve of y ~ H_rb diag(omega . B) v over the active
/// elements: minimizes |y - H_a v|^2 + ridge |v|^2 (minimum-norm solution when
/// ridge = 0). Returns v scattered into an N-vector, zero at faulty indices.
RisSignal reconstruct_ris_ls(const BsSignal &y, const cmat &h_rb, const PhaseProfile &phases, const FaultStatusVector &statuses, double ridge);

// -- fingerprint localization ----------------------------------------------------

enum class FingerprintKind
{
    bs,  ///< BS received signal y
    ris, ///< complete RIS signal y_r
};

struct FingerprintEntry
{
    cvec fingerprint;
    Position3D position;
};

class FingerprintDatabase
{
  public:
    /// Throws InvalidInputError when empty, DimensionError on mixed lengths.
    FingerprintDatabase(FingerprintKind kind, std::vector<FingerprintEntry> entries);

    FingerprintKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return entries_.size(); }
    std::size_t fingerprint_length() const noexcept { return static_cast<std::size_t>(entries_.front().fingerprint.size()); }
    const std::vector<FingerprintEntry> &entries() const noexcept { return entries_; }

  private:
    FingerprintKind kind_;
    std::vector<FingerprintEntry> entries_;
};

struct LocalizationResult
{
    Position3D estimate;
};

const cvec &fingerprint_of(const LocalizationSample &sample, FingerprintKind kind);

FingerprintDatabase build_fingerprint_db(std::span<const LocalizationSample> samples, FingerprintKind kind);

/// Mean position of the k entries nearest to `query` in Euclidean distance;
/// equal distances resolve to the lower entry index.
LocalizationResult fingerprint_localize_nn(const FingerprintDatabase &db, const cvec &query, std::size_t k);

/// Indices of the k nearest entries, nearest first.
std::vector<std::size_t> nearest_entries(const FingerprintDatabase &db, const cvec &query, std::size_t k);

/// sum |p_hat - p|^2 / sum |p - mean(p)|^2.
double nmse(std::span<const Position3D> estimates, std::span<const Position3D> truths);

} // namespace risfault
