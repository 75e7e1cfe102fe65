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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "risfault/dataset.hpp"
#include "risfault/estimators.hpp"

namespace risfault
{

inline constexpr int kMetricVersion = 1;

struct CdfPoint
{
    double accuracy;
    double cumulative_probability;

    friend bool operator==(const CdfPoint &, const CdfPoint &) = default;
};

struct DetectionReport
{
    double scenario_accuracy = 0.0;    ///< trials with every status right
    double elementwise_accuracy = 0.0; ///< matching entries pooled over trials
    std::vector<CdfPoint> accuracy_cdf; ///< CDF of per-trial elementwise accuracy
    std::size_t trials = 0;

    friend bool operator==(const DetectionReport &, const DetectionReport &) = default;
};

struct CurvePoint
{
    double x;
    double nmse;

    friend bool operator==(const CurvePoint &, const CurvePoint &) = default;
};

struct LocalizationReport
{
    double nmse = 0.0;
    std::size_t trials = 0;
    std::string curve_axis = "snr_db";
    std::vector<CurvePoint> curve;

    friend bool operator==(const LocalizationReport &, const LocalizationReport &) = default;
};

struct SweepPoint
{
    double snr_db;
    DetectionReport report;

    friend bool operator==(const SweepPoint &, const SweepPoint &) = default;
};

/// Works for element (B) and sub-array (C) statuses alike.
template <class Tag>
DetectionReport detection_accuracy(std::span<const StatusVector<Tag>> estimates, std::span<const StatusVector<Tag>> truths);

LocalizationReport localization_report(std::span<const Position3D> estimates, std::span<const Position3D> truths);

// -- SNR sweep ------------------------------------------------------------------------

/// Synthetic detection setup: every trial redraws both links and a fault
/// scenario; the solver is given the true effective matrix.
struct SweepConfig
{
    UpaGeometry ris_geom;
    UpaGeometry bs_geom;
    Position3D bs_position{0.0, 10.0, 1.5};
    Position3D ris_position{15.0, 0.0, 2.0};
    Position3D mu_position{30.0, 6.0, 0.5};
    std::size_t mu_ris_paths = 10;
    std::size_t ris_bs_paths = 10;
    std::size_t max_faulty = 2;

    /// RIS and BS arrays with the given element counts, laid out as the
    /// most nearly square grid, half-wavelength spaced at 90 GHz.
    static SweepConfig desk(std::size_t ris_elements, std::size_t bs_antennas);
};

struct DetectionTrial
{
    cmat a; ///< effective matrix H_rb diag(g_ur) s
    PhaseProfile phases;
    FaultStatusVector truth;
    cvec y_noiseless;
    cvec y_healthy; ///< noise reference for an all-faulty panel
};

DetectionTrial make_detection_trial(const SweepConfig &config, std::uint64_t seed, std::uint64_t trial);

/// y for trial `trial` at sweep point `point`; noise streams are keyed by
/// both so that every point sees the same channels and faults.
BsSignal observe_trial(const DetectionTrial &trial, double snr_db, std::uint64_t seed, std::uint64_t trial_index, std::uint64_t point);

using DetectionSolver =
    std::function<DetectionResult(const BsSignal &y, const cmat &a, const PhaseProfile &phases, double snr_db, std::size_t max_faulty)>;

DetectionSolver greedy_solver(double margin = kGreedyToleranceMargin);
DetectionSolver exhaustive_solver();

/// Throws InvalidInputError for an empty point list or zero trials.
std::vector<SweepPoint> snr_sweep(const SweepConfig &config,
                                  std::span<const double> snr_points,
                                  const DetectionSolver &solver,
                                  std::size_t trials,
                                  std::uint64_t seed,
                                  unsigned threads = 1);

// -- report files ---------------------------------------------------------------------------

enum class ResultFormat
{
    csv,
    json
};

/// json for a .json extension, csv otherwise.
ResultFormat format_for(const std::filesystem::path &path);

void emit_results(const DetectionReport &report, const std::filesystem::path &path, ResultFormat format);
void emit_results(std::span<const SweepPoint> sweep, const std::filesystem::path &path, ResultFormat format);
void emit_results(const LocalizationReport &report, const std::filesystem::path &path, ResultFormat format);

DetectionReport read_detection_report(const std::filesystem::path &path, ResultFormat format);
std::vector<SweepPoint> read_sweep(const std::filesystem::path &path, ResultFormat format);
LocalizationReport read_localization_report(const std::filesystem::path &path, ResultFormat format);

// -- predictions from external solvers --------------------------------------------------------

enum class PredictionTask
{
    element_detection, ///< one B_hat (length N) per record
    sa_detection,      ///< one C_hat (length K) per record
    localization,      ///< one p_hat (x, y, z) per record
};

/// Predictions exchanged with external (learned) solvers.
struct ResultsFile
{
    std::uint64_t dataset_checksum = 0;
    std::string algorithm;
    PredictionTask task = PredictionTask::element_detection;
    std::vector<std::vector<std::uint8_t>> statuses;
    std::vector<Position3D> positions;
};

void write_results_file(const ResultsFile &results, const std::filesystem::path &path);

/// Parses and validates the schema. Throws SchemaError naming the first
/// offending record.
ResultsFile read_results_file(const std::filesystem::path &path);

struct ImportedReport
{
    std::string algorithm;
    PredictionTask task;
    std::optional<DetectionReport> detection;
    std::optional<LocalizationReport> localization;
};

/// Re-scores predictions against the dataset they were made for. Throws
/// ProvenanceError when the checksum does not match and SchemaError when the
/// predictions do not line up with the dataset records.
ImportedReport import_neural_results(const std::filesystem::path &path, const Dataset<DetectionSample> &dataset);
ImportedReport import_neural_results(const std::filesystem::path &path, const Dataset<LocalizationSample> &dataset);

} // namespace risfault
