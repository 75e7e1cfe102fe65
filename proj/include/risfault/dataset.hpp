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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "risfault/channelgeom.hpp"
#include "risfault/fault.hpp"
#include "risfault/signal.hpp"

namespace risfault
{

inline constexpr std::uint32_t kFormatVersion = 1;

enum class DatasetKind
{
    detection,
    localization
};

/// fixed: one propagation environment (scatterers and gains) drawn from the
/// master seed and shared by all samples; the geometric path follows the MU.
/// redraw: every sample draws fresh paths and gains.
enum class ChannelMode
{
    fixed,
    redraw
};

struct ArraySpec
{
    std::size_t n_elev = 1;
    std::size_t n_azim = 1;
    double spacing_m = 0.0;
    Position3D position;
};

/// Horizontal rectangle replicated at each height; the MU is drawn by
/// picking a height uniformly, then (x, y) uniformly in the rectangle.
struct MobileGrid
{
    double x_min = 25.0;
    double x_max = 35.0;
    double y_min = 1.0;
    double y_max = 11.0;
    std::vector<double> heights{0.5, 1.5, 2.0};
};

/// Everything needed to regenerate a dataset byte for byte.
struct DatasetManifest
{
    std::uint32_t format_version = kFormatVersion;
    DatasetKind kind = DatasetKind::detection;
    double carrier_frequency_hz = 90e9;
    ArraySpec bs;
    ArraySpec ris;
    std::size_t mu_ris_paths = 10;
    std::size_t ris_bs_paths = 10;
    double gain_scale = 1.0;
    double dominant_power_ratio = kDominantPowerRatio;
    /// MU-RIS amplitudes scale as distance^(-exponent / 2), reference 1 m.
    double path_loss_exponent = 2.0;
    ChannelMode channel_mode = ChannelMode::fixed;
    std::size_t max_faulty = 15;
    std::size_t sa_count = 9;
    /// When set, every element outside this sub-array is switched off while
    /// the BS signal is synthesized; labels keep the true statuses.
    std::optional<std::size_t> isolated_sa;
    Position3D mu_position{30.0, 6.0, 0.5};
    MobileGrid mu_grid;
    /// Per-sample SNR is drawn uniformly from this set.
    std::vector<double> snr_db{30.0};
    bool noiseless = false;
    std::complex<double> pilot{1.0, 0.0};
    std::uint64_t sample_count = 0;
    double split_ratio = 0.8;
    std::uint64_t master_seed = 0;
    /// Generation index of each record; empty means 0..sample_count-1.
    std::vector<std::uint64_t> source_indices;
    std::string split_role;
    std::optional<std::uint64_t> parent_checksum;
    /// File checksum of the binary this manifest describes; set on write.
    std::optional<std::uint64_t> checksum;

    /// 90 GHz, 4x4 BS at (0, 10, 1.5), 9x9 RIS at (15, 0, 2), half-wavelength
    /// spacing, P = J = 10, at most 15 faults, K = 9.
    static DatasetManifest defaults(DatasetKind kind, std::uint64_t sample_count, std::uint64_t master_seed);

    void validate() const; // throws ManifestError

    UpaGeometry bs_geometry() const;
    UpaGeometry ris_geometry() const;
    SaPartition partition() const;
    Pilot pilot_symbol() const { return Pilot(pilot); }
    std::uint64_t source_index(std::uint64_t record) const;
};

std::string to_string(DatasetKind kind);
std::string manifest_to_json(const DatasetManifest &manifest);
DatasetManifest manifest_from_json(const std::string &text); // throws ManifestError / VersionMismatchError

struct DetectionSample
{
    BsSignal bs_signal;
    FaultStatusVector element_statuses;
    SaStatusVector sa_statuses;
    Position3D mu_position;
    double snr_db = 0.0; ///< +inf for noiseless records
};

struct LocalizationSample
{
    BsSignal bs_signal;
    RisSignal ris_signal_complete; ///< pre-mask y_r
    FaultStatusVector element_statuses;
    Position3D mu_position;
    double snr_db = 0.0;
};

template <class Sample>
struct Dataset
{
    DatasetManifest manifest;
    std::vector<Sample> samples;
    std::uint64_t checksum = 0; ///< file checksum when loaded from disk
};

// -- scene synthesis -----------------------------------------------------------

/// Propagation environment shared by all samples in fixed channel mode.
class Environment
{
  public:
    explicit Environment(const DatasetManifest &manifest);

    /// Channels seen by an MU at `mu` for the sample generated at `source_index`.
    ChannelRealization channels(std::uint64_t source_index, const Position3D &mu) const;

    const SaPartition &partition() const noexcept { return partition_; }

  private:
    DatasetManifest manifest_;
    UpaGeometry bs_geom_;
    UpaGeometry ris_geom_;
    SaPartition partition_;
    std::optional<PathSet> mu_ris_;
    std::optional<cmat> h_rb_;
};

/// Seed of the sub-stream `stream` of the sample generated at `source_index`.
std::uint64_t sample_stream_seed(const DatasetManifest &manifest, std::uint64_t source_index, std::uint64_t stream);

Position3D draw_mu_position(const DatasetManifest &manifest, std::uint64_t source_index);

DetectionSample make_detection_sample(const DatasetManifest &manifest, const Environment &env, std::uint64_t source_index);
LocalizationSample make_localization_sample(const DatasetManifest &manifest, const Environment &env, std::uint64_t source_index);

/// Samples 0..sample_count-1. Output does not depend on `threads`.
std::vector<DetectionSample> gen_detection_dataset(const DatasetManifest &manifest, unsigned threads = 1);
std::vector<LocalizationSample> gen_localization_dataset(const DatasetManifest &manifest, unsigned threads = 1);

/// Deterministic shuffled split; train receives round(ratio * n) records.
template <class Sample>
std::pair<Dataset<Sample>, Dataset<Sample>> split(const Dataset<Sample> &dataset, double ratio);

// -- persistence -------------------------------------------------------------------

/// Manifest file that sits beside a binary dataset: d.bin -> d.json.
std::filesystem::path manifest_path_for(const std::filesystem::path &binary);

std::string checksum_hex(std::uint64_t checksum);
std::uint64_t parse_checksum_hex(const std::string &text);

std::size_t record_size(const DatasetManifest &manifest);

/// Writes the binary file and its manifest; returns the file checksum.
template <class Sample>
std::uint64_t write_dataset(const std::filesystem::path &path, DatasetManifest manifest, std::span<const Sample> samples);

/// Reads and fully validates a dataset. Throws VersionMismatchError,
/// TruncatedFileError, ChecksumError, FormatError, ManifestError, IoError.
template <class Sample>
Dataset<Sample> read_dataset(const std::filesystem::path &path);

DatasetManifest read_manifest(const std::filesystem::path &binary);

/// Generates and writes in bounded memory; returns the file checksum.
std::uint64_t generate_dataset_file(const std::filesystem::path &path, const DatasetManifest &manifest, unsigned threads = 1);

} // namespace risfault
