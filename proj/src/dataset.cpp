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

#include "risfault/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

#include "risfault/error.hpp"
#include "risfault/parallel.hpp"
#include "risfault/rng.hpp"

namespace risfault
{

namespace
{

using nlohmann::json;

constexpr std::uint64_t kSampleDomain = 0;
constexpr std::uint64_t kEnvironmentDomain = 1;
constexpr std::uint64_t kSplitDomain = 2;

// Sub-streams of one sample.
constexpr std::uint64_t kChannelStream = 0;
constexpr std::uint64_t kPositionStream = 1;
constexpr std::uint64_t kFaultStream = 2;
constexpr std::uint64_t kNoiseStream = 3;

// Stored signals are float32 on disk; rounding at generation time keeps the
// in-memory samples identical to what a reader gets back.
double to_single(double x)
{
    // GCC 11 at -O3 vectorizes a plain double -> float -> double loop and
    // drops the rounding on the last odd element; the volatile store keeps
    // every conversion.
    volatile float f = static_cast<float>(x);
    return static_cast<double>(f);
}

cvec round_to_float(const cvec &v)
{
    cvec out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out[i] = {to_single(v[i].real()), to_single(v[i].imag())};
    return out;
}

json position_json(const Position3D &p)
{
    return json::array({p.x, p.y, p.z});
}

Position3D position_from(const json &j)
{
    if (!j.is_array() || j.size() != 3)
        throw ManifestError("position must be an array of three numbers");
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

json array_json(const ArraySpec &a)
{
    return {{"n_elev", a.n_elev}, {"n_azim", a.n_azim}, {"spacing_m", a.spacing_m}, {"position", position_json(a.position)}};
}

ArraySpec array_from(const json &j)
{
    ArraySpec a;
    a.n_elev = j.at("n_elev").get<std::size_t>();
    a.n_azim = j.at("n_azim").get<std::size_t>();
    a.spacing_m = j.at("spacing_m").get<double>();
    a.position = position_from(j.at("position"));
    return a;
}

std::string to_string(ChannelMode m)
{
    return m == ChannelMode::fixed ? "fixed" : "redraw";
}

ChannelMode channel_mode_from(const std::string &s)
{
    if (s == "fixed")
        return ChannelMode::fixed;
    if (s == "redraw")
        return ChannelMode::redraw;
    throw ManifestError("unknown channel mode '" + s + "'");
}

DatasetKind kind_from(const std::string &s)
{
    if (s == "detection")
        return DatasetKind::detection;
    if (s == "localization")
        return DatasetKind::localization;
    throw ManifestError("unknown dataset kind '" + s + "'");
}

double path_loss_amplitude(const DatasetManifest &m, double distance)
{
    return std::pow(distance, -0.5 * m.path_loss_exponent);
}

} // namespace

// -- manifest ------------------------------------------------------------------------

DatasetManifest DatasetManifest::defaults(DatasetKind kind, std::uint64_t sample_count, std::uint64_t master_seed)
{
    DatasetManifest m;
    m.kind = kind;
    const double spacing = wavelength_from_frequency(m.carrier_frequency_hz) / 2.0;
    m.bs = {4, 4, spacing, {0.0, 10.0, 1.5}};
    m.ris = {9, 9, spacing, {15.0, 0.0, 2.0}};
    m.sample_count = sample_count;
    m.master_seed = master_seed;
    return m;
}

UpaGeometry DatasetManifest::bs_geometry() const
{
    return {bs.n_elev, bs.n_azim, bs.spacing_m, wavelength_from_frequency(carrier_frequency_hz)};
}

UpaGeometry DatasetManifest::ris_geometry() const
{
    return {ris.n_elev, ris.n_azim, ris.spacing_m, wavelength_from_frequency(carrier_frequency_hz)};
}

SaPartition DatasetManifest::partition() const
{
    return sa_partition(ris_geometry(), sa_count);
}

std::uint64_t DatasetManifest::source_index(std::uint64_t record) const
{
    if (record >= sample_count)
        throw IndexError("record index out of range");
    return source_indices.empty() ? record : source_indices[record];
}

void DatasetManifest::validate() const
{
    auto fail = [](const std::string &msg) { throw ManifestError("manifest: " + msg); };

    if (format_version != kFormatVersion)
        throw VersionMismatchError("manifest: format version " + std::to_string(format_version) + ", expected " +
                                   std::to_string(kFormatVersion));
    try
    {
        (void)bs_geometry();
        (void)ris_geometry();
        (void)partition();
        (void)pilot_symbol();
    }
    catch (const Error &e)
    {
        fail(e.what());
    }
    const std::size_t n = ris.n_elev * ris.n_azim;
    if (mu_ris_paths == 0 || ris_bs_paths == 0)
        fail("path counts must be positive");
    if (!(gain_scale > 0.0) || !std::isfinite(gain_scale) || !(dominant_power_ratio > 0.0) ||
        !std::isfinite(dominant_power_ratio))
        fail("gain scale and dominant power ratio must be positive");
    if (!(path_loss_exponent >= 0.0) || !std::isfinite(path_loss_exponent))
        fail("path loss exponent must be non-negative");
    if (max_faulty > n)
        fail("max_faulty exceeds the RIS element count");
    if (isolated_sa && *isolated_sa >= sa_count)
        fail("isolated_sa outside [0, sa_count)");
    if (!noiseless)
    {
        if (snr_db.empty())
            fail("snr_db must list at least one value");
        for (double s : snr_db)
            if (!std::isfinite(s))
                fail("snr_db values must be finite");
    }
    if (sample_count == 0)
        fail("sample_count must be positive");
    if (!(split_ratio > 0.0 && split_ratio < 1.0))
        fail("split_ratio must lie in (0, 1)");
    if (!source_indices.empty() && source_indices.size() != sample_count)
        fail("source_indices length differs from sample_count");
    if (bs.position == ris.position)
        fail("BS and RIS coincide");

    if (kind == DatasetKind::detection)
    {
        if (!in_front_of_panel(ris.position, mu_position))
            fail("MU position lies behind the RIS panel");
    }
    else
    {
        const auto &g = mu_grid;
        if (!(g.x_min <= g.x_max) || !(g.y_min <= g.y_max) || !std::isfinite(g.x_min) || !std::isfinite(g.x_max) ||
            !std::isfinite(g.y_min) || !std::isfinite(g.y_max))
            fail("MU grid bounds are invalid");
        if (!(g.y_min > ris.position.y))
            fail("MU grid extends behind the RIS panel");
        if (g.heights.empty())
            fail("MU grid needs at least one height");
        for (double h : g.heights)
            if (!std::isfinite(h))
                fail("MU grid heights must be finite");
    }
}

std::string to_string(DatasetKind kind)
{
    return kind == DatasetKind::detection ? "detection" : "localization";
}

std::string manifest_to_json(const DatasetManifest &m)
{
    json j;
    j["format_version"] = m.format_version;
    j["kind"] = to_string(m.kind);
    j["carrier_frequency_hz"] = m.carrier_frequency_hz;
    j["bs"] = array_json(m.bs);
    j["ris"] = array_json(m.ris);
    j["channel"] = {{"mode", to_string(m.channel_mode)},
                    {"mu_ris_paths", m.mu_ris_paths},
                    {"ris_bs_paths", m.ris_bs_paths},
                    {"gain_scale", m.gain_scale},
                    {"dominant_power_ratio", m.dominant_power_ratio},
                    {"path_loss_exponent", m.path_loss_exponent}};
    j["faults"] = {{"max_faulty", m.max_faulty},
                   {"sa_count", m.sa_count},
                   {"isolated_sa", m.isolated_sa ? json(*m.isolated_sa) : json(nullptr)}};
    j["mu"] = {{"position", position_json(m.mu_position)},
               {"grid",
                {{"x", {m.mu_grid.x_min, m.mu_grid.x_max}},
                 {"y", {m.mu_grid.y_min, m.mu_grid.y_max}},
                 {"heights", m.mu_grid.heights}}}};
    j["noise"] = {{"snr_db", m.snr_db}, {"noiseless", m.noiseless}};
    j["pilot"] = {m.pilot.real(), m.pilot.imag()};
    j["sample_count"] = m.sample_count;
    j["split_ratio"] = m.split_ratio;
    j["master_seed"] = m.master_seed;
    if (!m.split_role.empty() || !m.source_indices.empty() || m.parent_checksum)
    {
        j["split"] = {{"role", m.split_role},
                      {"parent_checksum", m.parent_checksum ? json(checksum_hex(*m.parent_checksum)) : json(nullptr)},
                      {"source_indices", m.source_indices}};
    }
    if (m.checksum)
        j["checksum"] = checksum_hex(*m.checksum);
    return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(const std::string &text)
{
    json j;
    try
    {
        j = json::parse(text);
    }
    catch (const json::exception &e)
    {
        throw ManifestError(std::string("manifest: malformed JSON: ") + e.what());
    }
    DatasetManifest m;
    try
    {
        m.format_version = j.at("format_version").get<std::uint32_t>();
        if (m.format_version != kFormatVersion)
            throw VersionMismatchError("manifest: format version " + std::to_string(m.format_version) + ", expected " +
                                       std::to_string(kFormatVersion));
        m.kind = kind_from(j.at("kind").get<std::string>());
        m.carrier_frequency_hz = j.at("carrier_frequency_hz").get<double>();
        m.bs = array_from(j.at("bs"));
        m.ris = array_from(j.at("ris"));
        const auto &c = j.at("channel");
        m.channel_mode = channel_mode_from(c.at("mode").get<std::string>());
        m.mu_ris_paths = c.at("mu_ris_paths").get<std::size_t>();
        m.ris_bs_paths = c.at("ris_bs_paths").get<std::size_t>();
        m.gain_scale = c.at("gain_scale").get<double>();
        m.dominant_power_ratio = c.at("dominant_power_ratio").get<double>();
        m.path_loss_exponent = c.at("path_loss_exponent").get<double>();
        const auto &f = j.at("faults");
        m.max_faulty = f.at("max_faulty").get<std::size_t>();
        m.sa_count = f.at("sa_count").get<std::size_t>();
        if (!f.at("isolated_sa").is_null())
            m.isolated_sa = f.at("isolated_sa").get<std::size_t>();
        const auto &mu = j.at("mu");
        m.mu_position = position_from(mu.at("position"));
        const auto &g = mu.at("grid");
        m.mu_grid.x_min = g.at("x").at(0).get<double>();
        m.mu_grid.x_max = g.at("x").at(1).get<double>();
        m.mu_grid.y_min = g.at("y").at(0).get<double>();
        m.mu_grid.y_max = g.at("y").at(1).get<double>();
        m.mu_grid.heights = g.at("heights").get<std::vector<double>>();
        const auto &nz = j.at("noise");
        m.snr_db = nz.at("snr_db").get<std::vector<double>>();
        m.noiseless = nz.at("noiseless").get<bool>();
        m.pilot = {j.at("pilot").at(0).get<double>(), j.at("pilot").at(1).get<double>()};
        m.sample_count = j.at("sample_count").get<std::uint64_t>();
        m.split_ratio = j.at("split_ratio").get<double>();
        m.master_seed = j.at("master_seed").get<std::uint64_t>();
        if (j.contains("split"))
        {
            const auto &s = j.at("split");
            m.split_role = s.at("role").get<std::string>();
            if (!s.at("parent_checksum").is_null())
                m.parent_checksum = parse_checksum_hex(s.at("parent_checksum").get<std::string>());
            m.source_indices = s.at("source_indices").get<std::vector<std::uint64_t>>();
        }
        if (j.contains("checksum"))
            m.checksum = parse_checksum_hex(j.at("checksum").get<std::string>());
    }
    catch (const json::exception &e)
    {
        throw ManifestError(std::string("manifest: ") + e.what());
    }
    catch (const InvalidInputError &e)
    {
        throw ManifestError(std::string("manifest: ") + e.what());
    }
    m.validate();
    return m;
}

// -- scene synthesis -----------------------------------------------------------------

Environment::Environment(const DatasetManifest &manifest)
    : manifest_(manifest), bs_geom_(manifest.bs_geometry()), ris_geom_(manifest.ris_geometry()),
      partition_(manifest.partition())
{
    manifest_.source_indices.clear();
    if (manifest.channel_mode != ChannelMode::fixed)
        return;
    Rng rng(derive_seed(manifest.master_seed, 0, kEnvironmentDomain));
    mu_ris_ = sample_path_set(rng,
                              manifest.mu_ris_paths,
                              LinkAnchor{manifest.mu_position, manifest.ris.position},
                              manifest.gain_scale,
                              false,
                              manifest.dominant_power_ratio);
    const PathSet ris_bs = sample_path_set(rng,
                                           manifest.ris_bs_paths,
                                           LinkAnchor{manifest.ris.position, manifest.bs.position},
                                           manifest.gain_scale,
                                           true,
                                           manifest.dominant_power_ratio);
    h_rb_ = ris_bs_channel(ris_bs, bs_geom_, ris_geom_);
}

ChannelRealization Environment::channels(std::uint64_t source_index, const Position3D &mu) const
{
    const auto &m = manifest_;
    const double amplitude = path_loss_amplitude(m, mu.distance_to(m.ris.position));
    if (mu_ris_)
    {
        auto paths = mu_ris_->paths();
        paths.front().arrival = angles_between(m.ris.position, mu);
        return {mu_ris_channel(PathSet(std::move(paths)), ris_geom_) * amplitude, *h_rb_};
    }
    Rng rng(sample_stream_seed(m, source_index, kChannelStream));
    const PathSet mu_ris = sample_path_set(
        rng, m.mu_ris_paths, LinkAnchor{mu, m.ris.position}, m.gain_scale, false, m.dominant_power_ratio);
    const PathSet ris_bs = sample_path_set(
        rng, m.ris_bs_paths, LinkAnchor{m.ris.position, m.bs.position}, m.gain_scale, true, m.dominant_power_ratio);
    return {mu_ris_channel(mu_ris, ris_geom_) * amplitude, ris_bs_channel(ris_bs, bs_geom_, ris_geom_)};
}

std::uint64_t sample_stream_seed(const DatasetManifest &manifest, std::uint64_t source_index, std::uint64_t stream)
{
    return derive_seed(derive_seed(manifest.master_seed, source_index, kSampleDomain), stream);
}

Position3D draw_mu_position(const DatasetManifest &manifest, std::uint64_t source_index)
{
    const auto &g = manifest.mu_grid;
    Rng rng(sample_stream_seed(manifest, source_index, kPositionStream));
    const double z = g.heights[rng.uniform_index(g.heights.size())];
    const double x = rng.uniform(g.x_min, g.x_max);
    const double y = rng.uniform(g.y_min, g.y_max);
    return {x, y, z};
}

namespace
{

struct SynthesizedScene
{
    ChannelRealization channels;
    FaultStatusVector statuses;
    cvec y;
    double snr_db;
};

SynthesizedScene synthesize(const DatasetManifest &m, const Environment &env, std::uint64_t source_index, const Position3D &mu)
{
    SynthesizedScene scene{env.channels(source_index, mu), {}, {}, 0.0};
    const std::size_t n = env.partition().element_count();

    Rng fault_rng(sample_stream_seed(m, source_index, kFaultStream));
    scene.statuses = sample_fault_scenario(fault_rng, n, m.max_faulty);
    const FaultStatusVector active =
        m.isolated_sa ? sa_isolation_mask(env.partition(), *m.isolated_sa, scene.statuses) : scene.statuses;

    const Pilot pilot = m.pilot_symbol();
    const auto profile = effective_profile(PhaseProfile::unity(n), active);
    scene.y = bs_received(scene.channels.h_rb, profile, scene.channels.g_ur, pilot).samples;

    if (m.noiseless)
    {
        scene.snr_db = std::numeric_limits<double>::infinity();
    }
    else
    {
        Rng noise_rng(sample_stream_seed(m, source_index, kNoiseStream));
        scene.snr_db = m.snr_db[noise_rng.uniform_index(m.snr_db.size())];
        const cvec healthy = scene.channels.h_rb * (scene.channels.g_ur * pilot.symbol());
        scene.y = add_awgn_or_reference(scene.y, healthy, NoiseSpec(scene.snr_db), noise_rng);
    }
    scene.y = round_to_float(scene.y);
    return scene;
}

} // namespace

DetectionSample make_detection_sample(const DatasetManifest &manifest, const Environment &env, std::uint64_t source_index)
{
    auto scene = synthesize(manifest, env, source_index, manifest.mu_position);
    auto sa = sa_statuses(scene.statuses, env.partition());
    return {BsSignal{std::move(scene.y)}, std::move(scene.statuses), std::move(sa), manifest.mu_position, scene.snr_db};
}

LocalizationSample make_localization_sample(const DatasetManifest &manifest, const Environment &env, std::uint64_t source_index)
{
    const Position3D mu = draw_mu_position(manifest, source_index);
    auto scene = synthesize(manifest, env, source_index, mu);
    RisSignal y_r{round_to_float(ris_received(scene.channels.g_ur, manifest.pilot_symbol()).samples)};
    return {BsSignal{std::move(scene.y)}, std::move(y_r), std::move(scene.statuses), mu, scene.snr_db};
}

namespace
{

template <class Sample, class Make>
std::vector<Sample> generate(const DatasetManifest &manifest, DatasetKind kind, unsigned threads, Make make)
{
    manifest.validate();
    if (manifest.kind != kind)
        throw ManifestError("manifest kind is " + to_string(manifest.kind) + ", expected " + to_string(kind));
    const Environment env(manifest);
    std::vector<Sample> out(manifest.sample_count);
    parallel_for(out.size(), threads, [&](std::size_t i) { out[i] = make(manifest, env, manifest.source_index(i)); });
    return out;
}

} // namespace

std::vector<DetectionSample> gen_detection_dataset(const DatasetManifest &manifest, unsigned threads)
{
    return generate<DetectionSample>(manifest, DatasetKind::detection, threads, make_detection_sample);
}

std::vector<LocalizationSample> gen_localization_dataset(const DatasetManifest &manifest, unsigned threads)
{
    return generate<LocalizationSample>(manifest, DatasetKind::localization, threads, make_localization_sample);
}

template <class Sample>
std::pair<Dataset<Sample>, Dataset<Sample>> split(const Dataset<Sample> &dataset, double ratio)
{
    const std::size_t n = dataset.samples.size();
    if (n == 0)
        throw InvalidInputError("split: empty dataset");
    if (!(ratio > 0.0 && ratio < 1.0))
        throw InvalidInputError("split: ratio must lie in (0, 1)");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(dataset.manifest.master_seed, 0, kSplitDomain));
    for (std::size_t i = n - 1; i > 0; --i)
        std::swap(order[i], order[static_cast<std::size_t>(rng.uniform_index(i + 1))]);

    const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
    std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> test_idx(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    auto part = [&](const std::vector<std::size_t> &idx, const char *role) {
        Dataset<Sample> d;
        d.manifest = dataset.manifest;
        d.manifest.sample_count = idx.size();
        d.manifest.split_ratio = ratio;
        d.manifest.split_role = role;
        d.manifest.source_indices.clear();
        d.manifest.checksum.reset();
        if (dataset.checksum != 0)
            d.manifest.parent_checksum = dataset.checksum;
        d.samples.reserve(idx.size());
        for (auto i : idx)
        {
            d.manifest.source_indices.push_back(dataset.manifest.source_index(i));
            d.samples.push_back(dataset.samples[i]);
        }
        return d;
    };
    return {part(train_idx, "train"), part(test_idx, "test")};
}

template std::pair<Dataset<DetectionSample>, Dataset<DetectionSample>> split(const Dataset<DetectionSample> &, double);
template std::pair<Dataset<LocalizationSample>, Dataset<LocalizationSample>> split(const Dataset<LocalizationSample> &,
                                                                                   double);

} // namespace risfault
