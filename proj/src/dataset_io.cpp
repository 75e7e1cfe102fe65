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

// Binary layout (all integers and floats little-endian):
//
//   magic        8 bytes  "RISFAULT"
//   version      u32
//   count        u64
//   records      count * record_size
//   checksum     u64      CRC-64/XZ of every preceding byte
//
// Detection record:    y (M x c32) | B (N x u8) | C (K x u8) | p_u (3 x f64) | snr (f64) | crc32
// Localization record: y (M x c32) | y_r (N x c32) | B (N x u8) | p_u (3 x f64) | snr (f64) | crc32
//
// c32 is an interleaved (real, imag) pair of IEEE-754 binary32; the record
// crc32 (CRC-32/ISO-HDLC) covers the record bytes before it.

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <boost/crc.hpp>

#include "risfault/dataset.hpp"
#include "risfault/error.hpp"
#include "risfault/parallel.hpp"

namespace risfault
{

namespace
{

constexpr std::array<char, 8> kMagic = {'R', 'I', 'S', 'F', 'A', 'U', 'L', 'T'};
constexpr std::size_t kHeaderSize = 8 + 4 + 8;
constexpr std::size_t kTrailerSize = 8;

using Crc64 = boost::crc_optimal<64, 0x42F0E1EBA9EA3693ULL, 0xFFFFFFFFFFFFFFFFULL, 0xFFFFFFFFFFFFFFFFULL, true, true>;

class ByteWriter
{
  public:
    void u8(std::uint8_t v) { buf_.push_back(v); }

    template <class U>
    void uint(U v)
    {
        for (std::size_t i = 0; i < sizeof(U); ++i)
            buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    void f32(double v) { uint(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
    void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }

    void complex_vec(const cvec &v)
    {
        for (Eigen::Index i = 0; i < v.size(); ++i)
        {
            f32(v[i].real());
            f32(v[i].imag());
        }
    }

    template <class Tag>
    void statuses(const StatusVector<Tag> &s)
    {
        for (auto b : s.values())
            u8(b);
    }

    void position(const Position3D &p)
    {
        f64(p.x);
        f64(p.y);
        f64(p.z);
    }

    std::vector<std::uint8_t> &bytes() { return buf_; }

  private:
    std::vector<std::uint8_t> buf_;
};

class ByteReader
{
  public:
    ByteReader(const std::uint8_t *data, std::size_t size) : p_(data), end_(data + size) {}

    template <class U>
    U uint()
    {
        need(sizeof(U));
        U v = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i)
            v |= static_cast<U>(static_cast<U>(p_[i]) << (8 * i));
        p_ += sizeof(U);
        return v;
    }

    std::uint8_t u8()
    {
        need(1);
        return *p_++;
    }

    double f32() { return static_cast<double>(std::bit_cast<float>(uint<std::uint32_t>())); }
    double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }

    cvec complex_vec(std::size_t n)
    {
        cvec v(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
        {
            const double re = f32();
            const double im = f32();
            v[static_cast<Eigen::Index>(i)] = {re, im};
        }
        return v;
    }

    template <class Tag>
    StatusVector<Tag> statuses(std::size_t n, std::size_t record)
    {
        std::vector<std::uint8_t> s(n);
        for (auto &b : s)
        {
            b = u8();
            if (b > 1)
                throw FormatError("record " + std::to_string(record) + ": status byte outside {0, 1}");
        }
        return StatusVector<Tag>(std::move(s));
    }

    Position3D position()
    {
        const double x = f64();
        const double y = f64();
        const double z = f64();
        return {x, y, z};
    }

  private:
    void need(std::size_t n) const
    {
        if (static_cast<std::size_t>(end_ - p_) < n)
            throw TruncatedFileError("unexpected end of record");
    }

    const std::uint8_t *p_;
    const std::uint8_t *end_;
};

struct Dims
{
    std::size_t m;
    std::size_t n;
    std::size_t k;
};

Dims dims_of(const DatasetManifest &m)
{
    return {m.bs.n_elev * m.bs.n_azim, m.ris.n_elev * m.ris.n_azim, m.sa_count};
}

template <class Sample>
constexpr DatasetKind kind_of();
template <>
constexpr DatasetKind kind_of<DetectionSample>()
{
    return DatasetKind::detection;
}
template <>
constexpr DatasetKind kind_of<LocalizationSample>()
{
    return DatasetKind::localization;
}

void check_len(const cvec &v, std::size_t n, const char *what)
{
    if (static_cast<std::size_t>(v.size()) != n)
        throw DimensionError(std::string("write_dataset: ") + what + " length does not match the manifest geometry");
}

void encode(ByteWriter &w, const DetectionSample &s, const Dims &d)
{
    check_len(s.bs_signal.samples, d.m, "BS signal");
    if (s.element_statuses.size() != d.n || s.sa_statuses.size() != d.k)
        throw DimensionError("write_dataset: status lengths do not match the manifest geometry");
    w.complex_vec(s.bs_signal.samples);
    w.statuses(s.element_statuses);
    w.statuses(s.sa_statuses);
    w.position(s.mu_position);
    w.f64(s.snr_db);
}

void encode(ByteWriter &w, const LocalizationSample &s, const Dims &d)
{
    check_len(s.bs_signal.samples, d.m, "BS signal");
    check_len(s.ris_signal_complete.samples, d.n, "RIS signal");
    if (s.element_statuses.size() != d.n)
        throw DimensionError("write_dataset: status length does not match the manifest geometry");
    w.complex_vec(s.bs_signal.samples);
    w.complex_vec(s.ris_signal_complete.samples);
    w.statuses(s.element_statuses);
    w.position(s.mu_position);
    w.f64(s.snr_db);
}

void decode(ByteReader &r, DetectionSample &s, const Dims &d, std::size_t record)
{
    s.bs_signal.samples = r.complex_vec(d.m);
    s.element_statuses = r.statuses<ElementTag>(d.n, record);
    s.sa_statuses = r.statuses<SubArrayTag>(d.k, record);
    s.mu_position = r.position();
    s.snr_db = r.f64();
}

void decode(ByteReader &r, LocalizationSample &s, const Dims &d, std::size_t record)
{
    s.bs_signal.samples = r.complex_vec(d.m);
    s.ris_signal_complete.samples = r.complex_vec(d.n);
    s.element_statuses = r.statuses<ElementTag>(d.n, record);
    s.mu_position = r.position();
    s.snr_db = r.f64();
}

std::string read_text(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Streams records to disk while maintaining the file checksum.
class DatasetWriter
{
  public:
    DatasetWriter(const std::filesystem::path &path, const DatasetManifest &manifest)
        : path_(path), manifest_(manifest), dims_(dims_of(manifest)), out_(path, std::ios::binary | std::ios::trunc)
    {
        if (!out_)
            throw IoError("cannot create " + path.string());
        ByteWriter w;
        for (char c : kMagic)
            w.u8(static_cast<std::uint8_t>(c));
        w.uint<std::uint32_t>(kFormatVersion);
        w.uint<std::uint64_t>(manifest.sample_count);
        emit(w.bytes());
    }

    template <class Sample>
    void append(const Sample &s)
    {
        if (written_ == manifest_.sample_count)
            throw InvalidInputError("write_dataset: more samples than sample_count");
        ByteWriter w;
        encode(w, s, dims_);
        boost::crc_32_type crc;
        crc.process_bytes(w.bytes().data(), w.bytes().size());
        w.uint<std::uint32_t>(crc.checksum());
        emit(w.bytes());
        ++written_;
    }

    std::uint64_t finish()
    {
        if (written_ != manifest_.sample_count)
            throw InvalidInputError("write_dataset: fewer samples than sample_count");
        const std::uint64_t checksum = file_crc_.checksum();
        ByteWriter w;
        w.uint<std::uint64_t>(checksum);
        out_.write(reinterpret_cast<const char *>(w.bytes().data()), static_cast<std::streamsize>(w.bytes().size()));
        out_.close();
        if (!out_)
            throw IoError("failed writing " + path_.string());

        DatasetManifest m = manifest_;
        m.checksum = checksum;
        std::ofstream mf(manifest_path_for(path_), std::ios::binary | std::ios::trunc);
        mf << manifest_to_json(m);
        if (!mf)
            throw IoError("failed writing " + manifest_path_for(path_).string());
        return checksum;
    }

  private:
    void emit(const std::vector<std::uint8_t> &bytes)
    {
        file_crc_.process_bytes(bytes.data(), bytes.size());
        out_.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }

    std::filesystem::path path_;
    DatasetManifest manifest_;
    Dims dims_;
    std::ofstream out_;
    Crc64 file_crc_;
    std::uint64_t written_ = 0;
};

} // namespace

std::filesystem::path manifest_path_for(const std::filesystem::path &binary)
{
    auto p = binary;
    p.replace_extension(".json");
    return p;
}

std::string checksum_hex(std::uint64_t checksum)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(checksum));
    return buf;
}

std::uint64_t parse_checksum_hex(const std::string &text)
{
    if (text.size() != 16 || text.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos)
        throw InvalidInputError("checksum must be 16 hexadecimal digits");
    return std::stoull(text, nullptr, 16);
}

std::size_t record_size(const DatasetManifest &manifest)
{
    const Dims d = dims_of(manifest);
    const std::size_t tail = 3 * 8 + 8 + 4;
    if (manifest.kind == DatasetKind::detection)
        return 8 * d.m + d.n + d.k + tail;
    return 8 * d.m + 8 * d.n + d.n + tail;
}

DatasetManifest read_manifest(const std::filesystem::path &binary)
{
    return manifest_from_json(read_text(manifest_path_for(binary)));
}

template <class Sample>
std::uint64_t write_dataset(const std::filesystem::path &path, DatasetManifest manifest, std::span<const Sample> samples)
{
    manifest.sample_count = samples.size();
    manifest.checksum.reset();
    if (manifest.kind != kind_of<Sample>())
        throw ManifestError("write_dataset: manifest kind does not match the sample type");
    manifest.validate();
    DatasetWriter writer(path, manifest);
    for (const auto &s : samples)
        writer.append(s);
    return writer.finish();
}

template <class Sample>
Dataset<Sample> read_dataset(const std::filesystem::path &path)
{
    const std::string bytes = read_text(path);
    const auto *data = reinterpret_cast<const std::uint8_t *>(bytes.data());

    if (bytes.size() < kHeaderSize)
        throw TruncatedFileError(path.string() + ": shorter than the file header");
    if (std::memcmp(data, kMagic.data(), kMagic.size()) != 0)
        throw FormatError(path.string() + ": not a dataset file (bad magic)");
    ByteReader header(data + kMagic.size(), kHeaderSize - kMagic.size());
    const auto version = header.uint<std::uint32_t>();
    if (version != kFormatVersion)
        throw VersionMismatchError(path.string() + ": format version " + std::to_string(version) + ", expected " +
                                   std::to_string(kFormatVersion));
    const auto count = header.uint<std::uint64_t>();

    DatasetManifest manifest = read_manifest(path);
    if (manifest.kind != kind_of<Sample>())
        throw ManifestError(path.string() + ": dataset holds " + to_string(manifest.kind) + " samples");
    if (manifest.sample_count != count)
        throw ManifestError(path.string() + ": manifest sample_count differs from the file header");

    const std::size_t rec = record_size(manifest);
    if (count > (bytes.size() - kHeaderSize) / rec)
        throw TruncatedFileError(path.string() + ": file holds fewer records than its header declares");
    const std::size_t expected = kHeaderSize + count * rec + kTrailerSize;
    if (bytes.size() < expected)
        throw TruncatedFileError(path.string() + ": missing checksum trailer");
    if (bytes.size() > expected)
        throw FormatError(path.string() + ": unexpected bytes after the checksum trailer");

    Crc64 crc;
    crc.process_bytes(data, expected - kTrailerSize);
    ByteReader trailer(data + expected - kTrailerSize, kTrailerSize);
    const auto stored = trailer.uint<std::uint64_t>();
    if (crc.checksum() != stored)
        throw ChecksumError(path.string() + ": file checksum mismatch");
    if (manifest.checksum && *manifest.checksum != stored)
        throw ManifestError(path.string() + ": manifest checksum does not match the binary file");

    const Dims dims = dims_of(manifest);
    Dataset<Sample> out;
    out.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        const std::uint8_t *r = data + kHeaderSize + i * rec;
        boost::crc_32_type rcrc;
        rcrc.process_bytes(r, rec - 4);
        ByteReader tail(r + rec - 4, 4);
        if (rcrc.checksum() != tail.uint<std::uint32_t>())
            throw ChecksumError(path.string() + ": record " + std::to_string(i) + " checksum mismatch");
        ByteReader reader(r, rec - 4);
        decode(reader, out.samples[i], dims, i);
    }
    out.manifest = std::move(manifest);
    out.checksum = stored;
    return out;
}

std::uint64_t generate_dataset_file(const std::filesystem::path &path, const DatasetManifest &manifest, unsigned threads)
{
    manifest.validate();
    DatasetManifest m = manifest;
    m.checksum.reset();
    const Environment env(m);
    DatasetWriter writer(path, m);

    constexpr std::size_t kChunk = 4096;
    auto run = [&](auto make, auto tag) {
        using Sample = decltype(tag);
        std::vector<Sample> chunk;
        for (std::uint64_t start = 0; start < m.sample_count; start += kChunk)
        {
            const std::size_t len = static_cast<std::size_t>(std::min<std::uint64_t>(kChunk, m.sample_count - start));
            chunk.assign(len, Sample{});
            parallel_for(len, threads, [&](std::size_t i) { chunk[i] = make(m, env, m.source_index(start + i)); });
            for (const auto &s : chunk)
                writer.append(s);
        }
    };
    if (m.kind == DatasetKind::detection)
        run(make_detection_sample, DetectionSample{});
    else
        run(make_localization_sample, LocalizationSample{});
    return writer.finish();
}

template std::uint64_t write_dataset(const std::filesystem::path &, DatasetManifest, std::span<const DetectionSample>);
template std::uint64_t write_dataset(const std::filesystem::path &, DatasetManifest, std::span<const LocalizationSample>);
template Dataset<DetectionSample> read_dataset(const std::filesystem::path &);
template Dataset<LocalizationSample> read_dataset(const std::filesystem::path &);

} // namespace risfault
