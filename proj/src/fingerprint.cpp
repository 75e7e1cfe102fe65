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

#include <algorithm>
#include <numeric>

#include "risfault/error.hpp"
#include "risfault/estimators.hpp"

namespace risfault
{

FingerprintDatabase::FingerprintDatabase(FingerprintKind kind, std::vector<FingerprintEntry> entries)
    : kind_(kind), entries_(std::move(entries))
{
    if (entries_.empty())
        throw InvalidInputError("FingerprintDatabase: no entries");
    const auto len = entries_.front().fingerprint.size();
    for (const auto &e : entries_)
        if (e.fingerprint.size() != len)
            throw DimensionError("FingerprintDatabase: fingerprints of mixed length");
}

const cvec &fingerprint_of(const LocalizationSample &sample, FingerprintKind kind)
{
    return kind == FingerprintKind::bs ? sample.bs_signal.samples : sample.ris_signal_complete.samples;
}

FingerprintDatabase build_fingerprint_db(std::span<const LocalizationSample> samples, FingerprintKind kind)
{
    std::vector<FingerprintEntry> entries;
    entries.reserve(samples.size());
    for (const auto &s : samples)
        entries.push_back({fingerprint_of(s, kind), s.mu_position});
    return FingerprintDatabase(kind, std::move(entries));
}

std::vector<std::size_t> nearest_entries(const FingerprintDatabase &db, const cvec &query, std::size_t k)
{
    if (static_cast<std::size_t>(query.size()) != db.fingerprint_length())
        throw DimensionError("fingerprint query length does not match the database");
    if (k == 0 || k > db.size())
        throw InvalidInputError("k must lie in [1, database size]");

    std::vector<double> dist(db.size());
    for (std::size_t i = 0; i < db.size(); ++i)
        dist[i] = (db.entries()[i].fingerprint - query).squaredNorm();

    std::vector<std::size_t> idx(db.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), [&](std::size_t a, std::size_t b) {
        return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
    });
    idx.resize(k);
    return idx;
}

LocalizationResult fingerprint_localize_nn(const FingerprintDatabase &db, const cvec &query, std::size_t k)
{
    const auto idx = nearest_entries(db, query, k);
    double x = 0.0, y = 0.0, z = 0.0;
    for (auto i : idx)
    {
        const auto &p = db.entries()[i].position;
        x += p.x;
        y += p.y;
        z += p.z;
    }
    const auto kk = static_cast<double>(k);
    return {Position3D{x / kk, y / kk, z / kk}};
}

double nmse(std::span<const Position3D> estimates, std::span<const Position3D> truths)
{
    if (estimates.size() != truths.size() || truths.empty())
        throw DimensionError("nmse: estimates and truths must have equal non-zero length");
    if (std::all_of(truths.begin(), truths.end(), [&](const Position3D &p) { return p == truths.front(); }))
        throw DegenerateNormalizationError("nmse: all true positions coincide");

    double mx = 0.0, my = 0.0, mz = 0.0;
    for (const auto &p : truths)
    {
        mx += p.x;
        my += p.y;
        mz += p.z;
    }
    const auto n = static_cast<double>(truths.size());
    mx /= n;
    my /= n;
    mz /= n;

    double err = 0.0, spread = 0.0;
    for (std::size_t i = 0; i < truths.size(); ++i)
    {
        const auto &t = truths[i];
        const auto &e = estimates[i];
        err += (e.x - t.x) * (e.x - t.x) + (e.y - t.y) * (e.y - t.y) + (e.z - t.z) * (e.z - t.z);
        spread += (t.x - mx) * (t.x - mx) + (t.y - my) * (t.y - my) + (t.z - mz) * (t.z - mz);
    }
    if (!(spread > 0.0))
        throw DegenerateNormalizationError("nmse: all true positions coincide");
    return err / spread;
}

} // namespace risfault
