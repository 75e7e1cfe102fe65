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

#include "risfault/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "risfault/error.hpp"
#include "risfault/parallel.hpp"
#include "risfault/rng.hpp"

namespace risfault
{

namespace
{

using nlohmann::json;

constexpr std::uint64_t kTrialDomain = 10;
constexpr std::uint64_t kTrialNoiseDomain = 11;

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_num(const std::string &s, const std::filesystem::path &path)
{
    char *end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw FormatError(path.string() + ": cannot parse number '" + s + "'");
    return v;
}

std::vector<std::string> split_csv(const std::string &line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    return out;
}

void write_file(const std::filesystem::path &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot create " + path.string());
    out << text;
    if (!out)
        throw IoError("failed writing " + path.string());
}

std::string read_file(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json(const std::filesystem::path &path)
{
    try
    {
        return json::parse(read_file(path));
    }
    catch (const json::exception &e)
    {
        throw FormatError(path.string() + ": malformed JSON: " + e.what());
    }
}

/// CSV with "# key=value" preamble lines followed by a header and rows.
struct CsvTable
{
    std::map<std::string, std::string> meta;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::filesystem::path &path)
{
    std::istringstream in(read_file(path));
    CsvTable t;
    std::string line;
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        if (line.front() == '#')
        {
            const auto eq = line.find('=');
            if (eq != std::string::npos)
                t.meta[line.substr(2, eq - 2)] = line.substr(eq + 1);
            continue;
        }
        if (t.header.empty())
        {
            t.header = split_csv(line);
            continue;
        }
        const auto cells = split_csv(line);
        if (cells.size() != t.header.size())
            throw FormatError(path.string() + ": row width differs from header");
        std::vector<double> row;
        for (const auto &c : cells)
            row.push_back(parse_num(c, path));
        t.rows.push_back(std::move(row));
    }
    return t;
}

void expect_header(const CsvTable &t, const std::vector<std::string> &header, const std::filesystem::path &path)
{
    if (t.header != header)
        throw FormatError(path.string() + ": unexpected CSV header");
}

const std::string &meta_at(const CsvTable &t, const std::string &key, const std::filesystem::path &path)
{
    const auto it = t.meta.find(key);
    if (it == t.meta.end())
        throw FormatError(path.string() + ": missing '# " + key + "=' line");
    return it->second;
}

void check_metric_version(int version, const std::filesystem::path &path)
{
    if (version != kMetricVersion)
        throw VersionMismatchError(path.string() + ": metric version " + std::to_string(version));
}

json report_json(const DetectionReport &r)
{
    json cdf = json::array();
    for (const auto &p : r.accuracy_cdf)
        cdf.push_back({{"accuracy", p.accuracy}, {"cumulative_probability", p.cumulative_probability}});
    return {{"scenario_accuracy", r.scenario_accuracy},
            {"elementwise_accuracy", r.elementwise_accuracy},
            {"trials", r.trials},
            {"cdf", cdf}};
}

DetectionReport report_from(const json &j)
{
    DetectionReport r;
    r.scenario_accuracy = j.at("scenario_accuracy").get<double>();
    r.elementwise_accuracy = j.at("elementwise_accuracy").get<double>();
    r.trials = j.at("trials").get<std::size_t>();
    for (const auto &p : j.at("cdf"))
        r.accuracy_cdf.push_back({p.at("accuracy").get<double>(), p.at("cumulative_probability").get<double>()});
    return r;
}

std::string task_name(PredictionTask t)
{
    switch (t)
    {
    case PredictionTask::element_detection:
        return "element_detection";
    case PredictionTask::sa_detection:
        return "sa_detection";
    case PredictionTask::localization:
        return "localization";
    }
    return {};
}

} // namespace

// -- metrics ---------------------------------------------------------------------------------

template <class Tag>
DetectionReport detection_accuracy(std::span<const StatusVector<Tag>> estimates, std::span<const StatusVector<Tag>> truths)
{
    if (estimates.size() != truths.size() || truths.empty())
        throw DimensionError("detection_accuracy: estimates and truths must have equal non-zero length");

    std::size_t exact = 0;
    std::size_t matching = 0;
    std::size_t total = 0;
    std::vector<double> per_trial;
    per_trial.reserve(truths.size());
    for (std::size_t t = 0; t < truths.size(); ++t)
    {
        const auto &e = estimates[t];
        const auto &g = truths[t];
        if (e.size() != g.size() || g.size() == 0)
            throw DimensionError("detection_accuracy: trial " + std::to_string(t) + " has mismatched lengths");
        std::size_t m = 0;
        for (std::size_t i = 0; i < g.size(); ++i)
            m += e[i] == g[i];
        exact += m == g.size();
        matching += m;
        total += g.size();
        per_trial.push_back(static_cast<double>(m) / static_cast<double>(g.size()));
    }

    DetectionReport r;
    r.trials = truths.size();
    r.scenario_accuracy = static_cast<double>(exact) / static_cast<double>(r.trials);
    r.elementwise_accuracy = static_cast<double>(matching) / static_cast<double>(total);
    std::sort(per_trial.begin(), per_trial.end());
    for (std::size_t i = 0; i < per_trial.size(); ++i)
        if (i + 1 == per_trial.size() || per_trial[i + 1] != per_trial[i])
            r.accuracy_cdf.push_back({per_trial[i], static_cast<double>(i + 1) / static_cast<double>(per_trial.size())});
    return r;
}

template DetectionReport detection_accuracy(std::span<const FaultStatusVector>, std::span<const FaultStatusVector>);
template DetectionReport detection_accuracy(std::span<const SaStatusVector>, std::span<const SaStatusVector>);

LocalizationReport localization_report(std::span<const Position3D> estimates, std::span<const Position3D> truths)
{
    LocalizationReport r;
    r.nmse = nmse(estimates, truths);
    r.trials = truths.size();
    return r;
}

// -- sweep ---------------------------------------------------------------------------------------

SweepConfig SweepConfig::desk(std::size_t ris_elements, std::size_t bs_antennas)
{
    auto layout = [](std::size_t n) {
        if (n == 0)
            throw InvalidGeometryError("array needs at least one element");
        std::size_t rows = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
        while (rows > 1 && n % rows != 0)
            --rows;
        return UpaGeometry::half_wavelength(rows, n / rows, 90e9);
    };
    return SweepConfig{layout(ris_elements), layout(bs_antennas)};
}

DetectionTrial make_detection_trial(const SweepConfig &config, std::uint64_t seed, std::uint64_t trial)
{
    Rng rng(derive_seed(seed, trial, kTrialDomain));
    const PathSet mu_ris =
        sample_path_set(rng, config.mu_ris_paths, LinkAnchor{config.mu_position, config.ris_position}, 1.0);
    const PathSet ris_bs =
        sample_path_set(rng, config.ris_bs_paths, LinkAnchor{config.ris_position, config.bs_position}, 1.0, true);
    const cvec g = mu_ris_channel(mu_ris, config.ris_geom);
    const cmat h = ris_bs_channel(ris_bs, config.bs_geom, config.ris_geom);
    const std::size_t n = config.ris_geom.size();
    auto truth = sample_fault_scenario(rng, n, config.max_faulty);

    cmat a = effective_bs_matrix(h, g, Pilot());
    auto phases = PhaseProfile::unity(n);
    cvec y = a * effective_profile(phases, truth).values();
    cvec healthy = a * phases.values();
    return {std::move(a), std::move(phases), std::move(truth), std::move(y), std::move(healthy)};
}

BsSignal observe_trial(const DetectionTrial &trial, double snr_db, std::uint64_t seed, std::uint64_t trial_index, std::uint64_t point)
{
    const NoiseSpec spec(snr_db);
    if (spec.snr_db() >= NoiseSpec::kMaxSnrDb)
        return {trial.y_noiseless};
    Rng rng(derive_seed(derive_seed(seed, trial_index, kTrialNoiseDomain), point));
    return {add_awgn_or_reference(trial.y_noiseless, trial.y_healthy, spec, rng)};
}

DetectionSolver greedy_solver(double margin)
{
    return [margin](const BsSignal &y, const cmat &a, const PhaseProfile &phases, double snr_db, std::size_t max_faulty) {
        return detect_faults_greedy(y, a, phases, max_faulty, greedy_tolerance(y, snr_db, margin));
    };
}

DetectionSolver exhaustive_solver()
{
    return [](const BsSignal &y, const cmat &a, const PhaseProfile &phases, double, std::size_t) {
        return detect_faults_exhaustive(y, a, phases);
    };
}

std::vector<SweepPoint> snr_sweep(const SweepConfig &config,
                                  std::span<const double> snr_points,
                                  const DetectionSolver &solver,
                                  std::size_t trials,
                                  std::uint64_t seed,
                                  unsigned threads)
{
    if (snr_points.empty())
        throw InvalidInputError("snr_sweep: no SNR points");
    if (trials == 0)
        throw InvalidInputError("snr_sweep: trials must be positive");

    std::vector<std::vector<FaultStatusVector>> estimates(snr_points.size(), std::vector<FaultStatusVector>(trials));
    std::vector<FaultStatusVector> truths(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        const auto trial = make_detection_trial(config, seed, t);
        for (std::size_t p = 0; p < snr_points.size(); ++p)
        {
            const BsSignal y = observe_trial(trial, snr_points[p], seed, t, p);
            estimates[p][t] = solver(y, trial.a, trial.phases, snr_points[p], config.max_faulty).estimated_statuses;
        }
        truths[t] = trial.truth;
    });

    std::vector<SweepPoint> out;
    for (std::size_t p = 0; p < snr_points.size(); ++p)
        out.push_back({snr_points[p],
                       detection_accuracy(std::span<const FaultStatusVector>(estimates[p]), std::span<const FaultStatusVector>(truths))});
    return out;
}

// -- report files -------------------------------------------------------------------------------

ResultFormat format_for(const std::filesystem::path &path)
{
    return path.extension() == ".json" ? ResultFormat::json : ResultFormat::csv;
}

void emit_results(const DetectionReport &report, const std::filesystem::path &path, ResultFormat format)
{
    if (format == ResultFormat::json)
    {
        json j = report_json(report);
        j["metric_version"] = kMetricVersion;
        j["type"] = "detection";
        write_file(path, j.dump(2) + "\n");
        return;
    }
    std::string s = "# metric_version=" + std::to_string(kMetricVersion) + "\n";
    s += "# scenario_accuracy=" + num(report.scenario_accuracy) + "\n";
    s += "# elementwise_accuracy=" + num(report.elementwise_accuracy) + "\n";
    s += "# trials=" + std::to_string(report.trials) + "\n";
    s += "accuracy,cumulative_probability\n";
    for (const auto &p : report.accuracy_cdf)
        s += num(p.accuracy) + "," + num(p.cumulative_probability) + "\n";
    write_file(path, s);
}

void emit_results(std::span<const SweepPoint> sweep, const std::filesystem::path &path, ResultFormat format)
{
    if (format == ResultFormat::json)
    {
        json points = json::array();
        for (const auto &p : sweep)
            points.push_back({{"snr_db", p.snr_db}, {"report", report_json(p.report)}});
        json j = {{"metric_version", kMetricVersion}, {"type", "detection_sweep"}, {"points", points}};
        write_file(path, j.dump(2) + "\n");
        return;
    }
    std::string s = "# metric_version=" + std::to_string(kMetricVersion) + "\n";
    s += "snr_db,scenario_accuracy,elementwise_accuracy,trials\n";
    for (const auto &p : sweep)
        s += num(p.snr_db) + "," + num(p.report.scenario_accuracy) + "," + num(p.report.elementwise_accuracy) + "," +
             std::to_string(p.report.trials) + "\n";
    write_file(path, s);
}

void emit_results(const LocalizationReport &report, const std::filesystem::path &path, ResultFormat format)
{
    if (format == ResultFormat::json)
    {
        json curve = json::array();
        for (const auto &p : report.curve)
            curve.push_back({{"x", p.x}, {"nmse", p.nmse}});
        json j = {{"metric_version", kMetricVersion},
                  {"type", "localization"},
                  {"nmse", report.nmse},
                  {"trials", report.trials},
                  {"curve_axis", report.curve_axis},
                  {"curve", curve}};
        write_file(path, j.dump(2) + "\n");
        return;
    }
    std::string s = "# metric_version=" + std::to_string(kMetricVersion) + "\n";
    s += "# nmse=" + num(report.nmse) + "\n";
    s += "# trials=" + std::to_string(report.trials) + "\n";
    s += report.curve_axis + ",nmse\n";
    for (const auto &p : report.curve)
        s += num(p.x) + "," + num(p.nmse) + "\n";
    write_file(path, s);
}

DetectionReport read_detection_report(const std::filesystem::path &path, ResultFormat format)
{
    if (format == ResultFormat::json)
    {
        const json j = parse_json(path);
        try
        {
            check_metric_version(j.at("metric_version").get<int>(), path);
            return report_from(j);
        }
        catch (const json::exception &e)
        {
            throw FormatError(path.string() + ": " + e.what());
        }
    }
    const CsvTable t = read_csv(path);
    check_metric_version(std::stoi(meta_at(t, "metric_version", path)), path);
    expect_header(t, {"accuracy", "cumulative_probability"}, path);
    DetectionReport r;
    r.scenario_accuracy = parse_num(meta_at(t, "scenario_accuracy", path), path);
    r.elementwise_accuracy = parse_num(meta_at(t, "elementwise_accuracy", path), path);
    r.trials = std::stoull(meta_at(t, "trials", path));
    for (const auto &row : t.rows)
        r.accuracy_cdf.push_back({row[0], row[1]});
    return r;
}

std::vector<SweepPoint> read_sweep(const std::filesystem::path &path, ResultFormat format)
{
    std::vector<SweepPoint> out;
    if (format == ResultFormat::json)
    {
        const json j = parse_json(path);
        try
        {
            check_metric_version(j.at("metric_version").get<int>(), path);
            for (const auto &p : j.at("points"))
                out.push_back({p.at("snr_db").get<double>(), report_from(p.at("report"))});
        }
        catch (const json::exception &e)
        {
            throw FormatError(path.string() + ": " + e.what());
        }
        return out;
    }
    const CsvTable t = read_csv(path);
    check_metric_version(std::stoi(meta_at(t, "metric_version", path)), path);
    expect_header(t, {"snr_db", "scenario_accuracy", "elementwise_accuracy", "trials"}, path);
    for (const auto &row : t.rows)
    {
        SweepPoint p{row[0], {}};
        p.report.scenario_accuracy = row[1];
        p.report.elementwise_accuracy = row[2];
        p.report.trials = static_cast<std::size_t>(row[3]);
        out.push_back(std::move(p));
    }
    return out;
}

LocalizationReport read_localization_report(const std::filesystem::path &path, ResultFormat format)
{
    LocalizationReport r;
    if (format == ResultFormat::json)
    {
        const json j = parse_json(path);
        try
        {
            check_metric_version(j.at("metric_version").get<int>(), path);
            r.nmse = j.at("nmse").get<double>();
            r.trials = j.at("trials").get<std::size_t>();
            r.curve_axis = j.at("curve_axis").get<std::string>();
            for (const auto &p : j.at("curve"))
                r.curve.push_back({p.at("x").get<double>(), p.at("nmse").get<double>()});
        }
        catch (const json::exception &e)
        {
            throw FormatError(path.string() + ": " + e.what());
        }
        return r;
    }
    const CsvTable t = read_csv(path);
    check_metric_version(std::stoi(meta_at(t, "metric_version", path)), path);
    if (t.header.size() != 2 || t.header[1] != "nmse")
        throw FormatError(path.string() + ": unexpected CSV header");
    r.curve_axis = t.header[0];
    r.nmse = parse_num(meta_at(t, "nmse", path), path);
    r.trials = std::stoull(meta_at(t, "trials", path));
    for (const auto &row : t.rows)
        r.curve.push_back({row[0], row[1]});
    return r;
}

// -- predictions --------------------------------------------------------------------------------

void write_results_file(const ResultsFile &results, const std::filesystem::path &path)
{
    json preds = json::array();
    if (results.task == PredictionTask::localization)
    {
        for (std::size_t i = 0; i < results.positions.size(); ++i)
        {
            const auto &p = results.positions[i];
            preds.push_back({{"record", i}, {"position", {p.x, p.y, p.z}}});
        }
    }
    else
    {
        for (std::size_t i = 0; i < results.statuses.size(); ++i)
            preds.push_back({{"record", i}, {"statuses", results.statuses[i]}});
    }
    json j = {{"metric_version", kMetricVersion},
              {"dataset_checksum", checksum_hex(results.dataset_checksum)},
              {"algorithm", results.algorithm},
              {"task", task_name(results.task)},
              {"predictions", preds}};
    write_file(path, j.dump() + "\n");
}

ResultsFile read_results_file(const std::filesystem::path &path)
{
    json j;
    try
    {
        j = json::parse(read_file(path));
    }
    catch (const json::exception &e)
    {
        throw SchemaError(path.string() + ": malformed JSON: " + e.what());
    }

    ResultsFile r;
    try
    {
        if (!j.is_object())
            throw SchemaError("results file must be a JSON object");
        if (j.at("metric_version").get<int>() != kMetricVersion)
            throw SchemaError("unsupported metric_version");
        r.dataset_checksum = parse_checksum_hex(j.at("dataset_checksum").get<std::string>());
        r.algorithm = j.at("algorithm").get<std::string>();
        const auto task = j.at("task").get<std::string>();
        if (task == "element_detection")
            r.task = PredictionTask::element_detection;
        else if (task == "sa_detection")
            r.task = PredictionTask::sa_detection;
        else if (task == "localization")
            r.task = PredictionTask::localization;
        else
            throw SchemaError("unknown task '" + task + "'");
        if (!j.at("predictions").is_array())
            throw SchemaError("predictions must be an array");
    }
    catch (const json::exception &e)
    {
        throw SchemaError(std::string("results header: ") + e.what());
    }
    catch (const InvalidInputError &e)
    {
        throw SchemaError(std::string("results header: ") + e.what());
    }

    const auto &preds = j.at("predictions");
    for (std::size_t i = 0; i < preds.size(); ++i)
    {
        const auto &p = preds[i];
        try
        {
            if (!p.is_object() || p.at("record").get<std::size_t>() != i)
                throw SchemaError("record field must equal the array position", i);
            if (r.task == PredictionTask::localization)
            {
                const auto &pos = p.at("position");
                if (!pos.is_array() || pos.size() != 3)
                    throw SchemaError("position must hold three numbers", i);
                const double x = pos[0].get<double>(), y = pos[1].get<double>(), z = pos[2].get<double>();
                if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
                    throw SchemaError("position must be finite", i);
                r.positions.push_back({x, y, z});
            }
            else
            {
                const auto &st = p.at("statuses");
                if (!st.is_array() || st.empty())
                    throw SchemaError("statuses must be a non-empty array", i);
                std::vector<std::uint8_t> s;
                for (const auto &v : st)
                {
                    if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1))
                        throw SchemaError("statuses must be 0 or 1", i);
                    s.push_back(static_cast<std::uint8_t>(v.get<int>()));
                }
                r.statuses.push_back(std::move(s));
            }
        }
        catch (const json::exception &e)
        {
            throw SchemaError(e.what(), i);
        }
    }
    return r;
}

namespace
{

ResultsFile load_for(const std::filesystem::path &path, std::uint64_t checksum, std::size_t records)
{
    ResultsFile r = read_results_file(path);
    if (r.dataset_checksum != checksum)
        throw ProvenanceError(path.string() + ": predictions were made for dataset " + checksum_hex(r.dataset_checksum) +
                              ", not " + checksum_hex(checksum));
    const std::size_t n = r.task == PredictionTask::localization ? r.positions.size() : r.statuses.size();
    if (n != records)
        throw SchemaError(path.string() + ": " + std::to_string(n) + " predictions for " + std::to_string(records) +
                          " dataset records");
    return r;
}

template <class Tag>
DetectionReport score_statuses(const ResultsFile &r, const std::vector<StatusVector<Tag>> &truths)
{
    std::vector<StatusVector<Tag>> est;
    est.reserve(r.statuses.size());
    for (std::size_t i = 0; i < r.statuses.size(); ++i)
    {
        if (r.statuses[i].size() != truths[i].size())
            throw SchemaError("expected " + std::to_string(truths[i].size()) + " statuses", i);
        est.emplace_back(r.statuses[i]);
    }
    return detection_accuracy(std::span<const StatusVector<Tag>>(est), std::span<const StatusVector<Tag>>(truths));
}

} // namespace

ImportedReport import_neural_results(const std::filesystem::path &path, const Dataset<DetectionSample> &dataset)
{
    const ResultsFile r = load_for(path, dataset.checksum, dataset.samples.size());
    ImportedReport out{r.algorithm, r.task, std::nullopt, std::nullopt};
    if (r.task == PredictionTask::element_detection)
    {
        std::vector<FaultStatusVector> truths;
        for (const auto &s : dataset.samples)
            truths.push_back(s.element_statuses);
        out.detection = score_statuses(r, truths);
    }
    else if (r.task == PredictionTask::sa_detection)
    {
        std::vector<SaStatusVector> truths;
        for (const auto &s : dataset.samples)
            truths.push_back(s.sa_statuses);
        out.detection = score_statuses(r, truths);
    }
    else
    {
        throw SchemaError("localization predictions need a localization dataset");
    }
    return out;
}

ImportedReport import_neural_results(const std::filesystem::path &path, const Dataset<LocalizationSample> &dataset)
{
    const ResultsFile r = load_for(path, dataset.checksum, dataset.samples.size());
    ImportedReport out{r.algorithm, r.task, std::nullopt, std::nullopt};
    if (r.task == PredictionTask::localization)
    {
        std::vector<Position3D> truths;
        for (const auto &s : dataset.samples)
            truths.push_back(s.mu_position);
        out.localization = localization_report(r.positions, truths);
    }
    else if (r.task == PredictionTask::element_detection)
    {
        std::vector<FaultStatusVector> truths;
        for (const auto &s : dataset.samples)
            truths.push_back(s.element_statuses);
        out.detection = score_statuses(r, truths);
    }
    else
    {
        const SaPartition partition = dataset.manifest.partition();
        std::vector<SaStatusVector> truths;
        for (const auto &s : dataset.samples)
            truths.push_back(sa_statuses(s.element_statuses, partition));
        out.detection = score_statuses(r, truths);
    }
    return out;
}

} // namespace risfault
