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

#include "risfault/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "risfault/dataset.hpp"
#include "risfault/error.hpp"
#include "risfault/estimators.hpp"
#include "risfault/evaluation.hpp"
#include "risfault/parallel.hpp"

namespace risfault
{

namespace
{

using nlohmann::json;
namespace fs = std::filesystem;

class UsageError : public std::runtime_error
{
    using std::runtime_error::runtime_error;
};

double parse_snr_value(const std::string &s)
{
    if (s == "inf" || s == "+inf")
        return std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double v = 0.0;
    try
    {
        v = std::stod(s, &used);
    }
    catch (const std::exception &)
    {
        throw InvalidInputError("bad SNR value '" + s + "'");
    }
    if (used != s.size() || std::isnan(v))
        throw InvalidInputError("bad SNR value '" + s + "'");
    return v;
}

/// Everything a run needs to be repeated, written beside its outputs.
struct RunRecord
{
    std::string subcommand;
    std::vector<std::string> argv;
    json options = json::object();
    json inputs = json::array();
    json outputs = json::array();

    void input(const fs::path &p, std::optional<std::uint64_t> checksum = std::nullopt)
    {
        json e = {{"path", p.string()}};
        if (checksum)
            e["checksum"] = checksum_hex(*checksum);
        inputs.push_back(e);
    }
    void output(const fs::path &p, std::optional<std::uint64_t> checksum = std::nullopt)
    {
        json e = {{"path", p.string()}};
        if (checksum)
            e["checksum"] = checksum_hex(*checksum);
        outputs.push_back(e);
    }
    void write(const fs::path &path) const
    {
        json j = {{"tool", "risfaultsim"},
                  {"format_version", kFormatVersion},
                  {"metric_version", kMetricVersion},
                  {"subcommand", subcommand},
                  {"argv", argv},
                  {"options", options},
                  {"inputs", inputs},
                  {"outputs", outputs}};
        std::ofstream f(path, std::ios::trunc);
        if (!f)
            throw IoError("cannot create " + path.string());
        f << j.dump(2) << "\n";
    }
};

fs::path with_suffix(const fs::path &prefix, const std::string &suffix)
{
    return fs::path(prefix.string() + suffix);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t> &seed, std::ostream &out)
{
    if (seed)
        return *seed;
    std::random_device rd;
    const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    out << "seed " << s << " (drawn from entropy)\n";
    return s;
}

DetectionSolver make_solver(const std::string &alg, double margin)
{
    if (alg == "greedy")
        return greedy_solver(margin);
    if (alg == "exhaustive")
        return exhaustive_solver();
    throw UsageError("unknown algorithm '" + alg + "'");
}

void print_detection(std::ostream &out, const DetectionReport &r)
{
    out << "trials " << r.trials << "  scenario accuracy " << r.scenario_accuracy << "  elementwise accuracy "
        << r.elementwise_accuracy << "\n";
}

// -- gen --------------------------------------------------------------------------------------

struct GenOptions
{
    std::string kind;
    std::optional<std::uint64_t> count;
    std::optional<std::size_t> max_faulty;
    std::optional<std::uint64_t> seed;
    std::string snr = "30";
    bool noiseless = false;
    std::string channels = "fixed";
    std::optional<std::size_t> isolate_sa;
    std::optional<std::string> out;
};

void cmd_gen(const GenOptions &o, unsigned threads, RunRecord &rec, std::ostream &out)
{
    const DatasetKind kind = o.kind == "detect" ? DatasetKind::detection : DatasetKind::localization;
    const std::uint64_t count = o.count.value_or(kind == DatasetKind::detection ? 20000 : 60000);
    const std::uint64_t seed = resolve_seed(o.seed, out);
    auto m = DatasetManifest::defaults(kind, count, seed);
    if (o.max_faulty)
        m.max_faulty = *o.max_faulty;
    m.snr_db = parse_snr_list(o.snr);
    m.noiseless = o.noiseless;
    m.channel_mode = o.channels == "redraw" ? ChannelMode::redraw : ChannelMode::fixed;
    m.isolated_sa = o.isolate_sa;
    try
    {
        m.validate();
    }
    catch (const ManifestError &e)
    {
        throw UsageError(e.what());
    }

    const fs::path path = o.out.value_or(kind == DatasetKind::detection ? "detect.bin" : "loc.bin");
    const std::uint64_t checksum = generate_dataset_file(path, m, threads);

    rec.options = {{"kind", to_string(kind)}, {"count", count}, {"seed", seed}, {"max_faulty", m.max_faulty},
                   {"snr_db", m.snr_db}, {"noiseless", m.noiseless}, {"channels", o.channels}};
    if (m.isolated_sa)
        rec.options["isolate_sa"] = *m.isolated_sa;
    rec.output(path, checksum);
    rec.output(manifest_path_for(path));

    out << to_string(kind) << " dataset: " << count << " records, seed " << seed << "\n"
        << "  RIS " << m.ris.n_elev << "x" << m.ris.n_azim << ", BS " << m.bs.n_elev << "x" << m.bs.n_azim << ", "
        << m.carrier_frequency_hz / 1e9 << " GHz, P=" << m.mu_ris_paths << " J=" << m.ris_bs_paths
        << ", at most " << m.max_faulty << " faults, K=" << m.sa_count << "\n"
        << "  " << path.string() << "  checksum " << checksum_hex(checksum) << "\n"
        << "  " << manifest_path_for(path).string() << "\n";
}

// -- split ------------------------------------------------------------------------------------

template <class Sample>
void split_file(const fs::path &in, double ratio, const fs::path &train, const fs::path &test, RunRecord &rec, std::ostream &out)
{
    const auto ds = read_dataset<Sample>(in);
    rec.input(in, ds.checksum);
    const auto [a, b] = split(ds, ratio);
    const auto ca = write_dataset<Sample>(train, a.manifest, a.samples);
    const auto cb = write_dataset<Sample>(test, b.manifest, b.samples);
    rec.output(train, ca);
    rec.output(test, cb);
    out << "train " << a.samples.size() << " -> " << train.string() << "  checksum " << checksum_hex(ca) << "\n"
        << "test  " << b.samples.size() << " -> " << test.string() << "  checksum " << checksum_hex(cb) << "\n";
}

// -- detect -------------------------------------------------------------------------------------

template <class Sample>
DetectionReport detect_on_dataset(const Dataset<Sample> &ds, const DetectionSolver &solver, unsigned threads)
{
    if (ds.manifest.isolated_sa)
        throw ManifestError("classical detection needs the full panel; this dataset isolates a sub-array");
    const Environment env(ds.manifest);
    const Pilot pilot = ds.manifest.pilot_symbol();
    const auto phases = PhaseProfile::unity(ds.manifest.ris_geometry().size());
    std::vector<FaultStatusVector> est(ds.samples.size());
    std::vector<FaultStatusVector> truth(ds.samples.size());
    parallel_for(ds.samples.size(), threads, [&](std::size_t i) {
        const auto &s = ds.samples[i];
        const auto ch = env.channels(ds.manifest.source_index(i), s.mu_position);
        const cmat a = effective_bs_matrix(ch.h_rb, ch.g_ur, pilot);
        est[i] = solver(s.bs_signal, a, phases, s.snr_db, ds.manifest.max_faulty).estimated_statuses;
        truth[i] = s.element_statuses;
    });
    return detection_accuracy(std::span<const FaultStatusVector>(est), std::span<const FaultStatusVector>(truth));
}

struct DetectOptions
{
    std::string alg = "greedy";
    std::optional<std::string> dataset;
    std::size_t n = 9;
    std::size_t m = 16;
    std::size_t trials = 1000;
    std::size_t max_faulty = 2;
    std::string snr = "30";
    double margin = kGreedyToleranceMargin;
    std::optional<std::uint64_t> seed;
    std::string out = "detect_report";
};

void cmd_detect(const DetectOptions &o, unsigned threads, RunRecord &rec, std::ostream &out)
{
    const DetectionSolver solver = make_solver(o.alg, o.margin);
    rec.options = {{"alg", o.alg}, {"margin", o.margin}};
    DetectionReport report;
    if (o.dataset)
    {
        const fs::path path = *o.dataset;
        const auto kind = read_manifest(path).kind;
        if (kind == DatasetKind::detection)
        {
            const auto ds = read_dataset<DetectionSample>(path);
            rec.input(path, ds.checksum);
            report = detect_on_dataset(ds, solver, threads);
        }
        else
        {
            const auto ds = read_dataset<LocalizationSample>(path);
            rec.input(path, ds.checksum);
            report = detect_on_dataset(ds, solver, threads);
        }
    }
    else
    {
        const auto snr = parse_snr_list(o.snr);
        if (snr.size() != 1)
            throw UsageError("detect takes a single --snr value; use sweep for several");
        if (o.alg == "exhaustive" && o.n > kMaxExhaustiveElements)
            throw UsageError("exhaustive search is limited to --n <= " + std::to_string(kMaxExhaustiveElements));
        const std::uint64_t seed = resolve_seed(o.seed, out);
        auto cfg = SweepConfig::desk(o.n, o.m);
        cfg.max_faulty = o.max_faulty;
        report = snr_sweep(cfg, snr, solver, o.trials, seed, threads).front().report;
        rec.options.update({{"n", o.n}, {"m", o.m}, {"trials", o.trials}, {"max_faulty", o.max_faulty},
                            {"snr_db", snr}, {"seed", seed}});
    }
    const fs::path j = with_suffix(o.out, ".json"), c = with_suffix(o.out, ".csv");
    emit_results(report, j, ResultFormat::json);
    emit_results(report, c, ResultFormat::csv);
    rec.output(j);
    rec.output(c);
    print_detection(out, report);
}

// -- localize -----------------------------------------------------------------------------------

struct LocalizeOptions
{
    std::string db;
    std::string query;
    std::size_t k = 1;
    std::string fingerprint = "ris";
    std::string out = "localize_report";
};

void cmd_localize(const LocalizeOptions &o, unsigned threads, RunRecord &rec, std::ostream &out)
{
    const auto train = read_dataset<LocalizationSample>(o.db);
    const auto test = read_dataset<LocalizationSample>(o.query);
    rec.input(o.db, train.checksum);
    rec.input(o.query, test.checksum);
    if (o.k == 0 || o.k > train.samples.size())
        throw UsageError("--k must lie in [1, " + std::to_string(train.samples.size()) + "]");
    const FingerprintKind kind = o.fingerprint == "bs" ? FingerprintKind::bs : FingerprintKind::ris;
    const auto db = build_fingerprint_db(train.samples, kind);

    std::vector<Position3D> est(test.samples.size());
    parallel_for(test.samples.size(), threads, [&](std::size_t i) {
        est[i] = fingerprint_localize_nn(db, fingerprint_of(test.samples[i], kind), o.k).estimate;
    });
    std::vector<Position3D> truth;
    for (const auto &s : test.samples)
        truth.push_back(s.mu_position);
    LocalizationReport report = localization_report(est, truth);

    // NMSE per SNR level; noiseless rows are listed at the SNR cap.
    std::map<double, std::pair<std::vector<Position3D>, std::vector<Position3D>>> by_snr;
    for (std::size_t i = 0; i < truth.size(); ++i)
    {
        auto &slot = by_snr[std::min(test.samples[i].snr_db, NoiseSpec::kMaxSnrDb)];
        slot.first.push_back(est[i]);
        slot.second.push_back(truth[i]);
    }
    for (const auto &[snr, pair] : by_snr)
    {
        try
        {
            report.curve.push_back({snr, nmse(pair.first, pair.second)});
        }
        catch (const DegenerateNormalizationError &)
        {
        }
    }

    const fs::path j = with_suffix(o.out, ".json"), c = with_suffix(o.out, ".csv");
    emit_results(report, j, ResultFormat::json);
    emit_results(report, c, ResultFormat::csv);
    rec.options = {{"k", o.k}, {"fingerprint", o.fingerprint}};
    rec.output(j);
    rec.output(c);
    out << "queries " << report.trials << "  fingerprint " << o.fingerprint << "  k " << o.k << "  NMSE " << report.nmse
        << "\n";
}

// -- sweep --------------------------------------------------------------------------------------

struct SweepOptions
{
    std::string snr = "0:30:5";
    std::string alg = "greedy";
    std::size_t trials = 500;
    std::size_t n = 16;
    std::size_t m = 16;
    std::size_t max_faulty = 2;
    double margin = kGreedyToleranceMargin;
    std::optional<std::uint64_t> seed;
    std::string out = "sweep.csv";
};

void cmd_sweep(const SweepOptions &o, unsigned threads, RunRecord &rec, std::ostream &out)
{
    const DetectionSolver solver = make_solver(o.alg, o.margin);
    const auto snr = parse_snr_list(o.snr);
    if (o.alg == "exhaustive" && o.n > kMaxExhaustiveElements)
        throw UsageError("exhaustive search is limited to --n <= " + std::to_string(kMaxExhaustiveElements));
    const std::uint64_t seed = resolve_seed(o.seed, out);
    auto cfg = SweepConfig::desk(o.n, o.m);
    cfg.max_faulty = o.max_faulty;
    const auto sweep = snr_sweep(cfg, snr, solver, o.trials, seed, threads);
    emit_results(sweep, o.out, format_for(o.out));
    rec.options = {{"alg", o.alg}, {"margin", o.margin}, {"n", o.n}, {"m", o.m}, {"trials", o.trials},
                   {"max_faulty", o.max_faulty}, {"snr_db", snr}, {"seed", seed}};
    rec.output(o.out);
    for (const auto &p : sweep)
        out << "snr " << p.snr_db << " dB  scenario " << p.report.scenario_accuracy << "  elementwise "
            << p.report.elementwise_accuracy << "\n";
}

// -- score --------------------------------------------------------------------------------------

struct ScoreOptions
{
    std::string dataset;
    std::string results;
    std::string out = "score_report";
};

void cmd_score(const ScoreOptions &o, RunRecord &rec, std::ostream &out)
{
    ImportedReport r;
    if (read_manifest(o.dataset).kind == DatasetKind::detection)
    {
        const auto ds = read_dataset<DetectionSample>(o.dataset);
        rec.input(o.dataset, ds.checksum);
        r = import_neural_results(o.results, ds);
    }
    else
    {
        const auto ds = read_dataset<LocalizationSample>(o.dataset);
        rec.input(o.dataset, ds.checksum);
        r = import_neural_results(o.results, ds);
    }
    rec.input(o.results);
    rec.options = {{"algorithm", r.algorithm}};
    const fs::path j = with_suffix(o.out, ".json"), c = with_suffix(o.out, ".csv");
    if (r.detection)
    {
        emit_results(*r.detection, j, ResultFormat::json);
        emit_results(*r.detection, c, ResultFormat::csv);
        out << r.algorithm << ": ";
        print_detection(out, *r.detection);
    }
    else
    {
        emit_results(*r.localization, j, ResultFormat::json);
        emit_results(*r.localization, c, ResultFormat::csv);
        out << r.algorithm << ": queries " << r.localization->trials << "  NMSE " << r.localization->nmse << "\n";
    }
    rec.output(j);
    rec.output(c);
}

} // namespace

std::vector<double> parse_snr_list(const std::string &text)
{
    if (text.empty())
        throw InvalidInputError("empty SNR list");
    std::vector<double> out;
    if (text.find(':') != std::string::npos)
    {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string part;
        while (std::getline(ss, part, ':'))
            parts.push_back(part);
        if (parts.size() != 3)
            throw InvalidInputError("SNR range must read start:stop:step");
        const double a = parse_snr_value(parts[0]), b = parse_snr_value(parts[1]), s = parse_snr_value(parts[2]);
        if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(s) || s <= 0.0 || b < a)
            throw InvalidInputError("bad SNR range '" + text + "'");
        const auto steps = static_cast<std::size_t>(std::floor((b - a) / s + 1e-9));
        if (steps > 100000)
            throw InvalidInputError("SNR range has too many points");
        for (std::size_t i = 0; i <= steps; ++i)
            out.push_back(a + static_cast<double>(i) * s);
        return out;
    }
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ','))
        out.push_back(parse_snr_value(part));
    if (out.empty())
        throw InvalidInputError("empty SNR list");
    return out;
}

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    CLI::App app{"risfaultsim: RIS fault detection and fingerprint localization testbed"};
    app.require_subcommand(1);
    app.fallthrough();
    std::optional<unsigned> threads_flag;
    app.add_option("--threads", threads_flag, "worker threads (default: RISFAULTSIM_THREADS, then all cores)")
        ->check(CLI::PositiveNumber);

    GenOptions gen;
    auto *g = app.add_subcommand("gen", "generate a detection or localization dataset");
    g->add_option("kind", gen.kind, "detect | loc")->required()->check(CLI::IsMember({"detect", "loc"}));
    g->add_option("--count", gen.count, "records (default 20000 detect, 60000 loc)");
    g->add_option("--max-faulty", gen.max_faulty, "largest number of faulty elements per record");
    g->add_option("--seed", gen.seed, "master seed (drawn from entropy when omitted)");
    g->add_option("--snr", gen.snr, "SNR set in dB, e.g. 30 or 0:30:5 or 10,20");
    g->add_flag("--noiseless", gen.noiseless, "store noise-free signals");
    g->add_option("--channels", gen.channels, "fixed | redraw")->check(CLI::IsMember({"fixed", "redraw"}));
    g->add_option("--isolate-sa", gen.isolate_sa, "switch off every element outside this sub-array");
    g->add_option("--out", gen.out, "binary output path; the manifest goes beside it as .json");

    std::string split_in, split_train, split_test;
    double split_ratio = 0.8;
    auto *sp = app.add_subcommand("split", "shuffle a dataset into train and test files");
    sp->add_option("--dataset", split_in)->required();
    sp->add_option("--ratio", split_ratio, "train fraction")->check(CLI::Range(0.0, 1.0));
    sp->add_option("--train", split_train, "default <stem>_train.bin");
    sp->add_option("--test", split_test, "default <stem>_test.bin");

    DetectOptions det;
    auto *d = app.add_subcommand("detect", "classical fault detection on a dataset or synthetic trials");
    d->add_option("--alg", det.alg, "greedy | exhaustive");
    d->add_option("--dataset", det.dataset, "dataset file; omit for synthetic trials");
    d->add_option("--n", det.n, "synthetic: RIS elements");
    d->add_option("--m", det.m, "synthetic: BS antennas");
    d->add_option("--trials", det.trials, "synthetic: trial count");
    d->add_option("--max-faulty", det.max_faulty, "synthetic: largest fault count");
    d->add_option("--snr", det.snr, "synthetic: SNR in dB, or inf");
    d->add_option("--margin", det.margin, "greedy stopping margin over the noise norm");
    d->add_option("--seed", det.seed);
    d->add_option("--out", det.out, "output prefix; writes .json, .csv and .run.json");

    LocalizeOptions loc;
    auto *l = app.add_subcommand("localize", "k-NN fingerprint localization");
    l->add_option("--db", loc.db, "fingerprint database dataset")->required();
    l->add_option("--query", loc.query, "query dataset")->required();
    l->add_option("--k", loc.k, "neighbours averaged");
    l->add_option("--fingerprint", loc.fingerprint, "bs | ris")->check(CLI::IsMember({"bs", "ris"}));
    l->add_option("--out", loc.out, "output prefix");

    SweepOptions sw;
    auto *s = app.add_subcommand("sweep", "detection accuracy against SNR on synthetic trials");
    s->add_option("--snr", sw.snr, "start:stop:step (inclusive) or a comma-separated list");
    s->add_option("--alg", sw.alg, "greedy | exhaustive");
    s->add_option("--trials", sw.trials);
    s->add_option("--n", sw.n, "RIS elements");
    s->add_option("--m", sw.m, "BS antennas");
    s->add_option("--max-faulty", sw.max_faulty);
    s->add_option("--margin", sw.margin);
    s->add_option("--seed", sw.seed);
    s->add_option("--out", sw.out, "CSV, or JSON when the name ends in .json");

    ScoreOptions sc;
    auto *r = app.add_subcommand("score", "score an external predictions file against a dataset");
    r->add_option("--dataset", sc.dataset)->required();
    r->add_option("--results", sc.results)->required();
    r->add_option("--out", sc.out, "output prefix");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    RunRecord rec;
    for (int i = 0; i < argc; ++i)
        rec.argv.emplace_back(argv[i]);
    try
    {
        const unsigned threads = resolve_thread_count(threads_flag);
        fs::path record_path;
        if (g->parsed())
        {
            rec.subcommand = "gen";
            cmd_gen(gen, threads, rec, out);
            record_path = fs::path(rec.outputs.front()["path"].get<std::string>()).replace_extension(".run.json");
        }
        else if (sp->parsed())
        {
            rec.subcommand = "split";
            const fs::path in = split_in;
            const fs::path stem = in.parent_path() / in.stem();
            const fs::path train = split_train.empty() ? with_suffix(stem, "_train.bin") : fs::path(split_train);
            const fs::path test = split_test.empty() ? with_suffix(stem, "_test.bin") : fs::path(split_test);
            rec.options = {{"ratio", split_ratio}};
            if (read_manifest(in).kind == DatasetKind::detection)
                split_file<DetectionSample>(in, split_ratio, train, test, rec, out);
            else
                split_file<LocalizationSample>(in, split_ratio, train, test, rec, out);
            record_path = with_suffix(stem, "_split.run.json");
        }
        else if (d->parsed())
        {
            rec.subcommand = "detect";
            cmd_detect(det, threads, rec, out);
            record_path = with_suffix(det.out, ".run.json");
        }
        else if (l->parsed())
        {
            rec.subcommand = "localize";
            cmd_localize(loc, threads, rec, out);
            record_path = with_suffix(loc.out, ".run.json");
        }
        else if (s->parsed())
        {
            rec.subcommand = "sweep";
            cmd_sweep(sw, threads, rec, out);
            record_path = fs::path(sw.out).replace_extension(".run.json");
        }
        else
        {
            rec.subcommand = "score";
            cmd_score(sc, rec, out);
            record_path = with_suffix(sc.out, ".run.json");
        }
        rec.options["threads"] = threads;
        rec.write(record_path);
        return kExitOk;
    }
    catch (const UsageError &e)
    {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    catch (const InvalidInputError &e)
    {
        // bad flag values surface here before any data is touched
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    catch (const Error &e)
    {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
    catch (const std::exception &e)
    {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
}

} // namespace risfault
