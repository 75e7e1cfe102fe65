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

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "oracles.hpp"
#include "risfault/cli.hpp"
#include "risfault/dataset.hpp"
#include "risfault/error.hpp"
#include "risfault/evaluation.hpp"

using namespace risfault;
namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

struct Run
{
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    args.insert(args.begin(), "risfaultsim");
    std::vector<const char *> argv;
    for (const auto &a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

json load(const fs::path &p)
{
    std::ifstream in(p);
    return json::parse(in);
}

std::string s(const fs::path &p)
{
    return p.string();
}

} // namespace

TEST_CASE("SNR list syntax")
{
    CHECK(parse_snr_list("0:30:5") == std::vector<double>{0, 5, 10, 15, 20, 25, 30});
    CHECK(parse_snr_list("0:10:4") == std::vector<double>{0, 4, 8});
    CHECK(parse_snr_list("30") == std::vector<double>{30});
    CHECK(parse_snr_list("-5,7.5") == std::vector<double>{-5, 7.5});
    CHECK(std::isinf(parse_snr_list("inf")[0]));
    CHECK_THROWS_AS(parse_snr_list("30:0:5"), InvalidInputError);
    CHECK_THROWS_AS(parse_snr_list("0:30:0"), InvalidInputError);
    CHECK_THROWS_AS(parse_snr_list("0:30"), InvalidInputError);
    CHECK_THROWS_AS(parse_snr_list("abc"), InvalidInputError);
    CHECK_THROWS_AS(parse_snr_list(""), InvalidInputError);
}

TEST_CASE("usage errors exit with 2")
{
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({"detect", "--alg", "simplex"}).code == kExitUsage);
    CHECK(run({"sweep", "--snr", "30:0:5"}).code == kExitUsage);
    CHECK(run({"gen", "detect", "--channels", "sometimes"}).code == kExitUsage);
    CHECK(run({"gen", "detect", "--max-faulty", "90", "--count", "5"}).code == kExitUsage);
    CHECK(run({"detect", "--alg", "exhaustive", "--n", "30"}).code == kExitUsage);
    CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("gen is reproducible and records its run")
{
    oracle::TempDir dir;
    const auto a = run({"gen", "detect", "--count", "200", "--max-faulty", "15", "--seed", "7", "--out", s(dir / "a.bin"),
                        "--threads", "1"});
    REQUIRE(a.code == kExitOk);
    const auto b = run({"gen", "detect", "--count", "200", "--max-faulty", "15", "--seed", "7", "--out", s(dir / "b.bin"),
                        "--threads", "3"});
    REQUIRE(b.code == kExitOk);
    const auto ra = load(dir / "a.run.json");
    const auto rb = load(dir / "b.run.json");
    CHECK(ra["outputs"][0]["checksum"] == rb["outputs"][0]["checksum"]);
    CHECK(ra["options"]["seed"] == 7);
    CHECK(a.out.find(ra["outputs"][0]["checksum"].get<std::string>()) != std::string::npos);

    const auto m = read_manifest(dir / "a.bin");
    CHECK(m.max_faulty == 15);
    CHECK(m.sa_count == 9);
    CHECK(m.sample_count == 200);
    CHECK(m.ris.n_elev * m.ris.n_azim == 81);

    // no seed: one is drawn, printed and recorded, and reproduces the file
    const auto c = run({"gen", "loc", "--count", "30", "--out", s(dir / "c.bin")});
    REQUIRE(c.code == kExitOk);
    CHECK(c.out.find("drawn from entropy") != std::string::npos);
    const auto rc = load(dir / "c.run.json");
    const auto seed = rc["options"]["seed"].get<std::uint64_t>();
    REQUIRE(run({"gen", "loc", "--count", "30", "--seed", std::to_string(seed), "--out", s(dir / "d.bin")}).code == kExitOk);
    CHECK(load(dir / "d.run.json")["outputs"][0]["checksum"] == rc["outputs"][0]["checksum"]);
    CHECK(read_manifest(dir / "d.bin").kind == DatasetKind::localization);
}

TEST_CASE("synthetic exhaustive detection matches the library oracle")
{
    oracle::TempDir dir;
    const auto r = run({"detect", "--alg", "exhaustive", "--n", "10", "--m", "16", "--trials", "60", "--snr", "20", "--seed",
                        "5", "--out", s(dir / "ex")});
    REQUIRE(r.code == kExitOk);
    const auto report = read_detection_report(dir / "ex.json", ResultFormat::json);
    const auto csv = read_detection_report(dir / "ex.csv", ResultFormat::csv);

    auto cfg = SweepConfig::desk(10, 16);
    cfg.max_faulty = 2;
    const std::vector<double> snr{20.0};
    const auto ref = snr_sweep(cfg, snr, exhaustive_solver(), 60, 5, 1)[0].report;
    CHECK(report.scenario_accuracy == ref.scenario_accuracy);
    CHECK(report.elementwise_accuracy == ref.elementwise_accuracy);
    CHECK(csv.scenario_accuracy == ref.scenario_accuracy);
    CHECK(fs::exists(dir / "ex.run.json"));
}

TEST_CASE("dataset pipeline: detect, split, localize, score")
{
    oracle::TempDir dir;
    REQUIRE(run({"gen", "detect", "--count", "100", "--seed", "3", "--out", s(dir / "d.bin")}).code == kExitOk);
    const auto det = run({"detect", "--alg", "greedy", "--dataset", s(dir / "d.bin"), "--out", s(dir / "dr")});
    REQUIRE(det.code == kExitOk);
    CHECK(fs::exists(dir / "dr.json"));
    CHECK(fs::exists(dir / "dr.csv"));
    CHECK(read_detection_report(dir / "dr.json", ResultFormat::json).trials == 100);

    REQUIRE(run({"gen", "loc", "--count", "600", "--seed", "4", "--noiseless", "--out", s(dir / "l.bin")}).code == kExitOk);
    REQUIRE(run({"split", "--dataset", s(dir / "l.bin")}).code == kExitOk);
    CHECK(read_manifest(dir / "l_train.bin").sample_count == 480);
    CHECK(read_manifest(dir / "l_test.bin").sample_count == 120);

    double nmse_of[2];
    int i = 0;
    for (const char *kind : {"bs", "ris"})
    {
        const auto r = run({"localize", "--db", s(dir / "l_train.bin"), "--query", s(dir / "l_test.bin"), "--k", "1",
                            "--fingerprint", kind, "--out", s(dir / (std::string("loc_") + kind))});
        REQUIRE(r.code == kExitOk);
        nmse_of[i++] = read_localization_report(dir / (std::string("loc_") + kind + ".json"), ResultFormat::json).nmse;
    }
    MESSAGE("BS fingerprints " << nmse_of[0] << ", RIS fingerprints " << nmse_of[1]);
    CHECK(nmse_of[1] <= nmse_of[0]);

    CHECK(run({"localize", "--db", s(dir / "l_train.bin"), "--query", s(dir / "l_test.bin"), "--k", "481"}).code ==
          kExitUsage);

    // score a perfect localization predictions file
    const auto test = read_dataset<LocalizationSample>(dir / "l_test.bin");
    ResultsFile pred;
    pred.dataset_checksum = test.checksum;
    pred.algorithm = "oracle";
    pred.task = PredictionTask::localization;
    for (const auto &smp : test.samples)
        pred.positions.push_back(smp.mu_position);
    write_results_file(pred, dir / "pred.json");
    const auto sc = run({"score", "--dataset", s(dir / "l_test.bin"), "--results", s(dir / "pred.json"), "--out",
                         s(dir / "score")});
    REQUIRE(sc.code == kExitOk);
    CHECK(read_localization_report(dir / "score.json", ResultFormat::json).nmse == 0.0);

    // predictions for another dataset are a data error
    CHECK(run({"score", "--dataset", s(dir / "l_train.bin"), "--results", s(dir / "pred.json"), "--out",
               s(dir / "score2")})
              .code == kExitData);
}

TEST_CASE("data errors exit with 3")
{
    oracle::TempDir dir;
    CHECK(run({"detect", "--dataset", s(dir / "missing.bin")}).code == kExitData);
    {
        std::ofstream(dir / "junk.bin") << "not a dataset";
        std::ofstream(dir / "junk.json") << "{}";
    }
    CHECK(run({"detect", "--dataset", s(dir / "junk.bin")}).code == kExitData);
}

TEST_CASE("sweep writes one row per SNR point")
{
    oracle::TempDir dir;
    const auto r = run({"sweep", "--snr", "0:30:10", "--trials", "50", "--seed", "1", "--out", s(dir / "sw.csv")});
    REQUIRE(r.code == kExitOk);
    const auto sweep = read_sweep(dir / "sw.csv", ResultFormat::csv);
    REQUIRE(sweep.size() == 4);
    CHECK(sweep[3].snr_db == 30.0);
    CHECK(fs::exists(dir / "sw.run.json"));
}
