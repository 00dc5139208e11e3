// SPDX-License-Identifier: Apache-2.0
//
// mimo-sounder: 3D MIMO channel sounding simulation and post-processing
// Copyright (C) 2026 The mimo-sounder authors
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

#include <catch2/catch_amalgamated.hpp>

#include "sounder/pipeline.hpp"
#include "sounder/reports.hpp"
#include "sounder/tensor_io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

using namespace sounder;
namespace fs = std::filesystem;

namespace
{
    fs::path scratch(const std::string &name)
    {
        const fs::path p = fs::temp_directory_path() / "sounder_test_pipeline" / name;
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }

    // Reduced geometry: 12 rotor positions of a 4-ring column, 3 x 8 RX cylinder, two on-grid paths
    json small_patch()
    {
        return json::parse(R"({
          "schema_version": 1,
          "seed": 11,
          "n0": 1e-6,
          "scenario": {
            "f_start_hz": 2.48e9, "f_stop_hz": 2.58e9, "n_freq": 65,
            "tx_array": {"kind": "cylinder", "rings": 4, "per_ring": 12},
            "rx_array": {"kind": "cylinder", "rings": 3, "per_ring": 8},
            "mpcs": [
              {"gain_re": 0.9, "gain_im": 0.2, "delay_m": 150, "aod": 30, "eod": 0, "aoa": -60, "eoa": 10},
              {"gain_re": -0.2, "gain_im": 0.3, "delay_m": 201, "aod": -120, "eod": -10, "aoa": 100, "eoa": 0}
            ]
          },
          "schedule": {"snapshots": 3},
          "drift": {"allan_dev": 1e-10, "angles": {"step": 2, "el_min": -30, "el_max": 30}},
          "clean": {"max_paths": 4}
        })");
    }

    int run_cli(const std::string &args)
    {
        const std::string cmd = std::string(SOUNDER_CLI_PATH) + " " + args + " > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    fs::path write_config(const fs::path &dir, const json &j)
    {
        const fs::path p = dir / "config_in.json";
        std::ofstream(p) << j.dump(2);
        return p;
    }
}

TEST_CASE("stage_from_string - names and exit codes")
{
    CHECK(stage_from_string("extract") == Stage::extract);
    CHECK(exit_code(Stage::simulate) == 10);
    CHECK(exit_code(Stage::analyze) == 14);
    CHECK_THROWS_AS(stage_from_string("fit"), std::invalid_argument);
}

TEST_CASE("effective_clean - delay window around the true support")
{
    auto cfg = merge_config({small_patch()});
    const auto c = effective_clean(cfg);
    CHECK(c.delay_min == Catch::Approx(150.0 - 5 * 3.0));
    CHECK(c.delay_max == Catch::Approx(201.0 + 5 * 3.0));
    cfg.auto_delay_window = false;
    CHECK(effective_clean(cfg).delay_max == cfg.clean.delay_max);
}

TEST_CASE("scenario_mpcs - explicit list or snapped random paths")
{
    const auto cfg = merge_config({small_patch()});
    const auto m = scenario_mpcs(cfg, 1);
    REQUIRE(m.size() == 2);
    CHECK(m[1].delay_m() == Catch::Approx(201.0));

    auto rnd = cfg;
    rnd.scenario.mpcs.clear();
    rnd.scenario.random_paths = 5;
    const auto r = scenario_mpcs(rnd, 3);
    REQUIRE(r.size() == 5);
    for (const auto &p : r)
    {
        CHECK(std::remainder(p.delay_m(), rnd.clean.delay_grid) == Catch::Approx(0.0).margin(1e-6));
        CHECK(std::remainder(p.departure.azimuth, rnd.clean.angle_grid) == Catch::Approx(0.0).margin(1e-9));
    }
    CHECK(scenario_mpcs(rnd, 3)[4].gain == r[4].gain);
}

TEST_CASE("Workspace - full pipeline recovers the paths")
{
    auto cfg = merge_config({small_patch()});
    cfg.output.directory = scratch("full").string();
    const json manifest = run_pipeline(cfg);
    CHECK(manifest["partial"] == false);
    for (const char *s : {"simulate", "prep", "drift", "extract", "analyze"})
        CHECK(manifest["stages"][s]["status"] == "ok");
    CHECK(manifest["stages"]["drift"]["correction"] == "applied");

    const auto est = read_mpc_csv((fs::path(cfg.output.directory) / files::mpcs).string());
    const auto truth = scenario_mpcs(cfg, 0);
    REQUIRE(est.size() >= 2);
    const auto pairs = match_mpcs<double>(truth, est);
    REQUIRE(pairs.size() == 2);
    for (const auto &p : pairs)
        CHECK(p.distance < 1e-6);
    for (const char *f : {files::spreads, files::tensor, files::corrected, files::drift, files::outliers})
    {
        CHECK(fs::exists(fs::path(cfg.output.directory) / f));
        CHECK(manifest["files"].contains(f));
    }
}

TEST_CASE("Workspace - stage failure is recorded and typed")
{
    auto cfg = merge_config({small_patch()});
    cfg.output.directory = scratch("fail").string();
    Workspace ws(cfg);
    try
    {
        ws.run(Stage::extract);
        FAIL("extract ran without inputs");
    }
    catch (const StageError &e)
    {
        CHECK(e.stage() == Stage::extract);
    }
    CHECK(ws.manifest()["stages"]["extract"]["status"] == "failed");
    CHECK(ws.manifest()["partial"] == true);
}

TEST_CASE("analyze_users - two users give separability and capacity outputs")
{
    auto cfg = merge_config({small_patch()});
    cfg.analysis.capacity.enabled = true;
    cfg.analysis.capacity.realizations = 5;
    cfg.analysis.capacity.arrays.resize(1);
    cfg.analysis.capacity.arrays[0].kind = "rectangular";
    cfg.analysis.capacity.arrays[0].n_az = 4;
    cfg.analysis.capacity.arrays[0].n_el = 2;
    const auto users = std::vector<std::vector<Mpc<double>>>{scenario_mpcs(cfg, 0),
                                                             {scenario_mpcs(cfg, 0)[1]}};
    const fs::path dir = scratch("analyze");
    const auto written = analyze_users(cfg, {"a", "b"}, users, dir.string());
    CHECK(fs::exists(dir / files::spreads));
    CHECK(fs::exists(dir / files::separability));
    CHECK(fs::exists(dir / files::capacity_summary));
    CHECK(written.size() >= 5);

    const auto entries = run_capacity_study(users, cfg);
    REQUIRE(entries.size() == 3);
    CHECK(entries[0].report.capacities.size() == 5);
    CHECK(entries[0].elements == 8);
}

TEST_CASE("run_drift_study - zero drift gives zero angular error")
{
    auto cfg = merge_config({small_patch()});
    cfg.n0 = 0.0;
    cfg.study.allan_devs = {0.0, 1e-9};
    cfg.study.trials = 2;
    cfg.study.methods = {"primary", "none"};
    const auto rows = run_drift_study(cfg);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].allan_dev == 0.0);
    CHECK(rows[0].method == "primary");
    CHECK(rows[0].rmse.aod == 0.0);
    CHECK(rows[0].rmse.eod == 0.0);
    CHECK(rows[0].rmse.aoa == 0.0);
    CHECK(rows[0].rmse.eoa == 0.0);
    CHECK(rows[1].method == "none");
    CHECK(rows[1].rmse.aod == 0.0);

    std::ostringstream os;
    write_drift_study_csv(os, rows);
    CHECK(os.str().rfind("allan_dev,method,trials", 0) == 0);
}

TEST_CASE("sounder CLI - exit codes")
{
    const fs::path dir = scratch("cli_codes");
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("") == 2);
    CHECK(run_cli("simulate --no-such-flag") == 2);
    CHECK(run_cli("config --set clean.bogus=1") == 2);
    CHECK(run_cli("config --set schema_version=3") == 2);
    CHECK(run_cli("config --config " + (dir / "missing.json").string()) == 2);

    json bad = small_patch();
    bad["scenario"]["tx_arry"] = json::object();
    CHECK(run_cli("pipeline --config " + write_config(dir, bad).string()) == 2);

    // prep without a simulated tensor fails in its own stage
    CHECK(run_cli("prep --out " + (dir / "empty").string() + " --config " + write_config(dir, small_patch()).string()) == 11);
}

TEST_CASE("sounder CLI - staged run matches the one-shot pipeline bit for bit")
{
    const fs::path root = scratch("cli_runs");
    json j = small_patch();
    j.erase("seed"); // the file would override --seed
    const fs::path cfg = write_config(root, j);
    const fs::path a = root / "a", b = root / "b";
    REQUIRE(run_cli("pipeline --seed 11 --config " + cfg.string() + " --out " + a.string()) == 0);
    for (const char *stage : {"simulate", "prep", "drift", "extract", "analyze"})
        REQUIRE(run_cli(std::string(stage) + " --seed 11 --config " + cfg.string() + " --out " + b.string()) == 0);

    const json ma = read_json_file((a / files::manifest).string());
    const json mb = read_json_file((b / files::manifest).string());
    CHECK(ma["config_hash"] == mb["config_hash"]);
    for (const char *f : {files::tensor, files::reference, files::corrected, files::mpcs, files::spreads})
        CHECK(ma["files"][f]["fnv1a64"] == mb["files"][f]["fnv1a64"]);
    CHECK(mb["partial"] == false);

    // another seed changes the acquisition
    const fs::path c = root / "c";
    REQUIRE(run_cli("simulate --seed 12 --config " + cfg.string() + " --out " + c.string()) == 0);
    const json mc = read_json_file((c / files::manifest).string());
    CHECK(mc["files"][files::tensor]["fnv1a64"] != ma["files"][files::tensor]["fnv1a64"]);
}

TEST_CASE("sounder CLI - minimal single-path configuration")
{
    const fs::path root = scratch("cli_minimal");
    json j = json::parse(R"({
      "schema_version": 1, "seed": 3,
      "scenario": {"n_freq": 33,
        "tx_array": {"kind": "single", "pattern": {"kind": "isotropic"}},
        "rx_array": {"kind": "single", "pattern": {"kind": "isotropic"}},
        "mpcs": [{"gain_re": 0.8, "gain_im": -0.3, "delay_m": 30, "aod": 0, "eod": 0, "aoa": 0, "eoa": 0}]},
      "schedule": {"snapshots": 2, "reference_slot": "none"},
      "drift": {"allan_dev": 0}, "n0": 0,
      "clean": {"tx_az": [0, 0], "tx_el": [0, 0], "rx_az": [0, 0], "rx_el": [0, 0]}
    })");
    REQUIRE(run_cli("pipeline --config " + write_config(root, j).string() + " --out " + (root / "out").string()) == 0);
    const auto est = read_mpc_csv((root / "out" / files::mpcs).string());
    REQUIRE(est.size() == 1);
    CHECK(est[0].delay_m() == Catch::Approx(30.0).margin(1e-9));
    CHECK(std::abs(est[0].gain - cplx<double>(0.8, -0.3)) < 1e-9);
}
