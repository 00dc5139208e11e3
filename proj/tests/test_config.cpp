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

#include "sounder/config.hpp"

#include <filesystem>
#include <fstream>
#include <numbers>

using namespace sounder;

namespace
{
    json patch(const char *text) { return json::parse(text); }
}

TEST_CASE("ExperimentConfig - defaults describe the full-scale measurement")
{
    const auto c = ExperimentConfig::defaults();
    CHECK_NOTHROW(c.validate());
    CHECK(c.scenario.tx.element_count() == 480);
    CHECK(c.scenario.tx.column_size() == 8);
    CHECK(c.scenario.tx.rotor_count() == 60);
    CHECK(c.scenario.rx.element_count() == 24);
    CHECK(c.scenario.n_freq == 257);
    CHECK(c.scenario.carrier() == Catch::Approx(2.53e9));
    CHECK(c.schedule.snapshots == 10);

    const Schedule s = c.make_schedule();
    CHECK(s.rotors() == 60);
    CHECK(s.config().rotor_positions[1] == Catch::Approx(6.0));
    CHECK(s.config().tx_elements == 8);
    CHECK(s.config().rx_elements == 24);
}

TEST_CASE("ArrayConfig - wavelength derived cylinder geometry")
{
    ArrayConfig a;
    a.kind = "cylinder";
    a.rings = 3;
    a.per_ring = 20;
    const double lambda = 0.12;
    const auto spec = a.build(lambda);
    REQUIRE(spec.size() == 60);
    const double radius = 20.0 * (lambda / 2.0) / (2.0 * std::numbers::pi);
    CHECK(spec.element(0).position.head<2>().norm() == Catch::Approx(radius));
    // column-major: elements 0 .. rings-1 share one column, stacked by the ring spacing
    CHECK((spec.element(1).position - spec.element(0).position).norm() == Catch::Approx(lambda / 2.0));
    CHECK(a.column_size() == 3);
    CHECK(a.rotor_count() == 20);

    a.kind = "rectangular";
    a.n_az = 4;
    a.n_el = 2;
    CHECK(a.build(lambda).size() == 8);
    CHECK(a.rotor_count() == 1);
    CHECK(a.column_size() == 8);

    a.kind = "ring";
    CHECK_THROWS_AS(a.build(lambda), std::invalid_argument);
}

TEST_CASE("to_json - round trip through the strict parser")
{
    const auto c = ExperimentConfig::defaults();
    const json j = to_json(c);
    CHECK(j["schema_version"] == 1);
    const json again = to_json(config_from_json(j));
    CHECK(again == j);
}

TEST_CASE("config_from_json - unknown keys and schema version")
{
    json j = to_json(ExperimentConfig::defaults());
    j["clean"]["dynamic_rang_db"] = 20;
    try
    {
        config_from_json(j);
        FAIL("accepted an unknown key");
    }
    catch (const std::invalid_argument &e)
    {
        CHECK(std::string(e.what()).find("config.clean.dynamic_rang_db") != std::string::npos);
    }

    j = to_json(ExperimentConfig::defaults());
    j["schema_version"] = 2;
    CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
    j.erase("schema_version");
    CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);

    j = to_json(ExperimentConfig::defaults());
    j["seed"] = "seven";
    CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
}

TEST_CASE("merge_config - patches apply in order")
{
    const auto c = merge_config({patch(R"({"seed": 5, "clean": {"max_paths": 7}})"),
                                 patch(R"({"schema_version": 1, "seed": 9, "clean": {"angle_grid": 2}})")});
    CHECK(c.seed == 9);
    CHECK(c.clean.max_paths == 7);
    CHECK(c.clean.angle_grid == 2.0);
    CHECK(c.clean.delay_grid == 3.0);

    // lists replace, objects merge
    const auto d = merge_config({patch(R"({"study": {"allan_devs": [1e-9]}, "scenario": {"rx_array": {"rings": 1}}})")});
    CHECK(d.study.allan_devs == std::vector<double>{1e-9});
    CHECK(d.scenario.rx.rings == 1);
    CHECK(d.scenario.rx.per_ring == 12);

    CHECK_THROWS_AS(merge_config({patch(R"({"scenario": {"n_freq": 0}})")}), std::invalid_argument);
    CHECK_THROWS_AS(merge_config({patch(R"({"drift": {"method": "a9"}})")}), std::invalid_argument);
    CHECK_THROWS_AS(merge_config({patch(R"({"study": {"methods": ["none", "bogus"]}})")}), std::invalid_argument);
    CHECK_THROWS_AS(merge_config({patch("[1, 2]")}), std::invalid_argument);
}

TEST_CASE("validate - reference antenna must be one element")
{
    CHECK_THROWS_AS(merge_config({patch(R"({"scenario": {"reference_antenna": {"kind": "rectangular", "n_az": 2}}})")}),
                    std::invalid_argument);
    // without a reference slot the reference array is ignored
    CHECK_NOTHROW(merge_config({patch(R"({"schedule": {"reference_slot": "none"},
                                          "scenario": {"reference_antenna": {"kind": "rectangular", "n_az": 2}}})")}));
}

TEST_CASE("load_config - file errors")
{
    const auto dir = std::filesystem::temp_directory_path() / "sounder_test_config";
    std::filesystem::create_directories(dir);
    const auto good = dir / "good.json";
    std::ofstream(good) << R"({"schema_version": 1, "seed": 42, "n0": 0.5})";
    const auto c = load_config(good.string());
    CHECK(c.seed == 42);
    CHECK(c.n0 == 0.5);

    const auto bad = dir / "bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK_THROWS_AS(load_config(bad.string()), std::invalid_argument);
    CHECK_THROWS_AS(load_config((dir / "missing.json").string()), std::invalid_argument);
}

TEST_CASE("MpcConfig - conversion both ways")
{
    MpcConfig m;
    m.gain_re = 0.5;
    m.gain_im = -0.25;
    m.delay_m = 150.0;
    m.aod = 190.0;
    m.eoa = -10.0;
    const auto p = m.to_mpc();
    CHECK(p.delay_m() == Catch::Approx(150.0));
    CHECK(p.departure.azimuth == Catch::Approx(-170.0));
    const auto back = MpcConfig::from_mpc(p);
    CHECK(back.gain_im == -0.25);
    CHECK(back.delay_m == Catch::Approx(150.0));
    m.delay_m = -1.0;
    CHECK_THROWS_AS(m.to_mpc(), std::invalid_argument);
}

TEST_CASE("array_to_json - exact round trip")
{
    const auto spec = ExperimentConfig::defaults().scenario.rx.build(0.1185);
    const auto back = array_from_json(array_to_json(spec));
    REQUIRE(back.size() == spec.size());
    CHECK(back.wavelength() == spec.wavelength());
    CHECK(back.pattern().az_3db == spec.pattern().az_3db);
    for (std::size_t n = 0; n < spec.size(); ++n)
    {
        CHECK(back.element(n).position == spec.element(n).position);
        CHECK(back.element(n).boresight.azimuth == spec.element(n).boresight.azimuth);
    }
}

TEST_CASE("content_hash - 64-bit FNV-1a reference values")
{
    CHECK(content_hash("") == "cbf29ce484222325");
    CHECK(content_hash("a") == "af63dc4c8601ec8c");
    CHECK(content_hash("foobar") == "85944171f73967e8");
}
