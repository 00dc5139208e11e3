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

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sounder/clean.hpp"
#include "sounder/drift.hpp"
#include "sounder/metrics.hpp"
#include "sounder/prep.hpp"
#include "sounder/sounder.hpp"

namespace sounder
{
    using json = nlohmann::ordered_json;

    inline constexpr int schema_version = 1;

    struct PatternConfig
    {
        std::string kind = "isotropic"; // isotropic | cosine_lobe
        double az_3db = 360.0;
        double el_3db = 360.0;
        double front_to_back = 0.0;

        PatternModel<double> model() const;
    };

    struct ElementConfig
    {
        std::array<double, 3> position = {0.0, 0.0, 0.0};
        std::array<double, 2> boresight = {0.0, 0.0}; // azimuth, elevation
    };

    /*!
    Array description.
      cylinder:    rings, per_ring, ring_spacing_m, radius_m
      rectangular: n_az, n_el, spacing_m
      single:      position
      elements:    explicit element list
    Spacings and radii of 0 select defaults derived from the wavelength (half-wavelength spacing, and for
    cylinders a half-wavelength arc between neighbours).
    */
    struct ArrayConfig
    {
        std::string kind = "single";
        std::size_t rings = 1, per_ring = 1;
        double ring_spacing_m = 0.0, radius_m = 0.0;
        std::size_t n_az = 1, n_el = 1;
        double spacing_m = 0.0;
        std::array<double, 3> position = {0.0, 0.0, 0.0};
        std::vector<ElementConfig> elements;
        PatternConfig pattern;

        ArraySpec<double> build(double wavelength) const;

        // Elements of one rotor column for a cylinder (rings), else the whole array
        std::size_t column_size() const;
        // Rotor positions for a cylinder (per_ring), else 1
        std::size_t rotor_count() const;
        std::size_t element_count() const;
    };

    struct MpcConfig
    {
        double gain_re = 1.0, gain_im = 0.0;
        double delay_m = 0.0;
        double aod = 0.0, eod = 0.0, aoa = 0.0, eoa = 0.0;

        Mpc<double> to_mpc() const;
        static MpcConfig from_mpc(const Mpc<double> &m);
    };

    struct ScenarioConfig
    {
        double f_start = 2.52e9, f_stop = 2.54e9;
        std::size_t n_freq = 257;
        ArrayConfig tx, rx;
        ArrayConfig reference;            // used unless the schedule's reference slot is none
        std::vector<MpcConfig> mpcs;      // explicit paths; if empty, random paths are drawn
        std::size_t random_paths = 1;
        ScenarioRanges ranges;
        bool snap_to_grid = true;         // snap random paths to the CLEAN grids

        FrequencyGrid grid() const { return FrequencyGrid::from_band(f_start, f_stop, n_freq); }
        double carrier() const { return grid().center(); }
        double wavelength() const { return speed_of_light / carrier(); }
    };

    struct DriftConfig
    {
        double allan_dev = 1e-10;
        bool correct = true;
        std::string method = "primary";
        DriftSearchConfig search;
    };

    struct CapacityConfig
    {
        bool enabled = false;
        std::vector<ArrayConfig> arrays;             // base-station arrays to evaluate
        std::vector<std::string> detectors = {"mrc", "zf", "mmse"};
        std::size_t realizations = 300;
        double n0 = 1.0;
    };

    struct AnalysisConfig
    {
        std::array<double, 2> sector = {-120.0, 120.0};
        CapacityConfig capacity;
    };

    struct StudyConfig
    {
        std::vector<double> allan_devs = {0.0, 1e-11, 1e-10, 1e-9};
        std::size_t trials = 50;
        std::vector<std::string> methods = {"primary"}; // drift methods, or "none" for no correction
    };

    struct OutputConfig
    {
        std::string directory = "out";
        bool write_raw_tensors = true;
        bool write_csv_tensors = false;
    };

    struct ExperimentConfig
    {
        std::uint64_t seed = 1;
        ScenarioConfig scenario;
        ScheduleConfig schedule;          // tx_elements, rx_elements and rotor positions follow the arrays
        DriftConfig drift;
        double n0 = 0.0;
        OutlierConfig outliers;
        PrepConfig prep;
        CleanConfig clean;
        bool auto_delay_window = true;    // derive the delay search window from the true paths
        AnalysisConfig analysis;
        StudyConfig study;
        OutputConfig output;

        // Full-scale defaults: 8 x 60 virtual cylinder, 2 x 12 RX cylinder, 257 bins, 10 snapshots
        static ExperimentConfig defaults();

        // Schedule with element counts and rotor positions taken from the arrays
        Schedule make_schedule() const;
        void validate() const;
    };

    json to_json(const ExperimentConfig &cfg);

    // Strict parse: unknown keys and a wrong schema_version throw std::invalid_argument
    ExperimentConfig config_from_json(const json &j);

    // defaults, then each patch in order (RFC 7386 merge), then a strict parse
    ExperimentConfig merge_config(const std::vector<json> &patches);

    ExperimentConfig load_config(const std::string &path);
    json read_json_file(const std::string &path);

    json array_to_json(const ArraySpec<double> &spec);
    ArraySpec<double> array_from_json(const json &j);
    json mpcs_to_json(const std::vector<Mpc<double>> &mpcs);

    // 64-bit FNV-1a of a byte string, as 16 hex digits
    std::string content_hash(const std::string &bytes);
}
