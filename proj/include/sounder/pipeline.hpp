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

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sounder/config.hpp"
#include "sounder/scoring.hpp"

namespace sounder
{
    enum class Stage
    {
        simulate,
        prep,
        drift,
        extract,
        analyze
    };

    std::string to_string(Stage stage);
    Stage stage_from_string(const std::string &name);

    // Process exit code of a failed stage: simulate 10, prep 11, drift 12, extract 13, analyze 14
    int exit_code(Stage stage);
    inline constexpr int study_exit_code = 15;

    class StageError : public std::runtime_error
    {
    public:
        StageError(Stage stage, const std::string &what)
            : std::runtime_error("[" + to_string(stage) + "] " + what), stage_(stage) {}
        Stage stage() const { return stage_; }

    private:
        Stage stage_;
    };

    // Artifact file names inside the output directory
    namespace files
    {
        inline constexpr const char *manifest = "manifest.json";
        inline constexpr const char *config = "config.json";
        inline constexpr const char *arrays = "arrays.json";
        inline constexpr const char *tensor = "tensor.bin";
        inline constexpr const char *reference = "reference.bin";
        inline constexpr const char *truth_mpcs = "truth_mpcs.csv";
        inline constexpr const char *truth_drift = "truth_drift.csv";
        inline constexpr const char *outlier_mask = "outlier_mask.csv";
        inline constexpr const char *averaged = "averaged.bin";
        inline constexpr const char *reference_averaged = "reference_averaged.bin";
        inline constexpr const char *outliers = "outliers.csv";
        inline constexpr const char *reference_outliers = "reference_outliers.csv";
        inline constexpr const char *drift = "drift.csv";
        inline constexpr const char *corrected = "corrected.bin";
        inline constexpr const char *mpcs = "mpcs.csv";
        inline constexpr const char *extraction = "extraction.json";
        inline constexpr const char *spreads = "spreads.csv";
        inline constexpr const char *separability = "separability.csv";
        inline constexpr const char *capacity_summary = "capacity_summary.csv";
    }

    // Paths of the scenario: the explicit list, or random paths (snapped to the CLEAN grids if requested)
    std::vector<Mpc<double>> scenario_mpcs(const ExperimentConfig &cfg, std::uint64_t seed);

    // CLEAN settings with the delay window derived from the scenario's delay support when auto_delay_window is set
    CleanConfig effective_clean(const ExperimentConfig &cfg);

    // Reference search grids; with auto_delay_window the delays follow the CLEAN window and the elevations its RX range
    DriftSearchConfig effective_drift_search(const ExperimentConfig &cfg);

    /*!
    Runs stages against an artifact directory. Every stage reads its inputs from the directory, writes its
    outputs there and rewrites manifest.json (config hash, seeds, per-stage status, content hash of every file).
    */
    class Workspace
    {
    public:
        explicit Workspace(ExperimentConfig cfg);
        const ExperimentConfig &config() const { return cfg_; }
        const std::string &directory() const { return dir_; }
        // Throws StageError; the manifest records the failure before the exception leaves
        void run(Stage stage);
        void run_all();
        const json &manifest() const { return manifest_; }

    private:
        void simulate();
        void prep();
        void drift();
        void extract();
        void analyze();
        std::string path(const std::string &name) const;
        void record(const std::string &name);
        void write_manifest();

        ExperimentConfig cfg_;
        std::string dir_;
        json manifest_;
    };

    /*!
    Spread, separability and (if enabled) capacity reports for one or more users. Spreads use the MPCs inside
    the configured AoD sector. Returns the names of the files written to directory.
    */
    std::vector<std::string> analyze_users(const ExperimentConfig &cfg, const std::vector<std::string> &labels,
                                           const std::vector<std::vector<Mpc<double>>> &users,
                                           const std::string &directory);

    // All five stages; returns the manifest
    json run_pipeline(const ExperimentConfig &cfg);

    struct DriftStudyRow
    {
        double allan_dev = 0.0;
        std::string method;
        std::size_t trials = 0;
        ParameterErrors rmse;
        std::size_t low_confidence_rotors = 0;
    };

    /*!
    Monte-Carlo residual-drift study. Each trial draws one scene and one drift/noise realization, shared by
    all Allan deviations (scaled copies of the same walk) and all correction methods. The method "none"
    skips correction. Rows are ordered by Allan deviation, then method.
    */
    std::vector<DriftStudyRow> run_drift_study(const ExperimentConfig &cfg,
                                               const std::function<void(const std::string &)> &progress = {});

    // allan_dev,method,trials,matched,rmse_aod_deg,rmse_eod_deg,rmse_aoa_deg,rmse_eoa_deg,rmse_delay_m,low_confidence_rotors
    void write_drift_study_csv(std::ostream &os, const std::vector<DriftStudyRow> &rows);

    struct CapacityStudyEntry
    {
        std::string array;    // label of the base-station array
        std::size_t elements = 0;
        CapacityReport report; // detector "single" for a single user
    };

    /*!
    Capacity CDFs from MPC sets. users[0] is the desired user; with two or more users users[1] is the
    interferer and every detector is evaluated, otherwise the single-user capacity. Realization i of every
    array and detector uses the same random path phases.
    */
    std::vector<CapacityStudyEntry> run_capacity_study(const std::vector<std::vector<Mpc<double>>> &users,
                                                       const ExperimentConfig &cfg);

    // Writes capacity_<array>_<detector>.csv files and capacity_summary.csv; returns the file names
    std::vector<std::string> write_capacity_study(const std::string &directory,
                                                  const std::vector<CapacityStudyEntry> &entries);

    std::string array_label(const ArrayConfig &a, std::size_t index);
}
