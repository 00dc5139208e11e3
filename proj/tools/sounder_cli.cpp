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

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "sounder/pipeline.hpp"
#include "sounder/reports.hpp"

using namespace sounder;

namespace
{
    constexpr int usage_error = 2;

    // Flags shared by every subcommand; each one becomes a JSON patch on top of the defaults
    struct CommonFlags
    {
        std::string config_file;
        std::vector<std::string> sets;
        std::optional<std::uint64_t> seed;
        std::optional<std::string> out;
        std::optional<double> n0, allan_dev, outlier_probability, rel_tol, dynamic_range, angle_grid, delay_grid;
        std::optional<std::size_t> snapshots, max_paths, paths, trials, alt_iterations, realizations;
        std::optional<std::string> drift_method, reference_slot;
        std::optional<bool> correct;

        void attach(CLI::App *app)
        {
            app->add_option("--config", config_file, "JSON configuration file; its values override the flags")
                ->check(CLI::ExistingFile);
            app->add_option("--set", sets, "Override any configuration field, e.g. --set clean.max_paths=5");
            app->add_option("--seed", seed, "Master seed");
            app->add_option("--out", out, "Output directory");
            app->add_option("--n0", n0, "Noise power per sample (linear)");
            app->add_option("--allan-dev", allan_dev, "Allan deviation at 1 s");
            app->add_option("--outlier-probability", outlier_probability, "Switching-error probability per snapshot");
            app->add_option("--rel-tol", rel_tol, "Outlier filter tolerance relative to the median");
            app->add_option("--dynamic-range", dynamic_range, "Extraction dynamic range (dB)");
            app->add_option("--angle-grid", angle_grid, "CLEAN angle grid (deg)");
            app->add_option("--delay-grid", delay_grid, "CLEAN delay grid (m)");
            app->add_option("--snapshots", snapshots, "Snapshots per rotor position");
            app->add_option("--max-paths", max_paths, "Maximum number of extracted paths");
            app->add_option("--alt-iterations", alt_iterations, "Alternating search rounds");
            app->add_option("--paths", paths, "Number of random scenario paths");
            app->add_option("--trials", trials, "Monte-Carlo trials of the drift study");
            app->add_option("--realizations", realizations, "Fading realizations of the capacity study");
            app->add_option("--drift-method", drift_method, "primary, a1, a2, a3 or a4");
            app->add_option("--reference-slot", reference_slot, "first, last or none");
            app->add_option("--correct", correct, "Apply drift correction (true/false)");
        }

        json patch() const
        {
            json p = json::object();
            auto put = [&](const std::string &dotted, const json &value)
            {
                json *node = &p;
                std::stringstream ss(dotted);
                std::string part;
                std::vector<std::string> parts;
                while (std::getline(ss, part, '.'))
                    parts.push_back(part);
                for (std::size_t i = 0; i + 1 < parts.size(); ++i)
                {
                    if (!node->contains(parts[i]) || !(*node)[parts[i]].is_object())
                        (*node)[parts[i]] = json::object();
                    node = &(*node)[parts[i]];
                }
                (*node)[parts.back()] = value;
            };
            if (seed)
                put("seed", *seed);
            if (out)
                put("output.directory", *out);
            if (n0)
                put("n0", *n0);
            if (allan_dev)
                put("drift.allan_dev", *allan_dev);
            if (outlier_probability)
                put("outliers.probability", *outlier_probability);
            if (rel_tol)
                put("prep.rel_tol", *rel_tol);
            if (dynamic_range)
                put("clean.dynamic_range_db", *dynamic_range);
            if (angle_grid)
                put("clean.angle_grid", *angle_grid);
            if (delay_grid)
                put("clean.delay_grid_m", *delay_grid);
            if (snapshots)
                put("schedule.snapshots", *snapshots);
            if (max_paths)
                put("clean.max_paths", *max_paths);
            if (alt_iterations)
                put("clean.alt_iterations", *alt_iterations);
            if (paths)
                put("scenario.random_paths", *paths);
            if (trials)
                put("study.trials", *trials);
            if (realizations)
                put("analysis.capacity.realizations", *realizations);
            if (drift_method)
                put("drift.method", *drift_method);
            if (reference_slot)
                put("schedule.reference_slot", *reference_slot);
            if (correct)
                put("drift.correct", *correct);
            for (const auto &s : sets)
            {
                const auto eq = s.find('=');
                if (eq == std::string::npos || eq == 0)
                    throw std::invalid_argument("--set expects key=value, got '" + s + "'.");
                const std::string value = s.substr(eq + 1);
                json v;
                try
                {
                    v = json::parse(value);
                }
                catch (const json::parse_error &)
                {
                    v = value; // bare words are strings
                }
                put(s.substr(0, eq), v);
            }
            return p;
        }

        // defaults, then the flags, then the file
        ExperimentConfig resolve() const
        {
            std::vector<json> patches{patch()};
            if (!config_file.empty())
                patches.push_back(read_json_file(config_file));
            return merge_config(patches);
        }
    };

    int run_stage(const CommonFlags &flags, std::optional<Stage> stage)
    {
        Workspace ws(flags.resolve());
        if (stage)
            ws.run(*stage);
        else
            ws.run_all();
        std::cout << "Wrote " << ws.directory() << "/" << files::manifest << "\n";
        return 0;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Synthetic 3D-MIMO channel sounder: simulation, drift correction and CLEAN extraction"};
    app.require_subcommand(1);

    std::map<std::string, CommonFlags> flags;
    auto add = [&](const std::string &name, const std::string &desc)
    {
        CLI::App *sub = app.add_subcommand(name, desc);
        flags[name].attach(sub);
        return sub;
    };

    add("simulate", "Synthesize and acquire the transfer tensors");
    add("prep", "Outlier filtering and snapshot averaging");
    add("drift", "Estimate and correct the clock phase drift");
    add("extract", "CLEAN multipath extraction");
    auto *analyze = add("analyze", "Angular spreads, separability and capacity");
    add("pipeline", "Run simulate, prep, drift, extract and analyze");
    add("study-drift", "Residual-drift RMSE over Allan deviations and methods");
    auto *capacity = add("study-capacity", "Capacity CDFs from MPC lists");
    auto *dump = app.add_subcommand("config", "Print the resolved configuration");
    flags["config"].attach(dump);

    std::vector<std::string> analyze_mpcs, capacity_mpcs;
    analyze->add_option("--mpcs", analyze_mpcs, "MPC CSV per user (default: the extracted paths)")
        ->check(CLI::ExistingFile);
    capacity->add_option("--mpcs", capacity_mpcs, "MPC CSV per user; the first is the desired user")
        ->required()
        ->check(CLI::ExistingFile);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : usage_error;
    }

    const CLI::App *sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    const CommonFlags &f = flags[name];

    ExperimentConfig cfg;
    try
    {
        cfg = f.resolve();
    }
    catch (const std::exception &e)
    {
        std::cerr << "configuration error: " << e.what() << "\n";
        return usage_error;
    }

    try
    {
        if (name == "config")
        {
            std::cout << to_json(cfg).dump(2) << "\n";
            return 0;
        }
        if (name == "pipeline")
            return run_stage(f, std::nullopt);
        if (name == "analyze" && !analyze_mpcs.empty())
        {
            std::vector<std::string> labels;
            std::vector<std::vector<Mpc<double>>> users;
            for (const auto &p : analyze_mpcs)
            {
                labels.push_back(std::filesystem::path(p).stem().string());
                users.push_back(read_mpc_csv(p));
            }
            for (const auto &file : analyze_users(cfg, labels, users, cfg.output.directory))
                std::cout << "Wrote " << cfg.output.directory << "/" << file << "\n";
            return 0;
        }
        if (name == "study-drift")
        {
            const auto rows = run_drift_study(cfg, [](const std::string &msg) { std::cerr << msg << "\n"; });
            std::filesystem::create_directories(cfg.output.directory);
            const std::string path = (std::filesystem::path(cfg.output.directory) / "drift_study.csv").string();
            std::ostringstream os;
            write_drift_study_csv(os, rows);
            write_text_file(path, os.str());
            std::cout << os.str();
            return 0;
        }
        if (name == "study-capacity")
        {
            std::vector<std::vector<Mpc<double>>> users;
            for (const auto &p : capacity_mpcs)
                users.push_back(read_mpc_csv(p));
            for (const auto &file : write_capacity_study(cfg.output.directory, run_capacity_study(users, cfg)))
                std::cout << "Wrote " << cfg.output.directory << "/" << file << "\n";
            return 0;
        }
        return run_stage(f, stage_from_string(name));
    }
    catch (const StageError &e)
    {
        std::cerr << e.what() << "\n";
        return exit_code(e.stage());
    }
    catch (const std::exception &e)
    {
        std::cerr << "[" << name << "] " << e.what() << "\n";
        if (name == "analyze")
            return exit_code(Stage::analyze);
        return study_exit_code;
    }
}
