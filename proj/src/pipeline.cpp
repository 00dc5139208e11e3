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

#include "sounder/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "sounder/reports.hpp"
#include "sounder/rng.hpp"
#include "sounder/tensor_io.hpp"

namespace fs = std::filesystem;

namespace sounder
{
    std::string to_string(Stage stage)
    {
        switch (stage)
        {
        case Stage::simulate:
            return "simulate";
        case Stage::prep:
            return "prep";
        case Stage::drift:
            return "drift";
        case Stage::extract:
            return "extract";
        case Stage::analyze:
            return "analyze";
        }
        return "unknown";
    }

    Stage stage_from_string(const std::string &name)
    {
        for (auto s : {Stage::simulate, Stage::prep, Stage::drift, Stage::extract, Stage::analyze})
            if (to_string(s) == name)
                return s;
        throw std::invalid_argument("Unknown stage '" + name + "'.");
    }

    int exit_code(Stage stage)
    {
        return 10 + int(stage);
    }

    std::vector<Mpc<double>> scenario_mpcs(const ExperimentConfig &cfg, std::uint64_t seed)
    {
        std::vector<Mpc<double>> out;
        if (!cfg.scenario.mpcs.empty())
        {
            for (const auto &m : cfg.scenario.mpcs)
                out.push_back(m.to_mpc());
            return out;
        }
        out = sample_scenario<double>(seed, cfg.scenario.random_paths, cfg.scenario.ranges);
        if (cfg.scenario.snap_to_grid)
            for (auto &m : out)
                m = snap_to_grid(m, cfg.clean.angle_grid, cfg.clean.delay_grid);
        return out;
    }

    CleanConfig effective_clean(const ExperimentConfig &cfg)
    {
        CleanConfig c = cfg.clean;
        if (!cfg.auto_delay_window)
            return c;
        double lo = cfg.scenario.ranges.delay_m[0], hi = cfg.scenario.ranges.delay_m[1];
        if (!cfg.scenario.mpcs.empty())
        {
            lo = hi = cfg.scenario.mpcs.front().delay_m;
            for (const auto &m : cfg.scenario.mpcs)
            {
                lo = std::min(lo, m.delay_m);
                hi = std::max(hi, m.delay_m);
            }
        }
        const double step = c.delay_grid;
        const double guard = 5.0 * step;
        c.delay_min = std::max(0.0, std::floor((lo - guard) / step) * step);
        c.delay_max = std::ceil((hi + guard) / step) * step;
        return c;
    }

    DriftSearchConfig effective_drift_search(const ExperimentConfig &cfg)
    {
        DriftSearchConfig d = cfg.drift.search;
        if (!cfg.auto_delay_window)
            return d;
        // the reference antenna sees the scene's paths: same delay support and arrival elevations
        const CleanConfig c = effective_clean(cfg);
        d.delays.min_m = std::max(0.0, std::floor(c.delay_min / d.delays.step_m) * d.delays.step_m);
        d.delays.max_m = std::ceil(c.delay_max / d.delays.step_m) * d.delays.step_m;
        d.angles.el_min = std::max(d.angles.el_min, c.rx_el_min);
        d.angles.el_max = std::min(d.angles.el_max, c.rx_el_max);
        if (d.angles.el_min > d.angles.el_max)
            d.angles.el_min = d.angles.el_max = c.rx_el_min;
        return d;
    }

    namespace
    {
        const Stage all_stages[] = {Stage::simulate, Stage::prep, Stage::drift, Stage::extract, Stage::analyze};

        json geometry_json(const ArrayConfig &a, double lambda)
        {
            json g{{"kind", a.kind}, {"elements", a.element_count()}};
            if (a.kind == "cylinder")
            {
                g["rings"] = a.rings;
                g["per_ring"] = a.per_ring;
                g["ring_spacing_m"] = a.ring_spacing_m > 0.0 ? a.ring_spacing_m : 0.5 * lambda;
                g["radius_m"] = a.radius_m > 0.0 ? a.radius_m : double(a.per_ring) * 0.5 * lambda / two_pi;
            }
            else if (a.kind == "rectangular")
            {
                g["n_az"] = a.n_az;
                g["n_el"] = a.n_el;
                g["spacing_m"] = a.spacing_m > 0.0 ? a.spacing_m : 0.5 * lambda;
            }
            else if (a.kind == "single")
                g["position"] = a.position;
            g["pattern"] = json{{"kind", a.pattern.kind},
                                {"az_3db", a.pattern.az_3db},
                                {"el_3db", a.pattern.el_3db},
                                {"front_to_back", a.pattern.front_to_back}};
            return g;
        }

        std::string reference_slot_name(ReferenceSlot s)
        {
            return s == ReferenceSlot::first ? "first" : s == ReferenceSlot::last ? "last" : "none";
        }

        std::optional<ArraySpec<double>> reference_spec(const ExperimentConfig &cfg, const Schedule &sched)
        {
            if (!sched.has_reference())
                return std::nullopt;
            return cfg.scenario.reference.build(cfg.scenario.wavelength());
        }

        std::string to_text(const std::function<void(std::ostream &)> &f)
        {
            std::ostringstream os;
            f(os);
            return os.str();
        }
    }

    Workspace::Workspace(ExperimentConfig cfg) : cfg_(std::move(cfg)), dir_(cfg_.output.directory)
    {
        cfg_.validate();
        fs::create_directories(dir_);

        // the hash identifies the experiment, not where its files go
        json hashed = to_json(cfg_);
        hashed["output"].erase("directory");
        const std::string hash = content_hash(hashed.dump());

        if (fs::exists(path(files::manifest)))
        {
            try
            {
                json old = json::parse(read_text_file(path(files::manifest)));
                if (old.value("config_hash", std::string()) == hash)
                    manifest_ = std::move(old);
            }
            catch (const std::exception &)
            {
                // unreadable manifest: start over
            }
        }
        if (!manifest_.is_null())
            return;

        const Schedule sched = cfg_.make_schedule();
        const double lambda = cfg_.scenario.wavelength();
        const std::uint64_t s = cfg_.seed;
        manifest_ = json{
            {"schema_version", schema_version},
            {"config_hash", hash},
            {"seeds",
             {{"master", s},
              {"scenario", derive_seed(s, "scenario")},
              {"drift", derive_seed(s, "drift")},
              {"acquisition", derive_seed(s, "acquisition")},
              {"capacity", derive_seed(s, "capacity")}}},
            {"summary",
             {{"rotor_positions", sched.rotors()},
              {"n_freq", cfg_.scenario.n_freq},
              {"f_start_hz", cfg_.scenario.f_start},
              {"f_stop_hz", cfg_.scenario.f_stop},
              {"snapshots", cfg_.schedule.snapshots},
              {"tx_elements_per_rotor", cfg_.scenario.tx.column_size()},
              {"tx_virtual_elements", cfg_.scenario.tx.element_count()},
              {"rx_elements", cfg_.scenario.rx.element_count()},
              {"reference_slot", reference_slot_name(cfg_.schedule.reference_slot)},
              {"simo_duration_s", sched.simo_duration()},
              {"snapshot_duration_s", sched.snapshot_duration()},
              {"total_duration_s", sched.total_duration()},
              {"allan_dev", cfg_.drift.allan_dev},
              {"n0", cfg_.n0}}},
            {"geometry",
             {{"wavelength_m", lambda},
              {"tx", geometry_json(cfg_.scenario.tx, lambda)},
              {"rx", geometry_json(cfg_.scenario.rx, lambda)},
              {"reference", geometry_json(cfg_.scenario.reference, lambda)}}},
            {"stages", json::object()},
            {"partial", true},
            {"files", json::object()}};

        write_text_file(path(files::config), to_json(cfg_).dump(2) + "\n");
        record(files::config);
        write_manifest();
    }

    std::string Workspace::path(const std::string &name) const
    {
        return (fs::path(dir_) / name).string();
    }

    void Workspace::record(const std::string &name)
    {
        const std::string bytes = read_text_file(path(name));
        manifest_["files"][name] = json{{"fnv1a64", content_hash(bytes)}, {"bytes", bytes.size()}};
    }

    void Workspace::write_manifest()
    {
        bool complete = true;
        for (auto s : all_stages)
        {
            const auto &st = manifest_["stages"];
            const auto it = st.find(to_string(s));
            complete = complete && it != st.end() && it->value("status", std::string()) == "ok";
        }
        manifest_["partial"] = !complete;
        write_text_file(path(files::manifest), manifest_.dump(2) + "\n");
    }

    void Workspace::run(Stage stage)
    {
        const std::string name = to_string(stage);
        manifest_["stages"][name] = json{{"status", "running"}};
        try
        {
            switch (stage)
            {
            case Stage::simulate:
                simulate();
                break;
            case Stage::prep:
                prep();
                break;
            case Stage::drift:
                drift();
                break;
            case Stage::extract:
                extract();
                break;
            case Stage::analyze:
                analyze();
                break;
            }
            manifest_["stages"][name]["status"] = "ok";
            write_manifest();
        }
        catch (const std::exception &e)
        {
            manifest_["stages"][name]["status"] = "failed";
            manifest_["stages"][name]["error"] = e.what();
            write_manifest();
            throw StageError(stage, e.what());
        }
    }

    void Workspace::run_all()
    {
        for (auto s : all_stages)
            run(s);
    }

    void Workspace::simulate()
    {
        const double lambda = cfg_.scenario.wavelength();
        const FrequencyGrid grid = cfg_.scenario.grid();
        const auto tx = cfg_.scenario.tx.build(lambda);
        const auto rx = cfg_.scenario.rx.build(lambda);
        const Schedule sched = cfg_.make_schedule();
        const auto ref = reference_spec(cfg_, sched);
        const auto mpcs = scenario_mpcs(cfg_, derive_seed(cfg_.seed, "scenario"));
        const DriftTrace trace = realize_drift(sched, cfg_.drift.allan_dev, grid.center(), derive_seed(cfg_.seed, "drift"));
        const auto acq = acquire<double>(mpcs, tx, rx, ref ? &*ref : nullptr, grid, sched, trace, cfg_.n0,
                                         cfg_.outliers, derive_seed(cfg_.seed, "acquisition"));

        json arrays{{"tx", array_to_json(tx)}, {"rx", array_to_json(rx)}};
        if (ref)
            arrays["reference"] = array_to_json(*ref);
        write_text_file(path(files::arrays), arrays.dump(2) + "\n");
        record(files::arrays);

        write_tensor(path(files::tensor), acq.data);
        record(files::tensor);
        if (ref)
        {
            write_tensor(path(files::reference), acq.reference);
            record(files::reference);
        }
        else if (fs::exists(path(files::reference)))
            fs::remove(path(files::reference));
        if (cfg_.output.write_csv_tensors)
        {
            write_tensor_csv(path("tensor.csv"), acq.data);
            record("tensor.csv");
        }

        write_mpc_csv(path(files::truth_mpcs), mpcs);
        record(files::truth_mpcs);

        write_text_file(path(files::truth_drift), to_text([&](std::ostream &os)
        {
            os << "time_s,phase_rad\n" << std::setprecision(17);
            for (std::size_t i = 0; i < trace.times().size(); ++i)
                os << trace.times()[i] << ',' << trace.phases()[i] << '\n';
        }));
        record(files::truth_drift);

        write_text_file(path(files::outlier_mask), to_text([&](std::ostream &os)
        {
            os << "tensor,rotor,tx,rx,snapshot\n";
            auto dump = [&](const char *label, const TransferTensor<double> &t, const std::vector<std::uint8_t> &mask)
            {
                const auto &d = t.dims();
                for (std::size_t r = 0; r < d.rotors; ++r)
                    for (std::size_t a = 0; a < d.tx; ++a)
                        for (std::size_t n = 0; n < d.rx; ++n)
                            for (std::size_t s = 0; s < d.snapshots; ++s)
                                if (mask[t.pair_index(r, a, n, s)])
                                    os << label << ',' << r << ',' << a << ',' << n << ',' << s << '\n';
            };
            dump("data", acq.data, acq.outlier_mask);
            if (ref)
                dump("reference", acq.reference, acq.reference_outlier_mask);
        }));
        record(files::outlier_mask);

        std::size_t injected = 0;
        for (auto m : acq.outlier_mask)
            injected += m;
        manifest_["stages"]["simulate"]["paths"] = mpcs.size();
        manifest_["stages"]["simulate"]["injected_outliers"] = injected;
    }

    void Workspace::prep()
    {
        auto run_one = [&](const char *in, const char *out, const char *report)
        {
            const auto raw = read_tensor<double>(path(in));
            const auto res = prep_tensor(raw, cfg_.prep);
            write_tensor(path(out), res.averaged);
            record(out);
            write_text_file(path(report), to_text([&](std::ostream &os) { write_outlier_report(os, raw, res); }));
            record(report);
            return json{{"removed_snapshots", res.removed_count}, {"degenerate_pairs", res.degenerate_count}};
        };
        manifest_["stages"]["prep"]["data"] = run_one(files::tensor, files::averaged, files::outliers);
        if (fs::exists(path(files::reference)))
            manifest_["stages"]["prep"]["reference"] =
                run_one(files::reference, files::reference_averaged, files::reference_outliers);
    }

    void Workspace::drift()
    {
        auto data = read_tensor<double>(path(files::averaged));
        auto &info = manifest_["stages"]["drift"];
        if (!cfg_.drift.correct)
            info["correction"] = "disabled";
        else if (!fs::exists(path(files::reference_averaged)))
            info["correction"] = "skipped: no reference antenna";
        else
        {
            const auto ref = read_tensor<double>(path(files::reference_averaged));
            const DriftMethod method = drift_method_from_string(cfg_.drift.method);
            RotorPhaseEstimate est;
            if (method == DriftMethod::primary)
                est = estimate_reference(ref, cfg_.scenario.rx.build(cfg_.scenario.wavelength()),
                                         effective_drift_search(cfg_));
            else
                est = estimate_appendix(method, ref);
            apply_correction(data, est.phases);
            write_text_file(path(files::drift), to_text([&](std::ostream &os) { write_drift_report(os, est); }));
            record(files::drift);
            std::size_t low = 0;
            for (auto f : est.low_confidence)
                low += f;
            info["correction"] = "applied";
            info["method"] = to_string(method);
            info["low_confidence_rotors"] = low;
        }
        write_tensor(path(files::corrected), data);
        record(files::corrected);
    }

    void Workspace::extract()
    {
        const auto data = read_tensor<double>(path(files::corrected));
        const double lambda = cfg_.scenario.wavelength();
        const auto tx = cfg_.scenario.tx.build(lambda);
        const auto rx = cfg_.scenario.rx.build(lambda);
        const auto cube = flatten_virtual(data, 0);
        if (cube.n_tx != tx.size() || cube.n_rx != rx.size())
            throw std::invalid_argument("The corrected tensor does not match the configured arrays.");
        const CleanConfig clean = effective_clean(cfg_);
        const Extractor<double> ex(tx, rx, data.grid(), clean);
        const auto res = ex.extract(cube);

        write_mpc_csv(path(files::mpcs), res.mpcs);
        record(files::mpcs);
        json info{{"paths", res.mpcs.size()},
                  {"empty", res.empty},
                  {"stop_reason", res.stop_reason},
                  {"delay_window_m", {clean.delay_min, clean.delay_max}},
                  {"residual_power", res.residual_power},
                  {"peak_objective", res.peak_objective},
                  {"iterations", res.iterations}};
        write_text_file(path(files::extraction), info.dump(2) + "\n");
        record(files::extraction);
        manifest_["stages"]["extract"]["paths"] = res.mpcs.size();
        manifest_["stages"]["extract"]["stop_reason"] = res.stop_reason;
    }

    void Workspace::analyze()
    {
        const auto mpcs = read_mpc_csv(path(files::mpcs));
        for (const auto &name : analyze_users(cfg_, {"user0"}, {mpcs}, dir_))
            record(name);
    }

    std::vector<std::string> analyze_users(const ExperimentConfig &cfg, const std::vector<std::string> &labels,
                                           const std::vector<std::vector<Mpc<double>>> &users,
                                           const std::string &directory)
    {
        if (labels.size() != users.size() || users.empty())
            throw std::invalid_argument("analyze: need one label per user and at least one user.");
        fs::create_directories(directory);
        auto out = [&](const std::string &name) { return (fs::path(directory) / name).string(); };

        std::vector<SpreadRow> rows;
        for (std::size_t u = 0; u < users.size(); ++u)
        {
            const auto kept = filter_sector<double>(users[u], cfg.analysis.sector[0], cfg.analysis.sector[1]);
            SpreadRow row;
            row.label = labels[u];
            row.paths = kept.size();
            if (!kept.empty())
                row.stats = spread_stats<double>(kept);
            rows.push_back(row);
        }
        std::vector<SpreadRow> valid;
        for (const auto &r : rows)
            if (r.paths > 0)
                valid.push_back(r);

        std::vector<std::string> written;
        write_text_file(out(files::spreads), to_text([&](std::ostream &os) { write_spreads_csv(os, valid); }));
        written.push_back(files::spreads);
        write_text_file(out(files::separability),
                        to_text([&](std::ostream &os) { write_separability_csv(os, valid); }));
        written.push_back(files::separability);

        if (cfg.analysis.capacity.enabled)
        {
            std::vector<std::vector<Mpc<double>>> nonempty;
            for (const auto &u : users)
                if (!u.empty())
                    nonempty.push_back(u);
            if (nonempty.empty())
                throw std::invalid_argument("analyze: capacity needs at least one nonempty MPC set.");
            for (auto &f : write_capacity_study(directory, run_capacity_study(nonempty, cfg)))
                written.push_back(f);
        }
        return written;
    }

    json run_pipeline(const ExperimentConfig &cfg)
    {
        Workspace ws(cfg);
        ws.run_all();
        return ws.manifest();
    }

    std::vector<DriftStudyRow> run_drift_study(const ExperimentConfig &cfg,
                                               const std::function<void(const std::string &)> &progress)
    {
        cfg.validate();
        const double lambda = cfg.scenario.wavelength();
        const FrequencyGrid grid = cfg.scenario.grid();
        const auto tx = cfg.scenario.tx.build(lambda);
        const auto rx = cfg.scenario.rx.build(lambda);
        const Schedule sched = cfg.make_schedule();
        const auto ref = reference_spec(cfg, sched);

        std::vector<std::optional<DriftMethod>> methods;
        bool need_primary = false;
        for (const auto &m : cfg.study.methods)
        {
            if (m == "none")
            {
                methods.emplace_back();
                continue;
            }
            methods.emplace_back(drift_method_from_string(m));
            need_primary = need_primary || *methods.back() == DriftMethod::primary;
            if (!ref)
                throw std::invalid_argument("study-drift: correction methods need a reference antenna.");
        }

        const std::size_t n_paths = cfg.scenario.mpcs.empty() ? cfg.scenario.random_paths : cfg.scenario.mpcs.size();
        CleanConfig clean = effective_clean(cfg);
        clean.max_paths = n_paths;
        const Extractor<double> extractor(tx, rx, grid, clean);
        std::optional<ReferenceEstimator<double>> estimator;
        if (need_primary)
            estimator.emplace(rx, grid, effective_drift_search(cfg));
        const MatchScales scales{clean.angle_grid, clean.delay_grid};

        const auto &levels = cfg.study.allan_devs;
        std::vector<std::vector<RmseAccumulator>> acc(levels.size(), std::vector<RmseAccumulator>(methods.size()));
        std::vector<std::vector<std::size_t>> low(levels.size(), std::vector<std::size_t>(methods.size(), 0));

        const std::size_t rotors = sched.rotors();
        const TensorDims dims{rotors, cfg.scenario.tx.column_size(), rx.size(), grid.size(), 1};
        const TensorDims ref_dims{rotors, 1, rx.size(), grid.size(), 1};

        for (std::size_t trial = 0; trial < cfg.study.trials; ++trial)
        {
            const auto scene = scenario_mpcs(cfg, derive_seed(cfg.seed, "study-scene", trial));
            // unit walk, scaled per level so that all levels share one realization
            const DriftTrace unit = realize_drift(sched, 1.0, grid.center(), derive_seed(cfg.seed, "study-drift", trial));
            const std::uint64_t acq_seed = derive_seed(cfg.seed, "study-acquisition", trial);

            for (std::size_t li = 0; li < levels.size(); ++li)
            {
                std::vector<double> phases = unit.phases();
                for (auto &p : phases)
                    p *= levels[li];
                const DriftTrace trace(unit.times(), std::move(phases), levels[li], unit.seed());

                TransferTensor<double> avg(dims, grid, false), ref_avg(ref_dims, grid, false);
                for (std::size_t r = 0; r < rotors; ++r)
                {
                    const auto a = acquire_rotor<double>(r, scene, tx, rx, ref ? &*ref : nullptr, grid, sched, trace,
                                                         cfg.n0, cfg.outliers, acq_seed);
                    avg.set_cube(r, 0, prep_tensor(a.data, cfg.prep).averaged.cube(0, 0));
                    if (ref)
                        ref_avg.set_cube(r, 0, prep_tensor(a.reference, cfg.prep).averaged.cube(0, 0));
                }

                for (std::size_t mi = 0; mi < methods.size(); ++mi)
                {
                    TransferTensor<double> corrected = avg;
                    if (methods[mi])
                    {
                        const RotorPhaseEstimate est = *methods[mi] == DriftMethod::primary
                                                           ? estimator->estimate(ref_avg)
                                                           : estimate_appendix(*methods[mi], ref_avg);
                        for (auto f : est.low_confidence)
                            low[li][mi] += f;
                        apply_correction(corrected, est.phases);
                    }
                    const auto res = extractor.extract(flatten_virtual(corrected, 0));
                    const auto pairs = match_mpcs<double>(scene, res.mpcs, scales);
                    acc[li][mi].add<double>(scene, res.mpcs, pairs);
                }
            }
            if (progress)
                progress("trial " + std::to_string(trial + 1) + "/" + std::to_string(cfg.study.trials));
        }

        std::vector<DriftStudyRow> rows;
        for (std::size_t li = 0; li < levels.size(); ++li)
            for (std::size_t mi = 0; mi < methods.size(); ++mi)
            {
                DriftStudyRow row;
                row.allan_dev = levels[li];
                row.method = cfg.study.methods[mi];
                row.trials = cfg.study.trials;
                row.rmse = acc[li][mi].rmse();
                row.low_confidence_rotors = low[li][mi];
                rows.push_back(row);
            }
        return rows;
    }

    void write_drift_study_csv(std::ostream &os, const std::vector<DriftStudyRow> &rows)
    {
        os << "allan_dev,method,trials,matched,rmse_aod_deg,rmse_eod_deg,rmse_aoa_deg,rmse_eoa_deg,rmse_delay_m,"
              "low_confidence_rotors\n"
           << std::setprecision(10);
        for (const auto &r : rows)
            os << r.allan_dev << ',' << r.method << ',' << r.trials << ',' << r.rmse.count << ',' << r.rmse.aod << ','
               << r.rmse.eod << ',' << r.rmse.aoa << ',' << r.rmse.eoa << ',' << r.rmse.delay_m << ','
               << r.low_confidence_rotors << '\n';
    }

    std::string array_label(const ArrayConfig &a, std::size_t index)
    {
        std::string dims;
        if (a.kind == "cylinder")
            dims = std::to_string(a.rings) + "x" + std::to_string(a.per_ring);
        else if (a.kind == "rectangular")
            dims = std::to_string(a.n_el) + "x" + std::to_string(a.n_az);
        else
            dims = std::to_string(a.element_count());
        return std::to_string(index) + "_" + a.kind + "_" + dims;
    }

    std::vector<CapacityStudyEntry> run_capacity_study(const std::vector<std::vector<Mpc<double>>> &users,
                                                       const ExperimentConfig &cfg)
    {
        if (users.empty())
            throw std::invalid_argument("study-capacity: need at least one MPC set.");
        for (const auto &u : users)
            if (u.empty())
                throw std::invalid_argument("study-capacity: MPC sets must be nonempty.");
        const auto &cap = cfg.analysis.capacity;
        if (cap.arrays.empty())
            throw std::invalid_argument("study-capacity: no base-station arrays configured.");
        if (cap.realizations == 0)
            throw std::invalid_argument("study-capacity: realizations must be >= 1.");
        const double lambda = cfg.scenario.wavelength();
        const FrequencyGrid grid = cfg.scenario.grid();
        const std::uint64_t seed = derive_seed(cfg.seed, "capacity");

        std::vector<Detector> detectors;
        for (const auto &d : cap.detectors)
            detectors.push_back(detector_from_string(d));
        const bool single = users.size() == 1;

        std::vector<CapacityStudyEntry> out;
        for (std::size_t ai = 0; ai < cap.arrays.size(); ++ai)
        {
            const auto spec = cap.arrays[ai].build(lambda);
            const std::string label = array_label(cap.arrays[ai], ai);
            const std::size_t n_det = single ? 1 : detectors.size();
            std::vector<std::vector<double>> caps(n_det, std::vector<double>(cap.realizations));
            for (std::size_t i = 0; i < cap.realizations; ++i)
            {
                const CMat<double> h0 = reconstruct_channel<double>(users[0], spec, grid, derive_seed(seed, "user0", i));
                if (single)
                {
                    caps[0][i] = capacity_single<double>(h0, cap.n0);
                    continue;
                }
                const CMat<double> h1 = reconstruct_channel<double>(users[1], spec, grid, derive_seed(seed, "user1", i));
                for (std::size_t d = 0; d < n_det; ++d)
                    caps[d][i] = capacity_two_user<double>(h0, h1, cap.n0, detectors[d]);
            }
            for (std::size_t d = 0; d < n_det; ++d)
            {
                CapacityStudyEntry e;
                e.array = label;
                e.elements = spec.size();
                e.report = make_capacity_report(single ? "single" : to_string(detectors[d]), std::move(caps[d]));
                out.push_back(std::move(e));
            }
        }
        return out;
    }

    std::vector<std::string> write_capacity_study(const std::string &directory,
                                                  const std::vector<CapacityStudyEntry> &entries)
    {
        fs::create_directories(directory);
        std::vector<std::string> written;
        std::ostringstream summary;
        summary << "array,elements,detector,realizations,mean_bps_hz,stddev_bps_hz\n" << std::setprecision(12);
        for (const auto &e : entries)
        {
            const std::string name = "capacity_" + e.array + "_" + e.report.detector + ".csv";
            write_text_file((fs::path(directory) / name).string(),
                            to_text([&](std::ostream &os) { write_capacity_cdf_csv(os, e.report); }));
            written.push_back(name);
            summary << e.array << ',' << e.elements << ',' << e.report.detector << ',' << e.report.capacities.size()
                    << ',' << e.report.mean << ',' << e.report.stddev << '\n';
        }
        write_text_file((fs::path(directory) / files::capacity_summary).string(), summary.str());
        written.push_back(files::capacity_summary);
        return written;
    }
}
