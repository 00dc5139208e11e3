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

#include "sounder/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sounder/rng.hpp"

namespace sounder
{
    namespace
    {
        // Object reader that rejects keys it was never asked about
        class Reader
        {
        public:
            Reader(const json &j, std::string path) : j_(j), path_(std::move(path))
            {
                if (!j_.is_object())
                    throw std::invalid_argument("Configuration '" + path_ + "' must be an object.");
            }

            template <typename T>
            void get(const char *key, T &out)
            {
                const auto it = j_.find(key);
                if (it == j_.end())
                    return;
                used_.insert(key);
                try
                {
                    out = it->template get<T>();
                }
                catch (const json::exception &e)
                {
                    throw std::invalid_argument("Configuration '" + path_ + "." + key + "': " + e.what());
                }
            }

            const json *child(const char *key)
            {
                const auto it = j_.find(key);
                if (it == j_.end())
                    return nullptr;
                used_.insert(key);
                return &*it;
            }

            std::string path(const char *key) const { return path_ + "." + key; }

            void finish() const
            {
                for (const auto &item : j_.items())
                    if (!used_.count(item.key()))
                        throw std::invalid_argument("Unknown configuration key '" + path_ + "." + item.key() + "'.");
            }

        private:
            const json &j_;
            std::string path_;
            std::set<std::string> used_;
        };

        json pattern_json(const PatternConfig &p)
        {
            return json{{"kind", p.kind}, {"az_3db", p.az_3db}, {"el_3db", p.el_3db}, {"front_to_back", p.front_to_back}};
        }

        PatternConfig parse_pattern(const json &j, const std::string &path)
        {
            PatternConfig p;
            Reader r(j, path);
            r.get("kind", p.kind);
            r.get("az_3db", p.az_3db);
            r.get("el_3db", p.el_3db);
            r.get("front_to_back", p.front_to_back);
            r.finish();
            return p;
        }

        json array_json(const ArrayConfig &a)
        {
            json elems = json::array();
            for (const auto &e : a.elements)
                elems.push_back(json{{"position", e.position}, {"boresight", e.boresight}});
            return json{{"kind", a.kind},
                        {"rings", a.rings},
                        {"per_ring", a.per_ring},
                        {"ring_spacing_m", a.ring_spacing_m},
                        {"radius_m", a.radius_m},
                        {"n_az", a.n_az},
                        {"n_el", a.n_el},
                        {"spacing_m", a.spacing_m},
                        {"position", a.position},
                        {"elements", elems},
                        {"pattern", pattern_json(a.pattern)}};
        }

        ArrayConfig parse_array(const json &j, const std::string &path)
        {
            ArrayConfig a;
            Reader r(j, path);
            r.get("kind", a.kind);
            r.get("rings", a.rings);
            r.get("per_ring", a.per_ring);
            r.get("ring_spacing_m", a.ring_spacing_m);
            r.get("radius_m", a.radius_m);
            r.get("n_az", a.n_az);
            r.get("n_el", a.n_el);
            r.get("spacing_m", a.spacing_m);
            r.get("position", a.position);
            if (const json *e = r.child("elements"))
            {
                if (!e->is_array())
                    throw std::invalid_argument("Configuration '" + r.path("elements") + "' must be a list.");
                for (const auto &item : *e)
                {
                    ElementConfig ec;
                    Reader er(item, r.path("elements[]"));
                    er.get("position", ec.position);
                    er.get("boresight", ec.boresight);
                    er.finish();
                    a.elements.push_back(ec);
                }
            }
            if (const json *p = r.child("pattern"))
                a.pattern = parse_pattern(*p, r.path("pattern"));
            r.finish();
            return a;
        }

        json range_json(const std::array<double, 2> &r)
        {
            return json::array({r[0], r[1]});
        }

        json angle_grid_json(const AngleGrid &g)
        {
            return json{{"step", g.step}, {"az_min", g.az_min}, {"az_max", g.az_max}, {"el_min", g.el_min},
                        {"el_max", g.el_max}};
        }

        AngleGrid parse_angle_grid(const json &j, const std::string &path)
        {
            AngleGrid g;
            Reader r(j, path);
            r.get("step", g.step);
            r.get("az_min", g.az_min);
            r.get("az_max", g.az_max);
            r.get("el_min", g.el_min);
            r.get("el_max", g.el_max);
            r.finish();
            return g;
        }

        std::string slot_name(ReferenceSlot s)
        {
            switch (s)
            {
            case ReferenceSlot::first:
                return "first";
            case ReferenceSlot::last:
                return "last";
            default:
                return "none";
            }
        }

        ReferenceSlot parse_slot(const std::string &s)
        {
            if (s == "first")
                return ReferenceSlot::first;
            if (s == "last")
                return ReferenceSlot::last;
            if (s == "none")
                return ReferenceSlot::none;
            throw std::invalid_argument("Unknown reference slot '" + s + "' (expected first, last or none).");
        }

        double half_wave(double wavelength, double value)
        {
            return value > 0.0 ? value : 0.5 * wavelength;
        }
    }

    PatternModel<double> PatternConfig::model() const
    {
        if (kind == "isotropic")
            return PatternModel<double>::isotropic();
        if (kind == "cosine_lobe")
            return PatternModel<double>::cosine_lobe(az_3db, el_3db, front_to_back);
        throw std::invalid_argument("Unknown pattern kind '" + kind + "' (expected isotropic or cosine_lobe).");
    }

    ArraySpec<double> ArrayConfig::build(double wavelength) const
    {
        const auto pat = pattern.model();
        if (kind == "cylinder")
        {
            const double spacing = half_wave(wavelength, ring_spacing_m);
            const double radius = radius_m > 0.0 ? radius_m : double(per_ring) * 0.5 * wavelength / two_pi;
            return build_virtual_cylinder<double>(rings, per_ring, spacing, radius, wavelength, pat);
        }
        if (kind == "rectangular")
            return build_rectangular<double>(n_az, n_el, half_wave(wavelength, spacing_m), wavelength, pat);
        if (kind == "single")
            return build_single<double>(Vec3<double>(position[0], position[1], position[2]), wavelength, pat);
        if (kind == "elements")
        {
            std::vector<Element<double>> elems;
            for (const auto &e : elements)
            {
                Element<double> el;
                el.position = Vec3<double>(e.position[0], e.position[1], e.position[2]);
                el.boresight = Direction<double>(e.boresight[0], e.boresight[1]);
                elems.push_back(el);
            }
            return ArraySpec<double>(std::move(elems), wavelength, pat);
        }
        throw std::invalid_argument("Unknown array kind '" + kind + "' (expected cylinder, rectangular, single or elements).");
    }

    std::size_t ArrayConfig::column_size() const
    {
        return kind == "cylinder" ? rings : element_count();
    }

    std::size_t ArrayConfig::rotor_count() const
    {
        return kind == "cylinder" ? per_ring : 1;
    }

    std::size_t ArrayConfig::element_count() const
    {
        if (kind == "cylinder")
            return rings * per_ring;
        if (kind == "rectangular")
            return n_az * n_el;
        if (kind == "single")
            return 1;
        return elements.size();
    }

    Mpc<double> MpcConfig::to_mpc() const
    {
        if (!(delay_m >= 0.0))
            throw std::invalid_argument("MPC delay must be >= 0.");
        Mpc<double> m;
        m.gain = cplx<double>(gain_re, gain_im);
        m.delay = delay_m / speed_of_light;
        m.departure = Direction<double>(aod, eod);
        m.arrival = Direction<double>(aoa, eoa);
        return m;
    }

    MpcConfig MpcConfig::from_mpc(const Mpc<double> &m)
    {
        MpcConfig c;
        c.gain_re = m.gain.real();
        c.gain_im = m.gain.imag();
        c.delay_m = m.delay * speed_of_light;
        c.aod = m.departure.azimuth;
        c.eod = m.departure.elevation;
        c.aoa = m.arrival.azimuth;
        c.eoa = m.arrival.elevation;
        return c;
    }

    ExperimentConfig ExperimentConfig::defaults()
    {
        ExperimentConfig c;
        c.scenario.tx.kind = "cylinder";
        c.scenario.tx.rings = 8;
        c.scenario.tx.per_ring = 60;
        c.scenario.tx.pattern = PatternConfig{"cosine_lobe", 26.0, 100.0, 25.0};
        c.scenario.rx.kind = "cylinder";
        c.scenario.rx.rings = 2;
        c.scenario.rx.per_ring = 12;
        c.scenario.rx.pattern = PatternConfig{"cosine_lobe", 90.0, 90.0, 20.0};
        c.scenario.reference.kind = "single";
        c.scenario.reference.position = {0.0, 0.0, 0.6};
        c.scenario.random_paths = 3;
        c.clean.tx_el_min = c.clean.rx_el_min = -20.0;
        c.clean.tx_el_max = c.clean.rx_el_max = 20.0;
        c.n0 = 1e-4;
        c.analysis.capacity.arrays.push_back(c.scenario.tx);
        ArrayConfig rect;
        rect.kind = "rectangular";
        rect.n_az = 60;
        rect.n_el = 8;
        rect.pattern = c.scenario.tx.pattern;
        c.analysis.capacity.arrays.push_back(rect);
        return c;
    }

    Schedule ExperimentConfig::make_schedule() const
    {
        ScheduleConfig s = schedule;
        s.tx_elements = scenario.tx.column_size();
        s.rx_elements = scenario.rx.element_count();
        s.rotor_positions.clear();
        const std::size_t rotors = scenario.tx.rotor_count();
        for (std::size_t r = 0; r < rotors; ++r)
            s.rotor_positions.push_back(360.0 * double(r) / double(rotors));
        return Schedule(s);
    }

    void ExperimentConfig::validate() const
    {
        const double lambda = scenario.wavelength();
        scenario.grid();
        scenario.tx.build(lambda);
        scenario.rx.build(lambda);
        if (schedule.reference_slot != ReferenceSlot::none)
        {
            const auto ref = scenario.reference.build(lambda);
            if (ref.size() != 1)
                throw std::invalid_argument("The reference antenna must be a single element.");
        }
        make_schedule();
        scenario.ranges.validate();
        if (scenario.mpcs.empty() && scenario.random_paths == 0)
            throw std::invalid_argument("scenario: need explicit MPCs or random_paths >= 1.");
        for (const auto &m : scenario.mpcs)
            m.to_mpc();
        if (!(n0 >= 0.0))
            throw std::invalid_argument("n0 must be >= 0.");
        outliers.validate();
        if (!(prep.rel_tol > 0.0 && prep.rel_tol < 1.0))
            throw std::invalid_argument("prep.rel_tol must be in (0, 1).");
        clean.validate();
        drift_method_from_string(drift.method);
        drift.search.angles.validate();
        drift.search.delays.validate();
        if (!(drift.allan_dev >= 0.0))
            throw std::invalid_argument("drift.allan_dev must be >= 0.");
        for (const auto &d : analysis.capacity.detectors)
            detector_from_string(d);
        for (const auto &a : analysis.capacity.arrays)
            a.build(lambda);
        if (analysis.capacity.enabled && !(analysis.capacity.n0 > 0.0))
            throw std::invalid_argument("analysis.capacity.n0 must be positive.");
        if (study.trials == 0)
            throw std::invalid_argument("study.trials must be >= 1.");
        for (const auto &m : study.methods)
            if (m != "none")
                drift_method_from_string(m);
    }

    json to_json(const ExperimentConfig &c)
    {
        json mpcs = json::array();
        for (const auto &m : c.scenario.mpcs)
            mpcs.push_back(json{{"gain_re", m.gain_re}, {"gain_im", m.gain_im}, {"delay_m", m.delay_m}, {"aod", m.aod},
                                {"eod", m.eod}, {"aoa", m.aoa}, {"eoa", m.eoa}});
        const auto &rg = c.scenario.ranges;
        json cap_arrays = json::array();
        for (const auto &a : c.analysis.capacity.arrays)
            cap_arrays.push_back(array_json(a));

        return json{
            {"schema_version", schema_version},
            {"seed", c.seed},
            {"scenario",
             {{"f_start_hz", c.scenario.f_start},
              {"f_stop_hz", c.scenario.f_stop},
              {"n_freq", c.scenario.n_freq},
              {"tx_array", array_json(c.scenario.tx)},
              {"rx_array", array_json(c.scenario.rx)},
              {"reference_antenna", array_json(c.scenario.reference)},
              {"mpcs", mpcs},
              {"random_paths", c.scenario.random_paths},
              {"ranges",
               {{"aod", range_json(rg.aod)},
                {"eod", range_json(rg.eod)},
                {"aoa", range_json(rg.aoa)},
                {"eoa", range_json(rg.eoa)},
                {"delay_m", range_json(rg.delay_m)},
                {"power_db", range_json(rg.power_db)}}},
              {"snap_to_grid", c.scenario.snap_to_grid}}},
            {"schedule",
             {{"pair_duration_s", c.schedule.pair_duration},
              {"switch_delay_s", c.schedule.switch_delay},
              {"rotor_delay_s", c.schedule.rotor_delay},
              {"snapshots", c.schedule.snapshots},
              {"polarization_slots", c.schedule.polarization_slots},
              {"tx_port_slots", c.schedule.tx_port_slots},
              {"reference_slot", slot_name(c.schedule.reference_slot)}}},
            {"drift",
             {{"allan_dev", c.drift.allan_dev},
              {"correct", c.drift.correct},
              {"method", c.drift.method},
              {"phase_reference",
               c.drift.search.phase_reference == PhaseReference::band_center ? "band_center" : "absolute"},
              {"min_peak_ratio", c.drift.search.min_peak_ratio},
              {"angles", angle_grid_json(c.drift.search.angles)},
              {"delays",
               {{"step_m", c.drift.search.delays.step_m},
                {"min_m", c.drift.search.delays.min_m},
                {"max_m", c.drift.search.delays.max_m}}}}},
            {"n0", c.n0},
            {"outliers",
             {{"probability", c.outliers.probability},
              {"scale_min", c.outliers.scale_min},
              {"scale_max", c.outliers.scale_max},
              {"exclude_lo", c.outliers.exclude_lo},
              {"exclude_hi", c.outliers.exclude_hi},
              {"delay_shift_m", c.outliers.delay_shift_m}}},
            {"prep", {{"rel_tol", c.prep.rel_tol}, {"filter", c.prep.filter}}},
            {"clean",
             {{"angle_grid", c.clean.angle_grid},
              {"delay_grid_m", c.clean.delay_grid},
              {"dynamic_range_db", c.clean.dynamic_range},
              {"alt_iterations", c.clean.alt_iterations},
              {"max_paths", c.clean.max_paths},
              {"auto_delay_window", c.auto_delay_window},
              {"delay_min_m", c.clean.delay_min},
              {"delay_max_m", c.clean.delay_max},
              {"noise_gate_db", c.clean.noise_gate},
              {"tx_az", json::array({c.clean.tx_az_min, c.clean.tx_az_max})},
              {"tx_el", json::array({c.clean.tx_el_min, c.clean.tx_el_max})},
              {"rx_az", json::array({c.clean.rx_az_min, c.clean.rx_az_max})},
              {"rx_el", json::array({c.clean.rx_el_min, c.clean.rx_el_max})}}},
            {"analysis",
             {{"sector", range_json(c.analysis.sector)},
              {"capacity",
               {{"enabled", c.analysis.capacity.enabled},
                {"arrays", cap_arrays},
                {"detectors", c.analysis.capacity.detectors},
                {"realizations", c.analysis.capacity.realizations},
                {"n0", c.analysis.capacity.n0}}}}},
            {"study",
             {{"allan_devs", c.study.allan_devs}, {"trials", c.study.trials}, {"methods", c.study.methods}}},
            {"output",
             {{"directory", c.output.directory},
              {"write_raw_tensors", c.output.write_raw_tensors},
              {"write_csv_tensors", c.output.write_csv_tensors}}}};
    }

    ExperimentConfig config_from_json(const json &j)
    {
        ExperimentConfig c = ExperimentConfig::defaults();
        Reader root(j, "config");
        int version = -1;
        root.get("schema_version", version);
        if (version != schema_version)
            throw std::invalid_argument("Configuration schema_version must be " + std::to_string(schema_version) + ".");
        root.get("seed", c.seed);
        root.get("n0", c.n0);

        if (const json *s = root.child("scenario"))
        {
            Reader r(*s, "config.scenario");
            r.get("f_start_hz", c.scenario.f_start);
            r.get("f_stop_hz", c.scenario.f_stop);
            r.get("n_freq", c.scenario.n_freq);
            if (const json *a = r.child("tx_array"))
                c.scenario.tx = parse_array(*a, r.path("tx_array"));
            if (const json *a = r.child("rx_array"))
                c.scenario.rx = parse_array(*a, r.path("rx_array"));
            if (const json *a = r.child("reference_antenna"))
                c.scenario.reference = parse_array(*a, r.path("reference_antenna"));
            if (const json *m = r.child("mpcs"))
            {
                if (!m->is_array())
                    throw std::invalid_argument("Configuration 'config.scenario.mpcs' must be a list.");
                c.scenario.mpcs.clear();
                for (const auto &item : *m)
                {
                    MpcConfig mc;
                    Reader mr(item, "config.scenario.mpcs[]");
                    mr.get("gain_re", mc.gain_re);
                    mr.get("gain_im", mc.gain_im);
                    mr.get("delay_m", mc.delay_m);
                    mr.get("aod", mc.aod);
                    mr.get("eod", mc.eod);
                    mr.get("aoa", mc.aoa);
                    mr.get("eoa", mc.eoa);
                    mr.finish();
                    c.scenario.mpcs.push_back(mc);
                }
            }
            r.get("random_paths", c.scenario.random_paths);
            if (const json *g = r.child("ranges"))
            {
                Reader gr(*g, "config.scenario.ranges");
                gr.get("aod", c.scenario.ranges.aod);
                gr.get("eod", c.scenario.ranges.eod);
                gr.get("aoa", c.scenario.ranges.aoa);
                gr.get("eoa", c.scenario.ranges.eoa);
                gr.get("delay_m", c.scenario.ranges.delay_m);
                gr.get("power_db", c.scenario.ranges.power_db);
                gr.finish();
            }
            r.get("snap_to_grid", c.scenario.snap_to_grid);
            r.finish();
        }

        if (const json *s = root.child("schedule"))
        {
            Reader r(*s, "config.schedule");
            r.get("pair_duration_s", c.schedule.pair_duration);
            r.get("switch_delay_s", c.schedule.switch_delay);
            r.get("rotor_delay_s", c.schedule.rotor_delay);
            r.get("snapshots", c.schedule.snapshots);
            r.get("polarization_slots", c.schedule.polarization_slots);
            r.get("tx_port_slots", c.schedule.tx_port_slots);
            std::string slot = slot_name(c.schedule.reference_slot);
            r.get("reference_slot", slot);
            c.schedule.reference_slot = parse_slot(slot);
            r.finish();
        }

        if (const json *s = root.child("drift"))
        {
            Reader r(*s, "config.drift");
            r.get("allan_dev", c.drift.allan_dev);
            r.get("correct", c.drift.correct);
            r.get("method", c.drift.method);
            std::string ref = c.drift.search.phase_reference == PhaseReference::band_center ? "band_center" : "absolute";
            r.get("phase_reference", ref);
            if (ref == "band_center")
                c.drift.search.phase_reference = PhaseReference::band_center;
            else if (ref == "absolute")
                c.drift.search.phase_reference = PhaseReference::absolute;
            else
                throw std::invalid_argument("Unknown phase_reference '" + ref + "' (expected band_center or absolute).");
            r.get("min_peak_ratio", c.drift.search.min_peak_ratio);
            if (const json *a = r.child("angles"))
                c.drift.search.angles = parse_angle_grid(*a, "config.drift.angles");
            if (const json *d = r.child("delays"))
            {
                Reader dr(*d, "config.drift.delays");
                dr.get("step_m", c.drift.search.delays.step_m);
                dr.get("min_m", c.drift.search.delays.min_m);
                dr.get("max_m", c.drift.search.delays.max_m);
                dr.finish();
            }
            r.finish();
        }

        if (const json *s = root.child("outliers"))
        {
            Reader r(*s, "config.outliers");
            r.get("probability", c.outliers.probability);
            r.get("scale_min", c.outliers.scale_min);
            r.get("scale_max", c.outliers.scale_max);
            r.get("exclude_lo", c.outliers.exclude_lo);
            r.get("exclude_hi", c.outliers.exclude_hi);
            r.get("delay_shift_m", c.outliers.delay_shift_m);
            r.finish();
        }

        if (const json *s = root.child("prep"))
        {
            Reader r(*s, "config.prep");
            r.get("rel_tol", c.prep.rel_tol);
            r.get("filter", c.prep.filter);
            r.finish();
        }

        if (const json *s = root.child("clean"))
        {
            Reader r(*s, "config.clean");
            auto &k = c.clean;
            r.get("angle_grid", k.angle_grid);
            r.get("delay_grid_m", k.delay_grid);
            r.get("dynamic_range_db", k.dynamic_range);
            r.get("alt_iterations", k.alt_iterations);
            r.get("max_paths", k.max_paths);
            r.get("auto_delay_window", c.auto_delay_window);
            r.get("delay_min_m", k.delay_min);
            r.get("delay_max_m", k.delay_max);
            r.get("noise_gate_db", k.noise_gate);
            std::array<double, 2> v;
            v = {k.tx_az_min, k.tx_az_max};
            r.get("tx_az", v);
            k.tx_az_min = v[0], k.tx_az_max = v[1];
            v = {k.tx_el_min, k.tx_el_max};
            r.get("tx_el", v);
            k.tx_el_min = v[0], k.tx_el_max = v[1];
            v = {k.rx_az_min, k.rx_az_max};
            r.get("rx_az", v);
            k.rx_az_min = v[0], k.rx_az_max = v[1];
            v = {k.rx_el_min, k.rx_el_max};
            r.get("rx_el", v);
            k.rx_el_min = v[0], k.rx_el_max = v[1];
            r.finish();
        }

        if (const json *s = root.child("analysis"))
        {
            Reader r(*s, "config.analysis");
            r.get("sector", c.analysis.sector);
            if (const json *cap = r.child("capacity"))
            {
                Reader cr(*cap, "config.analysis.capacity");
                cr.get("enabled", c.analysis.capacity.enabled);
                if (const json *arr = cr.child("arrays"))
                {
                    if (!arr->is_array())
                        throw std::invalid_argument("Configuration 'config.analysis.capacity.arrays' must be a list.");
                    c.analysis.capacity.arrays.clear();
                    for (const auto &item : *arr)
                        c.analysis.capacity.arrays.push_back(parse_array(item, "config.analysis.capacity.arrays[]"));
                }
                cr.get("detectors", c.analysis.capacity.detectors);
                cr.get("realizations", c.analysis.capacity.realizations);
                cr.get("n0", c.analysis.capacity.n0);
                cr.finish();
            }
            r.finish();
        }

        if (const json *s = root.child("study"))
        {
            Reader r(*s, "config.study");
            r.get("allan_devs", c.study.allan_devs);
            r.get("trials", c.study.trials);
            r.get("methods", c.study.methods);
            r.finish();
        }

        if (const json *s = root.child("output"))
        {
            Reader r(*s, "config.output");
            r.get("directory", c.output.directory);
            r.get("write_raw_tensors", c.output.write_raw_tensors);
            r.get("write_csv_tensors", c.output.write_csv_tensors);
            r.finish();
        }
        root.finish();
        c.validate();
        return c;
    }

    ExperimentConfig merge_config(const std::vector<json> &patches)
    {
        json merged = to_json(ExperimentConfig::defaults());
        for (const auto &p : patches)
        {
            if (!p.is_object())
                throw std::invalid_argument("Configuration patches must be JSON objects.");
            merged.merge_patch(p);
        }
        return config_from_json(merged);
    }

    json read_json_file(const std::string &path)
    {
        std::ifstream is(path);
        if (!is)
            throw std::invalid_argument("Cannot open configuration file '" + path + "'.");
        try
        {
            return json::parse(is);
        }
        catch (const json::parse_error &e)
        {
            throw std::invalid_argument("Configuration file '" + path + "' is not valid JSON: " + e.what());
        }
    }

    ExperimentConfig load_config(const std::string &path)
    {
        return merge_config({read_json_file(path)});
    }

    json array_to_json(const ArraySpec<double> &spec)
    {
        const auto &p = spec.pattern();
        json elems = json::array();
        for (const auto &e : spec.elements())
            elems.push_back(json{{"position", {e.position.x(), e.position.y(), e.position.z()}},
                                 {"boresight", {e.boresight.azimuth, e.boresight.elevation}}});
        return json{{"wavelength_m", spec.wavelength()},
                    {"pattern",
                     {{"kind", p.kind == PatternKind::isotropic ? "isotropic" : "cosine_lobe"},
                      {"az_3db", p.az_3db},
                      {"el_3db", p.el_3db},
                      {"front_to_back", p.front_to_back}}},
                    {"elements", elems}};
    }

    ArraySpec<double> array_from_json(const json &j)
    {
        Reader r(j, "array");
        double wavelength = 0.0;
        r.get("wavelength_m", wavelength);
        PatternConfig pc;
        if (const json *p = r.child("pattern"))
            pc = parse_pattern(*p, "array.pattern");
        std::vector<Element<double>> elems;
        if (const json *e = r.child("elements"))
            for (const auto &item : *e)
            {
                ElementConfig ec;
                Reader er(item, "array.elements[]");
                er.get("position", ec.position);
                er.get("boresight", ec.boresight);
                er.finish();
                Element<double> el;
                el.position = Vec3<double>(ec.position[0], ec.position[1], ec.position[2]);
                el.boresight = Direction<double>(ec.boresight[0], ec.boresight[1]);
                elems.push_back(el);
            }
        r.finish();
        return ArraySpec<double>(std::move(elems), wavelength, pc.model());
    }

    json mpcs_to_json(const std::vector<Mpc<double>> &mpcs)
    {
        json out = json::array();
        for (const auto &m : mpcs)
        {
            const auto c = MpcConfig::from_mpc(m);
            out.push_back(json{{"gain_re", c.gain_re}, {"gain_im", c.gain_im}, {"delay_m", c.delay_m}, {"aod", c.aod},
                               {"eod", c.eod}, {"aoa", c.aoa}, {"eoa", c.eoa}});
        }
        return out;
    }

    std::string content_hash(const std::string &bytes)
    {
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
        return buf;
    }
}
