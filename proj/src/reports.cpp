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

#include "sounder/reports.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace sounder
{
    namespace
    {
        std::vector<std::string> split(const std::string &line, char sep)
        {
            std::vector<std::string> out;
            std::string cell;
            std::istringstream ss(line);
            while (std::getline(ss, cell, sep))
                out.push_back(cell);
            if (!line.empty() && line.back() == sep)
                out.emplace_back();
            return out;
        }

        double parse_double(const std::string &s, std::size_t line)
        {
            try
            {
                std::size_t used = 0;
                const double v = std::stod(s, &used);
                if (used != s.size())
                    throw std::invalid_argument(s);
                return v;
            }
            catch (const std::exception &)
            {
                throw std::invalid_argument("MPC CSV line " + std::to_string(line) + ": bad number '" + s + "'.");
            }
        }
    }

    void write_mpc_csv(std::ostream &os, const std::vector<Mpc<double>> &mpcs)
    {
        os << "index,power_db,delay_m,aod_deg,eod_deg,aoa_deg,eoa_deg,gain_re,gain_im\n";
        os << std::setprecision(17);
        for (std::size_t i = 0; i < mpcs.size(); ++i)
        {
            const auto &m = mpcs[i];
            const double p = std::norm(m.gain);
            os << i << ',' << (p > 0.0 ? 10.0 * std::log10(p) : -HUGE_VAL) << ',' << m.delay_m() << ','
               << m.departure.azimuth << ',' << m.departure.elevation << ',' << m.arrival.azimuth << ','
               << m.arrival.elevation << ',' << m.gain.real() << ',' << m.gain.imag() << '\n';
        }
    }

    void write_mpc_csv(const std::string &path, const std::vector<Mpc<double>> &mpcs)
    {
        std::ostringstream os;
        write_mpc_csv(os, mpcs);
        write_text_file(path, os.str());
    }

    std::vector<Mpc<double>> read_mpc_csv(std::istream &is)
    {
        std::string line;
        if (!std::getline(is, line) || line.rfind("index,power_db,delay_m", 0) != 0)
            throw std::invalid_argument("MPC CSV: missing or unexpected header.");
        std::vector<Mpc<double>> out;
        std::size_t no = 1;
        while (std::getline(is, line))
        {
            ++no;
            if (line.empty())
                continue;
            const auto cells = split(line, ',');
            if (cells.size() != 9)
                throw std::invalid_argument("MPC CSV line " + std::to_string(no) + ": expected 9 columns.");
            const double delay_m = parse_double(cells[2], no);
            if (delay_m < 0.0)
                throw std::invalid_argument("MPC CSV line " + std::to_string(no) + ": negative delay.");
            Mpc<double> m;
            m.delay = delay_m / speed_of_light;
            m.departure = Direction<double>(parse_double(cells[3], no), parse_double(cells[4], no));
            m.arrival = Direction<double>(parse_double(cells[5], no), parse_double(cells[6], no));
            m.gain = cplx<double>(parse_double(cells[7], no), parse_double(cells[8], no));
            out.push_back(m);
        }
        return out;
    }

    std::vector<Mpc<double>> read_mpc_csv(const std::string &path)
    {
        std::ifstream is(path);
        if (!is)
            throw std::runtime_error("Cannot open MPC file '" + path + "'.");
        return read_mpc_csv(is);
    }

    void write_spreads_csv(std::ostream &os, const std::vector<SpreadRow> &rows)
    {
        os << "label,paths,esd_deg,asd_deg,esa_deg,asa_deg,mean_eod_deg,mean_aod_deg,mean_eoa_deg,mean_aoa_deg\n";
        os << std::setprecision(12);
        for (const auto &r : rows)
        {
            const auto &s = r.stats;
            os << r.label << ',' << r.paths << ',' << s.esd << ',' << s.asd << ',' << s.esa << ',' << s.asa << ','
               << s.mean_eod << ',' << s.mean_aod << ',' << s.mean_eoa << ',' << s.mean_aoa << '\n';
        }
    }

    void write_separability_csv(std::ostream &os, const std::vector<SpreadRow> &rows)
    {
        os << "user";
        for (const auto &r : rows)
            os << ',' << r.label;
        os << '\n' << std::setprecision(12);
        for (const auto &a : rows)
        {
            os << a.label;
            for (const auto &b : rows)
                os << ',' << separability(a.stats, b.stats);
            os << '\n';
        }
    }

    void write_capacity_cdf_csv(std::ostream &os, const CapacityReport &report)
    {
        os << "capacity_bps_hz,quantile\n" << std::setprecision(17);
        for (const auto &[c, q] : report.cdf)
            os << c << ',' << q << '\n';
    }

    template <typename dtype>
    void write_outlier_report(std::ostream &os, const TransferTensor<dtype> &raw, const PrepResult<dtype> &prep)
    {
        const auto &d = raw.dims();
        os << "rotor,tx,rx,pair_index,removed,degenerate,g\n" << std::setprecision(10);
        const double df = raw.grid().step();
        std::size_t pair = 0;
        for (std::size_t r = 0; r < d.rotors; ++r)
            for (std::size_t t = 0; t < d.tx; ++t)
                for (std::size_t n = 0; n < d.rx; ++n, ++pair)
                {
                    const auto corr = correlation_matrix<dtype>(raw.pair(r, t, n), df);
                    os << r << ',' << t << ',' << n << ',' << pair << ',';
                    bool first = true;
                    for (std::size_t s = 0; s < d.snapshots; ++s)
                        if (prep.removed[raw.pair_index(r, t, n, s)])
                        {
                            os << (first ? "" : ";") << s;
                            first = false;
                        }
                    os << ',' << int(prep.degenerate[pair]) << ',';
                    for (Eigen::Index s = 0; s < corr.g.size(); ++s)
                        os << (s ? ";" : "") << corr.g(s);
                    os << '\n';
                }
    }

    void write_drift_report(std::ostream &os, const RotorPhaseEstimate &e)
    {
        os << "rotor,phase_rad,unwrapped_rad,delay_m,aoa_deg,eoa_deg,gain_abs,peak_ratio,low_confidence\n";
        os << std::setprecision(17);
        auto opt = [](const std::vector<double> &v, std::size_t r) -> std::string
        {
            if (r >= v.size())
                return "";
            std::ostringstream s;
            s << std::setprecision(17) << v[r];
            return s.str();
        };
        for (std::size_t r = 0; r < e.phases.size(); ++r)
            os << r << ',' << e.phases[r] << ',' << e.unwrapped[r] << ',' << opt(e.delay_m, r) << ','
               << opt(e.aoa, r) << ',' << opt(e.eoa, r) << ',' << opt(e.gain_abs, r) << ','
               << opt(e.peak_ratio, r) << ',' << int(e.low_confidence[r]) << '\n';
    }

    void write_text_file(const std::string &path, const std::string &contents)
    {
        std::ofstream os(path, std::ios::binary);
        if (!os)
            throw std::runtime_error("Cannot open '" + path + "' for writing.");
        os.write(contents.data(), std::streamsize(contents.size()));
        if (!os)
            throw std::runtime_error("Write to '" + path + "' failed.");
    }

    std::string read_text_file(const std::string &path)
    {
        std::ifstream is(path, std::ios::binary);
        if (!is)
            throw std::runtime_error("Cannot open '" + path + "'.");
        std::ostringstream ss;
        ss << is.rdbuf();
        return ss.str();
    }

    template void write_outlier_report(std::ostream &, const TransferTensor<float> &, const PrepResult<float> &);
    template void write_outlier_report(std::ostream &, const TransferTensor<double> &, const PrepResult<double> &);
}
