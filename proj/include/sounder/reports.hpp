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

#include <iosfwd>
#include <string>
#include <vector>

#include "sounder/drift.hpp"
#include "sounder/metrics.hpp"
#include "sounder/prep.hpp"

namespace sounder
{
    /*!
    MPC list, one row per path:
    index,power_db,delay_m,aod_deg,eod_deg,aoa_deg,eoa_deg,gain_re,gain_im
    */
    void write_mpc_csv(std::ostream &os, const std::vector<Mpc<double>> &mpcs);
    void write_mpc_csv(const std::string &path, const std::vector<Mpc<double>> &mpcs);
    std::vector<Mpc<double>> read_mpc_csv(std::istream &is);
    std::vector<Mpc<double>> read_mpc_csv(const std::string &path);

    struct SpreadRow
    {
        std::string label;
        std::size_t paths = 0;
        SpreadStats stats;
    };

    // label,paths,esd_deg,asd_deg,esa_deg,asa_deg,mean_eod_deg,mean_aod_deg,mean_eoa_deg,mean_aoa_deg
    void write_spreads_csv(std::ostream &os, const std::vector<SpreadRow> &rows);

    // Square matrix r_ij with a header row of labels
    void write_separability_csv(std::ostream &os, const std::vector<SpreadRow> &rows);

    // capacity_bps_hz,quantile
    void write_capacity_cdf_csv(std::ostream &os, const CapacityReport &report);

    /*!
    One row per TX-RX pair of every rotor position:
    rotor,tx,rx,pair_index,removed,degenerate,g
    removed lists the dropped snapshot indices and g the correlation column sums, both ';'-separated.
    */
    template <typename dtype>
    void write_outlier_report(std::ostream &os, const TransferTensor<dtype> &raw, const PrepResult<dtype> &prep);

    // rotor,phase_rad,unwrapped_rad,delay_m,aoa_deg,eoa_deg,gain_abs,peak_ratio,low_confidence
    void write_drift_report(std::ostream &os, const RotorPhaseEstimate &estimate);

    // Writes contents to path, throwing std::runtime_error on I/O failure
    void write_text_file(const std::string &path, const std::string &contents);
    std::string read_text_file(const std::string &path);
}
