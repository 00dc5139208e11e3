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

#include <cstdint>
#include <span>
#include <vector>

#include "sounder/channel.hpp"

namespace sounder
{
    /*!
    Pairwise snapshot correlation K_ij = |sum_k h_i(f_k) conj(h_j(f_k)) df| and its column sums g.
    */
    struct SnapshotCorrelation
    {
        RMat<double> K;
        RVec<double> g;
    };

    // snapshots: one snapshot per row (S x N_f)
    template <typename dtype>
    SnapshotCorrelation correlation_matrix(const Eigen::Ref<const CMat<dtype>> &snapshots, double df);

    // Lower middle element for even lengths
    double lower_median(std::vector<double> values);

    /*!
    Keeps snapshot i iff |g_i - median(g)| <= rel_tol * median(g). The median snapshot itself is always kept.
    Throws std::domain_error if median(g) = 0.
    */
    std::vector<std::size_t> filter_outliers(const SnapshotCorrelation &corr, double rel_tol = 0.2);

    // Coherent mean of the kept rows
    template <typename dtype>
    CVec<dtype> average_snapshots(const Eigen::Ref<const CMat<dtype>> &snapshots, std::span<const std::size_t> kept);

    struct PrepConfig
    {
        double rel_tol = 0.2;
        bool filter = true;
    };

    template <typename dtype>
    struct PrepResult
    {
        TransferTensor<dtype> averaged;       // one snapshot; timestamps are the mean over all snapshots
        std::vector<std::uint8_t> removed;    // per (rotor, tx, rx, snapshot) of the input
        std::vector<std::uint8_t> degenerate; // per (rotor, tx, rx): all-zero pair, every snapshot kept
        std::size_t removed_count = 0;
        std::size_t degenerate_count = 0;
    };

    // Outlier filtering and averaging, independently for every TX-RX pair of every rotor position
    template <typename dtype>
    PrepResult<dtype> prep_tensor(const TransferTensor<dtype> &tensor, const PrepConfig &cfg = {});
}
