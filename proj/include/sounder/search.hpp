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

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "sounder/array.hpp"
#include "sounder/channel.hpp"

namespace sounder
{
    /*!
    Angular search grid. Points are the multiples of step within [az_min, az_max] and [el_min, el_max]
    (inclusive); azimuths that coincide modulo 360 are kept once. Direction index = az_index * n_el + el_index.
    */
    struct AngleGrid
    {
        double step = 1.0;
        double az_min = -180.0, az_max = 180.0;
        double el_min = -90.0, el_max = 90.0;

        void validate() const;
        std::vector<double> azimuths() const;
        std::vector<double> elevations() const;

        // All grid directions in index order
        template <typename dtype>
        std::vector<Direction<dtype>> directions() const;
    };

    // Delay grid: multiples of step_m within [min_m, max_m]
    struct DelayGrid
    {
        double step_m = 3.0;
        double min_m = 0.0, max_m = 600.0;

        void validate() const;
        std::vector<double> delays_m() const;
        std::vector<double> delays_s() const;
    };

    // E(k, i) = exp(+j 2 pi (f_k - f_ref) tau_i)
    template <typename dtype>
    CMat<dtype> delay_kernel(const FrequencyGrid &grid, std::span<const double> delays_s, double f_ref = 0.0);

    /*!
    Steering vectors of an array over an angle grid, with their norms. Cached when the matrix fits in
    cache_limit_bytes, otherwise recomputed chunk by chunk on every pass.
    */
    template <typename dtype>
    class SteeringBank
    {
    public:
        SteeringBank(const ArraySpec<dtype> &spec, const AngleGrid &grid,
                     std::size_t cache_limit_bytes = std::size_t(256) << 20);

        std::size_t size() const { return dirs_.size(); }
        std::size_t elements() const { return spec_.size(); }
        const Direction<dtype> &direction(std::size_t d) const { return dirs_[d]; }
        const std::vector<Direction<dtype>> &directions() const { return dirs_; }
        const AngleGrid &grid() const { return grid_; }
        const ArraySpec<dtype> &spec() const { return spec_; }
        double norm(std::size_t d) const { return norms_[d]; }
        bool cached() const { return cached_; }

        CVec<dtype> column(std::size_t d) const;

        // Calls f(first, A) for consecutive blocks of at most max_chunk directions, A = N x count
        void for_each_chunk(std::size_t max_chunk,
                            const std::function<void(std::size_t, const Eigen::Ref<const CMat<dtype>> &)> &f) const;

    private:
        ArraySpec<dtype> spec_;
        AngleGrid grid_;
        std::vector<Direction<dtype>> dirs_;
        std::vector<double> norms_;
        CMat<dtype> cache_;
        bool cached_ = false;
    };

    struct GridPeak
    {
        std::size_t delay_idx = 0;
        std::size_t dir_idx = 0;
        double value = 0.0;
    };

    /*!
    Objective over (delay, direction), stored delay-major: values(delay_idx, dir_idx).
    */
    struct ObjectiveGrid
    {
        RMat<double> values;

        // Largest value; ties within a relative 1e-10 go to the lowest (delay, direction) index
        GridPeak peak() const;
        double median() const;
    };

    /*!
    Normalized matched-filter scan for G groups of data sharing one steering bank.

    y holds M_g E side by side (N x (G * N_tau)), where M_g is N x N_f data and E the delay kernel. The
    objective is max_g |a_d^H M_g e_tau| / ||a_d||.
    */
    template <typename dtype>
    ObjectiveGrid scan(const Eigen::Ref<const CMat<dtype>> &y, std::size_t groups, const SteeringBank<dtype> &bank);
}
