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

#include <memory>
#include <string>
#include <vector>

#include "sounder/search.hpp"

namespace sounder
{
    struct CleanConfig
    {
        double angle_grid = 1.0;        // degrees
        double delay_grid = 3.0;        // meters
        double dynamic_range = 20.0;    // dB
        std::size_t alt_iterations = 3;
        std::size_t max_paths = 50;
        double delay_min = 0.0;         // meters
        double delay_max = 600.0;       // meters
        double noise_gate = 6.0;        // dB above the median objective
        double tx_az_min = -180.0, tx_az_max = 180.0, tx_el_min = -90.0, tx_el_max = 90.0;
        double rx_az_min = -180.0, rx_az_max = 180.0, rx_el_min = -90.0, rx_el_max = 90.0;

        void validate() const;
        AngleGrid tx_grid() const;
        AngleGrid rx_grid() const;
        DelayGrid delays() const;
    };

    // Grid indices of one path hypothesis
    struct PathIndex
    {
        std::size_t delay = 0;
        std::size_t tx_dir = 0;
        std::size_t rx_dir = 0;
        bool operator==(const PathIndex &) const = default;
    };

    struct PeakSearch
    {
        PathIndex index;
        double objective = 0.0;     // |b_T^H H e conj(b_R)| / (||b_T|| ||b_R||)
        double init_peak = 0.0;     // peak of the TX-beamforming initialization
        double init_median = 0.0;   // its median over the grid
        std::size_t iterations = 0; // alternation rounds used
        bool converged = false;
    };

    template <typename dtype>
    struct ExtractionResult
    {
        std::vector<Mpc<dtype>> mpcs;          // descending |gain|
        std::vector<double> residual_power;    // [0] = input power, then after every subtraction
        std::vector<double> peak_objective;    // objective at every accepted peak, extraction order
        std::vector<std::size_t> iterations;   // alternation rounds per accepted peak
        bool empty = false;                    // first peak failed the noise gate
        std::string stop_reason;
    };

    /*!
    Iterative CLEAN over a channel cube on fixed search grids.

    Search objective for a fixed side: |a^H M e_tau| / ||a||, with M = [H(f_k) conj(b_R)]_k for a TX search and
    M = [H(f_k)^T conj(b_T)]_k for an RX search. Gains use the projection
    alpha = sum_k e^{+j 2 pi (f_k - f_ref) tau} b_T^H H(f_k) conj(b_R) / (N_f ||b_T||^2 ||b_R||^2).
    */
    template <typename dtype>
    class Extractor
    {
    public:
        Extractor(const ArraySpec<dtype> &tx, const ArraySpec<dtype> &rx, const FrequencyGrid &grid,
                  const CleanConfig &cfg);

        const CleanConfig &config() const { return cfg_; }
        const FrequencyGrid &grid() const { return grid_; }
        const SteeringBank<dtype> &tx_bank() const { return tx_bank_; }
        const SteeringBank<dtype> &rx_bank() const { return rx_bank_; }
        const std::vector<double> &delays_s() const { return delays_s_; }

        // (delay, TX direction) maximizing max_n |a^H H[:, n, :] e_tau| / ||a||; fills the objective grid if given
        PathIndex init_tx(const ChannelCube<dtype> &h, ObjectiveGrid *grid_out = nullptr) const;

        // Joint (delay, RX direction) search with the TX steering vector fixed
        std::pair<std::size_t, std::size_t> search_rx(const ChannelCube<dtype> &h, const CVec<dtype> &b_tx,
                                                      double *value = nullptr) const;

        // Joint (delay, TX direction) search with the RX steering vector fixed
        std::pair<std::size_t, std::size_t> search_tx(const ChannelCube<dtype> &h, const CVec<dtype> &b_rx,
                                                      double *value = nullptr) const;

        // Initialization followed by alternating RX / TX searches
        PeakSearch find_peak(const ChannelCube<dtype> &h) const;

        Mpc<dtype> make_mpc(const PathIndex &idx, cplx<dtype> gain) const;
        cplx<dtype> estimate_gain(const ChannelCube<dtype> &h, const PathIndex &idx) const;

        ExtractionResult<dtype> extract(ChannelCube<dtype> h) const;

    private:
        ArraySpec<dtype> tx_, rx_;
        FrequencyGrid grid_;
        CleanConfig cfg_;
        SteeringBank<dtype> tx_bank_, rx_bank_;
        std::vector<double> delays_s_;
        CMat<dtype> kernel_; // N_f x N_tau
    };

    // Full CLEAN extraction
    template <typename dtype>
    ExtractionResult<dtype> extract(const ChannelCube<dtype> &h, const ArraySpec<dtype> &tx, const ArraySpec<dtype> &rx,
                                    const FrequencyGrid &grid, const CleanConfig &cfg);

    struct InitEstimate
    {
        double delay = 0.0; // seconds
        double aod = 0.0, eod = 0.0;
        double objective = 0.0;
    };

    // TX-beamforming initialization on the grids of cfg
    template <typename dtype>
    InitEstimate init_tx_beamform(const ChannelCube<dtype> &h, const ArraySpec<dtype> &tx, const ArraySpec<dtype> &rx,
                                  const FrequencyGrid &grid, const CleanConfig &cfg);

    enum class SearchSide
    {
        rx, // TX angles fixed, search delay and RX angles
        tx  // RX angles fixed, search delay and TX angles
    };

    struct SideEstimate
    {
        double delay = 0.0; // seconds
        Direction<double> direction;
        double objective = 0.0;
    };

    // One alternation step: joint search of delay and the free side's angles
    template <typename dtype>
    SideEstimate alternate_search(const ChannelCube<dtype> &h, const Direction<dtype> &fixed, SearchSide side,
                                  const ArraySpec<dtype> &tx, const ArraySpec<dtype> &rx, const FrequencyGrid &grid,
                                  const CleanConfig &cfg);

    // Projection gain of a path with the given parameters
    template <typename dtype>
    cplx<dtype> estimate_gain(const ChannelCube<dtype> &h, double delay_s, const Direction<dtype> &departure,
                              const Direction<dtype> &arrival, const ArraySpec<dtype> &tx, const ArraySpec<dtype> &rx,
                              const FrequencyGrid &grid, double f_ref = 0.0);

    // Removes alpha B_T B_R exp(-j 2 pi f_k tau) from h
    template <typename dtype>
    void subtract(ChannelCube<dtype> &h, const Mpc<dtype> &mpc, const ArraySpec<dtype> &tx, const ArraySpec<dtype> &rx,
                  const FrequencyGrid &grid);
}
