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
#include <span>
#include <vector>

#include "sounder/array.hpp"

namespace sounder
{
    // One discrete multipath component
    template <typename dtype>
    struct Mpc
    {
        cplx<dtype> gain = cplx<dtype>(1, 0); // linear amplitude
        dtype delay = dtype(0);               // seconds
        Direction<dtype> departure;           // AoD, EoD
        Direction<dtype> arrival;             // AoA, EoA

        dtype delay_m() const { return dtype(double(delay) * speed_of_light); }
    };

    /*!
    Uniform frequency grid f_k = start + k * step, k = 0 .. count-1 (Hz).
    */
    class FrequencyGrid
    {
    public:
        FrequencyGrid() = default;
        FrequencyGrid(double start, double step, std::size_t count);

        // count points spanning [f_lo, f_hi] inclusive
        static FrequencyGrid from_band(double f_lo, double f_hi, std::size_t count);

        // Throws std::invalid_argument unless the list is strictly increasing and uniform within 1e-9 relative
        static FrequencyGrid from_points(const std::vector<double> &points);

        std::size_t size() const { return count_; }
        double start() const { return start_; }
        double step() const { return step_; }
        double operator[](std::size_t k) const { return start_ + double(k) * step_; }
        double center() const { return start_ + 0.5 * double(count_ - 1) * step_; }
        std::vector<double> points() const;

    private:
        double start_ = 0.0;
        double step_ = 1.0;
        std::size_t count_ = 0;
    };

    /*!
    Channel of one rotor block and one snapshot: H(f_k) is N_T x N_R for every frequency.

    Stored as one N_T x (N_R * N_f) matrix whose column k * N_R + n holds H(f_k)[:, n], so every
    frequency slice is a contiguous block of columns.
    */
    template <typename dtype>
    struct ChannelCube
    {
        std::size_t n_tx = 0, n_rx = 0, n_freq = 0;
        CMat<dtype> data;

        ChannelCube() = default;
        ChannelCube(std::size_t tx, std::size_t rx, std::size_t freq)
            : n_tx(tx), n_rx(rx), n_freq(freq), data(CMat<dtype>::Zero(Eigen::Index(tx), Eigen::Index(rx * freq))) {}

        cplx<dtype> &operator()(std::size_t t, std::size_t n, std::size_t k)
        {
            return data(Eigen::Index(t), Eigen::Index(k * n_rx + n));
        }
        const cplx<dtype> &operator()(std::size_t t, std::size_t n, std::size_t k) const
        {
            return data(Eigen::Index(t), Eigen::Index(k * n_rx + n));
        }

        auto slice(std::size_t k) { return data.middleCols(Eigen::Index(k * n_rx), Eigen::Index(n_rx)); }
        auto slice(std::size_t k) const { return data.middleCols(Eigen::Index(k * n_rx), Eigen::Index(n_rx)); }

        double power() const { return double(data.squaredNorm()); }
    };

    struct TensorDims
    {
        std::size_t rotors = 1, tx = 1, rx = 1, freq = 1, snapshots = 1;

        std::size_t count() const { return rotors * tx * rx * freq * snapshots; }
        std::size_t pair_count() const { return rotors * tx * rx * snapshots; }
        bool operator==(const TensorDims &) const = default;
    };

    /*!
    Transfer functions indexed (rotor, tx, rx, freq, snapshot), row-major with the snapshot fastest.
    Optional timestamps, one per (rotor, tx, rx, snapshot), in seconds since acquisition start.
    */
    template <typename dtype>
    class TransferTensor
    {
    public:
        TransferTensor() = default;
        TransferTensor(TensorDims dims, FrequencyGrid grid, bool with_timestamps = true);

        const TensorDims &dims() const { return dims_; }
        const FrequencyGrid &grid() const { return grid_; }

        std::size_t index(std::size_t r, std::size_t t, std::size_t n, std::size_t k, std::size_t s) const
        {
            return (((r * dims_.tx + t) * dims_.rx + n) * dims_.freq + k) * dims_.snapshots + s;
        }
        std::size_t pair_index(std::size_t r, std::size_t t, std::size_t n, std::size_t s) const
        {
            return ((r * dims_.tx + t) * dims_.rx + n) * dims_.snapshots + s;
        }

        cplx<dtype> &operator()(std::size_t r, std::size_t t, std::size_t n, std::size_t k, std::size_t s)
        {
            return values_[index(r, t, n, k, s)];
        }
        const cplx<dtype> &operator()(std::size_t r, std::size_t t, std::size_t n, std::size_t k, std::size_t s) const
        {
            return values_[index(r, t, n, k, s)];
        }

        std::vector<cplx<dtype>> &values() { return values_; }
        const std::vector<cplx<dtype>> &values() const { return values_; }

        bool has_timestamps() const { return !timestamps_.empty(); }
        double timestamp(std::size_t r, std::size_t t, std::size_t n, std::size_t s) const
        {
            return timestamps_.at(pair_index(r, t, n, s));
        }
        void set_timestamp(std::size_t r, std::size_t t, std::size_t n, std::size_t s, double value)
        {
            timestamps_.at(pair_index(r, t, n, s)) = value;
        }
        std::vector<double> &timestamps() { return timestamps_; }
        const std::vector<double> &timestamps() const { return timestamps_; }

        // Snapshots of one TX-RX pair as an S x N_f matrix (row s = snapshot s)
        Eigen::Map<CMat<dtype>> pair(std::size_t r, std::size_t t, std::size_t n);
        Eigen::Map<const CMat<dtype>> pair(std::size_t r, std::size_t t, std::size_t n) const;

        // Copy of one rotor block / snapshot
        ChannelCube<dtype> cube(std::size_t r, std::size_t s = 0) const;
        void set_cube(std::size_t r, std::size_t s, const ChannelCube<dtype> &block);

    private:
        TensorDims dims_;
        FrequencyGrid grid_;
        std::vector<cplx<dtype>> values_;
        std::vector<double> timestamps_;
    };

    // Stacks rotor blocks along the TX axis (virtual array element r * tx + t) for one snapshot
    template <typename dtype>
    ChannelCube<dtype> flatten_virtual(const TransferTensor<dtype> &tensor, std::size_t snapshot = 0);

    /*!
    Noiseless multipath synthesis:
    H(f_k) = sum_l alpha_l B_T(dep_l) B_R(arr_l) exp(-j 2 pi f_k tau_l)
    with B_T a column over TX elements and B_R a row over RX elements.
    */
    template <typename dtype>
    ChannelCube<dtype> synthesize(std::span<const Mpc<dtype>> mpcs, const ArraySpec<dtype> &tx,
                                  const ArraySpec<dtype> &rx, const FrequencyGrid &grid);

    // Uniform parameter ranges for random scenarios (angles in degrees, delay in meters, power in dB)
    struct ScenarioRanges
    {
        std::array<double, 2> aod = {-180.0, 180.0};
        std::array<double, 2> eod = {-20.0, 20.0};
        std::array<double, 2> aoa = {-180.0, 180.0};
        std::array<double, 2> eoa = {-20.0, 20.0};
        std::array<double, 2> delay_m = {150.0, 300.0};
        std::array<double, 2> power_db = {0.0, 0.0};

        void validate() const;
    };

    // Random MPCs with uniform angles, delays and powers and a uniform gain phase. Deterministic per seed.
    template <typename dtype>
    std::vector<Mpc<dtype>> sample_scenario(std::uint64_t seed, std::size_t n_paths, const ScenarioRanges &ranges = {});

    // Rounds the angles and the delay to the nearest multiple of the grid steps
    template <typename dtype>
    Mpc<dtype> snap_to_grid(const Mpc<dtype> &mpc, double angle_step_deg, double delay_step_m);

    // Adds circular complex Gaussian noise with variance n0 per sample
    template <typename dtype>
    void add_noise(std::span<cplx<dtype>> values, double n0, std::uint64_t seed);

    template <typename dtype>
    void add_noise(ChannelCube<dtype> &cube, double n0, std::uint64_t seed)
    {
        add_noise(std::span<cplx<dtype>>(cube.data.data(), std::size_t(cube.data.size())), n0, seed);
    }

    template <typename dtype>
    void add_noise(TransferTensor<dtype> &tensor, double n0, std::uint64_t seed)
    {
        add_noise(std::span<cplx<dtype>>(tensor.values()), n0, seed);
    }
}
