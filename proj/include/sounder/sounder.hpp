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
#include <optional>
#include <vector>

#include "sounder/channel.hpp"

namespace sounder
{
    // Position of the reference antenna in the TX port sequence of every snapshot
    enum class ReferenceSlot
    {
        first, // port slot 0, array elements in slots 1 .. n_tx
        last,  // array elements in slots 0 .. n_tx-1, reference in the last port slot
        none   // no reference antenna
    };

    /*!
    Timing constants of the switched/virtual acquisition.

    Each TX-RX pair occupies pair_duration followed by switch_delay. Every TX port sweeps
    polarization_slots * rx_elements RX port slots; only the last polarization group is simulated.
    A snapshot sweeps tx_port_slots TX ports (0 selects the minimum needed), each TX port adding one
    switch_delay. After all snapshots of a rotor position the rotor moves for rotor_delay.
    Acquisition order: rotor, snapshot, TX port, RX port.
    */
    struct ScheduleConfig
    {
        double pair_duration = 12.85e-6;
        double switch_delay = 12.85e-6;
        double rotor_delay = 10.0;
        std::size_t snapshots = 10;
        std::size_t tx_elements = 8;
        std::size_t rx_elements = 24;
        std::size_t polarization_slots = 2;
        std::size_t tx_port_slots = 16;
        std::vector<double> rotor_positions; // degrees
        ReferenceSlot reference_slot = ReferenceSlot::first;

        // 60 rotor positions at 6 degree steps with the constants above
        static ScheduleConfig full_scale();
    };

    class Schedule
    {
    public:
        explicit Schedule(ScheduleConfig config);

        const ScheduleConfig &config() const { return cfg_; }
        std::size_t rotors() const { return cfg_.rotor_positions.size(); }
        bool has_reference() const { return cfg_.reference_slot != ReferenceSlot::none; }

        double rx_slot_duration() const { return cfg_.pair_duration + cfg_.switch_delay; }
        double simo_duration() const;
        double tx_port_duration() const { return simo_duration() + cfg_.switch_delay; }
        std::size_t tx_port_slots() const { return port_slots_; }
        double snapshot_duration() const { return double(port_slots_) * tx_port_duration(); }
        double rotor_start(std::size_t r) const;
        double total_duration() const;

        std::size_t tx_slot(std::size_t t) const;
        std::size_t reference_tx_slot() const;
        std::size_t rx_slot(std::size_t n) const { return (cfg_.polarization_slots - 1) * cfg_.rx_elements + n; }

        // Start time of the pair sweep (rotor r, TX element t, RX element n, snapshot s)
        double timestamp(std::size_t r, std::size_t t, std::size_t n, std::size_t s) const;
        double reference_timestamp(std::size_t r, std::size_t n, std::size_t s) const;

        // Every timestamp of the acquisition (array and reference), ascending
        std::vector<double> sample_times() const;

    private:
        ScheduleConfig cfg_;
        std::size_t port_slots_ = 0;
    };

    Schedule make_schedule(const ScheduleConfig &config);

    /*!
    Clock phase offset sampled at a set of instants. phase(t) interpolates linearly between samples and
    holds the end values outside.
    */
    class DriftTrace
    {
    public:
        DriftTrace() = default;
        DriftTrace(std::vector<double> times, std::vector<double> phases, double allan_dev_1s = 0.0,
                   std::uint64_t seed = 0);

        // Same phase at every instant
        static DriftTrace constant(double phase);

        double phase(double t) const;
        const std::vector<double> &times() const { return times_; }
        const std::vector<double> &phases() const { return phases_; }
        double allan_dev() const { return allan_; }
        std::uint64_t seed() const { return seed_; }

    private:
        std::vector<double> times_;
        std::vector<double> phases_;
        double allan_ = 0.0;
        std::uint64_t seed_ = 0;
    };

    /*!
    Random-walk phase drift at every schedule timestamp, phase(0) = 0. An increment over dt is zero-mean
    Gaussian with variance (2 pi f_c sigma_y)^2 * dt * (1 s).
    */
    DriftTrace realize_drift(const Schedule &schedule, double allan_dev_1s, double carrier_hz, std::uint64_t seed);

    /*!
    Switching-error model. With the given probability per (rotor, tx, rx, snapshot) the snapshot is replaced
    by the clean transfer function delayed by delay_shift_m, with a random phase and an amplitude scale
    drawn uniformly from [scale_min, scale_max] minus the open band (exclude_lo, exclude_hi).
    */
    struct OutlierConfig
    {
        double probability = 0.0;
        double scale_min = 0.1;
        double scale_max = 3.0;
        double exclude_lo = 0.8;
        double exclude_hi = 1.25;
        double delay_shift_m = 3.0;

        void validate() const;
    };

    template <typename dtype>
    struct Acquisition
    {
        TransferTensor<dtype> data;                 // (rotor, tx, rx, freq, snapshot)
        TransferTensor<dtype> reference;            // (rotor, 1, rx, freq, snapshot); empty without reference
        std::vector<std::uint8_t> outlier_mask;     // per (rotor, tx, rx, snapshot), 1 = injected outlier
        std::vector<std::uint8_t> reference_outlier_mask;
    };

    /*!
    Acquisition of a single rotor position; the tensors have one rotor. Noise and outliers draw from
    per-rotor sub-streams of seed, so acquire() equals the concatenation of all rotor blocks.

    tx is the full virtual array: rotor r uses elements [r * n_tx, (r + 1) * n_tx). reference must be a single,
    stationary element (it does not follow the rotor).
    */
    template <typename dtype>
    Acquisition<dtype> acquire_rotor(std::size_t rotor, std::span<const Mpc<dtype>> mpcs, const ArraySpec<dtype> &tx,
                                     const ArraySpec<dtype> &rx, const ArraySpec<dtype> *reference,
                                     const FrequencyGrid &grid, const Schedule &schedule, const DriftTrace &drift,
                                     double n0, const OutlierConfig &outliers, std::uint64_t seed);

    template <typename dtype>
    Acquisition<dtype> acquire(std::span<const Mpc<dtype>> mpcs, const ArraySpec<dtype> &tx,
                               const ArraySpec<dtype> &rx, const ArraySpec<dtype> *reference,
                               const FrequencyGrid &grid, const Schedule &schedule, const DriftTrace &drift,
                               double n0, const OutlierConfig &outliers, std::uint64_t seed);

    // Throws std::invalid_argument unless the timestamps increase strictly in acquisition order
    template <typename dtype>
    void check_timestamp_order(const TransferTensor<dtype> &tensor);
}
