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

#include "sounder/sounder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "sounder/rng.hpp"

namespace sounder
{
    ScheduleConfig ScheduleConfig::full_scale()
    {
        ScheduleConfig cfg;
        for (int r = 0; r < 60; ++r)
            cfg.rotor_positions.push_back(6.0 * r);
        return cfg;
    }

    Schedule::Schedule(ScheduleConfig config) : cfg_(std::move(config))
    {
        if (!(cfg_.pair_duration > 0.0) || !(cfg_.switch_delay > 0.0) || !(cfg_.rotor_delay > 0.0))
            throw std::invalid_argument("Schedule: all durations must be positive.");
        if (cfg_.snapshots == 0 || cfg_.tx_elements == 0 || cfg_.rx_elements == 0 || cfg_.polarization_slots == 0)
            throw std::invalid_argument("Schedule: snapshot, element and polarization counts must be >= 1.");
        if (cfg_.rotor_positions.empty())
            throw std::invalid_argument("Schedule: the rotor position list is empty.");
        const std::size_t needed = cfg_.tx_elements + (has_reference() ? 1 : 0);
        port_slots_ = cfg_.tx_port_slots == 0 ? needed : cfg_.tx_port_slots;
        if (port_slots_ < needed)
            throw std::invalid_argument("Schedule: tx_port_slots is smaller than the number of TX ports in use.");
    }

    double Schedule::simo_duration() const
    {
        return double(cfg_.polarization_slots * cfg_.rx_elements) * rx_slot_duration();
    }

    double Schedule::rotor_start(std::size_t r) const
    {
        return double(r) * (double(cfg_.snapshots) * snapshot_duration() + cfg_.rotor_delay);
    }

    double Schedule::total_duration() const
    {
        return rotor_start(rotors() - 1) + double(cfg_.snapshots) * snapshot_duration();
    }

    std::size_t Schedule::tx_slot(std::size_t t) const
    {
        if (t >= cfg_.tx_elements)
            throw std::out_of_range("Schedule::tx_slot: TX element out of range.");
        return cfg_.reference_slot == ReferenceSlot::first ? t + 1 : t;
    }

    std::size_t Schedule::reference_tx_slot() const
    {
        switch (cfg_.reference_slot)
        {
        case ReferenceSlot::first:
            return 0;
        case ReferenceSlot::last:
            return port_slots_ - 1;
        default:
            throw std::logic_error("Schedule::reference_tx_slot: schedule has no reference antenna.");
        }
    }

    double Schedule::timestamp(std::size_t r, std::size_t t, std::size_t n, std::size_t s) const
    {
        return rotor_start(r) + double(s) * snapshot_duration() + double(tx_slot(t)) * tx_port_duration() +
               double(rx_slot(n)) * rx_slot_duration();
    }

    double Schedule::reference_timestamp(std::size_t r, std::size_t n, std::size_t s) const
    {
        return rotor_start(r) + double(s) * snapshot_duration() + double(reference_tx_slot()) * tx_port_duration() +
               double(rx_slot(n)) * rx_slot_duration();
    }

    std::vector<double> Schedule::sample_times() const
    {
        std::vector<double> out;
        out.reserve(rotors() * cfg_.snapshots * (cfg_.tx_elements + 1) * cfg_.rx_elements);
        for (std::size_t r = 0; r < rotors(); ++r)
            for (std::size_t s = 0; s < cfg_.snapshots; ++s)
            {
                for (std::size_t t = 0; t < cfg_.tx_elements; ++t)
                    for (std::size_t n = 0; n < cfg_.rx_elements; ++n)
                        out.push_back(timestamp(r, t, n, s));
                if (has_reference())
                    for (std::size_t n = 0; n < cfg_.rx_elements; ++n)
                        out.push_back(reference_timestamp(r, n, s));
            }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    Schedule make_schedule(const ScheduleConfig &config)
    {
        return Schedule(config);
    }

    DriftTrace::DriftTrace(std::vector<double> times, std::vector<double> phases, double allan_dev_1s,
                           std::uint64_t seed)
        : times_(std::move(times)), phases_(std::move(phases)), allan_(allan_dev_1s), seed_(seed)
    {
        if (times_.size() != phases_.size())
            throw std::invalid_argument("DriftTrace: times and phases differ in length.");
        for (std::size_t i = 1; i < times_.size(); ++i)
            if (!(times_[i] > times_[i - 1]))
                throw std::invalid_argument("DriftTrace: sample times must be strictly increasing.");
    }

    DriftTrace DriftTrace::constant(double phase)
    {
        return DriftTrace({0.0}, {phase});
    }

    double DriftTrace::phase(double t) const
    {
        if (times_.empty())
            return 0.0;
        if (t <= times_.front())
            return phases_.front();
        if (t >= times_.back())
            return phases_.back();
        const auto it = std::lower_bound(times_.begin(), times_.end(), t);
        const std::size_t i = std::size_t(it - times_.begin());
        if (*it == t)
            return phases_[i];
        const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
        return (1.0 - w) * phases_[i - 1] + w * phases_[i];
    }

    DriftTrace realize_drift(const Schedule &schedule, double allan_dev_1s, double carrier_hz, std::uint64_t seed)
    {
        if (!(allan_dev_1s >= 0.0) || !std::isfinite(allan_dev_1s))
            throw std::invalid_argument("realize_drift: Allan deviation must be finite and >= 0.");
        if (!(carrier_hz > 0.0))
            throw std::invalid_argument("realize_drift: carrier frequency must be positive.");

        std::vector<double> times = schedule.sample_times();
        if (times.empty() || times.front() > 0.0)
            times.insert(times.begin(), 0.0);

        // phase std per sqrt(second)
        const double rate = two_pi * carrier_hz * allan_dev_1s;
        std::vector<double> phases(times.size(), 0.0);
        Rng rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::size_t i = 1; i < times.size(); ++i)
            phases[i] = phases[i - 1] + rate * std::sqrt(times[i] - times[i - 1]) * normal(rng);
        return DriftTrace(std::move(times), std::move(phases), allan_dev_1s, seed);
    }

    void OutlierConfig::validate() const
    {
        if (!(probability >= 0.0 && probability <= 1.0))
            throw std::invalid_argument("OutlierConfig: probability must be in [0, 1].");
        if (!(scale_min >= 0.0) || !(scale_max > scale_min))
            throw std::invalid_argument("OutlierConfig: need 0 <= scale_min < scale_max.");
        if (exclude_hi < exclude_lo)
            throw std::invalid_argument("OutlierConfig: exclude_hi must be >= exclude_lo.");
        if (exclude_lo <= scale_min && exclude_hi >= scale_max)
            throw std::invalid_argument("OutlierConfig: the excluded band covers the whole scale range.");
        if (!(delay_shift_m >= 0.0))
            throw std::invalid_argument("OutlierConfig: delay_shift_m must be >= 0.");
    }

    namespace
    {
        double draw_scale(Rng &rng, const OutlierConfig &cfg)
        {
            std::uniform_real_distribution<double> u(cfg.scale_min, cfg.scale_max);
            for (;;)
            {
                const double s = u(rng);
                if (s <= cfg.exclude_lo || s >= cfg.exclude_hi)
                    return s;
            }
        }

        // Corrupts a clean block into tensor rotor slot 0 following the schedule.
        // timestamp_of(t, n, s) gives the pair time.
        template <typename dtype, typename TimeFn>
        void measure_block(const ChannelCube<dtype> &clean, const FrequencyGrid &grid, const DriftTrace &drift,
                           double n0, const OutlierConfig &outliers, std::uint64_t noise_seed,
                           std::uint64_t outlier_seed, std::size_t snapshots, TimeFn timestamp_of,
                           TransferTensor<dtype> &out, std::vector<std::uint8_t> &mask)
        {
            const std::size_t n_tx = clean.n_tx, n_rx = clean.n_rx, n_f = clean.n_freq;
            std::vector<cplx<dtype>> shift;
            if (outliers.probability > 0.0)
            {
                shift.resize(n_f);
                const double tau = outliers.delay_shift_m / speed_of_light;
                for (std::size_t k = 0; k < n_f; ++k)
                    shift[k] = phasor<dtype>(-two_pi * grid[k] * tau);
            }

            Rng noise_rng(noise_seed), outlier_rng(outlier_seed);
            std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * n0));
            std::bernoulli_distribution is_outlier(outliers.probability);
            std::uniform_real_distribution<double> uniform_phase(0.0, two_pi);

            mask.assign(n_tx * n_rx * snapshots, 0);
            for (std::size_t t = 0; t < n_tx; ++t)
                for (std::size_t n = 0; n < n_rx; ++n)
                    for (std::size_t s = 0; s < snapshots; ++s)
                    {
                        const double ts = timestamp_of(t, n, s);
                        out.set_timestamp(0, t, n, s, ts);
                        cplx<dtype> rot = phasor<dtype>(drift.phase(ts));
                        bool outlier = false;
                        if (outliers.probability > 0.0 && is_outlier(outlier_rng))
                        {
                            const double scale = draw_scale(outlier_rng, outliers);
                            rot *= dtype(scale) * phasor<dtype>(uniform_phase(outlier_rng));
                            outlier = true;
                        }
                        mask[(t * n_rx + n) * snapshots + s] = outlier ? 1 : 0;
                        for (std::size_t k = 0; k < n_f; ++k)
                        {
                            cplx<dtype> h = clean(t, n, k);
                            if (outlier)
                                h *= shift[k];
                            h *= rot;
                            if (n0 > 0.0)
                            {
                                const double re = normal(noise_rng);
                                const double im = normal(noise_rng);
                                h += cplx<dtype>(dtype(re), dtype(im));
                            }
                            out(0, t, n, k, s) = h;
                        }
                    }
        }
    }

    template <typename dtype>
    Acquisition<dtype> acquire_rotor(std::size_t rotor, std::span<const Mpc<dtype>> mpcs, const ArraySpec<dtype> &tx,
                                     const ArraySpec<dtype> &rx, const ArraySpec<dtype> *reference,
                                     const FrequencyGrid &grid, const Schedule &schedule, const DriftTrace &drift,
                                     double n0, const OutlierConfig &outliers, std::uint64_t seed)
    {
        const auto &cfg = schedule.config();
        if (rotor >= schedule.rotors())
            throw std::out_of_range("acquire: rotor index out of range.");
        if (tx.size() != schedule.rotors() * cfg.tx_elements)
            throw std::invalid_argument("acquire: TX array size must equal rotor count times TX elements per column.");
        if (rx.size() != cfg.rx_elements)
            throw std::invalid_argument("acquire: RX array size does not match the schedule.");
        if (schedule.has_reference() != (reference != nullptr))
            throw std::invalid_argument("acquire: reference antenna and schedule reference slot disagree.");
        if (reference && reference->size() != 1)
            throw std::invalid_argument("acquire: the reference antenna must be a single stationary element; "
                                        "rotor-dependent reference positions are not supported.");
        if (!(n0 >= 0.0) || !std::isfinite(n0))
            throw std::invalid_argument("acquire: noise power must be finite and >= 0.");
        outliers.validate();

        const std::size_t n_tx = cfg.tx_elements, n_rx = cfg.rx_elements, snaps = cfg.snapshots;
        Acquisition<dtype> out;
        out.data = TransferTensor<dtype>({1, n_tx, n_rx, grid.size(), snaps}, grid, true);

        const ArraySpec<dtype> column = tx.subarray(rotor * n_tx, n_tx);
        const ChannelCube<dtype> clean = synthesize(mpcs, column, rx, grid);
        measure_block(clean, grid, drift, n0, outliers, derive_seed(seed, "noise", rotor),
                      derive_seed(seed, "outliers", rotor), snaps,
                      [&](std::size_t t, std::size_t n, std::size_t s) { return schedule.timestamp(rotor, t, n, s); },
                      out.data, out.outlier_mask);

        if (reference)
        {
            out.reference = TransferTensor<dtype>({1, 1, n_rx, grid.size(), snaps}, grid, true);
            const ChannelCube<dtype> ref_clean = synthesize(mpcs, *reference, rx, grid);
            measure_block(ref_clean, grid, drift, n0, outliers, derive_seed(seed, "reference_noise", rotor),
                          derive_seed(seed, "reference_outliers", rotor), snaps,
                          [&](std::size_t, std::size_t n, std::size_t s)
                          { return schedule.reference_timestamp(rotor, n, s); },
                          out.reference, out.reference_outlier_mask);
        }
        return out;
    }

    namespace
    {
        template <typename dtype>
        void copy_rotor(const TransferTensor<dtype> &block, std::size_t r, TransferTensor<dtype> &dst)
        {
            const std::size_t per_rotor = block.values().size();
            std::copy(block.values().begin(), block.values().end(), dst.values().begin() + std::ptrdiff_t(r * per_rotor));
            const std::size_t ts_per_rotor = block.timestamps().size();
            std::copy(block.timestamps().begin(), block.timestamps().end(),
                      dst.timestamps().begin() + std::ptrdiff_t(r * ts_per_rotor));
        }
    }

    template <typename dtype>
    Acquisition<dtype> acquire(std::span<const Mpc<dtype>> mpcs, const ArraySpec<dtype> &tx,
                               const ArraySpec<dtype> &rx, const ArraySpec<dtype> *reference,
                               const FrequencyGrid &grid, const Schedule &schedule, const DriftTrace &drift,
                               double n0, const OutlierConfig &outliers, std::uint64_t seed)
    {
        const auto &cfg = schedule.config();
        const std::size_t rotors = schedule.rotors();
        Acquisition<dtype> out;
        out.data = TransferTensor<dtype>({rotors, cfg.tx_elements, cfg.rx_elements, grid.size(), cfg.snapshots}, grid);
        if (reference)
            out.reference = TransferTensor<dtype>({rotors, 1, cfg.rx_elements, grid.size(), cfg.snapshots}, grid);

        for (std::size_t r = 0; r < rotors; ++r)
        {
            auto block = acquire_rotor(r, mpcs, tx, rx, reference, grid, schedule, drift, n0, outliers, seed);
            copy_rotor(block.data, r, out.data);
            out.outlier_mask.insert(out.outlier_mask.end(), block.outlier_mask.begin(), block.outlier_mask.end());
            if (reference)
            {
                copy_rotor(block.reference, r, out.reference);
                out.reference_outlier_mask.insert(out.reference_outlier_mask.end(),
                                                  block.reference_outlier_mask.begin(),
                                                  block.reference_outlier_mask.end());
            }
        }
        return out;
    }

    template <typename dtype>
    void check_timestamp_order(const TransferTensor<dtype> &tensor)
    {
        if (!tensor.has_timestamps())
            return;
        const auto &d = tensor.dims();
        double prev = -std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < d.rotors; ++r)
            for (std::size_t s = 0; s < d.snapshots; ++s)
                for (std::size_t t = 0; t < d.tx; ++t)
                    for (std::size_t n = 0; n < d.rx; ++n)
                    {
                        const double ts = tensor.timestamp(r, t, n, s);
                        if (!(ts > prev))
                            throw std::invalid_argument("TransferTensor: timestamps are not strictly increasing "
                                                        "in acquisition order.");
                        prev = ts;
                    }
    }

#define SOUNDER_INSTANTIATE_SOUNDER(T)                                                                            \
    template Acquisition<T> acquire_rotor(std::size_t, std::span<const Mpc<T>>, const ArraySpec<T> &,            \
                                          const ArraySpec<T> &, const ArraySpec<T> *, const FrequencyGrid &,      \
                                          const Schedule &, const DriftTrace &, double, const OutlierConfig &,    \
                                          std::uint64_t);                                                         \
    template Acquisition<T> acquire(std::span<const Mpc<T>>, const ArraySpec<T> &, const ArraySpec<T> &,         \
                                    const ArraySpec<T> *, const FrequencyGrid &, const Schedule &,                \
                                    const DriftTrace &, double, const OutlierConfig &, std::uint64_t);            \
    template void check_timestamp_order(const TransferTensor<T> &);

    SOUNDER_INSTANTIATE_SOUNDER(float)
    SOUNDER_INSTANTIATE_SOUNDER(double)
}
