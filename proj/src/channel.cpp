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

#include "sounder/channel.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "sounder/rng.hpp"

namespace sounder
{
    FrequencyGrid::FrequencyGrid(double start, double step, std::size_t count)
        : start_(start), step_(step), count_(count)
    {
        if (count == 0)
            throw std::invalid_argument("FrequencyGrid: at least one frequency point is required.");
        if (!std::isfinite(start) || !std::isfinite(step))
            throw std::invalid_argument("FrequencyGrid: start and step must be finite.");
        if (count > 1 && !(step > 0.0))
            throw std::invalid_argument("FrequencyGrid: step must be positive.");
    }

    FrequencyGrid FrequencyGrid::from_band(double f_lo, double f_hi, std::size_t count)
    {
        if (count == 0)
            throw std::invalid_argument("FrequencyGrid::from_band: count must be >= 1.");
        if (count == 1)
            return FrequencyGrid(f_lo, 1.0, 1);
        if (!(f_hi > f_lo))
            throw std::invalid_argument("FrequencyGrid::from_band: f_hi must exceed f_lo.");
        return FrequencyGrid(f_lo, (f_hi - f_lo) / double(count - 1), count);
    }

    FrequencyGrid FrequencyGrid::from_points(const std::vector<double> &points)
    {
        if (points.empty())
            throw std::invalid_argument("FrequencyGrid::from_points: empty list.");
        if (points.size() == 1)
            return FrequencyGrid(points[0], 1.0, 1);
        const double step = (points.back() - points.front()) / double(points.size() - 1);
        for (std::size_t k = 1; k < points.size(); ++k)
        {
            if (!(points[k] > points[k - 1]))
                throw std::invalid_argument("FrequencyGrid::from_points: points must be strictly increasing.");
            if (std::abs((points[k] - points[k - 1]) - step) > 1e-9 * std::abs(step))
                throw std::invalid_argument("FrequencyGrid::from_points: points are not uniformly spaced.");
        }
        return FrequencyGrid(points.front(), step, points.size());
    }

    std::vector<double> FrequencyGrid::points() const
    {
        std::vector<double> out(count_);
        for (std::size_t k = 0; k < count_; ++k)
            out[k] = (*this)[k];
        return out;
    }

    template <typename dtype>
    TransferTensor<dtype>::TransferTensor(TensorDims dims, FrequencyGrid grid, bool with_timestamps)
        : dims_(dims), grid_(grid)
    {
        if (dims.rotors == 0 || dims.tx == 0 || dims.rx == 0 || dims.freq == 0 || dims.snapshots == 0)
            throw std::invalid_argument("TransferTensor: all dimensions must be >= 1.");
        if (grid.size() != dims.freq)
            throw std::invalid_argument("TransferTensor: frequency grid size does not match the tensor.");
        values_.assign(dims.count(), cplx<dtype>(0));
        if (with_timestamps)
            timestamps_.assign(dims.pair_count(), 0.0);
    }

    template <typename dtype>
    Eigen::Map<CMat<dtype>> TransferTensor<dtype>::pair(std::size_t r, std::size_t t, std::size_t n)
    {
        return Eigen::Map<CMat<dtype>>(&values_[index(r, t, n, 0, 0)], Eigen::Index(dims_.snapshots),
                                       Eigen::Index(dims_.freq));
    }

    template <typename dtype>
    Eigen::Map<const CMat<dtype>> TransferTensor<dtype>::pair(std::size_t r, std::size_t t, std::size_t n) const
    {
        return Eigen::Map<const CMat<dtype>>(&values_[index(r, t, n, 0, 0)], Eigen::Index(dims_.snapshots),
                                             Eigen::Index(dims_.freq));
    }

    template <typename dtype>
    ChannelCube<dtype> TransferTensor<dtype>::cube(std::size_t r, std::size_t s) const
    {
        if (r >= dims_.rotors || s >= dims_.snapshots)
            throw std::out_of_range("TransferTensor::cube: index out of range.");
        ChannelCube<dtype> out(dims_.tx, dims_.rx, dims_.freq);
        for (std::size_t t = 0; t < dims_.tx; ++t)
            for (std::size_t n = 0; n < dims_.rx; ++n)
                for (std::size_t k = 0; k < dims_.freq; ++k)
                    out(t, n, k) = (*this)(r, t, n, k, s);
        return out;
    }

    template <typename dtype>
    void TransferTensor<dtype>::set_cube(std::size_t r, std::size_t s, const ChannelCube<dtype> &block)
    {
        if (r >= dims_.rotors || s >= dims_.snapshots)
            throw std::out_of_range("TransferTensor::set_cube: index out of range.");
        if (block.n_tx != dims_.tx || block.n_rx != dims_.rx || block.n_freq != dims_.freq)
            throw std::invalid_argument("TransferTensor::set_cube: block shape does not match the tensor.");
        for (std::size_t t = 0; t < dims_.tx; ++t)
            for (std::size_t n = 0; n < dims_.rx; ++n)
                for (std::size_t k = 0; k < dims_.freq; ++k)
                    (*this)(r, t, n, k, s) = block(t, n, k);
    }

    template <typename dtype>
    ChannelCube<dtype> flatten_virtual(const TransferTensor<dtype> &tensor, std::size_t snapshot)
    {
        const auto &d = tensor.dims();
        if (snapshot >= d.snapshots)
            throw std::out_of_range("flatten_virtual: snapshot index out of range.");
        ChannelCube<dtype> out(d.rotors * d.tx, d.rx, d.freq);
        for (std::size_t r = 0; r < d.rotors; ++r)
            for (std::size_t t = 0; t < d.tx; ++t)
                for (std::size_t n = 0; n < d.rx; ++n)
                    for (std::size_t k = 0; k < d.freq; ++k)
                        out(r * d.tx + t, n, k) = tensor(r, t, n, k, snapshot);
        return out;
    }

    template <typename dtype>
    ChannelCube<dtype> synthesize(std::span<const Mpc<dtype>> mpcs, const ArraySpec<dtype> &tx,
                                  const ArraySpec<dtype> &rx, const FrequencyGrid &grid)
    {
        if (grid.size() == 0)
            throw std::invalid_argument("synthesize: empty frequency grid.");
        const auto n_paths = Eigen::Index(mpcs.size());
        ChannelCube<dtype> out(tx.size(), rx.size(), grid.size());
        if (n_paths == 0)
            return out;

        std::vector<Direction<dtype>> dep, arr;
        for (const auto &m : mpcs)
        {
            if (!(m.delay >= dtype(0)) || !std::isfinite(m.delay))
                throw std::invalid_argument("synthesize: MPC delay must be finite and >= 0.");
            if (!std::isfinite(m.gain.real()) || !std::isfinite(m.gain.imag()))
                throw std::invalid_argument("synthesize: MPC gain must be finite.");
            dep.push_back(m.departure);
            arr.push_back(m.arrival);
        }
        const CMat<dtype> bt = steering_matrix(tx, std::span<const Direction<dtype>>(dep));
        const CMat<dtype> br = steering_matrix(rx, std::span<const Direction<dtype>>(arr));

        CMat<dtype> scaled(br.rows(), n_paths);
        for (std::size_t k = 0; k < grid.size(); ++k)
        {
            const double f = grid[k];
            for (Eigen::Index l = 0; l < n_paths; ++l)
            {
                const auto &m = mpcs[std::size_t(l)];
                const cplx<dtype> c = m.gain * phasor<dtype>(-two_pi * f * double(m.delay));
                scaled.col(l) = br.col(l) * c;
            }
            out.slice(k).noalias() = bt * scaled.transpose();
        }
        return out;
    }

    void ScenarioRanges::validate() const
    {
        for (const auto *r : {&aod, &eod, &aoa, &eoa, &delay_m, &power_db})
            if (!std::isfinite((*r)[0]) || !std::isfinite((*r)[1]) || (*r)[1] < (*r)[0])
                throw std::invalid_argument("ScenarioRanges: every range must be finite with lo <= hi.");
        for (const auto *r : {&eod, &eoa})
            if ((*r)[0] < -90.0 || (*r)[1] > 90.0)
                throw std::invalid_argument("ScenarioRanges: elevation ranges must lie within [-90, 90].");
        if (delay_m[0] < 0.0)
            throw std::invalid_argument("ScenarioRanges: delays must be >= 0.");
    }

    template <typename dtype>
    std::vector<Mpc<dtype>> sample_scenario(std::uint64_t seed, std::size_t n_paths, const ScenarioRanges &ranges)
    {
        if (n_paths == 0)
            throw std::invalid_argument("sample_scenario: n_paths must be >= 1.");
        ranges.validate();

        Rng rng(seed);
        auto uniform = [&](const std::array<double, 2> &r)
        {
            return std::uniform_real_distribution<double>(r[0], r[1])(rng);
        };

        std::vector<Mpc<dtype>> out;
        out.reserve(n_paths);
        for (std::size_t l = 0; l < n_paths; ++l)
        {
            Mpc<dtype> m;
            const double aod = uniform(ranges.aod), eod = uniform(ranges.eod);
            const double aoa = uniform(ranges.aoa), eoa = uniform(ranges.eoa);
            const double delay = uniform(ranges.delay_m);
            const double amp = std::pow(10.0, uniform(ranges.power_db) / 20.0);
            const double phase = std::uniform_real_distribution<double>(0.0, two_pi)(rng);
            m.departure = Direction<dtype>(dtype(aod), dtype(eod));
            m.arrival = Direction<dtype>(dtype(aoa), dtype(eoa));
            m.delay = dtype(delay / speed_of_light);
            m.gain = cplx<dtype>(dtype(amp)) * phasor<dtype>(phase);
            out.push_back(m);
        }
        return out;
    }

    template <typename dtype>
    Mpc<dtype> snap_to_grid(const Mpc<dtype> &mpc, double angle_step_deg, double delay_step_m)
    {
        if (!(angle_step_deg > 0.0) || !(delay_step_m > 0.0))
            throw std::invalid_argument("snap_to_grid: grid steps must be positive.");
        auto snap = [&](double v, double step) { return std::round(v / step) * step; };
        auto snap_el = [&](double v)
        {
            double e = snap(v, angle_step_deg);
            while (e > 90.0)
                e -= angle_step_deg;
            while (e < -90.0)
                e += angle_step_deg;
            return e;
        };
        Mpc<dtype> out = mpc;
        out.departure = Direction<dtype>(dtype(snap(double(mpc.departure.azimuth), angle_step_deg)),
                                         dtype(snap_el(double(mpc.departure.elevation))));
        out.arrival = Direction<dtype>(dtype(snap(double(mpc.arrival.azimuth), angle_step_deg)),
                                       dtype(snap_el(double(mpc.arrival.elevation))));
        out.delay = dtype(snap(double(mpc.delay) * speed_of_light, delay_step_m) / speed_of_light);
        return out;
    }

    template <typename dtype>
    void add_noise(std::span<cplx<dtype>> values, double n0, std::uint64_t seed)
    {
        if (!(n0 >= 0.0) || !std::isfinite(n0))
            throw std::invalid_argument("add_noise: noise power must be finite and >= 0.");
        if (n0 == 0.0)
            return;
        Rng rng(seed);
        std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * n0));
        for (auto &v : values)
        {
            const double re = normal(rng);
            const double im = normal(rng);
            v += cplx<dtype>(dtype(re), dtype(im));
        }
    }

#define SOUNDER_INSTANTIATE_CHANNEL(T)                                                                            \
    template class TransferTensor<T>;                                                                            \
    template ChannelCube<T> flatten_virtual(const TransferTensor<T> &, std::size_t);                             \
    template ChannelCube<T> synthesize(std::span<const Mpc<T>>, const ArraySpec<T> &, const ArraySpec<T> &,      \
                                       const FrequencyGrid &);                                                   \
    template std::vector<Mpc<T>> sample_scenario(std::uint64_t, std::size_t, const ScenarioRanges &);            \
    template Mpc<T> snap_to_grid(const Mpc<T> &, double, double);                                                \
    template void add_noise(std::span<cplx<T>>, double, std::uint64_t);

    SOUNDER_INSTANTIATE_CHANNEL(float)
    SOUNDER_INSTANTIATE_CHANNEL(double)
}
