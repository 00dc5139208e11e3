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

#include "sounder/clean.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sounder
{
    void CleanConfig::validate() const
    {
        if (!(angle_grid > 0.0) || !(delay_grid > 0.0))
            throw std::invalid_argument("CleanConfig: angle_grid and delay_grid must be positive.");
        if (!(dynamic_range > 0.0))
            throw std::invalid_argument("CleanConfig: dynamic_range must be positive.");
        if (alt_iterations < 1)
            throw std::invalid_argument("CleanConfig: alt_iterations must be >= 1.");
        if (max_paths < 1)
            throw std::invalid_argument("CleanConfig: max_paths must be >= 1.");
        if (!(noise_gate >= 0.0))
            throw std::invalid_argument("CleanConfig: noise_gate must be >= 0 dB.");
        tx_grid().validate();
        rx_grid().validate();
        delays().validate();
    }

    AngleGrid CleanConfig::tx_grid() const
    {
        return AngleGrid{angle_grid, tx_az_min, tx_az_max, tx_el_min, tx_el_max};
    }

    AngleGrid CleanConfig::rx_grid() const
    {
        return AngleGrid{angle_grid, rx_az_min, rx_az_max, rx_el_min, rx_el_max};
    }

    DelayGrid CleanConfig::delays() const
    {
        return DelayGrid{delay_grid, delay_min, delay_max};
    }

    namespace
    {
        template <typename dtype>
        cplx<dtype> projection_gain(const ChannelCube<dtype> &h, const CVec<dtype> &b_tx, const CVec<dtype> &b_rx,
                                    double delay_s, const FrequencyGrid &grid, double f_ref)
        {
            // v = conj(b_T^H H), so sum_n W(n, k) conj(b_R(n)) = conj(sum_n v(k N_R + n) b_R(n))
            const CVec<dtype> v = h.data.adjoint() * b_tx;
            const Eigen::Map<const CMat<dtype>> vm(v.data(), Eigen::Index(h.n_rx), Eigen::Index(h.n_freq));
            const CVec<dtype> s = (b_rx.transpose() * vm).transpose(); // conj of b_R^H W
            cplx<double> acc(0.0, 0.0);
            for (std::size_t k = 0; k < h.n_freq; ++k)
                acc += std::conj(cplx<double>(s(Eigen::Index(k)))) * phasor<double>(two_pi * (grid[k] - f_ref) * delay_s);
            const double scale = double(h.n_freq) * double(b_tx.squaredNorm()) * double(b_rx.squaredNorm());
            if (!(scale > 0.0))
                return cplx<dtype>(0);
            return cplx<dtype>(acc / scale);
        }

        template <typename dtype>
        void check_shape(const ChannelCube<dtype> &h, const ArraySpec<dtype> &tx, const ArraySpec<dtype> &rx,
                         const FrequencyGrid &grid)
        {
            if (h.n_tx != tx.size() || h.n_rx != rx.size() || h.n_freq != grid.size())
                throw std::invalid_argument("clean: channel cube shape does not match the arrays and the grid.");
        }
    }

    template <typename dtype>
    Extractor<dtype>::Extractor(const ArraySpec<dtype> &tx, const ArraySpec<dtype> &rx, const FrequencyGrid &grid,
                                const CleanConfig &cfg)
        : tx_(tx), rx_(rx), grid_(grid), cfg_((cfg.validate(), cfg)), tx_bank_(tx, cfg.tx_grid()),
          rx_bank_(rx, cfg.rx_grid()), delays_s_(cfg.delays().delays_s())
    {
        kernel_ = delay_kernel<dtype>(grid_, delays_s_);
    }

    template <typename dtype>
    PathIndex Extractor<dtype>::init_tx(const ChannelCube<dtype> &h, ObjectiveGrid *grid_out) const
    {
        check_shape(h, tx_, rx_, grid_);
        const Eigen::Index n_t = Eigen::Index(h.n_tx), n_r = Eigen::Index(h.n_rx), n_f = Eigen::Index(h.n_freq);
        const Eigen::Index n_tau = kernel_.cols();
        CMat<dtype> y(n_t, n_r * n_tau);
        for (Eigen::Index n = 0; n < n_r; ++n)
        {
            // M_n(t, k) = H(f_k)(t, n)
            const Eigen::Map<const CMat<dtype>, 0, Eigen::OuterStride<>> m(h.data.data() + n * n_t, n_t, n_f,
                                                                            Eigen::OuterStride<>(n_t * n_r));
            y.middleCols(n * n_tau, n_tau).noalias() = m * kernel_;
        }
        ObjectiveGrid g = scan<dtype>(y, std::size_t(n_r), tx_bank_);
        const GridPeak p = g.peak();
        if (grid_out)
            *grid_out = std::move(g);
        return PathIndex{p.delay_idx, p.dir_idx, 0};
    }

    template <typename dtype>
    std::pair<std::size_t, std::size_t> Extractor<dtype>::search_rx(const ChannelCube<dtype> &h,
                                                                    const CVec<dtype> &b_tx, double *value) const
    {
        check_shape(h, tx_, rx_, grid_);
        const CVec<dtype> v = h.data.adjoint() * b_tx; // conj(W) flattened
        const Eigen::Map<const CMat<dtype>> vm(v.data(), Eigen::Index(h.n_rx), Eigen::Index(h.n_freq));
        const CMat<dtype> y = vm.conjugate() * kernel_;
        const GridPeak p = scan<dtype>(y, 1, rx_bank_).peak();
        if (value)
        {
            const double nt = double(b_tx.norm());
            *value = nt > 0.0 ? p.value / nt : 0.0;
        }
        return {p.delay_idx, p.dir_idx};
    }

    template <typename dtype>
    std::pair<std::size_t, std::size_t> Extractor<dtype>::search_tx(const ChannelCube<dtype> &h,
                                                                    const CVec<dtype> &b_rx, double *value) const
    {
        check_shape(h, tx_, rx_, grid_);
        CMat<dtype> m(Eigen::Index(h.n_tx), Eigen::Index(h.n_freq));
        const CVec<dtype> b_conj = b_rx.conjugate();
        for (std::size_t k = 0; k < h.n_freq; ++k)
            m.col(Eigen::Index(k)).noalias() = h.slice(k) * b_conj;
        const CMat<dtype> y = m * kernel_;
        const GridPeak p = scan<dtype>(y, 1, tx_bank_).peak();
        if (value)
        {
            const double nr = double(b_rx.norm());
            *value = nr > 0.0 ? p.value / nr : 0.0;
        }
        return {p.delay_idx, p.dir_idx};
    }

    template <typename dtype>
    PeakSearch Extractor<dtype>::find_peak(const ChannelCube<dtype> &h) const
    {
        PeakSearch out;
        ObjectiveGrid g;
        out.index = init_tx(h, &g);
        out.init_peak = g.values(Eigen::Index(out.index.delay), Eigen::Index(out.index.tx_dir));
        out.init_median = g.median();

        CVec<dtype> b_tx = tx_bank_.column(out.index.tx_dir);
        for (std::size_t it = 1; it <= cfg_.alt_iterations; ++it)
        {
            const auto [d_rx, rx_dir] = search_rx(h, b_tx);
            const CVec<dtype> b_rx = rx_bank_.column(rx_dir);
            double value = 0.0;
            const auto [d_tx, tx_dir] = search_tx(h, b_rx, &value);
            // the next RX step would reproduce rx_dir when the TX direction did not move
            const bool fixed = tx_dir == out.index.tx_dir && d_tx == d_rx;
            out.index = PathIndex{d_tx, tx_dir, rx_dir};
            out.objective = value;
            out.iterations = it;
            if (fixed)
            {
                out.converged = true;
                break;
            }
            b_tx = tx_bank_.column(tx_dir);
        }
        return out;
    }

    template <typename dtype>
    Mpc<dtype> Extractor<dtype>::make_mpc(const PathIndex &idx, cplx<dtype> gain) const
    {
        Mpc<dtype> m;
        m.gain = gain;
        m.delay = dtype(delays_s_.at(idx.delay));
        m.departure = tx_bank_.direction(idx.tx_dir);
        m.arrival = rx_bank_.direction(idx.rx_dir);
        return m;
    }

    template <typename dtype>
    cplx<dtype> Extractor<dtype>::estimate_gain(const ChannelCube<dtype> &h, const PathIndex &idx) const
    {
        return projection_gain(h, tx_bank_.column(idx.tx_dir), rx_bank_.column(idx.rx_dir), delays_s_.at(idx.delay),
                               grid_, 0.0);
    }

    template <typename dtype>
    ExtractionResult<dtype> Extractor<dtype>::extract(ChannelCube<dtype> h) const
    {
        check_shape(h, tx_, rx_, grid_);
        ExtractionResult<dtype> res;
        res.residual_power.push_back(h.power());
        const double gate = std::pow(10.0, cfg_.noise_gate / 20.0);
        const double floor_ratio = std::pow(10.0, -cfg_.dynamic_range / 20.0);
        double strongest = 0.0;

        std::vector<Mpc<dtype>> found;
        for (;;)
        {
            if (found.size() >= cfg_.max_paths)
            {
                res.stop_reason = "max_paths";
                break;
            }
            if (!(h.power() > 0.0))
            {
                res.stop_reason = "zero_residual";
                break;
            }
            const PeakSearch pk = find_peak(h);
            if (!(pk.init_peak > 0.0) || pk.init_peak < gate * pk.init_median)
            {
                res.stop_reason = "noise_floor";
                break;
            }
            const cplx<dtype> alpha = estimate_gain(h, pk.index);
            const double mag = double(std::abs(alpha));
            if (!(mag > 0.0) || (!found.empty() && mag < strongest * floor_ratio))
            {
                res.stop_reason = "dynamic_range";
                break;
            }
            const Mpc<dtype> m = make_mpc(pk.index, alpha);
            subtract(h, m, tx_, rx_, grid_);
            found.push_back(m);
            res.residual_power.push_back(h.power());
            res.peak_objective.push_back(pk.objective);
            res.iterations.push_back(pk.iterations);
            strongest = std::max(strongest, mag);
        }
        res.empty = found.empty();

        std::stable_sort(found.begin(), found.end(),
                         [](const Mpc<dtype> &a, const Mpc<dtype> &b) { return std::abs(a.gain) > std::abs(b.gain); });
        for (const auto &m : found)
            if (double(std::abs(m.gain)) >= strongest * floor_ratio)
                res.mpcs.push_back(m);
        return res;
    }

    template <typename dtype>
    ExtractionResult<dtype> extract(const ChannelCube<dtype> &h, const ArraySpec<dtype> &tx, const ArraySpec<dtype> &rx,
                                    const FrequencyGrid &grid, const CleanConfig &cfg)
    {
        return Extractor<dtype>(tx, rx, grid, cfg).extract(h);
    }

    template <typename dtype>
    InitEstimate init_tx_beamform(const ChannelCube<dtype> &h, const ArraySpec<dtype> &tx, const ArraySpec<dtype> &rx,
                                  const FrequencyGrid &grid, const CleanConfig &cfg)
    {
        const Extractor<dtype> ex(tx, rx, grid, cfg);
        ObjectiveGrid g;
        const PathIndex idx = ex.init_tx(h, &g);
        InitEstimate out;
        out.delay = ex.delays_s()[idx.delay];
        out.aod = double(ex.tx_bank().direction(idx.tx_dir).azimuth);
        out.eod = double(ex.tx_bank().direction(idx.tx_dir).elevation);
        out.objective = g.values(Eigen::Index(idx.delay), Eigen::Index(idx.tx_dir));
        return out;
    }

    template <typename dtype>
    SideEstimate alternate_search(const ChannelCube<dtype> &h, const Direction<dtype> &fixed, SearchSide side,
                                  const ArraySpec<dtype> &tx, const ArraySpec<dtype> &rx, const FrequencyGrid &grid,
                                  const CleanConfig &cfg)
    {
        const Extractor<dtype> ex(tx, rx, grid, cfg);
        SideEstimate out;
        if (side == SearchSide::rx)
        {
            const auto [d, dir] = ex.search_rx(h, steering_vector(tx, fixed), &out.objective);
            const auto &best = ex.rx_bank().direction(dir);
            out.delay = ex.delays_s()[d];
            out.direction = Direction<double>(double(best.azimuth), double(best.elevation));
        }
        else
        {
            const auto [d, dir] = ex.search_tx(h, steering_vector(rx, fixed), &out.objective);
            const auto &best = ex.tx_bank().direction(dir);
            out.delay = ex.delays_s()[d];
            out.direction = Direction<double>(double(best.azimuth), double(best.elevation));
        }
        return out;
    }

    template <typename dtype>
    cplx<dtype> estimate_gain(const ChannelCube<dtype> &h, double delay_s, const Direction<dtype> &departure,
                              const Direction<dtype> &arrival, const ArraySpec<dtype> &tx, const ArraySpec<dtype> &rx,
                              const FrequencyGrid &grid, double f_ref)
    {
        check_shape(h, tx, rx, grid);
        return projection_gain(h, steering_vector(tx, departure), steering_vector(rx, arrival), delay_s, grid, f_ref);
    }

    template <typename dtype>
    void subtract(ChannelCube<dtype> &h, const Mpc<dtype> &mpc, const ArraySpec<dtype> &tx, const ArraySpec<dtype> &rx,
                  const FrequencyGrid &grid)
    {
        check_shape(h, tx, rx, grid);
        const CVec<dtype> b_tx = steering_vector(tx, mpc.departure);
        const CVec<dtype> b_rx = steering_vector(rx, mpc.arrival);
        const CMat<dtype> outer = b_tx * b_rx.transpose();
        for (std::size_t k = 0; k < h.n_freq; ++k)
        {
            const cplx<dtype> c = mpc.gain * phasor<dtype>(-two_pi * grid[k] * double(mpc.delay));
            h.slice(k) -= c * outer;
        }
    }

#define SOUNDER_INSTANTIATE_CLEAN(T)                                                                              \
    template class Extractor<T>;                                                                                 \
    template ExtractionResult<T> extract(const ChannelCube<T> &, const ArraySpec<T> &, const ArraySpec<T> &,     \
                                         const FrequencyGrid &, const CleanConfig &);                            \
    template InitEstimate init_tx_beamform(const ChannelCube<T> &, const ArraySpec<T> &, const ArraySpec<T> &,   \
                                           const FrequencyGrid &, const CleanConfig &);                          \
    template SideEstimate alternate_search(const ChannelCube<T> &, const Direction<T> &, SearchSide,             \
                                           const ArraySpec<T> &, const ArraySpec<T> &, const FrequencyGrid &,    \
                                           const CleanConfig &);                                                 \
    template cplx<T> estimate_gain(const ChannelCube<T> &, double, const Direction<T> &, const Direction<T> &,   \
                                   const ArraySpec<T> &, const ArraySpec<T> &, const FrequencyGrid &, double);   \
    template void subtract(ChannelCube<T> &, const Mpc<T> &, const ArraySpec<T> &, const ArraySpec<T> &,         \
                           const FrequencyGrid &);

    SOUNDER_INSTANTIATE_CLEAN(float)
    SOUNDER_INSTANTIATE_CLEAN(double)
}
