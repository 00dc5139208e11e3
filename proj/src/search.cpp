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

#include "sounder/search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sounder
{
    namespace
    {
        std::vector<double> multiples(double lo, double hi, double step)
        {
            const long first = long(std::ceil(lo / step - 1e-9));
            const long last = long(std::floor(hi / step + 1e-9));
            std::vector<double> out;
            for (long i = first; i <= last; ++i)
                out.push_back(double(i) * step);
            return out;
        }
    }

    void AngleGrid::validate() const
    {
        if (!(step > 0.0) || !std::isfinite(step))
            throw std::invalid_argument("AngleGrid: step must be positive.");
        if (!(az_max >= az_min) || !(el_max >= el_min))
            throw std::invalid_argument("AngleGrid: empty angle range.");
        if (el_min < -90.0 || el_max > 90.0)
            throw std::invalid_argument("AngleGrid: elevation range must lie within [-90, 90].");
        if (azimuths().empty() || elevations().empty())
            throw std::invalid_argument("AngleGrid: the range contains no grid point.");
    }

    std::vector<double> AngleGrid::azimuths() const
    {
        std::vector<double> out, seen;
        for (double az : multiples(az_min, az_max, step))
        {
            const double w = wrap_degrees(az);
            bool dup = false;
            for (double s : seen)
                if (std::abs(s - w) < 1e-9)
                    dup = true;
            if (dup)
                continue;
            seen.push_back(w);
            out.push_back(az);
        }
        return out;
    }

    std::vector<double> AngleGrid::elevations() const
    {
        return multiples(el_min, el_max, step);
    }

    template <typename dtype>
    std::vector<Direction<dtype>> AngleGrid::directions() const
    {
        const auto az = azimuths();
        const auto el = elevations();
        std::vector<Direction<dtype>> out;
        out.reserve(az.size() * el.size());
        for (double a : az)
            for (double e : el)
                out.emplace_back(dtype(a), dtype(e));
        return out;
    }

    void DelayGrid::validate() const
    {
        if (!(step_m > 0.0) || !std::isfinite(step_m))
            throw std::invalid_argument("DelayGrid: step must be positive.");
        if (!(min_m >= 0.0) || !(max_m >= min_m))
            throw std::invalid_argument("DelayGrid: need 0 <= min <= max.");
        if (delays_m().empty())
            throw std::invalid_argument("DelayGrid: the range contains no grid point.");
    }

    std::vector<double> DelayGrid::delays_m() const
    {
        return multiples(min_m, max_m, step_m);
    }

    std::vector<double> DelayGrid::delays_s() const
    {
        auto d = delays_m();
        for (auto &v : d)
            v /= speed_of_light;
        return d;
    }

    template <typename dtype>
    CMat<dtype> delay_kernel(const FrequencyGrid &grid, std::span<const double> delays_s, double f_ref)
    {
        CMat<dtype> e(Eigen::Index(grid.size()), Eigen::Index(delays_s.size()));
        for (std::size_t i = 0; i < delays_s.size(); ++i)
            for (std::size_t k = 0; k < grid.size(); ++k)
                e(Eigen::Index(k), Eigen::Index(i)) = phasor<dtype>(two_pi * (grid[k] - f_ref) * delays_s[i]);
        return e;
    }

    template <typename dtype>
    SteeringBank<dtype>::SteeringBank(const ArraySpec<dtype> &spec, const AngleGrid &grid,
                                      std::size_t cache_limit_bytes)
        : spec_(spec), grid_(grid)
    {
        grid_.validate();
        dirs_ = grid_.directions<dtype>();
        norms_.resize(dirs_.size());
        const std::size_t bytes = dirs_.size() * spec_.size() * sizeof(cplx<dtype>);
        cached_ = bytes <= cache_limit_bytes;
        if (cached_)
        {
            cache_ = steering_matrix(spec_, std::span<const Direction<dtype>>(dirs_));
            for (std::size_t d = 0; d < dirs_.size(); ++d)
                norms_[d] = double(cache_.col(Eigen::Index(d)).norm());
            return;
        }
        constexpr std::size_t chunk = 4096;
        for (std::size_t first = 0; first < dirs_.size(); first += chunk)
        {
            const std::size_t count = std::min(chunk, dirs_.size() - first);
            const CMat<dtype> a = steering_matrix(spec_, std::span<const Direction<dtype>>(dirs_.data() + first, count));
            for (std::size_t d = 0; d < count; ++d)
                norms_[first + d] = double(a.col(Eigen::Index(d)).norm());
        }
    }

    template <typename dtype>
    CVec<dtype> SteeringBank<dtype>::column(std::size_t d) const
    {
        if (d >= dirs_.size())
            throw std::out_of_range("SteeringBank::column: direction index out of range.");
        if (cached_)
            return cache_.col(Eigen::Index(d));
        return steering_vector(spec_, dirs_[d]);
    }

    template <typename dtype>
    void SteeringBank<dtype>::for_each_chunk(
        std::size_t max_chunk, const std::function<void(std::size_t, const Eigen::Ref<const CMat<dtype>> &)> &f) const
    {
        max_chunk = std::max<std::size_t>(1, max_chunk);
        for (std::size_t first = 0; first < dirs_.size(); first += max_chunk)
        {
            const std::size_t count = std::min(max_chunk, dirs_.size() - first);
            if (cached_)
                f(first, cache_.middleCols(Eigen::Index(first), Eigen::Index(count)));
            else
                f(first, steering_matrix(spec_, std::span<const Direction<dtype>>(dirs_.data() + first, count)));
        }
    }

    GridPeak ObjectiveGrid::peak() const
    {
        GridPeak best;
        if (values.size() == 0)
            throw std::logic_error("ObjectiveGrid::peak: empty grid.");
        const double top = values.maxCoeff();
        const double threshold = top * (1.0 - 1e-10);
        // first hit in (delay, direction) lexicographic order
        for (Eigen::Index i = 0; i < values.rows(); ++i)
            for (Eigen::Index d = 0; d < values.cols(); ++d)
                if (values(i, d) >= threshold)
                {
                    best.delay_idx = std::size_t(i);
                    best.dir_idx = std::size_t(d);
                    best.value = values(i, d);
                    return best;
                }
        return best;
    }

    double ObjectiveGrid::median() const
    {
        std::vector<double> v(values.data(), values.data() + values.size());
        const std::size_t mid = (v.size() - 1) / 2;
        std::nth_element(v.begin(), v.begin() + std::ptrdiff_t(mid), v.end());
        return v[mid];
    }

    template <typename dtype>
    ObjectiveGrid scan(const Eigen::Ref<const CMat<dtype>> &y, std::size_t groups, const SteeringBank<dtype> &bank)
    {
        if (groups == 0 || y.cols() % Eigen::Index(groups) != 0)
            throw std::invalid_argument("scan: column count is not a multiple of the group count.");
        if (std::size_t(y.rows()) != bank.elements())
            throw std::invalid_argument("scan: data rows do not match the array size.");
        const Eigen::Index n_tau = y.cols() / Eigen::Index(groups);

        ObjectiveGrid out;
        out.values = RMat<double>::Zero(n_tau, Eigen::Index(bank.size()));

        // keep the projected block near 16 MB
        const std::size_t budget = (std::size_t(16) << 20) / sizeof(cplx<dtype>);
        const std::size_t chunk = std::max<std::size_t>(1, budget / std::size_t(std::max<Eigen::Index>(1, y.cols())));

        RVec<double> inv(static_cast<Eigen::Index>(bank.size()));
        for (std::size_t d = 0; d < bank.size(); ++d)
            inv(Eigen::Index(d)) = bank.norm(d) > 0.0 ? 1.0 / bank.norm(d) : 0.0;
        RVec<double> best(static_cast<Eigen::Index>(chunk));
        CMat<dtype> p;
        bank.for_each_chunk(chunk,
                            [&](std::size_t first, const Eigen::Ref<const CMat<dtype>> &a)
                            {
                                p.noalias() = a.adjoint() * y; // count x (G * N_tau)
                                const Eigen::Index cnt = a.cols();
                                // squared magnitudes first, one sqrt per grid cell
                                for (Eigen::Index i = 0; i < n_tau; ++i)
                                {
                                    for (Eigen::Index d = 0; d < cnt; ++d)
                                        best(d) = double(std::norm(p(d, i)));
                                    for (Eigen::Index g = 1; g < Eigen::Index(groups); ++g)
                                        for (Eigen::Index d = 0; d < cnt; ++d)
                                            best(d) = std::max(best(d), double(std::norm(p(d, g * n_tau + i))));
                                    for (Eigen::Index d = 0; d < cnt; ++d)
                                        out.values(i, Eigen::Index(first) + d) = std::sqrt(best(d)) * inv(Eigen::Index(first) + d);
                                }
                            });
        return out;
    }

#define SOUNDER_INSTANTIATE_SEARCH(T)                                                                             \
    template std::vector<Direction<T>> AngleGrid::directions<T>() const;                                         \
    template CMat<T> delay_kernel<T>(const FrequencyGrid &, std::span<const double>, double);                    \
    template class SteeringBank<T>;                                                                              \
    template ObjectiveGrid scan<T>(const Eigen::Ref<const CMat<T>> &, std::size_t, const SteeringBank<T> &);

    SOUNDER_INSTANTIATE_SEARCH(float)
    SOUNDER_INSTANTIATE_SEARCH(double)
}
