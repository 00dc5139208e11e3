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

#include "sounder/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sounder
{
    namespace
    {
        double az_diff(double a, double b)
        {
            return wrap_degrees(a - b);
        }
    }

    template <typename dtype>
    double mpc_distance(const Mpc<dtype> &a, const Mpc<dtype> &b, const MatchScales &scales)
    {
        if (!(scales.angle > 0.0) || !(scales.delay_m > 0.0))
            throw std::invalid_argument("mpc_distance: scales must be positive.");
        const double dd = (double(a.delay) - double(b.delay)) * speed_of_light / scales.delay_m;
        const double d1 = az_diff(double(a.departure.azimuth), double(b.departure.azimuth)) / scales.angle;
        const double d2 = (double(a.departure.elevation) - double(b.departure.elevation)) / scales.angle;
        const double d3 = az_diff(double(a.arrival.azimuth), double(b.arrival.azimuth)) / scales.angle;
        const double d4 = (double(a.arrival.elevation) - double(b.arrival.elevation)) / scales.angle;
        return std::sqrt(dd * dd + d1 * d1 + d2 * d2 + d3 * d3 + d4 * d4);
    }

    template <typename dtype>
    std::vector<MatchPair> match_mpcs(std::span<const Mpc<dtype>> truth, std::span<const Mpc<dtype>> estimates,
                                      const MatchScales &scales)
    {
        std::vector<MatchPair> all;
        all.reserve(truth.size() * estimates.size());
        for (std::size_t i = 0; i < truth.size(); ++i)
            for (std::size_t j = 0; j < estimates.size(); ++j)
                all.push_back({i, j, mpc_distance(truth[i], estimates[j], scales)});
        std::stable_sort(all.begin(), all.end(),
                         [](const MatchPair &a, const MatchPair &b) { return a.distance < b.distance; });

        std::vector<bool> used_t(truth.size(), false), used_e(estimates.size(), false);
        std::vector<MatchPair> out;
        for (const auto &p : all)
        {
            if (used_t[p.truth] || used_e[p.estimate])
                continue;
            used_t[p.truth] = used_e[p.estimate] = true;
            out.push_back(p);
        }
        std::sort(out.begin(), out.end(), [](const MatchPair &a, const MatchPair &b) { return a.truth < b.truth; });
        return out;
    }

    template <typename dtype>
    void RmseAccumulator::add(std::span<const Mpc<dtype>> truth, std::span<const Mpc<dtype>> estimates,
                              const std::vector<MatchPair> &pairs)
    {
        for (const auto &p : pairs)
        {
            const auto &t = truth[p.truth];
            const auto &e = estimates[p.estimate];
            const double d_aod = az_diff(double(e.departure.azimuth), double(t.departure.azimuth));
            const double d_eod = double(e.departure.elevation) - double(t.departure.elevation);
            const double d_aoa = az_diff(double(e.arrival.azimuth), double(t.arrival.azimuth));
            const double d_eoa = double(e.arrival.elevation) - double(t.arrival.elevation);
            const double d_tau = (double(e.delay) - double(t.delay)) * speed_of_light;
            sum_.aod += d_aod * d_aod;
            sum_.eod += d_eod * d_eod;
            sum_.aoa += d_aoa * d_aoa;
            sum_.eoa += d_eoa * d_eoa;
            sum_.delay_m += d_tau * d_tau;
            ++sum_.count;
        }
    }

    void RmseAccumulator::merge(const RmseAccumulator &other)
    {
        sum_.aod += other.sum_.aod;
        sum_.eod += other.sum_.eod;
        sum_.aoa += other.sum_.aoa;
        sum_.eoa += other.sum_.eoa;
        sum_.delay_m += other.sum_.delay_m;
        sum_.count += other.sum_.count;
    }

    ParameterErrors RmseAccumulator::rmse() const
    {
        ParameterErrors out;
        out.count = sum_.count;
        if (sum_.count == 0)
            return out;
        const double n = double(sum_.count);
        out.aod = std::sqrt(sum_.aod / n);
        out.eod = std::sqrt(sum_.eod / n);
        out.aoa = std::sqrt(sum_.aoa / n);
        out.eoa = std::sqrt(sum_.eoa / n);
        out.delay_m = std::sqrt(sum_.delay_m / n);
        return out;
    }

#define SOUNDER_INSTANTIATE_SCORING(T)                                                                            \
    template double mpc_distance(const Mpc<T> &, const Mpc<T> &, const MatchScales &);                           \
    template std::vector<MatchPair> match_mpcs(std::span<const Mpc<T>>, std::span<const Mpc<T>>,                 \
                                               const MatchScales &);                                             \
    template void RmseAccumulator::add(std::span<const Mpc<T>>, std::span<const Mpc<T>>,                         \
                                       const std::vector<MatchPair> &);

    SOUNDER_INSTANTIATE_SCORING(float)
    SOUNDER_INSTANTIATE_SCORING(double)
}
