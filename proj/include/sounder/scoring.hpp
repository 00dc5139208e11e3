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

#include <span>
#include <vector>

#include "sounder/channel.hpp"

namespace sounder
{
    // Step sizes that normalize each parameter dimension for matching
    struct MatchScales
    {
        double angle = 1.0;   // degrees
        double delay_m = 3.0; // meters
    };

    struct MatchPair
    {
        std::size_t truth = 0;
        std::size_t estimate = 0;
        double distance = 0.0;
    };

    // Normalized distance over (delay, AoD, EoD, AoA, EoA), azimuths compared modulo 360
    template <typename dtype>
    double mpc_distance(const Mpc<dtype> &a, const Mpc<dtype> &b, const MatchScales &scales);

    /*!
    Greedy nearest-neighbour association: repeatedly pairs the closest unmatched (truth, estimate) couple.
    Ties go to the lowest (truth, estimate) index. Unmatched entries on either side are left out.
    */
    template <typename dtype>
    std::vector<MatchPair> match_mpcs(std::span<const Mpc<dtype>> truth, std::span<const Mpc<dtype>> estimates,
                                      const MatchScales &scales = {});

    // Per-dimension errors, degrees and meters
    struct ParameterErrors
    {
        double aod = 0.0, eod = 0.0, aoa = 0.0, eoa = 0.0, delay_m = 0.0;
        std::size_t count = 0;
    };

    // Accumulates squared errors of matched pairs and reports the RMSE
    class RmseAccumulator
    {
    public:
        template <typename dtype>
        void add(std::span<const Mpc<dtype>> truth, std::span<const Mpc<dtype>> estimates,
                 const std::vector<MatchPair> &pairs);

        void merge(const RmseAccumulator &other);
        ParameterErrors rmse() const;
        std::size_t count() const { return sum_.count; }

    private:
        ParameterErrors sum_;
    };
}
