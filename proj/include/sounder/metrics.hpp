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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sounder/channel.hpp"

namespace sounder
{
    enum class AngleDomain
    {
        aod,
        eod,
        aoa,
        eoa
    };

    /*!
    RMS angular spread in degrees: sqrt(sum_l w_l (theta_l - mean)^2) with power weights w_l = |alpha_l|^2 / sum |alpha|^2.
    Azimuth domains use the cut of the circle that minimizes the spread.
    */
    template <typename dtype>
    double angular_spread(std::span<const Mpc<dtype>> mpcs, AngleDomain domain);

    // Power-weighted mean angle in degrees (azimuths with the same minimizing cut, wrapped to [-180, 180))
    template <typename dtype>
    double mean_angle(std::span<const Mpc<dtype>> mpcs, AngleDomain domain);

    struct SpreadStats
    {
        double asd = 0.0, esd = 0.0, asa = 0.0, esa = 0.0;
        double mean_aod = 0.0, mean_eod = 0.0, mean_aoa = 0.0, mean_eoa = 0.0;
    };

    template <typename dtype>
    SpreadStats spread_stats(std::span<const Mpc<dtype>> mpcs);

    // Keeps the MPCs whose AoD lies in [aod_min, aod_max]
    template <typename dtype>
    std::vector<Mpc<dtype>> filter_sector(std::span<const Mpc<dtype>> mpcs, double aod_min, double aod_max);

    // r_ij = |mean EoD_i - mean EoD_j| - ESD_i - ESD_j (degrees); users are separable when r_ij > 0
    double separability(const SpreadStats &i, const SpreadStats &j);
    inline bool separable(double r) { return r > 0.0; }

    /*!
    Base-station channel rebuilt from MPCs with i.i.d. uniform phases:
    H(f_k) = sum_l |alpha_l| e^{j theta_l} B_T(dep_l) e^{-j 2 pi f_k tau_l}. Returns N_T x N_f.
    */
    template <typename dtype>
    CMat<dtype> reconstruct_channel(std::span<const Mpc<dtype>> mpcs, const ArraySpec<dtype> &bs,
                                    const FrequencyGrid &grid, std::uint64_t seed);

    // C = (1/N_f) sum_k log2(1 + ||H(f_k)||^2 / (N_T N0)), H is N_T x N_f
    template <typename dtype>
    double capacity_single(const Eigen::Ref<const CMat<dtype>> &h, double n0);

    enum class Detector
    {
        mrc,
        zf,
        mmse
    };

    std::string to_string(Detector d);
    Detector detector_from_string(const std::string &name);

    /*!
    First column of the detector matrix for G = [h_i, h_j]: MRC h_i, ZF G (G^H G)^-1, MMSE G (G^H G + N0 I)^-1.
    ZF throws std::invalid_argument when G^H G is singular within a relative 1e-12.
    */
    template <typename dtype>
    CVec<dtype> detector_weights(const CVec<dtype> &h_i, const CVec<dtype> &h_j, double n0, Detector kind);

    // (1/N_T) |h_i^H w|^2 / (|h_j^H w|^2 + ||w||^2 N0) at one frequency
    template <typename dtype>
    double two_user_sinr(const CVec<dtype> &h_i, const CVec<dtype> &h_j, double n0, Detector kind);

    // Frequency average of log2(1 + SINR); h_i and h_j are N_T x N_f
    template <typename dtype>
    double capacity_two_user(const Eigen::Ref<const CMat<dtype>> &h_i, const Eigen::Ref<const CMat<dtype>> &h_j,
                             double n0, Detector kind);

    struct CapacityReport
    {
        std::string detector;
        std::vector<double> capacities;            // per realization, b/s/Hz
        double mean = 0.0;
        double stddev = 0.0;
        std::vector<std::pair<double, double>> cdf; // (capacity, empirical quantile), non-decreasing
    };

    // Sorted samples with quantiles (i + 1) / n
    std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values);
    CapacityReport make_capacity_report(std::string detector, std::vector<double> capacities);
}
