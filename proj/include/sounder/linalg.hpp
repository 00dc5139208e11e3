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

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace sounder
{
    inline constexpr double speed_of_light = 299792458.0; // m/s
    inline constexpr double two_pi = 2.0 * std::numbers::pi;

    inline constexpr double deg2rad(double deg) { return deg * (std::numbers::pi / 180.0); }
    inline constexpr double rad2deg(double rad) { return rad * (180.0 / std::numbers::pi); }

    template <typename dtype>
    using cplx = std::complex<dtype>;

    template <typename dtype>
    using CVec = Eigen::Matrix<std::complex<dtype>, Eigen::Dynamic, 1>;

    template <typename dtype>
    using CMat = Eigen::Matrix<std::complex<dtype>, Eigen::Dynamic, Eigen::Dynamic>;

    template <typename dtype>
    using RVec = Eigen::Matrix<dtype, Eigen::Dynamic, 1>;

    template <typename dtype>
    using RMat = Eigen::Matrix<dtype, Eigen::Dynamic, Eigen::Dynamic>;

    template <typename dtype>
    using Vec3 = Eigen::Matrix<dtype, 3, 1>;

    // Wraps an angle in degrees into [-180, 180)
    template <typename dtype>
    dtype wrap_degrees(dtype deg)
    {
        dtype w = std::fmod(deg + dtype(180), dtype(360));
        if (w < dtype(0))
            w += dtype(360);
        w -= dtype(180);
        // fmod can round a value just below 180 up to exactly 180
        if (w >= dtype(180))
            w -= dtype(360);
        return w;
    }

    // Unit-modulus phasor exp(j * phase), phase evaluated in double precision
    template <typename dtype>
    std::complex<dtype> phasor(double phase)
    {
        return std::complex<dtype>(dtype(std::cos(phase)), dtype(std::sin(phase)));
    }
}
