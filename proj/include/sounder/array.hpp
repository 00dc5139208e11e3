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

#include <cstddef>
#include <span>
#include <vector>

#include "sounder/linalg.hpp"

namespace sounder
{
    /*!
    Propagation direction in degrees.

    Azimuth is wrapped into [-180, 180) on construction. Elevation is limited to [-90, 90] and follows the
    convention that positive elevation points toward the ground, so the unit propagation vector is
    (cos el cos az, cos el sin az, -sin el) in a z-up frame.
    */
    template <typename dtype>
    struct Direction
    {
        dtype azimuth = dtype(0);
        dtype elevation = dtype(0);

        Direction() = default;
        Direction(dtype azimuth_deg, dtype elevation_deg);

        Vec3<dtype> unit_vector() const;
    };

    enum class PatternKind
    {
        isotropic,
        cosine_lobe
    };

    /*!
    Analytic element pattern (amplitude).

    The cosine lobe is g = max(c_az^p_az * c_el^p_el, backlobe), where c is the cosine of the angular offset
    from boresight and the exponents are chosen so that the power pattern falls to one half at the stated
    3 dB widths. For widths of 180 degrees or more the half-angle cosine is used instead, which keeps the
    lobe well defined up to (but excluding) 360 degrees. backlobe = 10^(-front_to_back/20).
    */
    template <typename dtype>
    struct PatternModel
    {
        PatternKind kind = PatternKind::isotropic;
        dtype az_3db = dtype(360);       // degrees, only used by the cosine lobe
        dtype el_3db = dtype(360);       // degrees
        dtype front_to_back = dtype(0);  // dB

        static PatternModel isotropic();
        static PatternModel cosine_lobe(dtype az_3db_deg, dtype el_3db_deg, dtype front_to_back_db);

        // Throws std::invalid_argument if the parameters are out of range
        void validate() const;

        // Amplitude gain toward a direction given in the element's local (boresight) frame
        dtype gain(dtype local_azimuth_deg, dtype local_elevation_deg) const;

        // Same, from the cosines of the local angles; avoids the trigonometry in the hot loop
        dtype gain_from_cosines(dtype cos_az, dtype cos_el) const;
    };

    template <typename dtype>
    struct Element
    {
        Vec3<dtype> position = Vec3<dtype>::Zero(); // meters
        Direction<dtype> boresight;
    };

    /*!
    Antenna array: element positions, boresights, a common element pattern and the carrier wavelength.
    Immutable after construction.
    */
    template <typename dtype>
    class ArraySpec
    {
    public:
        ArraySpec(std::vector<Element<dtype>> elements, dtype wavelength, PatternModel<dtype> pattern);

        std::size_t size() const { return elements_.size(); }
        const std::vector<Element<dtype>> &elements() const { return elements_; }
        const Element<dtype> &element(std::size_t n) const { return elements_.at(n); }
        dtype wavelength() const { return wavelength_; }
        const PatternModel<dtype> &pattern() const { return pattern_; }

        // Rotation whose columns are the local x (boresight), y and z axes of element n
        const Eigen::Matrix<dtype, 3, 3> &frame(std::size_t n) const { return frames_[n]; }

        // Amplitude gain of element n toward a global direction
        dtype element_gain(std::size_t n, const Direction<dtype> &dir) const;

        ArraySpec subarray(std::size_t first, std::size_t count) const;
        ArraySpec translated(const Vec3<dtype> &offset) const;

    private:
        std::vector<Element<dtype>> elements_;
        std::vector<Eigen::Matrix<dtype, 3, 3>> frames_;
        dtype wavelength_;
        PatternModel<dtype> pattern_;
    };

    // v_n = g_n(dir) * exp(+j 2 pi (k(dir) . p_n) / lambda)
    template <typename dtype>
    CVec<dtype> steering_vector(const ArraySpec<dtype> &spec, const Direction<dtype> &dir);

    // One steering vector per column
    template <typename dtype>
    CMat<dtype> steering_matrix(const ArraySpec<dtype> &spec, std::span<const Direction<dtype>> dirs);

    // Rings stacked along z (centered on z = 0), per_ring elements evenly spaced in azimuth starting at 0 deg,
    // boresights pointing radially outward. Element index = column * rings + ring, so every group of `rings`
    // consecutive elements is one vertical column (one rotor position of a virtual array).
    template <typename dtype>
    ArraySpec<dtype> build_virtual_cylinder(std::size_t rings, std::size_t per_ring, dtype ring_spacing, dtype radius,
                                            dtype wavelength, const PatternModel<dtype> &pattern);

    // Planar grid in the y-z plane centered on the origin, common boresight along +x.
    // Element index = el_index * n_az + az_index.
    template <typename dtype>
    ArraySpec<dtype> build_rectangular(std::size_t n_az, std::size_t n_el, dtype spacing, dtype wavelength,
                                       const PatternModel<dtype> &pattern = PatternModel<dtype>::isotropic());

    template <typename dtype>
    ArraySpec<dtype> build_single(const Vec3<dtype> &position, dtype wavelength,
                                  const PatternModel<dtype> &pattern = PatternModel<dtype>::isotropic());
}
