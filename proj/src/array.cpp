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

#include "sounder/array.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sounder
{
    namespace
    {
        // Precomputed exponents of the cosine lobe
        template <typename dtype>
        struct LobeShape
        {
            bool isotropic = true;
            bool az_half_angle = false;
            bool el_half_angle = false;
            double p_az = 0.0;
            double p_el = 0.0;
            double backlobe = 1.0;

            explicit LobeShape(const PatternModel<dtype> &pattern)
            {
                isotropic = pattern.kind == PatternKind::isotropic;
                if (isotropic)
                    return;
                auto exponent = [](double width_deg, bool &half_angle)
                {
                    half_angle = width_deg >= 180.0;
                    double edge = half_angle ? width_deg / 4.0 : width_deg / 2.0;
                    return std::log(0.5) / (2.0 * std::log(std::cos(deg2rad(edge))));
                };
                p_az = exponent(double(pattern.az_3db), az_half_angle);
                p_el = exponent(double(pattern.el_3db), el_half_angle);
                backlobe = std::pow(10.0, -double(pattern.front_to_back) / 20.0);
            }

            dtype operator()(double cos_az, double cos_el) const
            {
                if (isotropic)
                    return dtype(1);
                double f_az, f_el;
                if (az_half_angle)
                    f_az = std::pow(std::sqrt(std::max(0.0, 0.5 * (1.0 + cos_az))), p_az);
                else
                    f_az = cos_az > 0.0 ? std::pow(cos_az, p_az) : 0.0;
                if (el_half_angle)
                    f_el = std::pow(std::sqrt(std::max(0.0, 0.5 * (1.0 + cos_el))), p_el);
                else
                    f_el = cos_el > 0.0 ? std::pow(cos_el, p_el) : 0.0;
                return dtype(std::max(f_az * f_el, backlobe));
            }
        };

        // Cosines of the local azimuth and elevation of a global unit vector in an element frame
        template <typename dtype>
        std::pair<double, double> local_cosines(const Eigen::Matrix<dtype, 3, 3> &frame, const Vec3<dtype> &k)
        {
            Vec3<dtype> v = frame.transpose() * k;
            double rho = std::hypot(double(v.x()), double(v.y()));
            double cos_az = rho > 0.0 ? double(v.x()) / rho : 1.0;
            return {cos_az, std::min(rho, 1.0)};
        }

        template <typename dtype>
        Eigen::Matrix<dtype, 3, 3> element_frame(const Direction<dtype> &boresight)
        {
            const double az = deg2rad(double(boresight.azimuth));
            Vec3<dtype> x = boresight.unit_vector();
            Vec3<dtype> y(dtype(-std::sin(az)), dtype(std::cos(az)), dtype(0));
            Vec3<dtype> z = x.cross(y);
            Eigen::Matrix<dtype, 3, 3> frame;
            frame.col(0) = x;
            frame.col(1) = y;
            frame.col(2) = z;
            return frame;
        }
    }

    template <typename dtype>
    Direction<dtype>::Direction(dtype azimuth_deg, dtype elevation_deg)
    {
        if (!std::isfinite(azimuth_deg) || !std::isfinite(elevation_deg))
            throw std::invalid_argument("Direction: angles must be finite.");
        if (std::abs(elevation_deg) > dtype(90))
            throw std::invalid_argument("Direction: elevation must be within [-90, 90] degrees, got " +
                                        std::to_string(double(elevation_deg)) + ".");
        azimuth = wrap_degrees(azimuth_deg);
        elevation = elevation_deg;
    }

    template <typename dtype>
    Vec3<dtype> Direction<dtype>::unit_vector() const
    {
        const double az = deg2rad(double(azimuth)), el = deg2rad(double(elevation));
        return Vec3<dtype>(dtype(std::cos(el) * std::cos(az)), dtype(std::cos(el) * std::sin(az)), dtype(-std::sin(el)));
    }

    template <typename dtype>
    PatternModel<dtype> PatternModel<dtype>::isotropic()
    {
        return PatternModel{};
    }

    template <typename dtype>
    PatternModel<dtype> PatternModel<dtype>::cosine_lobe(dtype az_3db_deg, dtype el_3db_deg, dtype front_to_back_db)
    {
        PatternModel p;
        p.kind = PatternKind::cosine_lobe;
        p.az_3db = az_3db_deg;
        p.el_3db = el_3db_deg;
        p.front_to_back = front_to_back_db;
        p.validate();
        return p;
    }

    template <typename dtype>
    void PatternModel<dtype>::validate() const
    {
        if (kind == PatternKind::isotropic)
            return;
        if (!(az_3db > dtype(0) && az_3db < dtype(360)))
            throw std::invalid_argument("PatternModel: az_3db must be in (0, 360) degrees.");
        if (!(el_3db > dtype(0) && el_3db < dtype(360)))
            throw std::invalid_argument("PatternModel: el_3db must be in (0, 360) degrees.");
        if (!(front_to_back >= dtype(0)) || !std::isfinite(front_to_back))
            throw std::invalid_argument("PatternModel: front_to_back must be a finite value >= 0 dB.");
    }

    template <typename dtype>
    dtype PatternModel<dtype>::gain_from_cosines(dtype cos_az, dtype cos_el) const
    {
        return LobeShape<dtype>(*this)(double(cos_az), double(cos_el));
    }

    template <typename dtype>
    dtype PatternModel<dtype>::gain(dtype local_azimuth_deg, dtype local_elevation_deg) const
    {
        return gain_from_cosines(dtype(std::cos(deg2rad(double(local_azimuth_deg)))),
                                 dtype(std::cos(deg2rad(double(local_elevation_deg)))));
    }

    template <typename dtype>
    ArraySpec<dtype>::ArraySpec(std::vector<Element<dtype>> elements, dtype wavelength, PatternModel<dtype> pattern)
        : elements_(std::move(elements)), wavelength_(wavelength), pattern_(pattern)
    {
        if (elements_.empty())
            throw std::invalid_argument("ArraySpec: at least one element is required.");
        if (!(wavelength_ > dtype(0)) || !std::isfinite(wavelength_))
            throw std::invalid_argument("ArraySpec: wavelength must be positive and finite.");
        pattern_.validate();
        frames_.reserve(elements_.size());
        for (const auto &e : elements_)
        {
            if (!e.position.allFinite())
                throw std::invalid_argument("ArraySpec: element positions must be finite.");
            frames_.push_back(element_frame(e.boresight));
        }
    }

    template <typename dtype>
    dtype ArraySpec<dtype>::element_gain(std::size_t n, const Direction<dtype> &dir) const
    {
        auto [cos_az, cos_el] = local_cosines(frames_.at(n), dir.unit_vector());
        return LobeShape<dtype>(pattern_)(cos_az, cos_el);
    }

    template <typename dtype>
    ArraySpec<dtype> ArraySpec<dtype>::subarray(std::size_t first, std::size_t count) const
    {
        if (count == 0 || first + count > elements_.size())
            throw std::out_of_range("ArraySpec::subarray: element range out of bounds.");
        std::vector<Element<dtype>> sub(elements_.begin() + std::ptrdiff_t(first),
                                        elements_.begin() + std::ptrdiff_t(first + count));
        return ArraySpec(std::move(sub), wavelength_, pattern_);
    }

    template <typename dtype>
    ArraySpec<dtype> ArraySpec<dtype>::translated(const Vec3<dtype> &offset) const
    {
        auto moved = elements_;
        for (auto &e : moved)
            e.position += offset;
        return ArraySpec(std::move(moved), wavelength_, pattern_);
    }

    template <typename dtype>
    CVec<dtype> steering_vector(const ArraySpec<dtype> &spec, const Direction<dtype> &dir)
    {
        const Direction<dtype> dirs[1] = {dir};
        return steering_matrix(spec, std::span<const Direction<dtype>>(dirs)).col(0);
    }

    template <typename dtype>
    CMat<dtype> steering_matrix(const ArraySpec<dtype> &spec, std::span<const Direction<dtype>> dirs)
    {
        const auto n_elem = Eigen::Index(spec.size());
        const LobeShape<dtype> lobe(spec.pattern());
        const double k0 = two_pi / double(spec.wavelength());

        CMat<dtype> out(n_elem, Eigen::Index(dirs.size()));
        for (Eigen::Index d = 0; d < Eigen::Index(dirs.size()); ++d)
        {
            const Vec3<dtype> k = dirs[std::size_t(d)].unit_vector();
            const Eigen::Vector3d kd = k.template cast<double>();
            for (Eigen::Index n = 0; n < n_elem; ++n)
            {
                const auto &elem = spec.elements()[std::size_t(n)];
                dtype g = dtype(1);
                if (!lobe.isotropic)
                {
                    auto [cos_az, cos_el] = local_cosines(spec.frame(std::size_t(n)), k);
                    g = lobe(cos_az, cos_el);
                }
                const double phase = k0 * kd.dot(elem.position.template cast<double>());
                out(n, d) = g * phasor<dtype>(phase);
            }
        }
        return out;
    }

    template <typename dtype>
    ArraySpec<dtype> build_virtual_cylinder(std::size_t rings, std::size_t per_ring, dtype ring_spacing, dtype radius,
                                            dtype wavelength, const PatternModel<dtype> &pattern)
    {
        if (rings == 0 || per_ring == 0)
            throw std::invalid_argument("build_virtual_cylinder: rings and per_ring must be >= 1.");
        if (!(radius > dtype(0)))
            throw std::invalid_argument("build_virtual_cylinder: radius must be positive.");
        if (!(ring_spacing > dtype(0)))
            throw std::invalid_argument("build_virtual_cylinder: ring spacing must be positive.");

        std::vector<Element<dtype>> elements;
        elements.reserve(rings * per_ring);
        const double step = 360.0 / double(per_ring);
        const double z0 = 0.5 * double(rings - 1);
        for (std::size_t c = 0; c < per_ring; ++c)
        {
            const double az = double(c) * step;
            const double az_rad = deg2rad(az);
            for (std::size_t i = 0; i < rings; ++i)
            {
                Element<dtype> e;
                e.position = Vec3<dtype>(dtype(double(radius) * std::cos(az_rad)),
                                         dtype(double(radius) * std::sin(az_rad)),
                                         dtype((double(i) - z0) * double(ring_spacing)));
                e.boresight = Direction<dtype>(dtype(az), dtype(0));
                elements.push_back(e);
            }
        }
        return ArraySpec<dtype>(std::move(elements), wavelength, pattern);
    }

    template <typename dtype>
    ArraySpec<dtype> build_rectangular(std::size_t n_az, std::size_t n_el, dtype spacing, dtype wavelength,
                                       const PatternModel<dtype> &pattern)
    {
        if (n_az == 0 || n_el == 0)
            throw std::invalid_argument("build_rectangular: element counts must be >= 1.");
        if (!(spacing > dtype(0)))
            throw std::invalid_argument("build_rectangular: spacing must be positive.");

        std::vector<Element<dtype>> elements;
        elements.reserve(n_az * n_el);
        const double y0 = 0.5 * double(n_az - 1), z0 = 0.5 * double(n_el - 1);
        for (std::size_t j = 0; j < n_el; ++j)
            for (std::size_t i = 0; i < n_az; ++i)
            {
                Element<dtype> e;
                e.position = Vec3<dtype>(dtype(0), dtype((double(i) - y0) * double(spacing)),
                                         dtype((double(j) - z0) * double(spacing)));
                elements.push_back(e);
            }
        return ArraySpec<dtype>(std::move(elements), wavelength, pattern);
    }

    template <typename dtype>
    ArraySpec<dtype> build_single(const Vec3<dtype> &position, dtype wavelength, const PatternModel<dtype> &pattern)
    {
        Element<dtype> e;
        e.position = position;
        return ArraySpec<dtype>({e}, wavelength, pattern);
    }

#define SOUNDER_INSTANTIATE_ARRAY(T)                                                                              \
    template struct Direction<T>;                                                                                 \
    template struct PatternModel<T>;                                                                              \
    template class ArraySpec<T>;                                                                                  \
    template CVec<T> steering_vector(const ArraySpec<T> &, const Direction<T> &);                                 \
    template CMat<T> steering_matrix(const ArraySpec<T> &, std::span<const Direction<T>>);                       \
    template ArraySpec<T> build_virtual_cylinder(std::size_t, std::size_t, T, T, T, const PatternModel<T> &);     \
    template ArraySpec<T> build_rectangular(std::size_t, std::size_t, T, T, const PatternModel<T> &);             \
    template ArraySpec<T> build_single(const Vec3<T> &, T, const PatternModel<T> &);

    SOUNDER_INSTANTIATE_ARRAY(float)
    SOUNDER_INSTANTIATE_ARRAY(double)
}
