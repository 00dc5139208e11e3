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

#include "sounder/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "sounder/rng.hpp"

namespace sounder
{
    namespace
    {
        template <typename dtype>
        double angle_of(const Mpc<dtype> &m, AngleDomain domain)
        {
            switch (domain)
            {
            case AngleDomain::aod:
                return double(m.departure.azimuth);
            case AngleDomain::eod:
                return double(m.departure.elevation);
            case AngleDomain::aoa:
                return double(m.arrival.azimuth);
            default:
                return double(m.arrival.elevation);
            }
        }

        bool is_azimuth(AngleDomain d) { return d == AngleDomain::aod || d == AngleDomain::aoa; }

        struct Moments
        {
            double mean = 0.0;
            double spread = 0.0;
        };

        Moments weighted_moments(const std::vector<double> &x, const std::vector<double> &w)
        {
            Moments m;
            for (std::size_t i = 0; i < x.size(); ++i)
                m.mean += w[i] * x[i];
            double var = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i)
                var += w[i] * (x[i] - m.mean) * (x[i] - m.mean);
            m.spread = std::sqrt(std::max(0.0, var));
            return m;
        }

        template <typename dtype>
        Moments domain_moments(std::span<const Mpc<dtype>> mpcs, AngleDomain domain)
        {
            if (mpcs.empty())
                throw std::invalid_argument("angular_spread: the MPC list is empty.");
            std::vector<double> x, w;
            double total = 0.0;
            for (const auto &m : mpcs)
            {
                const double p = double(std::norm(m.gain));
                if (!std::isfinite(p))
                    throw std::invalid_argument("angular_spread: MPC gains must be finite.");
                w.push_back(p);
                x.push_back(angle_of(m, domain));
                total += p;
            }
            if (!(total > 0.0))
                throw std::invalid_argument("angular_spread: total MPC power is zero.");
            for (auto &v : w)
                v /= total;

            if (!is_azimuth(domain))
                return weighted_moments(x, w);

            // every cut position at one of the angles, u_m = mod(phi_m - phi_l, 360)
            Moments best{0.0, std::numeric_limits<double>::infinity()};
            std::vector<double> u(x.size());
            for (std::size_t l = 0; l < x.size(); ++l)
            {
                for (std::size_t m = 0; m < x.size(); ++m)
                {
                    double d = std::fmod(x[m] - x[l], 360.0);
                    if (d < 0.0)
                        d += 360.0;
                    u[m] = d;
                }
                Moments cur = weighted_moments(u, w);
                if (cur.spread < best.spread)
                {
                    best = cur;
                    best.mean = wrap_degrees(cur.mean + x[l]);
                }
            }
            return best;
        }
    }

    template <typename dtype>
    double angular_spread(std::span<const Mpc<dtype>> mpcs, AngleDomain domain)
    {
        return domain_moments(mpcs, domain).spread;
    }

    template <typename dtype>
    double mean_angle(std::span<const Mpc<dtype>> mpcs, AngleDomain domain)
    {
        return domain_moments(mpcs, domain).mean;
    }

    template <typename dtype>
    SpreadStats spread_stats(std::span<const Mpc<dtype>> mpcs)
    {
        SpreadStats s;
        const auto aod = domain_moments(mpcs, AngleDomain::aod);
        const auto eod = domain_moments(mpcs, AngleDomain::eod);
        const auto aoa = domain_moments(mpcs, AngleDomain::aoa);
        const auto eoa = domain_moments(mpcs, AngleDomain::eoa);
        s.asd = aod.spread;
        s.esd = eod.spread;
        s.asa = aoa.spread;
        s.esa = eoa.spread;
        s.mean_aod = aod.mean;
        s.mean_eod = eod.mean;
        s.mean_aoa = aoa.mean;
        s.mean_eoa = eoa.mean;
        return s;
    }

    template <typename dtype>
    std::vector<Mpc<dtype>> filter_sector(std::span<const Mpc<dtype>> mpcs, double aod_min, double aod_max)
    {
        std::vector<Mpc<dtype>> out;
        for (const auto &m : mpcs)
        {
            const double a = double(m.departure.azimuth);
            if (a >= aod_min && a <= aod_max)
                out.push_back(m);
        }
        return out;
    }

    double separability(const SpreadStats &i, const SpreadStats &j)
    {
        return std::abs(i.mean_eod - j.mean_eod) - i.esd - j.esd;
    }

    template <typename dtype>
    CMat<dtype> reconstruct_channel(std::span<const Mpc<dtype>> mpcs, const ArraySpec<dtype> &bs,
                                    const FrequencyGrid &grid, std::uint64_t seed)
    {
        if (mpcs.empty())
            throw std::invalid_argument("reconstruct_channel: the MPC list is empty.");
        Rng rng(seed);
        std::uniform_real_distribution<double> uniform(0.0, two_pi);
        CMat<dtype> h = CMat<dtype>::Zero(Eigen::Index(bs.size()), Eigen::Index(grid.size()));
        for (const auto &m : mpcs)
        {
            const double theta = uniform(rng);
            const cplx<dtype> a = dtype(std::abs(m.gain)) * phasor<dtype>(theta);
            const CVec<dtype> b = steering_vector(bs, m.departure);
            for (std::size_t k = 0; k < grid.size(); ++k)
                h.col(Eigen::Index(k)) += (a * phasor<dtype>(-two_pi * grid[k] * double(m.delay))) * b;
        }
        return h;
    }

    template <typename dtype>
    double capacity_single(const Eigen::Ref<const CMat<dtype>> &h, double n0)
    {
        if (!(n0 > 0.0))
            throw std::invalid_argument("capacity_single: noise power must be positive.");
        if (h.cols() == 0 || h.rows() == 0)
            throw std::invalid_argument("capacity_single: empty channel.");
        const double n_t = double(h.rows());
        double c = 0.0;
        for (Eigen::Index k = 0; k < h.cols(); ++k)
            c += std::log2(1.0 + double(h.col(k).squaredNorm()) / (n_t * n0));
        return c / double(h.cols());
    }

    std::string to_string(Detector d)
    {
        switch (d)
        {
        case Detector::mrc:
            return "mrc";
        case Detector::zf:
            return "zf";
        case Detector::mmse:
            return "mmse";
        }
        return "unknown";
    }

    Detector detector_from_string(const std::string &name)
    {
        for (auto d : {Detector::mrc, Detector::zf, Detector::mmse})
            if (to_string(d) == name)
                return d;
        throw std::invalid_argument("Unknown detector '" + name + "' (expected mrc, zf or mmse).");
    }

    template <typename dtype>
    CVec<dtype> detector_weights(const CVec<dtype> &h_i, const CVec<dtype> &h_j, double n0, Detector kind)
    {
        if (h_i.size() != h_j.size() || h_i.size() == 0)
            throw std::invalid_argument("detector_weights: user channels must be nonempty and of equal length.");
        if (kind == Detector::mrc)
            return h_i;

        CMat<double> g(h_i.size(), 2);
        g.col(0) = h_i.template cast<cplx<double>>();
        g.col(1) = h_j.template cast<cplx<double>>();
        Eigen::Matrix2cd gram = g.adjoint() * g;
        if (kind == Detector::zf)
        {
            const double scale = gram(0, 0).real() * gram(1, 1).real();
            const double det = std::abs(gram.determinant());
            if (!(scale > 0.0) || det <= 1e-12 * scale)
                throw std::invalid_argument("detector_weights: G^H G is singular; zero forcing is undefined.");
        }
        else
        {
            if (!(n0 > 0.0))
                throw std::invalid_argument("detector_weights: MMSE requires a positive noise power.");
            gram += n0 * Eigen::Matrix2cd::Identity();
        }
        const Eigen::Vector2cd e1 = gram.inverse().col(0);
        return (g * e1).template cast<cplx<dtype>>();
    }

    template <typename dtype>
    double two_user_sinr(const CVec<dtype> &h_i, const CVec<dtype> &h_j, double n0, Detector kind)
    {
        if (!(n0 > 0.0))
            throw std::invalid_argument("two_user_sinr: noise power must be positive.");
        const CVec<double> w = detector_weights(h_i, h_j, n0, kind).template cast<cplx<double>>();
        const CVec<double> hi = h_i.template cast<cplx<double>>();
        const CVec<double> hj = h_j.template cast<cplx<double>>();
        const double signal = std::norm(hi.dot(w));
        const double interference = std::norm(hj.dot(w));
        const double noise = w.squaredNorm() * n0;
        const double denom = interference + noise;
        if (!(denom > 0.0))
            return 0.0;
        return signal / (double(h_i.size()) * denom);
    }

    template <typename dtype>
    double capacity_two_user(const Eigen::Ref<const CMat<dtype>> &h_i, const Eigen::Ref<const CMat<dtype>> &h_j,
                             double n0, Detector kind)
    {
        if (h_i.rows() != h_j.rows() || h_i.cols() != h_j.cols() || h_i.cols() == 0)
            throw std::invalid_argument("capacity_two_user: user channels must have equal, nonempty shapes.");
        double c = 0.0;
        for (Eigen::Index k = 0; k < h_i.cols(); ++k)
            c += std::log2(1.0 + two_user_sinr<dtype>(h_i.col(k), h_j.col(k), n0, kind));
        return c / double(h_i.cols());
    }

    std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values)
    {
        std::sort(values.begin(), values.end());
        std::vector<std::pair<double, double>> out;
        out.reserve(values.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            out.emplace_back(values[i], double(i + 1) / double(values.size()));
        return out;
    }

    CapacityReport make_capacity_report(std::string detector, std::vector<double> capacities)
    {
        CapacityReport r;
        r.detector = std::move(detector);
        r.capacities = std::move(capacities);
        if (!r.capacities.empty())
        {
            double sum = 0.0;
            for (double c : r.capacities)
                sum += c;
            r.mean = sum / double(r.capacities.size());
            double var = 0.0;
            for (double c : r.capacities)
                var += (c - r.mean) * (c - r.mean);
            r.stddev = std::sqrt(var / double(r.capacities.size()));
        }
        r.cdf = empirical_cdf(r.capacities);
        return r;
    }

#define SOUNDER_INSTANTIATE_METRICS(T)                                                                            \
    template double angular_spread(std::span<const Mpc<T>>, AngleDomain);                                        \
    template double mean_angle(std::span<const Mpc<T>>, AngleDomain);                                            \
    template SpreadStats spread_stats(std::span<const Mpc<T>>);                                                  \
    template std::vector<Mpc<T>> filter_sector(std::span<const Mpc<T>>, double, double);                         \
    template CMat<T> reconstruct_channel(std::span<const Mpc<T>>, const ArraySpec<T> &, const FrequencyGrid &,   \
                                         std::uint64_t);                                                         \
    template double capacity_single<T>(const Eigen::Ref<const CMat<T>> &, double);                               \
    template CVec<T> detector_weights(const CVec<T> &, const CVec<T> &, double, Detector);                       \
    template double two_user_sinr(const CVec<T> &, const CVec<T> &, double, Detector);                           \
    template double capacity_two_user<T>(const Eigen::Ref<const CMat<T>> &, const Eigen::Ref<const CMat<T>> &,   \
                                         double, Detector);

    SOUNDER_INSTANTIATE_METRICS(float)
    SOUNDER_INSTANTIATE_METRICS(double)
}
