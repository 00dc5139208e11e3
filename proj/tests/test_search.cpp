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

#include <catch2/catch_amalgamated.hpp>

#include "sounder/search.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace sounder;

namespace
{
    const double lambda = speed_of_light / 2.53e9;

    ArraySpec<double> tx_cylinder()
    {
        return build_virtual_cylinder<double>(4, 12, lambda / 2, 12 * (lambda / 2) / (2 * std::numbers::pi), lambda,
                                              PatternModel<double>::cosine_lobe(40, 100, 20));
    }

    ArraySpec<double> rx_cylinder()
    {
        return build_virtual_cylinder<double>(2, 8, lambda / 2, 8 * (lambda / 2) / (2 * std::numbers::pi), lambda,
                                              PatternModel<double>::cosine_lobe(90, 90, 20));
    }

    FrequencyGrid band() { return FrequencyGrid::from_band(2.48e9, 2.58e9, 65); }

    Mpc<double> path(double gain_db, double phase, double delay_m, double aod, double eod, double aoa, double eoa)
    {
        Mpc<double> m;
        m.gain = std::polar(std::pow(10.0, gain_db / 20.0), phase);
        m.delay = delay_m / speed_of_light;
        m.departure = Direction<double>(aod, eod);
        m.arrival = Direction<double>(aoa, eoa);
        return m;
    }
}

TEST_CASE("AngleGrid - points and index order")
{
    AngleGrid g;
    CHECK(g.azimuths().size() == 360);
    CHECK(g.azimuths().front() == -180.0);
    CHECK(g.azimuths().back() == 179.0);
    CHECK(g.elevations().size() == 181);

    const AngleGrid h{45.0, -90.0, 90.0, -20.0, 20.0};
    CHECK(h.azimuths() == std::vector<double>{-90.0, -45.0, 0.0, 45.0, 90.0});
    CHECK(h.elevations() == std::vector<double>{0.0});

    const AngleGrid k{10.0, 0.0, 20.0, -10.0, 10.0};
    const auto dirs = k.directions<double>();
    REQUIRE(dirs.size() == 9);
    CHECK(dirs[4].azimuth == 10.0);
    CHECK(dirs[4].elevation == 0.0);
    CHECK(dirs[5].elevation == 10.0);
    CHECK(dirs[6].azimuth == 20.0);
}

TEST_CASE("AngleGrid - validation")
{
    CHECK_THROWS_AS((AngleGrid{0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((AngleGrid{1.0, 10.0, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((AngleGrid{1.0, -180.0, 180.0, -95.0, 0.0}.validate()), std::invalid_argument);
    // no grid point inside the range
    CHECK_THROWS_AS((AngleGrid{10.0, 1.0, 2.0, 0.0, 0.0}.validate()), std::invalid_argument);
}

TEST_CASE("DelayGrid - points")
{
    const DelayGrid d{3.0, 0.0, 600.0};
    const auto m = d.delays_m();
    CHECK(m.size() == 201);
    CHECK(m[100] == Catch::Approx(300.0));
    CHECK(d.delays_s()[100] == Catch::Approx(300.0 / speed_of_light));
    CHECK(DelayGrid{3.0, 10.0, 20.0}.delays_m() == std::vector<double>{12.0, 15.0, 18.0});
    CHECK_THROWS_AS((DelayGrid{3.0, -1.0, 20.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((DelayGrid{0.0, 0.0, 20.0}.validate()), std::invalid_argument);
}

TEST_CASE("delay_kernel - entries")
{
    const FrequencyGrid g(1e9, 1e6, 4);
    const std::vector<double> tau = {0.0, 1e-7, 2.5e-7};
    const CMat<double> e = delay_kernel<double>(g, tau, 1.001e9);
    CHECK(e.rows() == 4);
    CHECK(e.cols() == 3);
    const cplx<double> want = std::exp(cplx<double>(0.0, 2.0 * std::numbers::pi * (1.003e9 - 1.001e9) * 2.5e-7));
    CHECK(std::abs(e(3, 2) - want) < 1e-12);
    CHECK(e(2, 0) == cplx<double>(1.0, 0.0));
}

TEST_CASE("SteeringBank - columns match the steering vectors, cached or not")
{
    const auto tx = tx_cylinder();
    const AngleGrid g{5.0, -180.0, 180.0, -20.0, 20.0};
    const SteeringBank<double> cached(tx, g);
    const SteeringBank<double> streamed(tx, g, 0);
    CHECK(cached.cached());
    CHECK_FALSE(streamed.cached());
    REQUIRE(cached.size() == 72 * 9);

    for (std::size_t d : {std::size_t(0), std::size_t(100), cached.size() - 1})
    {
        const CVec<double> v = steering_vector(tx, cached.direction(d));
        CHECK((cached.column(d) - v).norm() < 1e-12);
        CHECK((streamed.column(d) - v).norm() < 1e-12);
        CHECK(cached.norm(d) == Catch::Approx(v.norm()));
    }

    std::size_t seen = 0;
    streamed.for_each_chunk(100, [&](std::size_t first, const Eigen::Ref<const CMat<double>> &a) {
        CHECK(first == seen);
        CHECK(a.cols() <= 100);
        CHECK((a.col(a.cols() - 1) - cached.column(first + std::size_t(a.cols()) - 1)).norm() < 1e-12);
        seen += std::size_t(a.cols());
    });
    CHECK(seen == cached.size());
}

TEST_CASE("scan - matches a brute-force evaluation")
{
    const auto rx = rx_cylinder();
    const FrequencyGrid f = band();
    const AngleGrid g{10.0, -180.0, 180.0, -20.0, 20.0};
    const SteeringBank<double> bank(rx, g);
    const DelayGrid dg{6.0, 150.0, 210.0};
    const auto tau = dg.delays_s();
    const CMat<double> e = delay_kernel<double>(f, tau);

    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    std::vector<CMat<double>> m(2, CMat<double>(Eigen::Index(rx.size()), Eigen::Index(f.size())));
    for (auto &mg : m)
        for (Eigen::Index i = 0; i < mg.size(); ++i)
            mg.data()[i] = {nd(rng), nd(rng)};
    CMat<double> y(Eigen::Index(rx.size()), Eigen::Index(2 * tau.size()));
    y.leftCols(Eigen::Index(tau.size())) = m[0] * e;
    y.rightCols(Eigen::Index(tau.size())) = m[1] * e;

    const ObjectiveGrid obj = scan<double>(y, 2, bank);
    REQUIRE(obj.values.rows() == Eigen::Index(tau.size()));
    REQUIRE(obj.values.cols() == Eigen::Index(bank.size()));

    double worst = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i)
        for (std::size_t d = 0; d < bank.size(); d += 7)
        {
            const CVec<double> a = steering_vector(rx, bank.direction(d));
            double best = 0.0;
            for (const auto &mg : m)
            {
                cplx<double> acc = 0.0;
                for (std::size_t k = 0; k < f.size(); ++k)
                {
                    const cplx<double> ek = std::exp(cplx<double>(0.0, 2.0 * std::numbers::pi * f[k] * tau[i]));
                    for (std::size_t n = 0; n < rx.size(); ++n)
                        acc += std::conj(a(Eigen::Index(n))) * mg(Eigen::Index(n), Eigen::Index(k)) * ek;
                }
                best = std::max(best, std::abs(acc) / a.norm());
            }
            worst = std::max(worst, std::abs(obj.values(Eigen::Index(i), Eigen::Index(d)) - best) / best);
        }
    CHECK(worst < 1e-9);
}

TEST_CASE("ObjectiveGrid - peak ties go to the lowest index")
{
    ObjectiveGrid g;
    g.values = RMat<double>::Constant(3, 4, 2.0);
    auto p = g.peak();
    CHECK(p.delay_idx == 0);
    CHECK(p.dir_idx == 0);
    g.values(1, 2) = 5.0;
    g.values(2, 1) = 5.0;
    p = g.peak();
    CHECK(p.delay_idx == 1);
    CHECK(p.dir_idx == 2);
    CHECK(p.value == 5.0);
    CHECK(g.median() == 2.0);
}
