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

#include "sounder/channel.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace sounder;

namespace
{
    const double lambda = speed_of_light / 2.53e9;

    ArraySpec<double> iso_single()
    {
        return build_single<double>(Vec3<double>::Zero(), lambda);
    }

    Mpc<double> path(std::complex<double> g, double delay_m, double aod, double eod, double aoa, double eoa)
    {
        Mpc<double> m;
        m.gain = g;
        m.delay = delay_m / speed_of_light;
        m.departure = Direction<double>(aod, eod);
        m.arrival = Direction<double>(aoa, eoa);
        return m;
    }
}

TEST_CASE("FrequencyGrid - band of 257 points")
{
    const auto g = FrequencyGrid::from_band(2.52e9, 2.54e9, 257);
    CHECK(g.size() == 257);
    CHECK(g.step() == Catch::Approx(78125.0));
    CHECK(g[0] == 2.52e9);
    CHECK(g[256] == Catch::Approx(2.54e9).epsilon(1e-15));
    CHECK(g.center() == Catch::Approx(2.53e9));
}

TEST_CASE("FrequencyGrid - uniformity checks")
{
    CHECK_NOTHROW(FrequencyGrid::from_points({1.0, 2.0, 3.0}));
    CHECK_THROWS_AS(FrequencyGrid::from_points({1.0, 2.0, 3.1}), std::invalid_argument);
    CHECK_THROWS_AS(FrequencyGrid::from_points({1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(FrequencyGrid::from_points({}), std::invalid_argument);
    CHECK_THROWS_AS(FrequencyGrid(1.0, 0.0, 4), std::invalid_argument);
}

TEST_CASE("synthesize - empty path list gives zeros")
{
    const auto tx = build_rectangular<double>(2, 2, lambda / 2, lambda);
    const auto grid = FrequencyGrid::from_band(2.52e9, 2.54e9, 9);
    const auto h = synthesize<double>({}, tx, tx, grid);
    CHECK(h.n_tx == 4);
    CHECK(h.n_rx == 4);
    CHECK(h.n_freq == 9);
    CHECK(h.data.norm() == 0.0);
}

TEST_CASE("synthesize - unit path at zero delay is flat")
{
    const auto a = iso_single();
    const auto grid = FrequencyGrid::from_band(2.52e9, 2.54e9, 17);
    const std::vector<Mpc<double>> mpcs{path(1.0, 0.0, 10.0, 5.0, -30.0, 2.0)};
    const auto h = synthesize<double>(mpcs, a, a, grid);
    for (std::size_t k = 0; k < grid.size(); ++k)
        CHECK(std::abs(h(0, 0, k) - std::complex<double>(1.0, 0.0)) < 1e-15);
}

TEST_CASE("synthesize - delay gives a linear phase ramp")
{
    const auto a = iso_single();
    const auto grid = FrequencyGrid::from_band(2.52e9, 2.54e9, 257);
    const double tau = 123.0 / speed_of_light;
    const std::vector<Mpc<double>> mpcs{path(1.0, 123.0, 0, 0, 0, 0)};
    const auto h = synthesize<double>(mpcs, a, a, grid);
    const double slope = -2.0 * std::numbers::pi * tau * grid.step();
    for (std::size_t k = 0; k + 1 < grid.size(); ++k)
    {
        const double d = std::arg(h(0, 0, k + 1) / h(0, 0, k));
        CHECK(std::abs(std::remainder(d - slope, 2.0 * std::numbers::pi)) < 1e-9);
    }
    // absolute phase at the first bin
    const double p0 = -2.0 * std::numbers::pi * grid[0] * tau;
    CHECK(std::abs(std::remainder(std::arg(h(0, 0, 0)) - p0, 2.0 * std::numbers::pi)) < 1e-6);
}

TEST_CASE("synthesize - no silent conjugation")
{
    const auto a = iso_single();
    const FrequencyGrid grid(0.0, 1.0, 1);
    const std::vector<Mpc<double>> mpcs{path({0.0, 1.0}, 0.0, 0, 0, 0, 0)};
    const auto h = synthesize<double>(mpcs, a, a, grid);
    CHECK(h(0, 0, 0).imag() == Catch::Approx(1.0));
}

TEST_CASE("synthesize - rank one in space with the steering vectors")
{
    const auto tx = build_virtual_cylinder<double>(2, 6, lambda / 2, 0.1, lambda, PatternModel<double>::cosine_lobe(60, 90, 20));
    const auto rx = build_rectangular<double>(3, 2, lambda / 2, lambda, PatternModel<double>::cosine_lobe(90, 90, 10));
    const auto grid = FrequencyGrid::from_band(2.52e9, 2.54e9, 5);
    const auto m = path({0.3, -0.4}, 45.0, 30.0, -5.0, 10.0, 8.0);
    const auto h = synthesize<double>(std::vector<Mpc<double>>{m}, tx, rx, grid);
    const auto bt = steering_vector(tx, m.departure);
    const auto br = steering_vector(rx, m.arrival);
    for (std::size_t k = 0; k < grid.size(); ++k)
    {
        const CMat<double> expected = m.gain * bt * br.transpose() *
                                      std::polar(1.0, -2.0 * std::numbers::pi * grid[k] * m.delay);
        CHECK((h.slice(k) - expected).norm() < 1e-12 * expected.norm());
    }
}

TEST_CASE("synthesize - superposition and scaling")
{
    const auto tx = build_rectangular<double>(3, 2, lambda / 2, lambda, PatternModel<double>::cosine_lobe(60, 90, 20));
    const auto rx = build_virtual_cylinder<double>(2, 4, lambda / 2, 0.08, lambda, PatternModel<double>::cosine_lobe(90, 90, 20));
    const auto grid = FrequencyGrid::from_band(2.52e9, 2.54e9, 33);
    const auto a = sample_scenario<double>(1, 3);
    const auto b = sample_scenario<double>(2, 2);
    std::vector<Mpc<double>> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    const auto ha = synthesize<double>(a, tx, rx, grid);
    const auto hb = synthesize<double>(b, tx, rx, grid);
    const auto hab = synthesize<double>(ab, tx, rx, grid);
    CHECK((hab.data - ha.data - hb.data).norm() < 1e-12 * hab.data.norm());

    std::vector<Mpc<double>> scaled = a;
    const std::complex<double> c(-1.5, 0.25);
    for (auto &m : scaled)
        m.gain *= c;
    const auto hs = synthesize<double>(scaled, tx, rx, grid);
    CHECK((hs.data - c * ha.data).norm() < 1e-12 * hs.data.norm());
}

TEST_CASE("synthesize - rejects negative delays")
{
    const auto a = iso_single();
    auto m = path(1.0, 0.0, 0, 0, 0, 0);
    m.delay = -1e-9;
    CHECK_THROWS_AS(synthesize<double>(std::vector<Mpc<double>>{m}, a, a, FrequencyGrid(1e9, 1e6, 4)),
                    std::invalid_argument);
}

TEST_CASE("synthesize - impulse response energy")
{
    const auto tx = build_virtual_cylinder<double>(2, 5, lambda / 2, 0.09, lambda, PatternModel<double>::cosine_lobe(40, 90, 20));
    const auto rx = build_rectangular<double>(2, 2, lambda / 2, lambda, PatternModel<double>::cosine_lobe(90, 90, 10));
    const auto grid = FrequencyGrid::from_band(2.52e9, 2.54e9, 64);
    const auto m = path({0.7, 0.2}, 87.0, 12.0, 3.0, -40.0, -6.0);
    const auto h = synthesize<double>(std::vector<Mpc<double>>{m}, tx, rx, grid);

    // naive inverse DFT per TX-RX pair
    const std::size_t n = grid.size();
    double energy = 0.0;
    for (std::size_t t = 0; t < h.n_tx; ++t)
        for (std::size_t r = 0; r < h.n_rx; ++r)
            for (std::size_t q = 0; q < n; ++q)
            {
                std::complex<double> acc = 0.0;
                for (std::size_t k = 0; k < n; ++k)
                    acc += h(t, r, k) * std::polar(1.0, 2.0 * std::numbers::pi * double(k * q) / double(n));
                energy += std::norm(acc / double(n));
            }
    const double expected = std::norm(m.gain) * steering_vector(tx, m.departure).squaredNorm() *
                            steering_vector(rx, m.arrival).squaredNorm();
    CHECK(energy == Catch::Approx(expected).epsilon(1e-9));
}

TEST_CASE("sample_scenario - ranges and determinism")
{
    const ScenarioRanges ranges;
    const auto a = sample_scenario<double>(42, 200, ranges);
    const auto b = sample_scenario<double>(42, 200, ranges);
    REQUIRE(a.size() == 200);
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        const auto &m = a[i];
        CHECK(m.gain == b[i].gain);
        CHECK(m.delay == b[i].delay);
        CHECK(m.departure.azimuth >= -180.0);
        CHECK(m.departure.azimuth < 180.0);
        CHECK(std::abs(m.departure.elevation) <= 20.0);
        CHECK(std::abs(m.arrival.elevation) <= 20.0);
        CHECK(m.delay >= 150.0 / speed_of_light);
        CHECK(m.delay <= 300.0 / speed_of_light);
        CHECK(std::abs(m.gain) == Catch::Approx(1.0));
    }
    CHECK(sample_scenario<double>(43, 1)[0].delay != a[0].delay);
    CHECK_THROWS_AS(sample_scenario<double>(1, 0), std::invalid_argument);

    ScenarioRanges bad;
    bad.delay_m = {300.0, 150.0};
    CHECK_THROWS_AS(sample_scenario<double>(1, 1, bad), std::invalid_argument);
}

TEST_CASE("sample_scenario - uniform azimuth statistics")
{
    const std::size_t n = 10000;
    const auto mpcs = sample_scenario<double>(7, n);
    double sum = 0.0;
    for (const auto &m : mpcs)
        sum += m.departure.azimuth;
    const double mean = sum / double(n);
    const double sigma = 360.0 / std::sqrt(12.0) / std::sqrt(double(n));
    CHECK(std::abs(mean) < 3.0 * sigma);
}

TEST_CASE("snap_to_grid - rounds to multiples of the steps")
{
    const auto m = snap_to_grid(path(1.0, 151.6, 10.4, -3.6, 179.7, 89.8), 1.0, 3.0);
    CHECK(m.delay_m() == Catch::Approx(153.0));
    CHECK(m.departure.azimuth == 10.0);
    CHECK(m.departure.elevation == -4.0);
    CHECK(m.arrival.azimuth == -180.0);
    CHECK(m.arrival.elevation == 90.0);
}

TEST_CASE("add_noise - zero power is the identity")
{
    std::vector<std::complex<double>> v{{1.0, 2.0}, {-3.0, 0.5}};
    const auto copy = v;
    add_noise<double>(v, 0.0, 9);
    CHECK(v == copy);
    CHECK_THROWS_AS(add_noise<double>(v, -1.0, 9), std::invalid_argument);
}

TEST_CASE("add_noise - sample variance")
{
    std::vector<std::complex<double>> v(100000, {0.0, 0.0});
    add_noise<double>(v, 1.0, 17);
    double power = 0.0, re = 0.0;
    std::complex<double> mean = 0.0;
    for (const auto &x : v)
    {
        power += std::norm(x);
        re += x.real() * x.real();
        mean += x;
    }
    power /= double(v.size());
    CHECK(power == Catch::Approx(1.0).epsilon(0.02));
    // circular: half the power in each quadrature
    CHECK(re / double(v.size()) == Catch::Approx(0.5).epsilon(0.03));
    CHECK(std::abs(mean / double(v.size())) < 0.02);
}

TEST_CASE("add_noise - per-bin SNR")
{
    for (double snr_db : {0.0, 10.0, 20.0})
    {
        const double n0 = std::pow(10.0, -snr_db / 10.0);
        const std::complex<double> s(0.6, 0.8);
        std::vector<std::complex<double>> v(100000, s);
        add_noise<double>(v, n0, 23);
        double noise = 0.0;
        for (const auto &x : v)
            noise += std::norm(x - s);
        noise /= double(v.size());
        const double measured_db = 10.0 * std::log10(std::norm(s) / noise);
        CHECK(std::abs(measured_db - snr_db) < 0.2);
    }
}

TEST_CASE("TransferTensor - layout and accessors")
{
    const TensorDims dims{2, 3, 4, 5, 6};
    TransferTensor<double> t(dims, FrequencyGrid(1e9, 1e6, 5));
    CHECK(t.values().size() == dims.count());
    CHECK(t.timestamps().size() == dims.pair_count());
    CHECK(t.index(0, 0, 0, 0, 1) == 1);
    CHECK(t.index(0, 0, 0, 1, 0) == 6);
    CHECK(t.index(1, 0, 0, 0, 0) == 3 * 4 * 5 * 6);

    t(1, 2, 3, 4, 5) = {7.0, -1.0};
    auto p = t.pair(1, 2, 3);
    CHECK(p.rows() == 6);
    CHECK(p.cols() == 5);
    CHECK(p(5, 4) == std::complex<double>(7.0, -1.0));

    CHECK_THROWS_AS(TransferTensor<double>(TensorDims{0, 1, 1, 1, 1}, FrequencyGrid(1e9, 1e6, 1)), std::invalid_argument);
    CHECK_THROWS_AS(TransferTensor<double>(TensorDims{1, 1, 1, 2, 1}, FrequencyGrid(1e9, 1e6, 3)), std::invalid_argument);
}

TEST_CASE("flatten_virtual - rotor blocks stack into the virtual array")
{
    const std::size_t rings = 2, per_ring = 6;
    const auto tx = build_virtual_cylinder<double>(rings, per_ring, lambda / 2, 0.12, lambda,
                                                   PatternModel<double>::cosine_lobe(40, 90, 20));
    const auto rx = build_rectangular<double>(2, 1, lambda / 2, lambda);
    const auto grid = FrequencyGrid::from_band(2.52e9, 2.54e9, 7);
    const auto mpcs = sample_scenario<double>(3, 2);

    TransferTensor<double> t(TensorDims{per_ring, rings, rx.size(), grid.size(), 1}, grid, false);
    for (std::size_t r = 0; r < per_ring; ++r)
        t.set_cube(r, 0, synthesize<double>(mpcs, tx.subarray(r * rings, rings), rx, grid));

    const auto flat = flatten_virtual(t, 0);
    const auto full = synthesize<double>(mpcs, tx, rx, grid);
    CHECK(flat.n_tx == tx.size());
    CHECK((flat.data - full.data).norm() < 1e-12 * full.data.norm());

    const auto back = t.cube(3, 0);
    CHECK((back.data - synthesize<double>(mpcs, tx.subarray(3 * rings, rings), rx, grid).data).norm() < 1e-12);
}
