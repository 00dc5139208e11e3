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

#include "sounder/drift.hpp"

#include <cmath>
#include <numbers>

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

    const std::vector<double> offsets = {0.0, 1.2, -2.9, 3.1, 0.4};

    // Reference tensor of a stationary single path with per-rotor phase offsets
    TransferTensor<double> reference_tensor(const Mpc<double> &p, const ArraySpec<double> &rx, const FrequencyGrid &f)
    {
        const auto ref = build_single<double>(Vec3<double>(0.0, 0.0, 0.6), lambda);
        const auto h = synthesize<double>(std::vector<Mpc<double>>{p}, ref, rx, f);
        TransferTensor<double> t({offsets.size(), 1, rx.size(), f.size(), 1}, f, false);
        for (std::size_t r = 0; r < offsets.size(); ++r)
        {
            ChannelCube<double> c = h;
            c.data *= std::polar(1.0, offsets[r]);
            t.set_cube(r, 0, c);
        }
        return t;
    }

    DriftSearchConfig search_config()
    {
        DriftSearchConfig c;
        c.angles = AngleGrid{2.0, -180.0, 180.0, -20.0, 20.0};
        c.delays = DelayGrid{3.0, 0.0, 300.0};
        return c;
    }

    double circ_diff(double a, double b) { return std::abs(std::remainder(a - b, 2.0 * std::numbers::pi)); }
}

TEST_CASE("drift_method_from_string - names round trip")
{
    for (auto m : {DriftMethod::primary, DriftMethod::a1, DriftMethod::a2, DriftMethod::a3, DriftMethod::a4})
        CHECK(drift_method_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(drift_method_from_string("a5"), std::invalid_argument);
}

TEST_CASE("unwrap_phases - nearest branch continuation")
{
    const auto u = unwrap_phases({3.0, -3.0, 3.0, 0.0});
    CHECK(u[0] == 3.0);
    CHECK(u[1] == Catch::Approx(2.0 * std::numbers::pi - 3.0));
    CHECK(u[2] == Catch::Approx(3.0));
    CHECK(u[3] == Catch::Approx(0.0).margin(1e-15));
    for (std::size_t i = 1; i < u.size(); ++i)
        CHECK(std::abs(u[i] - u[i - 1]) <= std::numbers::pi);
    CHECK(unwrap_phases({}).empty());
}

TEST_CASE("estimate_reference - relative rotor phases and path parameters")
{
    const auto rx = rx_cylinder();
    const auto f = band();
    const auto p = path(-3.0, 0.9, 57.0, 0.0, 30.0, -44.0, 12.0);
    const auto t = reference_tensor(p, rx, f);
    const auto e = estimate_reference(t, rx, search_config());
    REQUIRE(e.phases.size() == offsets.size());
    for (std::size_t r = 0; r < offsets.size(); ++r)
    {
        CHECK(circ_diff(e.phases[r] - e.phases[0], offsets[r] - offsets[0]) < 1e-9);
        CHECK(e.delay_m[r] == Catch::Approx(57.0));
        CHECK(e.aoa[r] == Catch::Approx(-44.0));
        CHECK(e.eoa[r] == Catch::Approx(12.0));
        CHECK(e.phases[r] > -std::numbers::pi);
        CHECK(e.phases[r] <= std::numbers::pi);
    }
    CHECK_FALSE(e.any_low_confidence());
    CHECK_NOTHROW(e.require_confident());

    // band-centre origin: the estimate is alpha b_ref e^{-j 2 pi f_c tau} e^{j offset}
    const auto ref = build_single<double>(Vec3<double>(0.0, 0.0, 0.6), lambda);
    const cplx<double> g = p.gain * steering_vector(ref, p.departure)(0);
    const double want = std::arg(g * std::exp(cplx<double>(0.0, -2.0 * std::numbers::pi * f.center() * p.delay)));
    CHECK(circ_diff(e.phases[0], want) < 1e-9);

    auto abs_cfg = search_config();
    abs_cfg.phase_reference = PhaseReference::absolute;
    const auto a = estimate_reference(t, rx, abs_cfg);
    CHECK(circ_diff(a.phases[0], std::arg(g)) < 1e-9);
}

TEST_CASE("estimate_appendix - exact relative phases on a noiseless reference")
{
    // one ring, so the strongest RX antenna is unique
    const auto rx = build_virtual_cylinder<double>(1, 8, lambda / 2, 8 * (lambda / 2) / (2 * std::numbers::pi), lambda,
                                                   PatternModel<double>::cosine_lobe(90, 90, 20));
    const auto f = band();
    const auto t = reference_tensor(path(0.0, -1.1, 42.0, 0.0, 30.0, 100.0, -4.0), rx, f);
    for (auto m : {DriftMethod::a1, DriftMethod::a2, DriftMethod::a3, DriftMethod::a4})
    {
        const auto e = estimate_appendix(m, t);
        INFO(to_string(m));
        for (std::size_t r = 0; r < offsets.size(); ++r)
            CHECK(circ_diff(e.phases[r] - e.phases[0], offsets[r] - offsets[0]) < 1e-9);
    }
    CHECK_THROWS_AS(estimate_appendix(DriftMethod::primary, t), std::invalid_argument);
}

TEST_CASE("estimate_appendix - hand computed combinations")
{
    const FrequencyGrid f(1e9, 1e6, 8);
    TransferTensor<double> t({1, 1, 2, 8, 1}, f, false);
    // RX 0: impulse at tap 3 with amplitude 2 e^{j0.5}; RX 1: half the amplitude at tap 5, phase -1
    for (std::size_t k = 0; k < 8; ++k)
    {
        t(0, 0, 0, k, 0) = std::polar(2.0, 0.5 - 2.0 * std::numbers::pi * 3.0 * double(k) / 8.0);
        t(0, 0, 1, k, 0) = std::polar(1.0, -1.0 - 2.0 * std::numbers::pi * 5.0 * double(k) / 8.0);
    }
    // frequency sums vanish for nonzero taps, the impulse peaks do not
    const auto a3 = estimate_appendix(DriftMethod::a3, t);
    const auto a4 = estimate_appendix(DriftMethod::a4, t);
    CHECK(std::abs(a3.gain_abs[0] - std::abs(std::polar(2.0, 0.5) + std::polar(1.0, -1.0))) < 1e-12);
    CHECK(std::abs(a4.phases[0] - 0.5) < 1e-12);
    CHECK(std::abs(a4.gain_abs[0] - 2.0) < 1e-12);

    TransferTensor<double> flat({1, 1, 2, 8, 1}, f, false);
    for (std::size_t k = 0; k < 8; ++k)
    {
        flat(0, 0, 0, k, 0) = std::polar(1.0, 0.3);
        flat(0, 0, 1, k, 0) = std::polar(3.0, -0.2);
    }
    const auto a1 = estimate_appendix(DriftMethod::a1, flat);
    const auto a2 = estimate_appendix(DriftMethod::a2, flat);
    CHECK(std::abs(a1.phases[0] - std::arg(std::polar(8.0, 0.3) + std::polar(24.0, -0.2))) < 1e-12);
    CHECK(std::abs(a2.phases[0] + 0.2) < 1e-12);
    CHECK(a2.gain_abs[0] == Catch::Approx(24.0));
}

TEST_CASE("estimate_reference - zero reference is low confidence")
{
    const auto rx = rx_cylinder();
    const auto f = band();
    TransferTensor<double> t({2, 1, rx.size(), f.size(), 1}, f, false);
    const auto e = estimate_reference(t, rx, search_config());
    CHECK(e.any_low_confidence());
    CHECK_THROWS_AS(e.require_confident(), std::runtime_error);

    TransferTensor<double> two({2, 2, rx.size(), f.size(), 1}, f, false);
    CHECK_THROWS_AS(estimate_reference(two, rx, search_config()), std::invalid_argument);
}

TEST_CASE("apply_correction - aligns the rotor blocks")
{
    const auto rx = rx_cylinder();
    const auto f = band();
    auto t = reference_tensor(path(0.0, 0.0, 90.0, 0.0, 30.0, 10.0, 0.0), rx, f);
    const auto e = estimate_reference(t, rx, search_config());
    apply_correction(t, e.phases);
    const auto c0 = t.cube(0);
    for (std::size_t r = 1; r < offsets.size(); ++r)
        CHECK((t.cube(r).data - c0.data).norm() < 1e-9 * c0.data.norm());
    CHECK_THROWS_AS(apply_correction(t, std::vector<double>{0.0}), std::invalid_argument);
}

TEST_CASE("apply_correction - multiplies by the conjugate phase")
{
    TransferTensor<float> t({2, 1, 1, 1, 1}, FrequencyGrid(1e9, 1e6, 1), false);
    t.values() = {cplx<float>(1.0f, 0.0f), cplx<float>(0.0f, 1.0f)};
    apply_correction(t, {0.0, std::numbers::pi / 2});
    CHECK(t.values()[0] == cplx<float>(1.0f, 0.0f));
    CHECK(std::abs(t.values()[1] - cplx<float>(1.0f, 0.0f)) < 1e-6f);
}
