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
#include <string>
#include <vector>

#include "sounder/channel.hpp"
#include "sounder/search.hpp"

namespace sounder
{
    enum class DriftMethod
    {
        primary, // single-path ML search on the reference channel, then the gain phase
        a1,      // angle of the sum over RX antennas and frequencies
        a2,      // angle of the frequency sum at the strongest RX antenna
        a3,      // angle of the sum of impulse-response peaks over RX antennas
        a4       // angle of the impulse-response peak at the strongest RX antenna
    };

    std::string to_string(DriftMethod method);
    DriftMethod drift_method_from_string(const std::string &name);

    // Frequency origin of the gain phase in the primary method
    enum class PhaseReference
    {
        band_center, // exp(+j 2 pi (f_k - f_c) tau)
        absolute     // exp(+j 2 pi f_k tau)
    };

    struct DriftSearchConfig
    {
        AngleGrid angles{1.0, -180.0, 180.0, -90.0, 90.0};
        DelayGrid delays{3.0, 0.0, 600.0};
        PhaseReference phase_reference = PhaseReference::band_center;
        double min_peak_ratio = 2.0; // peak / median objective below this flags a rotor as low confidence
    };

    /*!
    Per-rotor drift phase estimates with diagnostics of the reference path.
    */
    struct RotorPhaseEstimate
    {
        DriftMethod method = DriftMethod::primary;
        std::vector<double> phases;        // radians, wrapped to (-pi, pi]
        std::vector<double> unwrapped;     // nearest-branch continuation of phases
        std::vector<double> delay_m;       // primary method only
        std::vector<double> aoa, eoa;      // degrees, primary method only
        std::vector<double> gain_abs;      // |alpha| (primary) or |combined sample| (A1 .. A4)
        std::vector<double> peak_ratio;    // peak / median objective, primary method only
        std::vector<std::uint8_t> low_confidence;

        bool any_low_confidence() const;
        // Throws std::runtime_error naming the first low-confidence rotor
        void require_confident() const;
    };

    // Nearest-branch unwrapping
    std::vector<double> unwrap_phases(const std::vector<double> &phases);

    /*!
    Primary estimator. ref: reference tensor with a single TX and one snapshot (averaged), (rotor, 1, rx, freq, 1).
    For each rotor, (tau, AoA, EoA) = argmax |b_R^H M e_tau| / ||b_R|| with M(n, k) = H_ref(f_k)(n), then
    alpha = sum_k e^{+j 2 pi (f_k - f_0) tau} b_R^H M(:, k) / (N_f ||b_R||^2) and phase = arg(alpha).
    */
    template <typename dtype>
    RotorPhaseEstimate estimate_reference(const TransferTensor<dtype> &ref, const ArraySpec<dtype> &rx,
                                          const DriftSearchConfig &cfg = {});

    // Reusable primary estimator for repeated calls on the same geometry
    template <typename dtype>
    class ReferenceEstimator
    {
    public:
        ReferenceEstimator(const ArraySpec<dtype> &rx, const FrequencyGrid &grid, const DriftSearchConfig &cfg);
        RotorPhaseEstimate estimate(const TransferTensor<dtype> &ref) const;

    private:
        FrequencyGrid grid_;
        DriftSearchConfig cfg_;
        SteeringBank<dtype> bank_;
        std::vector<double> delays_s_;
        CMat<dtype> kernel_;
    };

    // Alternative estimators A1 .. A4 (primary is forwarded to estimate_reference with default search settings)
    template <typename dtype>
    RotorPhaseEstimate estimate_appendix(DriftMethod method, const TransferTensor<dtype> &ref);

    // Multiplies every sample of rotor block r by exp(-j phases[r])
    template <typename dtype>
    void apply_correction(TransferTensor<dtype> &tensor, const std::vector<double> &phases);
}
