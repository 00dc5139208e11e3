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

#include "sounder/drift.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sounder
{
    std::string to_string(DriftMethod method)
    {
        switch (method)
        {
        case DriftMethod::primary:
            return "primary";
        case DriftMethod::a1:
            return "a1";
        case DriftMethod::a2:
            return "a2";
        case DriftMethod::a3:
            return "a3";
        case DriftMethod::a4:
            return "a4";
        }
        return "unknown";
    }

    DriftMethod drift_method_from_string(const std::string &name)
    {
        for (auto m : {DriftMethod::primary, DriftMethod::a1, DriftMethod::a2, DriftMethod::a3, DriftMethod::a4})
            if (to_string(m) == name)
                return m;
        throw std::invalid_argument("Unknown drift method '" + name + "' (expected primary, a1, a2, a3 or a4).");
    }

    bool RotorPhaseEstimate::any_low_confidence() const
    {
        for (auto f : low_confidence)
            if (f)
                return true;
        return false;
    }

    void RotorPhaseEstimate::require_confident() const
    {
        for (std::size_t r = 0; r < low_confidence.size(); ++r)
            if (low_confidence[r])
                throw std::runtime_error("Drift estimate for rotor " + std::to_string(r) +
                                         " has low confidence (weak reference path).");
    }

    std::vector<double> unwrap_phases(const std::vector<double> &phases)
    {
        std::vector<double> out(phases.size());
        for (std::size_t i = 0; i < phases.size(); ++i)
        {
            if (i == 0)
            {
                out[i] = phases[i];
                continue;
            }
            const double d = std::remainder(phases[i] - out[i - 1], two_pi);
            out[i] = out[i - 1] + d;
        }
        return out;
    }

    namespace
    {
        // Coherent snapshot mean of the reference channel of rotor r as an N_R x N_f matrix
        template <typename dtype>
        CMat<dtype> reference_block(const TransferTensor<dtype> &ref, std::size_t r)
        {
            const auto &d = ref.dims();
            CMat<dtype> m(Eigen::Index(d.rx), Eigen::Index(d.freq));
            for (std::size_t n = 0; n < d.rx; ++n)
                for (std::size_t k = 0; k < d.freq; ++k)
                {
                    cplx<double> acc(0.0, 0.0);
                    for (std::size_t s = 0; s < d.snapshots; ++s)
                        acc += cplx<double>(ref(r, 0, n, k, s));
                    m(Eigen::Index(n), Eigen::Index(k)) = cplx<dtype>(acc / double(d.snapshots));
                }
            return m;
        }

        template <typename dtype>
        void check_reference(const TransferTensor<dtype> &ref)
        {
            if (ref.values().empty())
                throw std::invalid_argument("drift: the reference tensor is empty.");
            if (ref.dims().tx != 1)
                throw std::invalid_argument("drift: the reference tensor must have exactly one TX element.");
        }

        double wrap_pi(double phase)
        {
            double w = std::remainder(phase, two_pi);
            if (w <= -std::numbers::pi)
                w += two_pi;
            return w;
        }
    }

    template <typename dtype>
    ReferenceEstimator<dtype>::ReferenceEstimator(const ArraySpec<dtype> &rx, const FrequencyGrid &grid,
                                                  const DriftSearchConfig &cfg)
        : grid_(grid), cfg_(cfg), bank_(rx, cfg.angles)
    {
        cfg_.delays.validate();
        delays_s_ = cfg_.delays.delays_s();
        kernel_ = delay_kernel<dtype>(grid_, delays_s_);
    }

    template <typename dtype>
    RotorPhaseEstimate ReferenceEstimator<dtype>::estimate(const TransferTensor<dtype> &ref) const
    {
        check_reference(ref);
        const auto &d = ref.dims();
        if (d.rx != bank_.elements() || d.freq != grid_.size())
            throw std::invalid_argument("estimate_reference: tensor shape does not match the RX array or grid.");

        const double f0 = cfg_.phase_reference == PhaseReference::band_center ? grid_.center() : 0.0;
        RotorPhaseEstimate out;
        out.method = DriftMethod::primary;
        for (std::size_t r = 0; r < d.rotors; ++r)
        {
            const CMat<dtype> m = reference_block(ref, r);
            const CMat<dtype> y = m * kernel_;
            const ObjectiveGrid g = scan<dtype>(y, 1, bank_);
            const GridPeak p = g.peak();
            const double med = g.median();

            const CVec<dtype> b = bank_.column(p.dir_idx);
            const CVec<dtype> s = m.adjoint() * b; // conj(b^H M(:, k))
            const double tau = delays_s_[p.delay_idx];
            cplx<double> acc(0.0, 0.0);
            for (std::size_t k = 0; k < d.freq; ++k)
                acc += std::conj(cplx<double>(s(Eigen::Index(k)))) * phasor<double>(two_pi * (grid_[k] - f0) * tau);
            const double nb = double(b.squaredNorm());
            const cplx<double> alpha = nb > 0.0 ? acc / (double(d.freq) * nb) : cplx<double>(0.0, 0.0);

            const double ratio = med > 0.0 ? p.value / med : (p.value > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
            out.phases.push_back(wrap_pi(std::arg(alpha)));
            out.delay_m.push_back(tau * speed_of_light);
            out.aoa.push_back(double(bank_.direction(p.dir_idx).azimuth));
            out.eoa.push_back(double(bank_.direction(p.dir_idx).elevation));
            out.gain_abs.push_back(std::abs(alpha));
            out.peak_ratio.push_back(ratio);
            out.low_confidence.push_back(!(p.value > 0.0) || ratio < cfg_.min_peak_ratio ? 1 : 0);
        }
        out.unwrapped = unwrap_phases(out.phases);
        return out;
    }

    template <typename dtype>
    RotorPhaseEstimate estimate_reference(const TransferTensor<dtype> &ref, const ArraySpec<dtype> &rx,
                                          const DriftSearchConfig &cfg)
    {
        check_reference(ref);
        return ReferenceEstimator<dtype>(rx, ref.grid(), cfg).estimate(ref);
    }

    template <typename dtype>
    RotorPhaseEstimate estimate_appendix(DriftMethod method, const TransferTensor<dtype> &ref)
    {
        if (method == DriftMethod::primary)
            throw std::invalid_argument("estimate_appendix: the primary method needs the RX array; "
                                        "use estimate_reference.");
        check_reference(ref);
        const auto &d = ref.dims();
        const Eigen::Index n_r = Eigen::Index(d.rx), n_f = Eigen::Index(d.freq);

        // inverse DFT of length N_f: h(m) = (1/N_f) sum_k H(k) e^{+j 2 pi k m / N_f}
        CMat<double> idft;
        if (method == DriftMethod::a3 || method == DriftMethod::a4)
        {
            idft.resize(n_f, n_f);
            for (Eigen::Index k = 0; k < n_f; ++k)
                for (Eigen::Index m = 0; m < n_f; ++m)
                    idft(k, m) = phasor<double>(two_pi * double((k * m) % n_f) / double(n_f)) / double(n_f);
        }

        RotorPhaseEstimate out;
        out.method = method;
        for (std::size_t r = 0; r < d.rotors; ++r)
        {
            const CMat<double> h = reference_block(ref, r).template cast<cplx<double>>();
            Eigen::Index strongest = 0;
            h.rowwise().squaredNorm().maxCoeff(&strongest);

            cplx<double> z(0.0, 0.0);
            switch (method)
            {
            case DriftMethod::a1:
                z = h.sum();
                break;
            case DriftMethod::a2:
                z = h.row(strongest).sum();
                break;
            case DriftMethod::a3:
            case DriftMethod::a4:
            {
                const CMat<double> imp = h * idft; // N_R x N_f impulse responses
                for (Eigen::Index n = 0; n < n_r; ++n)
                {
                    if (method == DriftMethod::a4 && n != strongest)
                        continue;
                    Eigen::Index peak = 0;
                    imp.row(n).cwiseAbs().maxCoeff(&peak);
                    z += imp(n, peak);
                }
                break;
            }
            default:
                break;
            }
            out.phases.push_back(wrap_pi(std::arg(z)));
            out.gain_abs.push_back(std::abs(z));
            out.low_confidence.push_back(std::abs(z) > 0.0 ? 0 : 1);
        }
        out.unwrapped = unwrap_phases(out.phases);
        return out;
    }

    template <typename dtype>
    void apply_correction(TransferTensor<dtype> &tensor, const std::vector<double> &phases)
    {
        const auto &d = tensor.dims();
        if (phases.size() != d.rotors)
            throw std::invalid_argument("apply_correction: need exactly one phase per rotor position.");
        const std::size_t per_rotor = d.tx * d.rx * d.freq * d.snapshots;
        auto &v = tensor.values();
        for (std::size_t r = 0; r < d.rotors; ++r)
        {
            const cplx<dtype> rot = phasor<dtype>(-phases[r]);
            for (std::size_t i = r * per_rotor; i < (r + 1) * per_rotor; ++i)
                v[i] *= rot;
        }
    }

#define SOUNDER_INSTANTIATE_DRIFT(T)                                                                              \
    template class ReferenceEstimator<T>;                                                                        \
    template RotorPhaseEstimate estimate_reference(const TransferTensor<T> &, const ArraySpec<T> &,              \
                                                   const DriftSearchConfig &);                                   \
    template RotorPhaseEstimate estimate_appendix(DriftMethod, const TransferTensor<T> &);                       \
    template void apply_correction(TransferTensor<T> &, const std::vector<double> &);

    SOUNDER_INSTANTIATE_DRIFT(float)
    SOUNDER_INSTANTIATE_DRIFT(double)
}
