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

#include "sounder/prep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sounder
{
    template <typename dtype>
    SnapshotCorrelation correlation_matrix(const Eigen::Ref<const CMat<dtype>> &snapshots, double df)
    {
        if (snapshots.rows() == 0 || snapshots.cols() == 0)
            throw std::invalid_argument("correlation_matrix: need at least one snapshot and one frequency.");
        const CMat<double> h = snapshots.template cast<cplx<double>>();
        const CMat<double> gram = h * h.adjoint();
        SnapshotCorrelation out;
        out.K = (gram * df).cwiseAbs();
        // symmetric by construction: |z| = |conj z|
        out.K = (0.5 * (out.K + out.K.transpose())).eval();
        out.g = out.K.colwise().sum().transpose();
        return out;
    }

    double lower_median(std::vector<double> values)
    {
        if (values.empty())
            throw std::invalid_argument("lower_median: empty list.");
        const std::size_t mid = (values.size() - 1) / 2;
        std::nth_element(values.begin(), values.begin() + std::ptrdiff_t(mid), values.end());
        return values[mid];
    }

    std::vector<std::size_t> filter_outliers(const SnapshotCorrelation &corr, double rel_tol)
    {
        if (!(rel_tol > 0.0 && rel_tol < 1.0))
            throw std::invalid_argument("filter_outliers: rel_tol must be in (0, 1).");
        const std::vector<double> g(corr.g.data(), corr.g.data() + corr.g.size());
        const double med = lower_median(g);
        if (!(med > 0.0))
            throw std::domain_error("filter_outliers: median correlation is zero (all-zero snapshots).");
        std::vector<std::size_t> kept;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (std::abs(g[i] - med) <= rel_tol * med)
                kept.push_back(i);
        return kept;
    }

    template <typename dtype>
    CVec<dtype> average_snapshots(const Eigen::Ref<const CMat<dtype>> &snapshots, std::span<const std::size_t> kept)
    {
        if (kept.empty())
            throw std::invalid_argument("average_snapshots: the kept set is empty.");
        CVec<double> acc = CVec<double>::Zero(snapshots.cols());
        for (std::size_t i : kept)
        {
            if (i >= std::size_t(snapshots.rows()))
                throw std::out_of_range("average_snapshots: snapshot index out of range.");
            acc += snapshots.row(Eigen::Index(i)).transpose().template cast<cplx<double>>();
        }
        return (acc / double(kept.size())).template cast<cplx<dtype>>();
    }

    template <typename dtype>
    PrepResult<dtype> prep_tensor(const TransferTensor<dtype> &tensor, const PrepConfig &cfg)
    {
        const auto &d = tensor.dims();
        PrepResult<dtype> out;
        TensorDims od = d;
        od.snapshots = 1;
        out.averaged = TransferTensor<dtype>(od, tensor.grid(), tensor.has_timestamps());
        out.removed.assign(d.pair_count(), 0);
        out.degenerate.assign(d.rotors * d.tx * d.rx, 0);

        std::vector<std::size_t> all(d.snapshots);
        std::iota(all.begin(), all.end(), std::size_t(0));

        for (std::size_t r = 0; r < d.rotors; ++r)
            for (std::size_t t = 0; t < d.tx; ++t)
                for (std::size_t n = 0; n < d.rx; ++n)
                {
                    const auto snaps = tensor.pair(r, t, n);
                    std::vector<std::size_t> kept = all;
                    if (cfg.filter && d.snapshots > 1)
                    {
                        try
                        {
                            kept = filter_outliers(correlation_matrix<dtype>(snaps, tensor.grid().step()), cfg.rel_tol);
                        }
                        catch (const std::domain_error &)
                        {
                            kept = all;
                            out.degenerate[(r * d.tx + t) * d.rx + n] = 1;
                            ++out.degenerate_count;
                        }
                        std::vector<std::uint8_t> keep_flag(d.snapshots, 0);
                        for (std::size_t i : kept)
                            keep_flag[i] = 1;
                        for (std::size_t s = 0; s < d.snapshots; ++s)
                            if (!keep_flag[s])
                            {
                                out.removed[tensor.pair_index(r, t, n, s)] = 1;
                                ++out.removed_count;
                            }
                    }
                    const CVec<dtype> avg = average_snapshots<dtype>(snaps, kept);
                    for (std::size_t k = 0; k < d.freq; ++k)
                        out.averaged(r, t, n, k, 0) = avg(Eigen::Index(k));
                    if (tensor.has_timestamps())
                    {
                        double ts = 0.0;
                        for (std::size_t s = 0; s < d.snapshots; ++s)
                            ts += tensor.timestamp(r, t, n, s);
                        out.averaged.set_timestamp(r, t, n, 0, ts / double(d.snapshots));
                    }
                }
        return out;
    }

#define SOUNDER_INSTANTIATE_PREP(T)                                                                               \
    template SnapshotCorrelation correlation_matrix<T>(const Eigen::Ref<const CMat<T>> &, double);               \
    template CVec<T> average_snapshots<T>(const Eigen::Ref<const CMat<T>> &, std::span<const std::size_t>);       \
    template PrepResult<T> prep_tensor(const TransferTensor<T> &, const PrepConfig &);

    SOUNDER_INSTANTIATE_PREP(float)
    SOUNDER_INSTANTIATE_PREP(double)
}
