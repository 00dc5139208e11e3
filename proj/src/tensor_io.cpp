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

#include "sounder/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace sounder
{
    namespace
    {
        constexpr char magic[8] = {'M', 'I', 'M', 'O', 'T', 'F', '0', '1'};
        constexpr std::uint32_t format_version = 1;

        static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

        template <typename T>
        T to_little(T v)
        {
            if constexpr (std::endian::native == std::endian::big)
            {
                unsigned char b[sizeof(T)];
                std::memcpy(b, &v, sizeof(T));
                for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
                    std::swap(b[i], b[sizeof(T) - 1 - i]);
                std::memcpy(&v, b, sizeof(T));
            }
            return v;
        }

        template <typename T>
        void put(std::ostream &os, T v)
        {
            v = to_little(v);
            os.write(reinterpret_cast<const char *>(&v), sizeof(T));
        }

        template <typename T>
        T get(std::istream &is)
        {
            T v;
            if (!is.read(reinterpret_cast<char *>(&v), sizeof(T)))
                throw std::runtime_error("read_tensor: unexpected end of file.");
            return to_little(v);
        }
    }

    template <typename dtype>
    void write_tensor(std::ostream &os, const TransferTensor<dtype> &tensor)
    {
        const auto &d = tensor.dims();
        os.write(magic, 8);
        put<std::uint32_t>(os, format_version);
        put<std::uint32_t>(os, tensor.has_timestamps() ? 1u : 0u);
        for (std::size_t v : {d.rotors, d.tx, d.rx, d.freq, d.snapshots})
            put<std::uint64_t>(os, v);
        put<double>(os, tensor.grid().start());
        put<double>(os, tensor.grid().step());
        for (const auto &v : tensor.values())
        {
            put<double>(os, double(v.real()));
            put<double>(os, double(v.imag()));
        }
        for (double t : tensor.timestamps())
            put<double>(os, t);
        if (!os)
            throw std::runtime_error("write_tensor: write failed.");
    }

    template <typename dtype>
    void write_tensor(const std::string &path, const TransferTensor<dtype> &tensor)
    {
        std::ofstream os(path, std::ios::binary);
        if (!os)
            throw std::runtime_error("write_tensor: cannot open '" + path + "'.");
        write_tensor(os, tensor);
    }

    template <typename dtype>
    TransferTensor<dtype> read_tensor(std::istream &is)
    {
        char head[8];
        if (!is.read(head, 8) || std::memcmp(head, magic, 8) != 0)
            throw std::runtime_error("read_tensor: not a tensor file (bad magic).");
        if (get<std::uint32_t>(is) != format_version)
            throw std::runtime_error("read_tensor: unsupported format version.");
        const std::uint32_t flags = get<std::uint32_t>(is);
        TensorDims d;
        d.rotors = std::size_t(get<std::uint64_t>(is));
        d.tx = std::size_t(get<std::uint64_t>(is));
        d.rx = std::size_t(get<std::uint64_t>(is));
        d.freq = std::size_t(get<std::uint64_t>(is));
        d.snapshots = std::size_t(get<std::uint64_t>(is));
        const double f_start = get<double>(is);
        const double f_step = get<double>(is);

        TransferTensor<dtype> out(d, FrequencyGrid(f_start, f_step, d.freq), (flags & 1u) != 0);
        for (auto &v : out.values())
        {
            const double re = get<double>(is);
            const double im = get<double>(is);
            v = cplx<dtype>(dtype(re), dtype(im));
        }
        for (double &t : out.timestamps())
            t = get<double>(is);
        return out;
    }

    template <typename dtype>
    TransferTensor<dtype> read_tensor(const std::string &path)
    {
        std::ifstream is(path, std::ios::binary);
        if (!is)
            throw std::runtime_error("read_tensor: cannot open '" + path + "'.");
        return read_tensor<dtype>(is);
    }

    template <typename dtype>
    void write_tensor_csv(std::ostream &os, const TransferTensor<dtype> &tensor)
    {
        const auto &d = tensor.dims();
        os << "rotor,tx,rx,freq_hz,snapshot,re,im\n" << std::setprecision(17);
        for (std::size_t r = 0; r < d.rotors; ++r)
            for (std::size_t t = 0; t < d.tx; ++t)
                for (std::size_t n = 0; n < d.rx; ++n)
                    for (std::size_t k = 0; k < d.freq; ++k)
                        for (std::size_t s = 0; s < d.snapshots; ++s)
                        {
                            const auto v = tensor(r, t, n, k, s);
                            os << r << ',' << t << ',' << n << ',' << tensor.grid()[k] << ',' << s << ','
                               << double(v.real()) << ',' << double(v.imag()) << '\n';
                        }
    }

    template <typename dtype>
    void write_tensor_csv(const std::string &path, const TransferTensor<dtype> &tensor)
    {
        std::ofstream os(path);
        if (!os)
            throw std::runtime_error("write_tensor_csv: cannot open '" + path + "'.");
        write_tensor_csv(os, tensor);
    }

#define SOUNDER_INSTANTIATE_TENSOR_IO(T)                                                                          \
    template void write_tensor(std::ostream &, const TransferTensor<T> &);                                       \
    template void write_tensor(const std::string &, const TransferTensor<T> &);                                  \
    template TransferTensor<T> read_tensor<T>(std::istream &);                                                   \
    template TransferTensor<T> read_tensor<T>(const std::string &);                                              \
    template void write_tensor_csv(std::ostream &, const TransferTensor<T> &);                                   \
    template void write_tensor_csv(const std::string &, const TransferTensor<T> &);

    SOUNDER_INSTANTIATE_TENSOR_IO(float)
    SOUNDER_INSTANTIATE_TENSOR_IO(double)
}
