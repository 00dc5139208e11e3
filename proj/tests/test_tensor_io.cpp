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

#include "sounder/tensor_io.hpp"

#include <cstring>
#include <random>
#include <sstream>

using namespace sounder;

namespace
{
    TransferTensor<double> random_tensor(bool with_timestamps)
    {
        TransferTensor<double> t(TensorDims{2, 3, 2, 5, 4}, FrequencyGrid(2.52e9, 78125.0, 5), with_timestamps);
        std::mt19937_64 rng(3);
        std::normal_distribution<double> n(0.0, 1.0);
        for (auto &v : t.values())
            v = {n(rng), n(rng)};
        double ts = 0.0;
        for (auto &x : t.timestamps())
            x = (ts += 1e-5);
        return t;
    }

    template <typename T>
    T read_at(const std::string &bytes, std::size_t offset)
    {
        T v;
        std::memcpy(&v, bytes.data() + offset, sizeof(T));
        return v;
    }
}

TEST_CASE("write_tensor - round trip is exact")
{
    for (bool ts : {true, false})
    {
        const auto t = random_tensor(ts);
        std::stringstream ss;
        write_tensor(ss, t);
        const auto back = read_tensor<double>(ss);
        CHECK(back.dims() == t.dims());
        CHECK(back.grid().start() == t.grid().start());
        CHECK(back.grid().step() == t.grid().step());
        CHECK(back.values() == t.values());
        CHECK(back.timestamps() == t.timestamps());
    }
}

TEST_CASE("write_tensor - header layout")
{
    const auto t = random_tensor(true);
    std::stringstream ss;
    write_tensor(ss, t);
    const std::string bytes = ss.str();
    const std::size_t n = t.dims().count(), p = t.dims().pair_count();
    REQUIRE(bytes.size() == 72 + 16 * n + 8 * p);
    CHECK(bytes.substr(0, 8) == "MIMOTF01");
    CHECK(read_at<std::uint32_t>(bytes, 8) == 1);
    CHECK(read_at<std::uint32_t>(bytes, 12) == 1);
    CHECK(read_at<std::uint64_t>(bytes, 16) == 2);
    CHECK(read_at<std::uint64_t>(bytes, 24) == 3);
    CHECK(read_at<std::uint64_t>(bytes, 32) == 2);
    CHECK(read_at<std::uint64_t>(bytes, 40) == 5);
    CHECK(read_at<std::uint64_t>(bytes, 48) == 4);
    CHECK(read_at<double>(bytes, 56) == 2.52e9);
    CHECK(read_at<double>(bytes, 64) == 78125.0);
    CHECK(read_at<double>(bytes, 72) == t.values()[0].real());
    CHECK(read_at<double>(bytes, 80) == t.values()[0].imag());
}

TEST_CASE("read_tensor - rejects bad input")
{
    std::stringstream bad("NOTATENSOR0000000000");
    CHECK_THROWS(read_tensor<double>(bad));

    const auto t = random_tensor(false);
    std::stringstream ss;
    write_tensor(ss, t);
    std::string bytes = ss.str();
    bytes.resize(bytes.size() - 8);
    std::stringstream cut(bytes);
    CHECK_THROWS(read_tensor<double>(cut));
}

TEST_CASE("write_tensor_csv - one row per sample")
{
    TransferTensor<double> t(TensorDims{1, 1, 2, 2, 1}, FrequencyGrid(1e9, 1e6, 2), false);
    t(0, 0, 1, 1, 0) = {0.5, -0.25};
    std::stringstream ss;
    write_tensor_csv(ss, t);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "rotor,tx,rx,freq_hz,snapshot,re,im");
    std::size_t rows = 0;
    std::string last;
    while (std::getline(ss, line))
        if (!line.empty())
        {
            ++rows;
            last = line;
        }
    CHECK(rows == 4);
    CHECK(last == "0,0,1,1001000000,0,0.5,-0.25");
}
