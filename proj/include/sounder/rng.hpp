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
#include <random>
#include <string_view>

namespace sounder
{
    using Rng = std::mt19937_64;

    // 64-bit FNV-1a
    inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 14695981039346656037ULL)
    {
        for (unsigned char c : bytes)
        {
            h ^= c;
            h *= 1099511628211ULL;
        }
        return h;
    }

    inline std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    // Seed of a named sub-stream of a master seed
    inline std::uint64_t derive_seed(std::uint64_t master, std::string_view name)
    {
        return splitmix64(master ^ fnv1a64(name));
    }

    // Seed of the index-th member of a named family of sub-streams
    inline std::uint64_t derive_seed(std::uint64_t master, std::string_view name, std::uint64_t index)
    {
        return splitmix64(derive_seed(master, name) + splitmix64(index));
    }
}
