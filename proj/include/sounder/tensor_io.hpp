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

#include <iosfwd>
#include <string>

#include "sounder/channel.hpp"

namespace sounder
{
    /*!
    Binary tensor file, all fields little-endian:

    offset  size  field
    0       8     magic "MIMOTF01"
    8       4     uint32 version (1)
    12      4     uint32 flags (bit 0: timestamps present)
    16      40    uint64 dims[5]: rotors, tx, rx, freq, snapshots
    56      8     float64 f_start (Hz)
    64      8     float64 f_step (Hz)
    72      ...   values as interleaved float64 (re, im), row-major with the snapshot index fastest
    ...     ...   timestamps as float64 (rotor, tx, rx, snapshot), if flagged
    */
    template <typename dtype>
    void write_tensor(std::ostream &os, const TransferTensor<dtype> &tensor);

    template <typename dtype>
    void write_tensor(const std::string &path, const TransferTensor<dtype> &tensor);

    template <typename dtype>
    TransferTensor<dtype> read_tensor(std::istream &is);

    template <typename dtype>
    TransferTensor<dtype> read_tensor(const std::string &path);

    // One row per sample: rotor,tx,rx,freq_hz,snapshot,re,im
    template <typename dtype>
    void write_tensor_csv(std::ostream &os, const TransferTensor<dtype> &tensor);

    template <typename dtype>
    void write_tensor_csv(const std::string &path, const TransferTensor<dtype> &tensor);
}
