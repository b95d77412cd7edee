// SPDX-License-Identifier: Apache-2.0
//
// cbsel: UE-assisted adaptive codebook selection laboratory
// Copyright (C) 2026 The cbsel authors
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

#include "cbsel/errors.hpp"
#include "cbsel/predictor.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

namespace cbsel {

namespace {

void put_u32(std::ostream &out, std::uint32_t v)
{
    char b[4];
    for (int i = 0; i < 4; ++i)
        b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(b, 4);
}

void put_u64(std::ostream &out, std::uint64_t v)
{
    char b[8];
    for (int i = 0; i < 8; ++i)
        b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(b, 8);
}

void put_f64(std::ostream &out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_bytes(std::istream &in, int n)
{
    unsigned char b[8] = {};
    if (!in.read(reinterpret_cast<char *>(b), n))
        throw FormatError("checkpoint: unexpected end of file");
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i)
        v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

std::uint32_t get_u32(std::istream &in) { return static_cast<std::uint32_t>(get_bytes(in, 4)); }
std::uint64_t get_u64(std::istream &in) { return get_bytes(in, 8); }
double get_f64(std::istream &in) { return std::bit_cast<double>(get_u64(in)); }

} // namespace

void save_checkpoint(std::ostream &out, const PredictorModel &model, const std::string &metadata)
{
    out.write(checkpoint_magic, sizeof checkpoint_magic);
    put_u32(out, checkpoint_version);
    put_u32(out, static_cast<std::uint32_t>(metadata.size()));
    out.write(metadata.data(), static_cast<std::streamsize>(metadata.size()));
    put_u64(out, model.seed);
    const auto widths = model.layer_widths();
    put_u32(out, static_cast<std::uint32_t>(widths.size()));
    for (int w : widths)
        put_u32(out, static_cast<std::uint32_t>(w));
    for (Eigen::Index i = 0; i < model.input_dim(); ++i)
        put_f64(out, model.input_offset.size() ? model.input_offset(i) : 0.0);
    for (Eigen::Index i = 0; i < model.input_dim(); ++i)
        put_f64(out, model.input_scale.size() ? model.input_scale(i) : 1.0);
    for (const auto &layer : model.layers) {
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
                put_f64(out, layer.weight(r, c));
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r)
            put_f64(out, layer.bias(r));
    }
    if (!out)
        throw FormatError("checkpoint: write failed");
}

Checkpoint load_checkpoint(std::istream &in)
{
    char magic[sizeof checkpoint_magic];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, checkpoint_magic, sizeof magic) != 0)
        throw FormatError("checkpoint: bad magic bytes");
    const std::uint32_t version = get_u32(in);
    if (version != checkpoint_version)
        throw VersionError("checkpoint: unsupported version " + std::to_string(version));

    Checkpoint cp;
    const std::uint32_t meta_len = get_u32(in);
    if (meta_len > (1u << 26))
        throw FormatError("checkpoint: metadata block too large");
    cp.metadata.resize(meta_len);
    if (meta_len && !in.read(cp.metadata.data(), meta_len))
        throw FormatError("checkpoint: truncated metadata");

    cp.model.seed = get_u64(in);
    const std::uint32_t count = get_u32(in);
    if (count < 2 || count > 64)
        throw FormatError("checkpoint: invalid layer count");
    std::vector<int> widths(count);
    for (auto &w : widths) {
        w = static_cast<int>(get_u32(in));
        if (w < 1 || w > (1 << 20))
            throw FormatError("checkpoint: invalid layer width");
    }
    const int in_dim = widths.front();
    cp.model.input_offset.resize(in_dim);
    cp.model.input_scale.resize(in_dim);
    for (int i = 0; i < in_dim; ++i)
        cp.model.input_offset(i) = get_f64(in);
    for (int i = 0; i < in_dim; ++i)
        cp.model.input_scale(i) = get_f64(in);
    for (std::size_t l = 1; l < widths.size(); ++l) {
        DenseLayer layer;
        layer.weight.resize(widths[l], widths[l - 1]);
        layer.bias.resize(widths[l]);
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
                layer.weight(r, c) = get_f64(in);
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r)
            layer.bias(r) = get_f64(in);
        cp.model.layers.push_back(std::move(layer));
    }
    return cp;
}

} // namespace cbsel
