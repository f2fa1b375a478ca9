/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

// Binary field format, all little-endian:
//   "BLNF" | version u32 | encoder kind u32 | C_s u32 | layer count u32
//   encoder: frequencies u32 | levels u32 | base resolution u32 |
//            per-level scale f32 | table size u32 | features u32 | omega0 f32
//   bounds: x_min x_max y_min y_max as f64
//   per layer: in u32 | out u32
//   per layer: weights f32 (row-major out x in) then biases f32
//   hash tables f32 (level, entry, feature)

#include "blueprint/error.hpp"
#include "blueprint/field.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

namespace blueprint {

namespace {

constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v)
{
    const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b.data(), 4);
}

void put_u64(std::ostream& out, std::uint64_t v)
{
    put_u32(out, static_cast<std::uint32_t>(v & 0xffffffffu));
    put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

void put_f32(std::ostream& out, double v) { put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t get_u32(std::istream& in)
{
    std::array<unsigned char, 4> b{};
    in.read(reinterpret_cast<char*>(b.data()), 4);
    if (!in) {
        throw Error("truncated field file");
    }
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint64_t get_u64(std::istream& in)
{
    const std::uint64_t lo = get_u32(in);
    const std::uint64_t hi = get_u32(in);
    return lo | (hi << 32);
}

double get_f32(std::istream& in) { return std::bit_cast<float>(get_u32(in)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

} // namespace

void write_field(const FieldParams& params, std::ostream& out)
{
    out.write("BLNF", 4);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(params.encoder.kind));
    put_u32(out, static_cast<std::uint32_t>(params.num_classes));
    put_u32(out, static_cast<std::uint32_t>(params.layers.size()));

    const auto& enc = params.encoder;
    put_u32(out, static_cast<std::uint32_t>(enc.frequencies));
    put_u32(out, static_cast<std::uint32_t>(enc.hash.levels));
    put_u32(out, static_cast<std::uint32_t>(enc.hash.base_resolution));
    put_f32(out, enc.hash.per_level_scale);
    put_u32(out, enc.hash.table_size);
    put_u32(out, static_cast<std::uint32_t>(enc.hash.features_per_entry));
    put_f32(out, enc.omega0);

    put_f64(out, params.bounds.x_min);
    put_f64(out, params.bounds.x_max);
    put_f64(out, params.bounds.y_min);
    put_f64(out, params.bounds.y_max);

    for (const auto& l : params.layers) {
        put_u32(out, static_cast<std::uint32_t>(l.in));
        put_u32(out, static_cast<std::uint32_t>(l.out));
    }
    for (std::size_t k = 0; k < params.layers.size(); ++k) {
        const auto W = params.weight(k);
        for (Eigen::Index r = 0; r < W.rows(); ++r) {
            for (Eigen::Index c = 0; c < W.cols(); ++c) {
                put_f32(out, W(r, c));
            }
        }
        const auto b = params.bias(k);
        for (Eigen::Index r = 0; r < b.size(); ++r) {
            put_f32(out, b[r]);
        }
    }
    const std::size_t h0 = params.hash_offset();
    for (std::size_t i = 0; i < params.hash_size(); ++i) {
        put_f32(out, params.values[h0 + i]);
    }
    if (!out) {
        throw Error("failed writing field");
    }
}

FieldParams read_field(std::istream& in)
{
    std::array<char, 4> magic{};
    in.read(magic.data(), 4);
    if (!in || std::memcmp(magic.data(), "BLNF", 4) != 0) {
        throw Error("not a field file (bad magic)");
    }
    if (get_u32(in) != kVersion) {
        throw Error("unsupported field file version");
    }
    const auto kind = get_u32(in);
    if (kind > static_cast<std::uint32_t>(EncoderKind::sinusoidal)) {
        throw Error("unknown encoder kind in field file");
    }
    FieldParams p;
    p.encoder.kind = static_cast<EncoderKind>(kind);
    p.num_classes = static_cast<int>(get_u32(in));
    const auto layer_count = get_u32(in);
    if (layer_count == 0 || layer_count > 1024) {
        throw Error("invalid layer count in field file");
    }

    p.encoder.frequencies = static_cast<int>(get_u32(in));
    p.encoder.hash.levels = static_cast<int>(get_u32(in));
    p.encoder.hash.base_resolution = static_cast<int>(get_u32(in));
    p.encoder.hash.per_level_scale = get_f32(in);
    p.encoder.hash.table_size = get_u32(in);
    p.encoder.hash.features_per_entry = static_cast<int>(get_u32(in));
    p.encoder.omega0 = get_f32(in);
    p.encoder.validate();

    p.bounds.x_min = get_f64(in);
    p.bounds.x_max = get_f64(in);
    p.bounds.y_min = get_f64(in);
    p.bounds.y_max = get_f64(in);

    int expected_in = p.encoder.output_dim();
    for (std::uint32_t k = 0; k < layer_count; ++k) {
        LayerShape s{static_cast<int>(get_u32(in)), static_cast<int>(get_u32(in))};
        if (s.in != expected_in || s.out < 1) {
            throw Error("inconsistent layer dimensions in field file");
        }
        expected_in = s.out;
        p.layers.push_back(s);
    }
    if (p.layers.back().out != p.num_classes) {
        throw Error("output layer does not match class count");
    }
    p.values.assign(p.hash_offset() + p.hash_size(), 0.0);
    for (std::size_t k = 0; k < p.layers.size(); ++k) {
        const auto [lin, lout] = p.layers[k];
        const std::size_t w0 = p.weight_offset(k);
        for (int r = 0; r < lout; ++r) {
            for (int c = 0; c < lin; ++c) {
                p.values[w0 + static_cast<std::size_t>(c) * lout + r] = get_f32(in);
            }
        }
        const std::size_t b0 = p.bias_offset(k);
        for (int r = 0; r < lout; ++r) {
            p.values[b0 + static_cast<std::size_t>(r)] = get_f32(in);
        }
    }
    const std::size_t h0 = p.hash_offset();
    for (std::size_t i = 0; i < p.hash_size(); ++i) {
        p.values[h0 + i] = get_f32(in);
    }
    return p;
}

void save_field(const FieldParams& params, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path);
    }
    write_field(params, out);
}

FieldParams load_field(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open field file " + path);
    }
    return read_field(in);
}

void save_train_log(std::span<const TrainLogEntry> log, const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path);
    }
    for (const auto& e : log) {
        out << nlohmann::json{{"step", e.step}, {"loss", e.loss}}.dump() << '\n';
    }
}

} // namespace blueprint
