/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "blueprint/image_io.hpp"
#include "blueprint/error.hpp"

#include <nlohmann/json.hpp>
#include <png.h>

#include <algorithm>
#include <cstdio>
#include <array>
#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

namespace blueprint {

namespace {

struct WriteState {
    std::vector<std::uint8_t>* out;
};

void write_callback(png_structp png, png_bytep data, png_size_t length)
{
    auto* state = static_cast<WriteState*>(png_get_io_ptr(png));
    state->out->insert(state->out->end(), data, data + length);
}

void flush_callback(png_structp) {}

[[noreturn]] void png_error_callback(png_structp, png_const_charp msg) { throw Error(std::string("png: ") + msg); }

void png_warning_callback(png_structp, png_const_charp) {}

/// Shared encoder. `rows` yields the bytes of each row.
template <class RowFn>
std::vector<std::uint8_t> encode(int width, int height, int color_type, std::span<const Rgb8> palette, RowFn&& rows)
{
    if (width < 1 || height < 1) {
        throw Error("cannot encode an empty image");
    }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_callback, png_warning_callback);
    if (!png) {
        throw Error("png: out of memory");
    }
    png_infop info = png_create_info_struct(png);
    std::vector<std::uint8_t> out;
    WriteState state{&out};
    try {
        png_set_write_fn(png, &state, write_callback, flush_callback);
        png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8, color_type,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        std::vector<png_color> pal;
        if (color_type == PNG_COLOR_TYPE_PALETTE) {
            for (const auto& c : palette) {
                pal.push_back({c[0], c[1], c[2]});
            }
            png_set_PLTE(png, info, pal.data(), static_cast<int>(pal.size()));
        }
        png_write_info(png, info);
        std::vector<std::uint8_t> row;
        for (int v = 0; v < height; ++v) {
            rows(v, row);
            png_write_row(png, row.data());
        }
        png_write_end(png, nullptr);
    } catch (...) {
        png_destroy_write_struct(&png, &info);
        throw;
    }
    png_destroy_write_struct(&png, &info);
    return out;
}

void write_bytes(const std::string& path, std::span<const std::uint8_t> bytes)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::uint8_t> read_bytes(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path);
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct ReadState {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;
};

void read_callback(png_structp png, png_bytep data, png_size_t length)
{
    auto* state = static_cast<ReadState*>(png_get_io_ptr(png));
    if (state->pos + length > state->bytes.size()) {
        png_error(png, "truncated data");
    }
    std::memcpy(data, state->bytes.data() + state->pos, length);
    state->pos += length;
}

/// Decodes with libpng; `raw_indices` keeps palette indices instead of
/// expanding to RGBA.
std::vector<std::uint8_t> decode(std::span<const std::uint8_t> bytes, bool raw_indices, int& width, int& height,
                                 int& channels)
{
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
        throw Error("not a PNG image");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_callback, png_warning_callback);
    png_infop info = png_create_info_struct(png);
    ReadState state{bytes, 0};
    std::vector<std::uint8_t> pixels;
    try {
        png_set_read_fn(png, &state, read_callback);
        png_read_info(png, info);
        width = static_cast<int>(png_get_image_width(png, info));
        height = static_cast<int>(png_get_image_height(png, info));
        const int color_type = png_get_color_type(png, info);
        const int depth = png_get_bit_depth(png, info);
        if (raw_indices) {
            if (color_type != PNG_COLOR_TYPE_PALETTE) {
                throw Error("expected a paletted PNG");
            }
            if (depth < 8) {
                png_set_packing(png);
            }
            channels = 1;
        } else {
            if (depth == 16) {
                png_set_strip_16(png);
            }
            if (color_type == PNG_COLOR_TYPE_PALETTE) {
                png_set_palette_to_rgb(png);
            }
            if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) {
                png_set_expand_gray_1_2_4_to_8(png);
            }
            if (png_get_valid(png, info, PNG_INFO_tRNS)) {
                png_set_tRNS_to_alpha(png);
            }
            if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
                png_set_gray_to_rgb(png);
            }
            png_set_filler(png, 0xff, PNG_FILLER_AFTER);
            channels = 4;
        }
        png_read_update_info(png, info);
        const std::size_t stride = png_get_rowbytes(png, info);
        pixels.resize(stride * static_cast<std::size_t>(height));
        std::vector<png_bytep> rows(static_cast<std::size_t>(height));
        for (int v = 0; v < height; ++v) {
            rows[static_cast<std::size_t>(v)] = pixels.data() + stride * static_cast<std::size_t>(v);
        }
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);
    } catch (...) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw;
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return pixels;
}

void put_u32(std::ostream& out, std::uint32_t v)
{
    const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b.data(), 4);
}

std::uint32_t get_u32(const std::uint8_t* b)
{
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

} // namespace

std::vector<std::uint8_t> encode_png(const Image<Rgb8>& img)
{
    return encode(img.width, img.height, PNG_COLOR_TYPE_RGB, {}, [&](int v, std::vector<std::uint8_t>& row) {
        row.resize(static_cast<std::size_t>(img.width) * 3);
        for (int u = 0; u < img.width; ++u) {
            std::copy_n(img.at(u, v).begin(), 3, row.begin() + static_cast<std::ptrdiff_t>(u) * 3);
        }
    });
}

std::vector<std::uint8_t> encode_png_indexed(const Image<std::uint8_t>& indices, std::span<const Rgb8> palette)
{
    if (palette.empty() || palette.size() > 256) {
        throw Error("palette must hold 1 to 256 colors");
    }
    for (auto i : indices.pixels) {
        if (i >= palette.size()) {
            throw Error("palette index out of range");
        }
    }
    return encode(indices.width, indices.height, PNG_COLOR_TYPE_PALETTE, palette,
                  [&](int v, std::vector<std::uint8_t>& row) {
                      row.assign(indices.pixels.begin() + static_cast<std::ptrdiff_t>(v) * indices.width,
                                 indices.pixels.begin() + static_cast<std::ptrdiff_t>(v + 1) * indices.width);
                  });
}

void write_png(const std::string& path, const Image<Rgb8>& img) { write_bytes(path, encode_png(img)); }

void write_png_indexed(const std::string& path, const Image<std::uint8_t>& indices, std::span<const Rgb8> palette)
{
    write_bytes(path, encode_png_indexed(indices, palette));
}

Image<Rgba8> decode_png(std::span<const std::uint8_t> bytes)
{
    int w = 0;
    int h = 0;
    int ch = 0;
    const auto pixels = decode(bytes, false, w, h, ch);
    Image<Rgba8> img(w, h);
    for (std::size_t k = 0; k < img.pixels.size(); ++k) {
        std::copy_n(pixels.begin() + static_cast<std::ptrdiff_t>(k) * 4, 4, img.pixels[k].begin());
    }
    return img;
}

Image<Rgba8> read_png(const std::string& path)
{
    const auto bytes = read_bytes(path);
    return decode_png(bytes);
}

Image<std::uint8_t> read_png_indices(const std::string& path)
{
    const auto bytes = read_bytes(path);
    int w = 0;
    int h = 0;
    int ch = 0;
    auto pixels = decode(bytes, true, w, h, ch);
    Image<std::uint8_t> img;
    img.width = w;
    img.height = h;
    img.pixels = std::move(pixels);
    return img;
}

void write_depth(const std::string& path, const Image<double>& depth)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path);
    }
    out.write("DPTH", 4);
    put_u32(out, static_cast<std::uint32_t>(depth.width));
    put_u32(out, static_cast<std::uint32_t>(depth.height));
    put_u32(out, 0);
    for (double d : depth.pixels) {
        put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(d)));
    }
}

Image<double> read_depth(const std::string& path)
{
    const auto bytes = read_bytes(path);
    if (bytes.size() < 16 || std::memcmp(bytes.data(), "DPTH", 4) != 0) {
        throw Error("not a depth file: " + path);
    }
    const auto w = get_u32(bytes.data() + 4);
    const auto h = get_u32(bytes.data() + 8);
    const std::size_t n = static_cast<std::size_t>(w) * h;
    if (bytes.size() != 16 + 4 * n) {
        throw Error("depth file size mismatch: " + path);
    }
    Image<double> depth(static_cast<int>(w), static_cast<int>(h));
    for (std::size_t k = 0; k < n; ++k) {
        depth.pixels[k] = std::bit_cast<float>(get_u32(bytes.data() + 16 + 4 * k));
    }
    return depth;
}

Image<Rgb8> colorize_labels(const Image<int>& labels, std::span<const Rgb8> palette)
{
    Image<Rgb8> out(labels.width, labels.height);
    for (std::size_t k = 0; k < labels.pixels.size(); ++k) {
        const int l = labels.pixels[k];
        out.pixels[k] = (l >= 0 && static_cast<std::size_t>(l) < palette.size()) ? palette[static_cast<std::size_t>(l)]
                                                                                   : Rgb8{0, 0, 0};
    }
    return out;
}

Image<Rgb8> to_rgb8_image(const Image<Color>& img)
{
    Image<Rgb8> out(img.width, img.height);
    for (std::size_t k = 0; k < img.pixels.size(); ++k) {
        out.pixels[k] = to_rgb8(img.pixels[k]);
    }
    return out;
}

Image<std::uint8_t> raster_to_image(const BlueprintRaster& raster)
{
    Image<std::uint8_t> img(raster.size.nx, raster.size.ny);
    for (int j = 0; j < raster.size.ny; ++j) {
        for (int i = 0; i < raster.size.nx; ++i) {
            const int l = raster.at(i, j);
            if (l < 0 || l > 255) {
                throw Error("label does not fit a palette image");
            }
            img.at(i, raster.size.ny - 1 - j) = static_cast<std::uint8_t>(l);
        }
    }
    return img;
}

BlueprintRaster raster_from_image(const Image<std::uint8_t>& img, const BlueprintBounds& bounds)
{
    BlueprintRaster raster(bounds, {img.width, img.height});
    for (int j = 0; j < img.height; ++j) {
        for (int i = 0; i < img.width; ++i) {
            raster.at(i, j) = img.at(i, img.height - 1 - j);
        }
    }
    return raster;
}

nlohmann::json raster_sidecar(const BlueprintRaster& raster, std::span<const Rgb8> palette)
{
    nlohmann::json pal = nlohmann::json::array();
    for (const auto& c : palette) {
        pal.push_back({c[0], c[1], c[2]});
    }
    return {{"bounds",
             {{"x_min", raster.bounds.x_min},
              {"x_max", raster.bounds.x_max},
              {"y_min", raster.bounds.y_min},
              {"y_max", raster.bounds.y_max}}},
            {"nx", raster.size.nx},
            {"ny", raster.size.ny},
            {"row_order", "y_max_first"},
            {"palette", pal}};
}

void save_raster(const BlueprintRaster& raster, std::span<const Rgb8> palette, const std::string& stem)
{
    std::vector<Rgb8> pal(palette.begin(), palette.end());
    int max_label = 0;
    for (int l : raster.labels) {
        max_label = std::max(max_label, l);
    }
    if (pal.size() <= static_cast<std::size_t>(max_label)) {
        pal.resize(static_cast<std::size_t>(max_label) + 1, Rgb8{255, 0, 255});
    }
    write_png_indexed(stem + ".png", raster_to_image(raster), pal);
    std::ofstream out(stem + ".json");
    if (!out) {
        throw Error("cannot write " + stem + ".json");
    }
    out << raster_sidecar(raster, pal).dump(2) << '\n';
}

BlueprintRaster load_raster(const std::string& path)
{
    const std::filesystem::path p(path);
    auto stem = p;
    stem.replace_extension();
    const std::string json_path = stem.string() + ".json";
    const std::string png_path = stem.string() + ".png";
    std::ifstream in(json_path);
    if (!in) {
        throw Error("cannot open raster sidecar " + json_path);
    }
    nlohmann::json j;
    try {
        in >> j;
        const auto& b = j.at("bounds");
        const BlueprintBounds bounds{b.at("x_min").get<double>(), b.at("x_max").get<double>(),
                                     b.at("y_min").get<double>(), b.at("y_max").get<double>()};
        const auto img = read_png_indices(png_path);
        if (img.width != j.at("nx").get<int>() || img.height != j.at("ny").get<int>()) {
            throw Error("raster sidecar does not match image size");
        }
        return raster_from_image(img, bounds);
    } catch (const nlohmann::json::exception& e) {
        throw Error("raster sidecar " + json_path + ": " + e.what());
    }
}

void save_view(const View& view, std::span<const Rgb8> palette, const std::string& stem)
{
    Image<std::uint8_t> sem(view.width(), view.height());
    for (std::size_t k = 0; k < sem.pixels.size(); ++k) {
        sem.pixels[k] = static_cast<std::uint8_t>(std::clamp(view.semantic.pixels[k], 0, 255));
    }
    write_png_indexed(stem + "_semantic.png", sem, palette);
    write_png(stem + "_rgb.png", view.rgb);
    write_depth(stem + "_depth.bin", view.depth);
    save_camera(view.camera, stem + "_camera.json");
}

View load_view(const std::string& stem)
{
    View view;
    view.camera = load_camera(stem + "_camera.json");
    const auto sem = read_png_indices(stem + "_semantic.png");
    view.semantic = Image<int>(sem.width, sem.height);
    std::copy(sem.pixels.begin(), sem.pixels.end(), view.semantic.pixels.begin());
    view.depth = read_depth(stem + "_depth.bin");
    const auto rgba = read_png(stem + "_rgb.png");
    view.rgb = Image<Rgb8>(rgba.width, rgba.height);
    for (std::size_t k = 0; k < rgba.pixels.size(); ++k) {
        view.rgb.pixels[k] = {rgba.pixels[k][0], rgba.pixels[k][1], rgba.pixels[k][2]};
    }
    if (view.depth.width != sem.width || view.depth.height != sem.height || view.rgb.width != sem.width ||
        view.rgb.height != sem.height || view.camera.width != sem.width || view.camera.height != sem.height) {
        throw Error("view files disagree on image size: " + stem);
    }
    return view;
}

void save_views(std::span<const View> views, std::span<const Rgb8> palette, const std::string& dir)
{
    std::filesystem::create_directories(dir);
    nlohmann::json stems = nlohmann::json::array();
    for (std::size_t k = 0; k < views.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "view_%03zu", k);
        save_view(views[k], palette, (std::filesystem::path(dir) / name).string());
        stems.push_back(name);
    }
    std::ofstream out(std::filesystem::path(dir) / "views.json");
    if (!out) {
        throw Error("cannot write views.json in " + dir);
    }
    out << nlohmann::json{{"views", stems}}.dump(2) << '\n';
}

std::vector<View> load_views(const std::string& dir)
{
    const auto index = std::filesystem::path(dir) / "views.json";
    std::ifstream in(index);
    if (!in) {
        throw Error("cannot open " + index.string());
    }
    std::vector<View> views;
    try {
        nlohmann::json j;
        in >> j;
        for (const auto& stem : j.at("views")) {
            views.push_back(load_view((std::filesystem::path(dir) / stem.get<std::string>()).string()));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(index.string() + ": " + e.what());
    }
    return views;
}

std::string base64_encode(std::span<const std::uint8_t> bytes)
{
    static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const std::uint32_t n = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out += kAlphabet[(n >> 18) & 63];
        out += kAlphabet[(n >> 12) & 63];
        out += kAlphabet[(n >> 6) & 63];
        out += kAlphabet[n & 63];
    }
    if (i + 1 == bytes.size()) {
        const std::uint32_t n = bytes[i] << 16;
        out += kAlphabet[(n >> 18) & 63];
        out += kAlphabet[(n >> 12) & 63];
        out += "==";
    } else if (i + 2 == bytes.size()) {
        const std::uint32_t n = (bytes[i] << 16) | (bytes[i + 1] << 8);
        out += kAlphabet[(n >> 18) & 63];
        out += kAlphabet[(n >> 12) & 63];
        out += kAlphabet[(n >> 6) & 63];
        out += '=';
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text)
{
    auto value = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') {
            return c - 'A';
        }
        if (c >= 'a' && c <= 'z') {
            return c - 'a' + 26;
        }
        if (c >= '0' && c <= '9') {
            return c - '0' + 52;
        }
        if (c == '+') {
            return 62;
        }
        if (c == '/') {
            return 63;
        }
        return -1;
    };
    std::vector<std::uint8_t> out;
    std::uint32_t buf = 0;
    int bits = 0;
    for (char c : text) {
        if (c == '=' || c == '\n' || c == '\r') {
            continue;
        }
        const int v = value(c);
        if (v < 0) {
            throw Error("invalid base64 data");
        }
        buf = (buf << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<std::uint8_t>((buf >> bits) & 0xff));
        }
    }
    return out;
}

} // namespace blueprint
