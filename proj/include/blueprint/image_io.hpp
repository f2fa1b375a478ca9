/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "blueprint/image.hpp"
#include "blueprint/scene.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace blueprint {

std::vector<std::uint8_t> encode_png(const Image<Rgb8>& img);
/// Palette PNG whose pixel values are the indices themselves (class ids).
std::vector<std::uint8_t> encode_png_indexed(const Image<std::uint8_t>& indices, std::span<const Rgb8> palette);

void write_png(const std::string& path, const Image<Rgb8>& img);
void write_png_indexed(const std::string& path, const Image<std::uint8_t>& indices, std::span<const Rgb8> palette);

/// Decodes any PNG to 8-bit RGBA.
Image<Rgba8> decode_png(std::span<const std::uint8_t> bytes);
Image<Rgba8> read_png(const std::string& path);
/// Raw palette indices of a paletted PNG.
Image<std::uint8_t> read_png_indices(const std::string& path);

/// Depth file: "DPTH" | width u32 | height u32 | reserved u32 | f32 values,
/// little-endian, row-major.
void write_depth(const std::string& path, const Image<double>& depth);
Image<double> read_depth(const std::string& path);

Image<Rgb8> colorize_labels(const Image<int>& labels, std::span<const Rgb8> palette);
Image<Rgb8> to_rgb8_image(const Image<Color>& img);

/// Blueprint raster as an image with +y up: row 0 holds the cells at y max.
Image<std::uint8_t> raster_to_image(const BlueprintRaster& raster);
BlueprintRaster raster_from_image(const Image<std::uint8_t>& img, const BlueprintBounds& bounds);

nlohmann::json raster_sidecar(const BlueprintRaster& raster, std::span<const Rgb8> palette);
/// Writes <stem>.png and <stem>.json.
void save_raster(const BlueprintRaster& raster, std::span<const Rgb8> palette, const std::string& stem);
/// Reads a raster written by save_raster, given either file of the pair.
BlueprintRaster load_raster(const std::string& path);

/// Writes <stem>_semantic.png, <stem>_rgb.png, <stem>_depth.bin and
/// <stem>_camera.json.
void save_view(const View& view, std::span<const Rgb8> palette, const std::string& stem);
View load_view(const std::string& stem);

/// view_000, view_001, ... in `dir` plus views.json listing the stems.
void save_views(std::span<const View> views, std::span<const Rgb8> palette, const std::string& dir);
std::vector<View> load_views(const std::string& dir);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

} // namespace blueprint
