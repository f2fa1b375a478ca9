/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace blueprint {

using Rgb8 = std::array<std::uint8_t, 3>;
using Rgba8 = std::array<std::uint8_t, 4>;
using Color = std::array<double, 3>;

/// Row-major image, pixel (u, v) at index v * width + u.
template <class T>
struct Image {
    int width = 0;
    int height = 0;
    std::vector<T> pixels;

    Image() = default;
    Image(int w, int h, const T& fill = T{}) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    T& at(int u, int v) { return pixels[static_cast<std::size_t>(v) * width + u]; }
    const T& at(int u, int v) const { return pixels[static_cast<std::size_t>(v) * width + u]; }
    std::size_t size() const { return pixels.size(); }

    friend bool operator==(const Image&, const Image&) = default;
};

inline Color to_color(const Rgb8& c) { return {c[0] / 255.0, c[1] / 255.0, c[2] / 255.0}; }

Rgb8 to_rgb8(const Color& c);

} // namespace blueprint
