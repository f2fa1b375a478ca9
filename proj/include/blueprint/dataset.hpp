/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "blueprint/geometry.hpp"
#include "blueprint/scene.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace blueprint {

/// One supervision pair for the field: a floor-plane coordinate and the
/// class observed there. `z` keeps the height of the back-projected point
/// for edit-region estimation; training ignores it.
struct BlueprintSample {
    BlueprintCoord coord;
    int label = 1;
    double z = 0.0;
};

struct ProjectedDataset {
    std::vector<BlueprintSample> samples;
    std::size_t skipped_invalid_depth = 0;
    std::size_t skipped_void_label = 0;
    std::size_t skipped_out_of_bounds = 0;

    std::size_t skipped() const { return skipped_invalid_depth + skipped_void_label + skipped_out_of_bounds; }
};

/// Back-projects every pixel center with a valid depth and a non-void label
/// and keeps those landing inside `bounds`. Pixels are visited view by view
/// in row-major order.
ProjectedDataset project_dataset(std::span<const View> views, const BlueprintBounds& bounds);

} // namespace blueprint
