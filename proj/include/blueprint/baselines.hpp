/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "blueprint/scene.hpp"
#include "blueprint/volume.hpp"

#include <span>
#include <vector>

namespace blueprint {

/// Direct projection: every valid pixel votes for the cell it lands in and
/// each cell takes the majority label (ties to the lowest id). Cells without
/// votes stay void.
BlueprintRaster mvr_blueprint(std::span<const View> views, const BlueprintBounds& bounds, GridSize res);

struct NerfTopConfig {
    std::vector<double> heights;
    int samples_per_ray = 64;
};

/// 16 heights spread uniformly over [0.1, 0.95] of the room height.
NerfTopConfig default_nerf_top_config(const Scene& scene);

/// Top view of the proxy from a single starting height: per cell, a ray cast
/// straight down takes the label of its max-weight sample.
BlueprintRaster nerf_top_at_height(const VolumeProxy& proxy, double height, int samples_per_ray,
                                   const BlueprintBounds& bounds, GridSize res, int threads = 1);

struct NerfTopResult {
    BlueprintRaster raster;
    double best_height = 0.0;
    std::vector<double> fwiou_per_height;
};

/// Renders every configured height and keeps the one with the best fwIoU
/// against `gt` (earliest height on ties).
NerfTopResult nerf_top_blueprint(const VolumeProxy& proxy, const NerfTopConfig& cfg, const BlueprintBounds& bounds,
                                 GridSize res, const BlueprintRaster& gt, int threads = 1);

} // namespace blueprint
