/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "blueprint/baselines.hpp"
#include "blueprint/dataset.hpp"
#include "blueprint/error.hpp"
#include "blueprint/metrics.hpp"
#include "blueprint/parallel.hpp"

#include <algorithm>

namespace blueprint {

BlueprintRaster mvr_blueprint(std::span<const View> views, const BlueprintBounds& bounds, GridSize res)
{
    if (views.empty()) {
        throw Error("MVR needs at least one view");
    }
    if (!bounds.valid() || res.nx < 1 || res.ny < 1) {
        throw Error("invalid blueprint geometry");
    }
    const ProjectedDataset data = project_dataset(views, bounds);
    int classes = 0;
    for (const auto& s : data.samples) {
        classes = std::max(classes, s.label);
    }
    const auto stride = static_cast<std::size_t>(classes) + 1;
    std::vector<std::uint32_t> votes(res.cells() * stride, 0);
    for (const auto& s : data.samples) {
        const auto cell = blueprint_to_cell(bounds, res, s.coord);
        if (!cell) {
            continue;
        }
        const std::size_t k = static_cast<std::size_t>(cell->j) * res.nx + cell->i;
        ++votes[k * stride + static_cast<std::size_t>(s.label)];
    }

    BlueprintRaster raster(bounds, res, kVoidClass);
    for (std::size_t k = 0; k < res.cells(); ++k) {
        std::uint32_t best = 0;
        for (std::size_t c = 1; c < stride; ++c) {
            if (votes[k * stride + c] > best) {
                best = votes[k * stride + c];
                raster.labels[k] = static_cast<int>(c);
            }
        }
    }
    return raster;
}

NerfTopConfig default_nerf_top_config(const Scene& scene)
{
    NerfTopConfig cfg;
    const double h = scene.room.extent().z();
    constexpr int kHeights = 16;
    for (int k = 0; k < kHeights; ++k) {
        const double f = 0.1 + (0.95 - 0.1) * k / (kHeights - 1);
        cfg.heights.push_back(scene.room.min.z() + f * h);
    }
    return cfg;
}

BlueprintRaster nerf_top_at_height(const VolumeProxy& proxy, double height, int samples_per_ray,
                                   const BlueprintBounds& bounds, GridSize res, int threads)
{
    if (samples_per_ray < 2) {
        throw Error("samples_per_ray must be at least 2");
    }
    BlueprintRaster raster(bounds, res, kVoidClass);
    const Eigen::Vector3d down(0.0, 0.0, -1.0);
    const double s_far = height - proxy.bounds.min.z();
    parallel_for(static_cast<std::size_t>(res.ny), threads, [&](std::size_t j0, std::size_t j1) {
        for (auto j = static_cast<int>(j0); j < static_cast<int>(j1); ++j) {
            for (int i = 0; i < res.nx; ++i) {
                const BlueprintCoord c = cell_center(bounds, res, {i, j});
                const RayResult r =
                    march_ray(proxy, Eigen::Vector3d(c.x, c.y, height), down, 0.0, s_far, samples_per_ray, nullptr);
                raster.at(i, j) = r.label;
            }
        }
    });
    return raster;
}

NerfTopResult nerf_top_blueprint(const VolumeProxy& proxy, const NerfTopConfig& cfg, const BlueprintBounds& bounds,
                                 GridSize res, const BlueprintRaster& gt, int threads)
{
    if (cfg.heights.empty()) {
        throw Error("NeRF-top needs at least one height");
    }
    for (double h : cfg.heights) {
        if (h < proxy.room.min.z() || h > proxy.room.max.z()) {
            throw Error("NeRF-top height outside the room");
        }
    }
    NerfTopResult best;
    double best_fwiou = -1.0;
    for (double h : cfg.heights) {
        BlueprintRaster raster = nerf_top_at_height(proxy, h, cfg.samples_per_ray, bounds, res, threads);
        const double fw = evaluate(raster, gt).fwiou;
        best.fwiou_per_height.push_back(fw);
        if (fw > best_fwiou) {
            best_fwiou = fw;
            best.best_height = h;
            best.raster = std::move(raster);
        }
    }
    return best;
}

} // namespace blueprint
