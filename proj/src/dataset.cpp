/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "blueprint/dataset.hpp"

#include <cmath>

namespace blueprint {

ProjectedDataset project_dataset(std::span<const View> views, const BlueprintBounds& bounds)
{
    ProjectedDataset out;
    for (const auto& view : views) {
        const ProjectionMatrix proj = build_projection(view.camera);
        for (int v = 0; v < view.height(); ++v) {
            for (int u = 0; u < view.width(); ++u) {
                const double d = view.depth.at(u, v);
                const int label = view.semantic.at(u, v);
                if (!std::isfinite(d) || !(d > 0.0)) {
                    ++out.skipped_invalid_depth;
                    continue;
                }
                if (label == kVoidClass) {
                    ++out.skipped_void_label;
                    continue;
                }
                const WorldPoint p = pixel_to_world(proj, u + 0.5, v + 0.5, d);
                const BlueprintCoord c = world_to_blueprint(p);
                if (!bounds.contains(c)) {
                    ++out.skipped_out_of_bounds;
                    continue;
                }
                out.samples.push_back({c, label, p.z});
            }
        }
    }
    return out;
}

} // namespace blueprint
