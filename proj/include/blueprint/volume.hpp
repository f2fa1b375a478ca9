/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "blueprint/editing.hpp"
#include "blueprint/geometry.hpp"
#include "blueprint/image.hpp"
#include "blueprint/scene.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace blueprint {

inline constexpr double kSolidDensity = 100.0;

/// Voxelized stand-in for a trained radiance field. The interior grid covers
/// the room; one extra voxel layer outside each room face carries the floor,
/// ceiling and wall surfaces.
struct VolumeProxy {
    Aabb room;
    Aabb bounds; ///< room grown by one voxel on every side
    Eigen::Vector3i dims = Eigen::Vector3i::Ones();
    Eigen::Vector3d voxel = Eigen::Vector3d::Ones();
    std::vector<double> density;
    std::vector<Color> color;
    std::vector<int> labels;

    std::size_t index(int x, int y, int z) const
    {
        return (static_cast<std::size_t>(z) * dims.y() + y) * dims.x() + x;
    }
    /// Voxel containing p, clamped to the grid.
    std::size_t lookup(const Eigen::Vector3d& p) const;
    Eigen::Vector3d voxel_center(int x, int y, int z) const;
    std::size_t occupied_interior_voxels() const;
};

/// Voxels whose centers fall inside a box get `sigma_solid` and the box's
/// color and class; the outer shell layer gets the room surface classes.
VolumeProxy build_volume_proxy(const Scene& scene, double voxel_size, double sigma_solid = kSolidDensity);

/// Composited result of one ray.
struct RayResult {
    Color color{0.0, 0.0, 0.0};
    double depth = 0.0;       ///< weighted mean sample depth, 0 when empty
    double opacity = 0.0;     ///< sum of weights
    int label = kVoidClass;   ///< class of the max-weight sample
    bool in_mask = false;     ///< max-weight sample lies in a mask region
    bool touched = false;     ///< some sample fell inside an edit region
};

/// Emission-absorption compositing of `samples` uniform midpoint samples on
/// origin + s * dir, s in [s_near, s_far]. Reported depth is in units of s.
RayResult march_ray(const VolumeProxy& proxy, const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                    double s_near, double s_far, int samples, const EditSet* edits);

struct VolumeRender {
    Image<Color> rgb;
    Image<double> depth;
    Image<double> opacity;
    Image<std::uint8_t> mask;    ///< 1 where the max-weight sample is masked
    Image<std::uint8_t> touched; ///< 1 where the ray passed through an edit region
    Image<int> semantic;
};

/// Renders through pixel centers. `edits` may be null.
VolumeRender render_volume(const VolumeProxy& proxy, const CameraParams& cam, int samples_per_ray,
                           const EditSet* edits = nullptr, int threads = 1);

} // namespace blueprint
