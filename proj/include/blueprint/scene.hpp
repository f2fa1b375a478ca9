/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "blueprint/geometry.hpp"
#include "blueprint/image.hpp"

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace blueprint {

/// Reserved label for "no prediction / unobserved".
inline constexpr int kVoidClass = 0;

struct Aabb {
    Eigen::Vector3d min = Eigen::Vector3d::Zero();
    Eigen::Vector3d max = Eigen::Vector3d::Ones();

    bool contains(const Eigen::Vector3d& p) const
    {
        return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
    }
    bool contains(const Aabb& other) const { return contains(other.min) && contains(other.max); }
    Eigen::Vector3d extent() const { return max - min; }
    double volume() const { return extent().prod(); }

    /// Slab test. Returns the parametric entry/exit of origin + s * dir, or
    /// nothing when the ray misses.
    std::optional<std::pair<double, double>> intersect(const Eigen::Vector3d& origin,
                                                       const Eigen::Vector3d& dir) const;
};

struct ClassInfo {
    int id = 0;
    std::string name;
    Rgb8 color{0, 0, 0};
};

struct Box {
    int class_id = 0;
    Aabb bounds;
    Rgb8 color{0, 0, 0};
};

/// Synthetic indoor scene: a room shell plus axis-aligned boxes. The room's
/// inner faces are labeled floor (z min), ceiling (z max) and wall (sides).
struct Scene {
    Aabb room;
    std::vector<ClassInfo> classes;
    int ceiling_class = 0;
    int floor_class = 0;
    int wall_class = 0;
    std::vector<Box> boxes;

    /// C_s, the largest registered class id. Labels live in [1, C_s].
    int num_classes() const;
    const ClassInfo* find_class(int id) const;
    Rgb8 class_color(int id) const;
    /// Colors indexed by class id, index 0 (void) black.
    std::vector<Rgb8> palette() const;
    BlueprintBounds floor_bounds() const;
    void validate() const;
};

Scene parse_scene(const nlohmann::json& j);
Scene load_scene(const std::string& path);
nlohmann::json scene_to_json(const Scene& scene);
void save_scene(const Scene& scene, const std::string& path);

/// Two rooms joined by a doorway, furnished with boxes. The bundled
/// benchmark scene.
Scene two_room_scene();

/// Labels of the bundled scene that experiments cull from the top view.
std::set<int> default_culled_classes(const Scene& scene);

struct View {
    CameraParams camera;
    Image<int> semantic;
    Image<double> depth; ///< optical-axis depth in meters, 0 = invalid
    Image<Rgb8> rgb;

    int width() const { return semantic.width; }
    int height() const { return semantic.height; }
};

/// Top-view label grid, cell (i, j) at index j * nx + i.
struct BlueprintRaster {
    BlueprintBounds bounds;
    GridSize size;
    std::vector<int> labels;

    BlueprintRaster() = default;
    BlueprintRaster(const BlueprintBounds& b, GridSize s, int fill = kVoidClass)
        : bounds(b), size(s), labels(s.cells(), fill)
    {
    }

    int& at(int i, int j) { return labels[static_cast<std::size_t>(j) * size.nx + i]; }
    int at(int i, int j) const { return labels[static_cast<std::size_t>(j) * size.nx + i]; }
    bool same_geometry(const BlueprintRaster& other) const
    {
        return bounds == other.bounds && size == other.size;
    }
};

struct SurfaceHit {
    double s = 0.0; ///< ray parameter of the hit
    int class_id = kVoidClass;
    Rgb8 color{0, 0, 0};
};

/// Nearest surface along origin + s * dir for s > 0. Ties resolve to the
/// lower class id so the result does not depend on primitive order.
std::optional<SurfaceHit> cast_ray(const Scene& scene, const Eigen::Vector3d& origin, const Eigen::Vector3d& dir);

/// Raycasts one sample per pixel center (u + 0.5, v + 0.5).
View render_view(const Scene& scene, const CameraParams& cam, int threads = 1);

BlueprintRaster ground_truth_blueprint(const Scene& scene, const BlueprintBounds& bounds, GridSize res,
                                       double h_max, const std::set<int>& culled);

struct TrajectoryConfig {
    int width = 80;
    int height = 60;
    double hfov_deg = 90.0;
    double eye_height = 1.5;
    double height_jitter = 0.1;
    double pitch_min_deg = 8.0;
    double pitch_max_deg = 18.0;
    /// Loop radii as a fraction of the room's half extents.
    double loop_scale = 0.65;
    double position_jitter = 0.1;
    double yaw_jitter_rad = 0.5;
    /// Minimum distance kept from walls and boxes.
    double clearance = 0.3;
};

/// Cameras on a loop around the room center. Candidate k depends only on
/// the seed and k, so shorter trajectories are prefixes of longer ones.
std::vector<CameraParams> sample_trajectory(const Scene& scene, int n, std::uint64_t seed,
                                            const TrajectoryConfig& cfg = {});

struct DepthNoise {
    double sigma_rel = 0.03;
    double dropout = 0.01;
};

/// Multiplicative Gaussian depth noise plus random dropout; labels untouched.
View degrade_depth(const View& view, double sigma_rel, double dropout, std::uint64_t seed);

} // namespace blueprint
