/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>

namespace blueprint {

/// Pinhole camera. [R|t] maps world to camera coordinates (x right, y down,
/// z forward). The world up axis is +z and the floor is the XY plane.
struct CameraParams {
    double fx = 1.0;
    double fy = 1.0;
    double cx = 0.0;
    double cy = 0.0;
    Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
    Eigen::Vector3d t = Eigen::Vector3d::Zero();
    int width = 1;
    int height = 1;

    /// Throws blueprint::Error when the rotation is not a proper rotation,
    /// focal lengths are not positive or the image is empty.
    void validate() const;

    /// Camera center in world coordinates, -R^T t.
    Eigen::Vector3d center() const { return -R.transpose() * t; }

    /// World-space direction through pixel (u, v), scaled so its camera-frame
    /// z component is 1. Marching it by s therefore reaches z-depth s.
    Eigen::Vector3d ray_direction(double u, double v) const;
};

/// Homogeneous 4x4 mapping (u*d, v*d, d, 1) to world coordinates and back.
struct ProjectionMatrix {
    Eigen::Matrix4d M = Eigen::Matrix4d::Identity();
    Eigen::Matrix4d M_inv = Eigen::Matrix4d::Identity();
};

struct WorldPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Eigen::Vector3d vec() const { return {x, y, z}; }
    static WorldPoint from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
};

struct BlueprintCoord {
    double x = 0.0;
    double y = 0.0;
};

/// Pixel coordinates plus optical-axis depth.
struct PixelDepth {
    double u = 0.0;
    double v = 0.0;
    double d = 0.0;
};

struct BlueprintBounds {
    double x_min = 0.0;
    double x_max = 1.0;
    double y_min = 0.0;
    double y_max = 1.0;

    bool valid() const { return x_min < x_max && y_min < y_max; }
    bool contains(const BlueprintCoord& c) const
    {
        return c.x >= x_min && c.x <= x_max && c.y >= y_min && c.y <= y_max;
    }
    double width() const { return x_max - x_min; }
    double depth() const { return y_max - y_min; }

    friend bool operator==(const BlueprintBounds&, const BlueprintBounds&) = default;
};

struct GridSize {
    int nx = 1;
    int ny = 1;

    std::size_t cells() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    friend bool operator==(const GridSize&, const GridSize&) = default;
};

struct CellIndex {
    int i = 0;
    int j = 0;

    friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

ProjectionMatrix build_projection(const CameraParams& cam);

/// Back-projects pixel (u, v) at z-depth d to the world. Throws "invalid depth"
/// for d <= 0 or non-finite d.
WorldPoint pixel_to_world(const ProjectionMatrix& proj, double u, double v, double d);

inline BlueprintCoord world_to_blueprint(const WorldPoint& p) { return {p.x, p.y}; }

/// Inverse of pixel_to_world. Throws "behind camera" when the point does not
/// lie strictly in front of the image plane.
PixelDepth world_to_pixel(const ProjectionMatrix& proj, const WorldPoint& p);

/// Floor quantization of a floor-plane coordinate. Each cell owns its lower
/// edges; the global max edges belong to the last row/column.
std::optional<CellIndex> blueprint_to_cell(const BlueprintBounds& bounds, GridSize res, const BlueprintCoord& c);

/// Center of cell (i, j) in floor-plane coordinates.
BlueprintCoord cell_center(const BlueprintBounds& bounds, GridSize res, CellIndex cell);

/// Rotation for a camera at yaw (radians, CCW from +x) pitched down by `pitch`.
Eigen::Matrix3d look_rotation(double yaw, double pitch);

/// Camera at `position` with the given orientation and a horizontal field of view.
CameraParams make_camera(const Eigen::Vector3d& position, double yaw, double pitch, int width, int height,
                         double hfov_radians);

nlohmann::json camera_to_json(const CameraParams& cam);
CameraParams camera_from_json(const nlohmann::json& j);
CameraParams load_camera(const std::string& path);
void save_camera(const CameraParams& cam, const std::string& path);

} // namespace blueprint
