/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "blueprint/geometry.hpp"
#include "blueprint/error.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>

namespace blueprint {

void CameraParams::validate() const
{
    if (!(fx > 0.0) || !(fy > 0.0)) {
        throw Error("degenerate intrinsics");
    }
    if (width < 1 || height < 1) {
        throw Error("invalid image size");
    }
    const double ortho = (R.transpose() * R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    if (!(ortho < 1e-9) || !(R.determinant() > 0.0)) {
        throw Error("rotation is not orthonormal");
    }
    if (!t.allFinite() || !std::isfinite(cx) || !std::isfinite(cy)) {
        throw Error("non-finite camera parameters");
    }
}

Eigen::Vector3d CameraParams::ray_direction(double u, double v) const
{
    const Eigen::Vector3d d_cam((u - cx) / fx, (v - cy) / fy, 1.0);
    return R.transpose() * d_cam;
}

ProjectionMatrix build_projection(const CameraParams& cam)
{
    cam.validate();

    Eigen::Matrix4d intrinsic = Eigen::Matrix4d::Identity();
    intrinsic(0, 0) = cam.fx;
    intrinsic(1, 1) = cam.fy;
    intrinsic(0, 2) = cam.cx;
    intrinsic(1, 2) = cam.cy;

    Eigen::Matrix4d extrinsic = Eigen::Matrix4d::Identity();
    extrinsic.topLeftCorner<3, 3>() = cam.R;
    extrinsic.topRightCorner<3, 1>() = cam.t;

    // Both blocks have closed-form inverses; composing those is more accurate
    // than a generic 4x4 inversion.
    Eigen::Matrix4d intrinsic_inv = Eigen::Matrix4d::Identity();
    intrinsic_inv(0, 0) = 1.0 / cam.fx;
    intrinsic_inv(1, 1) = 1.0 / cam.fy;
    intrinsic_inv(0, 2) = -cam.cx / cam.fx;
    intrinsic_inv(1, 2) = -cam.cy / cam.fy;

    Eigen::Matrix4d extrinsic_inv = Eigen::Matrix4d::Identity();
    extrinsic_inv.topLeftCorner<3, 3>() = cam.R.transpose();
    extrinsic_inv.topRightCorner<3, 1>() = -cam.R.transpose() * cam.t;

    ProjectionMatrix proj;
    proj.M_inv = intrinsic * extrinsic;
    proj.M = extrinsic_inv * intrinsic_inv;
    return proj;
}

WorldPoint pixel_to_world(const ProjectionMatrix& proj, double u, double v, double d)
{
    if (!std::isfinite(d) || !(d > 0.0)) {
        throw Error("invalid depth");
    }
    const Eigen::Vector4d h = proj.M * Eigen::Vector4d(u * d, v * d, d, 1.0);
    return WorldPoint::from(h.head<3>() / h.w());
}

PixelDepth world_to_pixel(const ProjectionMatrix& proj, const WorldPoint& p)
{
    const Eigen::Vector4d h = proj.M_inv * Eigen::Vector4d(p.x, p.y, p.z, 1.0);
    const double d = h.z() / h.w();
    if (!(d > 1e-12)) {
        throw Error("behind camera");
    }
    return {h.x() / h.w() / d, h.y() / h.w() / d, d};
}

namespace {

std::optional<int> quantize(double value, double lo, double hi, int n)
{
    if (!(value >= lo) || !(value <= hi)) {
        return std::nullopt;
    }
    const double step = (hi - lo) / n;
    int idx = static_cast<int>(std::floor((value - lo) / step));
    return std::min(idx, n - 1);
}

} // namespace

std::optional<CellIndex> blueprint_to_cell(const BlueprintBounds& bounds, GridSize res, const BlueprintCoord& c)
{
    const auto i = quantize(c.x, bounds.x_min, bounds.x_max, res.nx);
    const auto j = quantize(c.y, bounds.y_min, bounds.y_max, res.ny);
    if (!i || !j) {
        return std::nullopt;
    }
    return CellIndex{*i, *j};
}

BlueprintCoord cell_center(const BlueprintBounds& bounds, GridSize res, CellIndex cell)
{
    return {bounds.x_min + (cell.i + 0.5) * bounds.width() / res.nx,
            bounds.y_min + (cell.j + 0.5) * bounds.depth() / res.ny};
}

Eigen::Matrix3d look_rotation(double yaw, double pitch)
{
    const Eigen::Vector3d up(0.0, 0.0, 1.0);
    const Eigen::Vector3d forward(std::cos(yaw) * std::cos(pitch), std::sin(yaw) * std::cos(pitch), -std::sin(pitch));
    const Eigen::Vector3d right = forward.cross(up).normalized();
    const Eigen::Vector3d down = forward.cross(right);

    Eigen::Matrix3d R;
    R.row(0) = right;
    R.row(1) = down;
    R.row(2) = forward;
    return R;
}

CameraParams make_camera(const Eigen::Vector3d& position, double yaw, double pitch, int width, int height,
                         double hfov_radians)
{
    CameraParams cam;
    cam.width = width;
    cam.height = height;
    cam.fx = 0.5 * width / std::tan(0.5 * hfov_radians);
    cam.fy = cam.fx;
    cam.cx = 0.5 * width;
    cam.cy = 0.5 * height;
    cam.R = look_rotation(yaw, pitch);
    cam.t = -cam.R * position;
    return cam;
}

nlohmann::json camera_to_json(const CameraParams& cam)
{
    nlohmann::json j;
    j["fx"] = cam.fx;
    j["fy"] = cam.fy;
    j["cx"] = cam.cx;
    j["cy"] = cam.cy;
    std::vector<double> r(9);
    for (int row = 0; row < 3; ++row) {
        for (int col = 0; col < 3; ++col) {
            r[row * 3 + col] = cam.R(row, col);
        }
    }
    j["R"] = r;
    j["t"] = {cam.t.x(), cam.t.y(), cam.t.z()};
    j["width"] = cam.width;
    j["height"] = cam.height;
    return j;
}

CameraParams camera_from_json(const nlohmann::json& j)
{
    CameraParams cam;
    try {
        cam.fx = j.at("fx").get<double>();
        cam.fy = j.at("fy").get<double>();
        cam.cx = j.at("cx").get<double>();
        cam.cy = j.at("cy").get<double>();
        const auto r = j.at("R").get<std::vector<double>>();
        const auto t = j.at("t").get<std::vector<double>>();
        if (r.size() != 9 || t.size() != 3) {
            throw Error("camera: R needs 9 values and t needs 3");
        }
        for (int row = 0; row < 3; ++row) {
            for (int col = 0; col < 3; ++col) {
                cam.R(row, col) = r[row * 3 + col];
            }
        }
        cam.t = Eigen::Vector3d(t[0], t[1], t[2]);
        cam.width = j.at("width").get<int>();
        cam.height = j.at("height").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("camera: ") + e.what());
    }
    cam.validate();
    return cam;
}

CameraParams load_camera(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open camera file " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("camera file " + path + ": " + e.what());
    }
    return camera_from_json(j);
}

void save_camera(const CameraParams& cam, const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path);
    }
    out << camera_to_json(cam).dump(2) << '\n';
}

} // namespace blueprint
