/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "blueprint/geometry.hpp"
#include "blueprint/scene.hpp"

#include <filesystem>
#include <numbers>
#include <random>
#include <string>

namespace testing {

/// Room [0,sx]x[0,sy]x[0,sz] with floor 1, wall 2, ceiling 3 and a box
/// class 4.
inline blueprint::Scene empty_room(double sx = 4.0, double sy = 4.0, double sz = 3.0)
{
    blueprint::Scene s;
    s.room = {{0.0, 0.0, 0.0}, {sx, sy, sz}};
    s.classes = {{1, "floor", {120, 100, 80}},
                 {2, "wall", {200, 200, 200}},
                 {3, "ceiling", {240, 240, 230}},
                 {4, "box", {40, 90, 200}},
                 {5, "other", {200, 60, 40}}};
    s.floor_class = 1;
    s.wall_class = 2;
    s.ceiling_class = 3;
    return s;
}

inline blueprint::Box box(int cls, Eigen::Vector3d lo, Eigen::Vector3d hi, const blueprint::Scene& s)
{
    return {cls, {lo, hi}, s.class_color(cls)};
}

/// Random valid camera inside a 10 m cube around the origin.
inline blueprint::CameraParams random_camera(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> pos(-5.0, 5.0);
    std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> pitch(-1.2, 1.2);
    std::uniform_real_distribution<double> f(30.0, 400.0);
    std::uniform_int_distribution<int> size(16, 640);
    auto cam = blueprint::make_camera({pos(rng), pos(rng), pos(rng)}, ang(rng), pitch(rng), size(rng), size(rng),
                                      1.2);
    cam.fx = f(rng);
    cam.fy = f(rng);
    cam.cx = cam.width * std::uniform_real_distribution<double>(0.3, 0.7)(rng);
    cam.cy = cam.height * std::uniform_real_distribution<double>(0.3, 0.7)(rng);
    return cam;
}

/// Fresh empty directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("blueprint_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace testing
