/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "blueprint/scene.hpp"
#include "blueprint/error.hpp"
#include "blueprint/parallel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

namespace blueprint {

Rgb8 to_rgb8(const Color& c)
{
    Rgb8 out{};
    for (int k = 0; k < 3; ++k) {
        out[k] = static_cast<std::uint8_t>(std::lround(std::clamp(c[k], 0.0, 1.0) * 255.0));
    }
    return out;
}

std::optional<std::pair<double, double>> Aabb::intersect(const Eigen::Vector3d& origin,
                                                         const Eigen::Vector3d& dir) const
{
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        if (dir[a] == 0.0) {
            if (origin[a] < min[a] || origin[a] > max[a]) {
                return std::nullopt;
            }
            continue;
        }
        const double inv = 1.0 / dir[a];
        double near = (min[a] - origin[a]) * inv;
        double far = (max[a] - origin[a]) * inv;
        if (near > far) {
            std::swap(near, far);
        }
        t0 = std::max(t0, near);
        t1 = std::min(t1, far);
    }
    if (t0 > t1) {
        return std::nullopt;
    }
    return std::make_pair(t0, t1);
}

int Scene::num_classes() const
{
    int n = 0;
    for (const auto& c : classes) {
        n = std::max(n, c.id);
    }
    return n;
}

const ClassInfo* Scene::find_class(int id) const
{
    for (const auto& c : classes) {
        if (c.id == id) {
            return &c;
        }
    }
    return nullptr;
}

Rgb8 Scene::class_color(int id) const
{
    const auto* c = find_class(id);
    return c ? c->color : Rgb8{0, 0, 0};
}

std::vector<Rgb8> Scene::palette() const
{
    std::vector<Rgb8> p(static_cast<std::size_t>(num_classes()) + 1, Rgb8{0, 0, 0});
    for (const auto& c : classes) {
        p[static_cast<std::size_t>(c.id)] = c.color;
    }
    return p;
}

BlueprintBounds Scene::floor_bounds() const
{
    return {room.min.x(), room.max.x(), room.min.y(), room.max.y()};
}

void Scene::validate() const
{
    if (!(room.min.array() < room.max.array()).all()) {
        throw Error("degenerate room bounds");
    }
    for (std::size_t a = 0; a < classes.size(); ++a) {
        if (classes[a].id == kVoidClass) {
            throw Error("class 0 reserved");
        }
        if (classes[a].id < 0) {
            throw Error("negative class id");
        }
        for (std::size_t b = a + 1; b < classes.size(); ++b) {
            if (classes[a].id == classes[b].id) {
                throw Error("duplicate class id " + std::to_string(classes[a].id));
            }
        }
    }
    for (int id : {ceiling_class, floor_class, wall_class}) {
        if (id == kVoidClass) {
            throw Error("class 0 reserved");
        }
        if (!find_class(id)) {
            throw Error("unknown class id " + std::to_string(id));
        }
    }
    for (const auto& b : boxes) {
        if (b.class_id == kVoidClass) {
            throw Error("class 0 reserved");
        }
        if (!find_class(b.class_id)) {
            throw Error("unknown class id " + std::to_string(b.class_id));
        }
        if (!(b.bounds.min.array() < b.bounds.max.array()).all()) {
            throw Error("degenerate primitive");
        }
        if (!room.contains(b.bounds)) {
            throw Error("primitive out of bounds");
        }
    }
}

namespace {

Eigen::Vector3d vec3(const nlohmann::json& j, const char* what)
{
    const auto v = j.get<std::vector<double>>();
    if (v.size() != 3) {
        throw Error(std::string("scene: ") + what + " needs 3 numbers");
    }
    return {v[0], v[1], v[2]};
}

Rgb8 rgb(const nlohmann::json& j)
{
    const auto v = j.get<std::vector<int>>();
    if (v.size() != 3) {
        throw Error("scene: color needs 3 numbers");
    }
    Rgb8 c{};
    for (int k = 0; k < 3; ++k) {
        c[k] = static_cast<std::uint8_t>(std::clamp(v[k], 0, 255));
    }
    return c;
}

} // namespace

Scene parse_scene(const nlohmann::json& j)
{
    Scene scene;
    try {
        scene.room.min = vec3(j.at("room").at("min"), "room.min");
        scene.room.max = vec3(j.at("room").at("max"), "room.max");
        for (const auto& c : j.at("classes")) {
            scene.classes.push_back({c.at("id").get<int>(), c.value("name", std::string{}), rgb(c.at("color"))});
        }
        scene.ceiling_class = j.at("ceiling_class").get<int>();
        scene.floor_class = j.at("floor_class").get<int>();
        scene.wall_class = j.value("wall_class", scene.floor_class);
        for (const auto& b : j.at("boxes")) {
            Box box;
            box.class_id = b.at("class").get<int>();
            box.bounds.min = vec3(b.at("min"), "box.min");
            box.bounds.max = vec3(b.at("max"), "box.max");
            if (box.class_id == kVoidClass) {
                throw Error("class 0 reserved");
            }
            box.color = b.contains("color") ? rgb(b.at("color")) : Rgb8{0, 0, 0};
            if (!b.contains("color")) {
                for (const auto& c : scene.classes) {
                    if (c.id == box.class_id) {
                        box.color = c.color;
                    }
                }
            }
            scene.boxes.push_back(box);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("scene: ") + e.what());
    }
    scene.validate();
    return scene;
}

Scene load_scene(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open scene file " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("scene file " + path + ": " + e.what());
    }
    return parse_scene(j);
}

nlohmann::json scene_to_json(const Scene& scene)
{
    nlohmann::json j;
    j["room"] = {{"min", {scene.room.min.x(), scene.room.min.y(), scene.room.min.z()}},
                 {"max", {scene.room.max.x(), scene.room.max.y(), scene.room.max.z()}}};
    j["classes"] = nlohmann::json::array();
    for (const auto& c : scene.classes) {
        j["classes"].push_back({{"id", c.id}, {"name", c.name}, {"color", {c.color[0], c.color[1], c.color[2]}}});
    }
    j["ceiling_class"] = scene.ceiling_class;
    j["floor_class"] = scene.floor_class;
    j["wall_class"] = scene.wall_class;
    j["boxes"] = nlohmann::json::array();
    for (const auto& b : scene.boxes) {
        nlohmann::json box = {{"class", b.class_id},
                              {"min", {b.bounds.min.x(), b.bounds.min.y(), b.bounds.min.z()}},
                              {"max", {b.bounds.max.x(), b.bounds.max.y(), b.bounds.max.z()}}};
        if (b.color != scene.class_color(b.class_id)) {
            box["color"] = {b.color[0], b.color[1], b.color[2]};
        }
        j["boxes"].push_back(box);
    }
    return j;
}

void save_scene(const Scene& scene, const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path);
    }
    out << scene_to_json(scene).dump(2) << '\n';
}

Scene two_room_scene()
{
    Scene s;
    s.room.min = {0.0, 0.0, 0.0};
    s.room.max = {10.0, 6.0, 2.8};
    s.classes = {
        {1, "floor", {150, 120, 90}},   {2, "wall", {200, 200, 200}}, {3, "ceiling", {240, 240, 220}},
        {4, "bed", {70, 110, 200}},     {5, "table", {160, 82, 45}},  {6, "chair", {230, 160, 40}},
        {7, "sofa", {60, 160, 90}},     {8, "cabinet", {120, 60, 150}}, {9, "vase", {220, 40, 60}},
        {10, "lamp", {250, 250, 120}},
    };
    s.floor_class = 1;
    s.wall_class = 2;
    s.ceiling_class = 3;

    auto add = [&](int cls, Eigen::Vector3d lo, Eigen::Vector3d hi) {
        s.boxes.push_back({cls, {lo, hi}, s.class_color(cls)});
    };
    // Outer walls with thickness, so the top view shows them.
    add(2, {0.0, 0.0, 0.0}, {10.0, 0.1, 2.8});
    add(2, {0.0, 5.9, 0.0}, {10.0, 6.0, 2.8});
    add(2, {0.0, 0.1, 0.0}, {0.1, 5.9, 2.8});
    add(2, {9.9, 0.1, 0.0}, {10.0, 5.9, 2.8});
    // Partition wall with a doorway between y = 2.4 and y = 3.6.
    add(2, {4.9, 0.1, 0.0}, {5.1, 2.4, 2.8});
    add(2, {4.9, 3.6, 0.0}, {5.1, 5.9, 2.8});
    // Living room.
    add(7, {0.4, 0.3, 0.0}, {2.6, 1.2, 0.8});
    add(5, {1.5, 2.6, 0.70}, {3.1, 3.8, 0.76});
    add(9, {2.2, 3.0, 0.76}, {2.4, 3.2, 1.06});
    add(6, {0.9, 2.9, 0.0}, {1.35, 3.4, 0.9});
    add(6, {3.3, 2.9, 0.0}, {3.75, 3.4, 0.9});
    add(8, {4.2, 4.4, 0.0}, {4.85, 5.9, 1.8});
    // Bedroom.
    add(4, {7.6, 0.2, 0.0}, {9.7, 2.4, 0.6});
    add(8, {5.2, 5.2, 0.0}, {6.4, 5.9, 2.0});
    add(5, {8.6, 4.0, 0.72}, {9.7, 5.6, 0.78});
    add(6, {8.0, 4.5, 0.0}, {8.5, 5.0, 0.9});
    add(10, {7.3, 2.8, 2.3}, {7.7, 3.2, 2.6});
    s.validate();
    return s;
}

std::set<int> default_culled_classes(const Scene& scene)
{
    std::set<int> culled{scene.ceiling_class};
    for (const auto& c : scene.classes) {
        if (c.name == "lamp") {
            culled.insert(c.id);
        }
    }
    return culled;
}

std::optional<SurfaceHit> cast_ray(const Scene& scene, const Eigen::Vector3d& origin, const Eigen::Vector3d& dir)
{
    std::optional<SurfaceHit> best;
    auto consider = [&](double s, int cls, const Rgb8& color) {
        if (!(s > 0.0)) {
            return;
        }
        if (!best || s < best->s || (s == best->s && cls < best->class_id)) {
            best = SurfaceHit{s, cls, color};
        }
    };

    for (const auto& b : scene.boxes) {
        if (const auto hit = b.bounds.intersect(origin, dir)) {
            consider(hit->first, b.class_id, b.color);
        }
    }

    // Inside faces of the room: the exit point of the room box.
    double exit = std::numeric_limits<double>::infinity();
    int exit_axis = -1;
    bool exit_max = false;
    for (int a = 0; a < 3; ++a) {
        if (dir[a] == 0.0) {
            continue;
        }
        const bool towards_max = dir[a] > 0.0;
        const double plane = towards_max ? scene.room.max[a] : scene.room.min[a];
        const double s = (plane - origin[a]) / dir[a];
        if (s < exit) {
            exit = s;
            exit_axis = a;
            exit_max = towards_max;
        }
    }
    if (exit_axis >= 0) {
        int cls = scene.wall_class;
        if (exit_axis == 2) {
            cls = exit_max ? scene.ceiling_class : scene.floor_class;
        }
        consider(exit, cls, scene.class_color(cls));
    }
    return best;
}

View render_view(const Scene& scene, const CameraParams& cam, int threads)
{
    cam.validate();
    View view;
    view.camera = cam;
    view.semantic = Image<int>(cam.width, cam.height, kVoidClass);
    view.depth = Image<double>(cam.width, cam.height, 0.0);
    view.rgb = Image<Rgb8>(cam.width, cam.height, Rgb8{0, 0, 0});

    const Eigen::Vector3d origin = cam.center();
    parallel_for(static_cast<std::size_t>(cam.height), threads, [&](std::size_t v0, std::size_t v1) {
        for (auto v = static_cast<int>(v0); v < static_cast<int>(v1); ++v) {
            for (int u = 0; u < cam.width; ++u) {
                const auto hit = cast_ray(scene, origin, cam.ray_direction(u + 0.5, v + 0.5));
                if (!hit) {
                    continue;
                }
                // The direction has unit camera-frame z, so s is the z-depth.
                view.depth.at(u, v) = hit->s;
                view.semantic.at(u, v) = hit->class_id;
                view.rgb.at(u, v) = hit->color;
            }
        }
    });
    return view;
}

BlueprintRaster ground_truth_blueprint(const Scene& scene, const BlueprintBounds& bounds, GridSize res,
                                       double h_max, const std::set<int>& culled)
{
    if (!bounds.valid() || res.nx < 1 || res.ny < 1) {
        throw Error("invalid blueprint geometry");
    }
    BlueprintRaster raster(bounds, res, scene.floor_class);
    for (int j = 0; j < res.ny; ++j) {
        for (int i = 0; i < res.nx; ++i) {
            const BlueprintCoord c = cell_center(bounds, res, {i, j});
            double best_top = -std::numeric_limits<double>::infinity();
            int best_class = scene.floor_class;
            for (const auto& b : scene.boxes) {
                if (b.class_id == scene.ceiling_class || culled.count(b.class_id)) {
                    continue;
                }
                if (c.x < b.bounds.min.x() || c.x > b.bounds.max.x() || c.y < b.bounds.min.y() ||
                    c.y > b.bounds.max.y() || b.bounds.min.z() > h_max) {
                    continue;
                }
                // A ray starting inside the box hits it at h_max.
                const double top = std::min(b.bounds.max.z(), h_max);
                if (top > best_top || (top == best_top && b.class_id < best_class)) {
                    best_top = top;
                    best_class = b.class_id;
                }
            }
            raster.at(i, j) = best_class;
        }
    }
    return raster;
}

std::vector<CameraParams> sample_trajectory(const Scene& scene, int n, std::uint64_t seed,
                                            const TrajectoryConfig& cfg)
{
    if (n < 1) {
        throw Error("trajectory needs at least one frame");
    }
    constexpr double kGoldenFraction = 0.6180339887498949;
    const double deg = std::numbers::pi / 180.0;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    const Eigen::Vector3d center = 0.5 * (scene.room.min + scene.room.max);
    const Eigen::Vector3d half = 0.5 * scene.room.extent();
    const double phase = unit(rng);

    std::vector<CameraParams> cams;
    cams.reserve(static_cast<std::size_t>(n));
    const long max_candidates = 1000L * n + 1000L;
    for (long k = 0; static_cast<int>(cams.size()) < n; ++k) {
        if (k >= max_candidates) {
            throw Error("could not place cameras inside the room");
        }
        // Every candidate consumes the same number of draws, so candidate k
        // is a function of (seed, k) alone.
        const double jx = normal(rng);
        const double jy = normal(rng);
        const double jz = unit(rng);
        const double jyaw = unit(rng);
        const double jpitch = unit(rng);

        double s = phase + static_cast<double>(k) * kGoldenFraction;
        s -= std::floor(s);
        const double angle = 2.0 * std::numbers::pi * s;
        const Eigen::Vector3d pos(center.x() + cfg.loop_scale * half.x() * std::cos(angle) + cfg.position_jitter * jx,
                                  center.y() + cfg.loop_scale * half.y() * std::sin(angle) + cfg.position_jitter * jy,
                                  scene.room.min.z() + cfg.eye_height + cfg.height_jitter * (2.0 * jz - 1.0));

        const Eigen::Vector3d margin = Eigen::Vector3d::Constant(cfg.clearance);
        Aabb inner{scene.room.min + margin, scene.room.max - margin};
        bool ok = inner.contains(pos);
        for (const auto& b : scene.boxes) {
            if (Aabb{b.bounds.min - margin, b.bounds.max + margin}.contains(pos)) {
                ok = false;
            }
        }
        if (!ok) {
            continue;
        }
        const double yaw = angle + 0.5 * std::numbers::pi + cfg.yaw_jitter_rad * (2.0 * jyaw - 1.0);
        const double pitch = (cfg.pitch_min_deg + (cfg.pitch_max_deg - cfg.pitch_min_deg) * jpitch) * deg;
        cams.push_back(make_camera(pos, yaw, pitch, cfg.width, cfg.height, cfg.hfov_deg * deg));
    }
    return cams;
}

View degrade_depth(const View& view, double sigma_rel, double dropout, std::uint64_t seed)
{
    if (!(sigma_rel >= 0.0) || !(dropout >= 0.0 && dropout <= 1.0)) {
        throw Error("invalid depth noise parameters");
    }
    View out = view;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (auto& d : out.depth.pixels) {
        const double n = normal(rng);
        const double u = unit(rng);
        if (!(d > 0.0)) {
            continue;
        }
        if (u < dropout) {
            d = 0.0;
            continue;
        }
        if (sigma_rel > 0.0) {
            d *= std::max(1.0 + sigma_rel * n, 1e-3);
        }
    }
    return out;
}

} // namespace blueprint
