/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "blueprint/error.hpp"
#include "blueprint/scene.hpp"
#include "helpers.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <random>

using namespace blueprint;
using testing::box;
using testing::empty_room;

namespace {

/// Distance from p to the nearest face of an AABB's boundary.
double distance_to_boundary(const Aabb& b, const Eigen::Vector3d& p)
{
    const bool inside = b.contains(p);
    if (inside) {
        double d = 1e300;
        for (int a = 0; a < 3; ++a) {
            d = std::min({d, p[a] - b.min[a], b.max[a] - p[a]});
        }
        return d;
    }
    Eigen::Vector3d q;
    for (int a = 0; a < 3; ++a) {
        q[a] = std::clamp(p[a], b.min[a], b.max[a]);
    }
    return (p - q).norm();
}

/// Reference blueprint label: march a vertical probe down from h_max and
/// report the first non-culled box it is inside (lowest id on ties).
int column_label(const Scene& s, double x, double y, double h_max, const std::set<int>& culled)
{
    for (double z = h_max; z > 0.0; z -= 1e-3) {
        int hit = 0;
        for (const auto& b : s.boxes) {
            if (culled.count(b.class_id) || b.class_id == s.ceiling_class) {
                continue;
            }
            if (b.bounds.contains(Eigen::Vector3d(x, y, z)) && (hit == 0 || b.class_id < hit)) {
                hit = b.class_id;
            }
        }
        if (hit != 0) {
            return hit;
        }
    }
    return s.floor_class;
}

} // namespace

TEST_CASE("wall straight ahead renders at its analytic depth")
{
    const Scene s = empty_room(4, 4, 3);
    const auto cam = make_camera({1, 2, 1.5}, 0.0, 0.0, 41, 31, 1.2);
    const View v = render_view(s, cam);
    CHECK(v.width() == 41);
    CHECK(v.height() == 31);
    CHECK(std::abs(v.depth.at(20, 15) - 3.0) < 1e-9);
    CHECK(v.semantic.at(20, 15) == s.wall_class);
    // A fronto-parallel wall has constant z-depth.
    CHECK(std::abs(v.depth.at(25, 12) - 3.0) < 1e-9);
}

TEST_CASE("occluding box wins over the wall behind it")
{
    Scene s = empty_room(4, 4, 3);
    s.boxes.push_back(box(4, {2.5, 0.5, 0.0}, {2.7, 3.5, 2.9}, s));
    const auto cam = make_camera({1, 2, 1.5}, 0.0, 0.0, 21, 21, 0.6);
    const View v = render_view(s, cam);
    for (int vv = 0; vv < v.height(); ++vv) {
        for (int u = 0; u < v.width(); ++u) {
            CHECK(v.semantic.at(u, vv) == 4);
            CHECK(std::abs(v.depth.at(u, vv) - 1.5) < 1e-9);
        }
    }
}

TEST_CASE("rendered points lie on a surface")
{
    const Scene s = two_room_scene();
    const auto cams = sample_trajectory(s, 4, 3);
    for (const auto& cam : cams) {
        const View v = render_view(s, cam);
        const auto proj = build_projection(cam);
        double worst = 0.0;
        for (int vv = 0; vv < v.height(); vv += 3) {
            for (int u = 0; u < v.width(); u += 3) {
                const double d = v.depth.at(u, vv);
                REQUIRE(d > 0.0);
                const auto p = pixel_to_world(proj, u + 0.5, vv + 0.5, d).vec();
                double best = distance_to_boundary(s.room, p);
                for (const auto& b : s.boxes) {
                    best = std::min(best, distance_to_boundary(b.bounds, p));
                }
                worst = std::max(worst, best);
            }
        }
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("rendering is deterministic and thread independent")
{
    const Scene s = two_room_scene();
    const auto cam = sample_trajectory(s, 1, 0).front();
    const View a = render_view(s, cam, 1);
    const View b = render_view(s, cam, 1);
    const View c = render_view(s, cam, 3);
    CHECK(a.semantic == b.semantic);
    CHECK(a.depth == b.depth);
    CHECK(a.rgb == b.rgb);
    CHECK(a.depth == c.depth);
    CHECK(a.semantic == c.semantic);
}

TEST_CASE("ground truth of an empty room is all floor")
{
    const Scene s = empty_room();
    const auto gt = ground_truth_blueprint(s, s.floor_bounds(), {8, 8}, 2.0, {s.ceiling_class});
    CHECK(std::all_of(gt.labels.begin(), gt.labels.end(), [&](int l) { return l == s.floor_class; }));
}

TEST_CASE("ground truth matches a column oracle")
{
    Scene s = empty_room(6, 5, 3);
    s.boxes.push_back(box(4, {1.0, 1.0, 0.0}, {2.0, 3.0, 0.8}, s));
    s.boxes.push_back(box(5, {1.5, 2.0, 0.8}, {1.8, 2.5, 1.2}, s));   // on top of the first
    s.boxes.push_back(box(5, {3.5, 0.5, 0.0}, {5.5, 1.5, 2.5}, s));   // taller than h_max
    s.boxes.push_back(box(4, {4.0, 3.0, 2.4}, {4.5, 3.5, 2.6}, s));   // above h_max
    const double h_max = 2.0;
    const std::set<int> culled{s.ceiling_class};
    const GridSize g{60, 50};
    const auto gt = ground_truth_blueprint(s, s.floor_bounds(), g, h_max, culled);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const auto c = cell_center(s.floor_bounds(), g, {i, j});
            CHECK(gt.at(i, j) == column_label(s, c.x, c.y, h_max, culled));
        }
    }
    // The tall box still labels its footprint when h_max cuts through it.
    const auto inside = blueprint_to_cell(s.floor_bounds(), g, {4.5, 1.0});
    REQUIRE(inside);
    CHECK(gt.at(inside->i, inside->j) == 5);

    SUBCASE("culled classes are skipped")
    {
        const auto culled_gt = ground_truth_blueprint(s, s.floor_bounds(), g, h_max, {s.ceiling_class, 5});
        CHECK(culled_gt.at(inside->i, inside->j) == s.floor_class);
    }
    SUBCASE("box order does not matter")
    {
        Scene r = s;
        std::reverse(r.boxes.begin(), r.boxes.end());
        CHECK(ground_truth_blueprint(r, r.floor_bounds(), g, h_max, culled).labels == gt.labels);
    }
}

TEST_CASE("trajectory properties")
{
    const Scene s = two_room_scene();
    const auto one = sample_trajectory(s, 1, 42);
    REQUIRE(one.size() == 1);
    CHECK(s.room.contains(one.front().center()));

    const auto a = sample_trajectory(s, 90, 42);
    const auto b = sample_trajectory(s, 90, 42);
    const auto nine = sample_trajectory(s, 9, 42);
    REQUIRE(a.size() == 90);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK((a[k].R - b[k].R).cwiseAbs().maxCoeff() == 0.0);
        CHECK((a[k].t - b[k].t).cwiseAbs().maxCoeff() == 0.0);
    }
    for (std::size_t k = 0; k < nine.size(); ++k) {
        CHECK((a[k].t - nine[k].t).cwiseAbs().maxCoeff() == 0.0);
        CHECK((a[k].R - nine[k].R).cwiseAbs().maxCoeff() == 0.0);
    }
    for (const auto& cam : a) {
        const auto c = cam.center();
        CHECK(s.room.contains(c));
        for (const auto& bx : s.boxes) {
            CHECK_FALSE(bx.bounds.contains(c));
        }
        // Pitched down: the optical axis points below the horizon.
        CHECK(cam.ray_direction(cam.cx, cam.cy).z() < 0.0);
    }
    CHECK_THROWS_AS(sample_trajectory(s, 0, 1), Error);
}

TEST_CASE("depth degradation")
{
    const Scene s = two_room_scene();
    const auto cams = sample_trajectory(s, 1, 2);
    const View v = render_view(s, cams.front());

    const View same = degrade_depth(v, 0.0, 0.0, 9);
    CHECK(same.depth == v.depth);
    CHECK(same.semantic == v.semantic);

    const View gone = degrade_depth(v, 0.0, 1.0, 9);
    CHECK(std::all_of(gone.depth.pixels.begin(), gone.depth.pixels.end(), [](double d) { return d == 0.0; }));
    CHECK(gone.semantic == v.semantic);

    TrajectoryConfig big;
    big.width = 400;
    big.height = 300;
    const View large = render_view(s, sample_trajectory(s, 1, 2, big).front());
    const View noisy = degrade_depth(large, 0.05, 0.0, 4);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < large.depth.pixels.size(); ++k) {
        sum += noisy.depth.pixels[k] / large.depth.pixels[k];
        ++n;
    }
    REQUIRE(n >= 100000);
    CHECK(std::abs(sum / n - 1.0) < 0.002);
    CHECK(degrade_depth(large, 0.05, 0.01, 4).depth == degrade_depth(large, 0.05, 0.01, 4).depth);
    CHECK_THROWS_AS(degrade_depth(v, -0.1, 0.0, 1), Error);
    CHECK_THROWS_AS(degrade_depth(v, 0.1, 1.5, 1), Error);
}

TEST_CASE("scene JSON parsing")
{
    const nlohmann::json minimal = {
        {"room", {{"min", {0, 0, 0}}, {"max", {3, 3, 2.5}}}},
        {"classes",
         {{{"id", 1}, {"name", "floor"}, {"color", {100, 100, 100}}},
          {{"id", 2}, {"name", "ceiling"}, {"color", {250, 250, 250}}},
          {{"id", 3}, {"name", "table"}, {"color", {150, 80, 20}}}}},
        {"ceiling_class", 2},
        {"floor_class", 1},
        {"boxes", {{{"class", 3}, {"min", {1, 1, 0}}, {"max", {2, 2, 0.7}}}}}};
    const Scene s = parse_scene(minimal);
    CHECK(s.boxes.size() == 1);
    CHECK(s.boxes.front().color == Rgb8{150, 80, 20});
    CHECK(s.wall_class == s.floor_class);

    auto bad = minimal;
    bad["boxes"][0]["class"] = 7;
    CHECK_THROWS_WITH_AS(parse_scene(bad), "unknown class id 7", Error);
    bad = minimal;
    bad["boxes"][0]["max"] = {2, 2, 3.0};
    CHECK_THROWS_WITH_AS(parse_scene(bad), "primitive out of bounds", Error);
    bad = minimal;
    bad["boxes"][0]["class"] = 0;
    CHECK_THROWS_AS(parse_scene(bad), Error);
    bad = minimal;
    bad.erase("room");
    CHECK_THROWS_AS(parse_scene(bad), Error);
    CHECK_THROWS_AS(load_scene("/nonexistent/scene.json"), Error);

    const Scene round = parse_scene(scene_to_json(two_room_scene()));
    CHECK(round.boxes.size() == two_room_scene().boxes.size());
    CHECK(scene_to_json(round) == scene_to_json(two_room_scene()));
}

TEST_CASE("bundled scene file matches the built-in scene")
{
    const Scene file = load_scene(std::string(BLUEPRINT_DATA_DIR) + "/scenes/two_room.json");
    CHECK(scene_to_json(file) == scene_to_json(two_room_scene()));
}
