/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "blueprint/baselines.hpp"
#include "blueprint/dataset.hpp"
#include "blueprint/error.hpp"
#include "blueprint/metrics.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <numbers>

using namespace blueprint;
using testing::box;
using testing::empty_room;

TEST_CASE("single floor-only view votes exactly where its pixels land")
{
    const Scene s = empty_room(40, 40, 3);
    const auto cam = make_camera({20, 20, 1.5}, 0.3, 1.2, 24, 18, 0.8);
    const View v = render_view(s, cam);
    REQUIRE(std::all_of(v.semantic.pixels.begin(), v.semantic.pixels.end(), [&](int l) { return l == s.floor_class; }));

    const GridSize g{80, 80};
    const auto bounds = s.floor_bounds();
    const auto raster = mvr_blueprint(std::span<const View>(&v, 1), bounds, g);

    // Hand projection of every pixel: the ray from the camera center
    // through the pixel meets z = 0.
    std::vector<int> expected(g.cells(), kVoidClass);
    const Eigen::Vector3d o = cam.center();
    for (int vv = 0; vv < v.height(); ++vv) {
        for (int u = 0; u < v.width(); ++u) {
            const Eigen::Vector3d d = cam.ray_direction(u + 0.5, vv + 0.5);
            const double t = -o.z() / d.z();
            const Eigen::Vector3d p = o + t * d;
            const auto cell = blueprint_to_cell(bounds, g, {p.x(), p.y()});
            REQUIRE(cell);
            expected[static_cast<std::size_t>(cell->j) * g.nx + cell->i] = s.floor_class;
        }
    }
    CHECK(raster.labels == expected);
}

TEST_CASE("views with no valid pixels give an all-void raster")
{
    const Scene s = empty_room();
    View v = render_view(s, make_camera({2, 2, 1.5}, 0.0, 0.0, 8, 6, 1.0));
    std::fill(v.depth.pixels.begin(), v.depth.pixels.end(), 0.0);
    const auto r = mvr_blueprint(std::span<const View>(&v, 1), s.floor_bounds(), {10, 10});
    CHECK(completeness(r) == 0.0);
    CHECK_THROWS_AS(mvr_blueprint({}, s.floor_bounds(), {10, 10}), Error);
}

TEST_CASE("majority vote with ties to the lowest id")
{
    const Scene s = empty_room(4, 4, 3);
    // One pixel per view, all landing in the same cell with different labels.
    auto one_pixel = [&](int label) {
        View v;
        v.camera = make_camera({2.05, 2.05, 1.0}, 0.0, std::numbers::pi / 2 - 1e-9, 1, 1, 0.1);
        v.semantic = Image<int>(1, 1, label);
        v.depth = Image<double>(1, 1, 1.0);
        v.rgb = Image<Rgb8>(1, 1, Rgb8{0, 0, 0});
        return v;
    };
    const GridSize g{4, 4};
    std::vector<View> views{one_pixel(4), one_pixel(2), one_pixel(4), one_pixel(2), one_pixel(5)};
    auto r = mvr_blueprint(views, s.floor_bounds(), g);
    CHECK(r.at(2, 2) == 2);
    views.push_back(one_pixel(4));
    r = mvr_blueprint(views, s.floor_bounds(), g);
    CHECK(r.at(2, 2) == 4);
    std::reverse(views.begin(), views.end());
    CHECK(mvr_blueprint(views, s.floor_bounds(), g).at(2, 2) == 4);
}

TEST_CASE("MVR is order invariant and completeness shrinks with fewer views")
{
    const Scene s = two_room_scene();
    const auto cams = sample_trajectory(s, 12, 5);
    std::vector<View> views;
    for (const auto& c : cams) {
        views.push_back(render_view(s, c));
    }
    const GridSize g{100, 60};
    const auto bounds = s.floor_bounds();
    const auto full = mvr_blueprint(views, bounds, g);
    auto shuffled = views;
    std::reverse(shuffled.begin(), shuffled.end());
    std::rotate(shuffled.begin(), shuffled.begin() + 5, shuffled.end());
    CHECK(mvr_blueprint(shuffled, bounds, g).labels == full.labels);

    double previous = 2.0;
    for (std::size_t n : {12u, 8u, 4u, 2u, 1u}) {
        const auto r = mvr_blueprint(std::span<const View>(views.data(), n), bounds, g);
        const double c = completeness(r);
        CHECK(c <= previous);
        previous = c;
    }
}

TEST_CASE("top-down rendering of an empty room is all floor")
{
    const Scene s = empty_room();
    const auto proxy = build_volume_proxy(s, 0.1);
    const auto bounds = s.floor_bounds();
    const GridSize g{20, 20};
    const BlueprintRaster gt(bounds, g, s.floor_class);
    for (double h : {0.3, 1.5, 2.9}) {
        const auto r = nerf_top_at_height(proxy, h, 64, bounds, g);
        CHECK(std::all_of(r.labels.begin(), r.labels.end(), [&](int l) { return l == s.floor_class; }));
    }
    const auto best = nerf_top_blueprint(proxy, default_nerf_top_config(s), bounds, g, gt);
    CHECK(evaluate(best.raster, gt).fwiou == 1.0);
}

TEST_CASE("starting height decides whether a slab is seen")
{
    Scene s = empty_room();
    s.boxes.push_back(box(4, {1.0, 1.0, 0.70}, {2.0, 2.0, 0.76}, s));
    const auto proxy = build_volume_proxy(s, 0.02);
    const auto bounds = s.floor_bounds();
    const GridSize g{40, 40};
    const auto inside = *blueprint_to_cell(bounds, g, {1.5, 1.5});
    const auto outside = *blueprint_to_cell(bounds, g, {3.0, 3.0});

    const auto above = nerf_top_at_height(proxy, 1.0, 256, bounds, g);
    CHECK(above.at(inside.i, inside.j) == 4);
    CHECK(above.at(outside.i, outside.j) == s.floor_class);
    const auto below = nerf_top_at_height(proxy, 0.5, 256, bounds, g);
    CHECK(below.at(inside.i, inside.j) == s.floor_class);

    const auto gt = ground_truth_blueprint(s, bounds, g, 2.0, {s.ceiling_class});
    NerfTopConfig cfg;
    cfg.samples_per_ray = 256;
    cfg.heights = {0.3, 0.5, 1.0, 2.0};
    const auto best = nerf_top_blueprint(proxy, cfg, bounds, g, gt);
    REQUIRE(best.fwiou_per_height.size() == 4);
    const double top = *std::max_element(best.fwiou_per_height.begin(), best.fwiou_per_height.end());
    CHECK(std::find(cfg.heights.begin(), cfg.heights.end(), best.best_height) != cfg.heights.end());
    CHECK(evaluate(best.raster, gt).fwiou == top);
    CHECK(best.best_height == 1.0); // earliest of the perfect heights
    CHECK(top == 1.0);

    cfg.heights = {3.5};
    CHECK_THROWS_AS(nerf_top_blueprint(proxy, cfg, bounds, g, gt), Error);
    cfg.heights.clear();
    CHECK_THROWS_AS(nerf_top_blueprint(proxy, cfg, bounds, g, gt), Error);
}

TEST_CASE("default heights")
{
    const Scene s = empty_room(4, 4, 2.0);
    const auto cfg = default_nerf_top_config(s);
    REQUIRE(cfg.heights.size() == 16);
    CHECK(cfg.heights.front() == doctest::Approx(0.2));
    CHECK(cfg.heights.back() == doctest::Approx(1.9));
}

TEST_CASE("top-down raster is thread independent")
{
    const Scene s = two_room_scene();
    const auto proxy = build_volume_proxy(s, 0.1);
    const auto a = nerf_top_at_height(proxy, 1.2, 64, s.floor_bounds(), {50, 30}, 1);
    const auto b = nerf_top_at_height(proxy, 1.2, 64, s.floor_bounds(), {50, 30}, 4);
    CHECK(a.labels == b.labels);
}
