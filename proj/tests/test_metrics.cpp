/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "blueprint/error.hpp"
#include "blueprint/metrics.hpp"
#include "oracles.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <random>
#include <set>

using namespace blueprint;

namespace {

const BlueprintBounds kUnit{0.0, 1.0, 0.0, 1.0};

BlueprintRaster from_labels(const std::vector<int>& labels, GridSize g)
{
    BlueprintRaster r(kUnit, g);
    r.labels = labels;
    return r;
}

} // namespace

TEST_CASE("hand computed example")
{
    const GridSize g{10, 1};
    const auto gt = from_labels({1, 1, 1, 1, 1, 1, 1, 2, 2, 2}, g);
    const auto pred = from_labels({1, 1, 1, 1, 1, 1, 2, 2, 2, 2}, g);
    const auto r = evaluate(pred, gt);
    CHECK(r.pacc == 0.9);
    CHECK(r.fwiou == doctest::Approx(0.825).epsilon(1e-15));
    CHECK(r.per_class_iou.at(1) == doctest::Approx(6.0 / 7.0));
    CHECK(r.per_class_iou.at(2) == doctest::Approx(0.75));
    CHECK(r.confusion[1][2] == 1);
    CHECK(r.evaluated_cells == 10);
    CHECK(r.completeness == 1.0);
}

TEST_CASE("identity and completeness examples")
{
    const GridSize g{4, 4};
    std::vector<int> labels(16, 3);
    labels[2] = 1;
    const auto gt = from_labels(labels, g);
    const auto r = evaluate(gt, gt);
    CHECK(r.pacc == 1.0);
    CHECK(r.fwiou == 1.0);
    for (const auto& [id, iou] : r.per_class_iou) {
        CHECK(iou == 1.0);
    }
    auto holes = labels;
    holes[0] = holes[5] = holes[9] = 0;
    CHECK(completeness(from_labels(holes, g)) == 13.0 / 16.0);
    CHECK(completeness(from_labels(std::vector<int>(16, 0), g)) == 0.0);
    const auto partial = evaluate(from_labels(holes, g), gt);
    CHECK(partial.evaluated_cells == 13);
    CHECK(partial.pacc == 1.0);
    CHECK(partial.completeness == 13.0 / 16.0);

    // Row sums are ground-truth counts among evaluated cells.
    std::int64_t row3 = 0;
    for (auto v : partial.confusion[3]) {
        row3 += v;
    }
    CHECK(row3 == 12);
}

TEST_CASE("matches brute force on random rasters")
{
    std::mt19937_64 rng(2024);
    const GridSize g{32, 32};
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<int> lab(0, 2 + trial % 6);
        std::vector<int> a(g.cells());
        std::vector<int> b(g.cells());
        for (auto& v : a) {
            v = lab(rng);
        }
        for (auto& v : b) {
            v = lab(rng);
        }
        a[0] = 1;
        b[0] = 1;
        const auto pred = from_labels(a, g);
        const auto gt = from_labels(b, g);
        const auto got = evaluate(pred, gt);
        const auto want = oracle::brute_force(pred, gt);
        worst = std::max({worst, std::abs(got.pacc - want.pacc), std::abs(got.fwiou - want.fwiou),
                          std::abs(got.completeness - want.completeness)});
        CHECK(got.pacc >= 0.0);
        CHECK(got.pacc <= 1.0);
        CHECK(got.fwiou >= 0.0);
        CHECK(got.fwiou <= 1.0);
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("relabeling and transposition invariance")
{
    std::mt19937_64 rng(8);
    const GridSize g{12, 7};
    std::uniform_int_distribution<int> lab(0, 4);
    std::vector<int> a(g.cells());
    std::vector<int> b(g.cells());
    for (std::size_t k = 0; k < a.size(); ++k) {
        a[k] = lab(rng);
        b[k] = lab(rng);
    }
    b[3] = 2;
    const auto base = evaluate(from_labels(a, g), from_labels(b, g));

    const std::map<int, int> perm{{0, 0}, {1, 3}, {2, 4}, {3, 1}, {4, 2}};
    auto pa = a;
    auto pb = b;
    for (auto& v : pa) {
        v = perm.at(v);
    }
    for (auto& v : pb) {
        v = perm.at(v);
    }
    const auto permuted = evaluate(from_labels(pa, g), from_labels(pb, g));
    CHECK(permuted.pacc == doctest::Approx(base.pacc).epsilon(1e-14));
    CHECK(permuted.fwiou == doctest::Approx(base.fwiou).epsilon(1e-14));

    const GridSize t{7, 12};
    std::vector<int> ta(a.size());
    std::vector<int> tb(b.size());
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            ta[static_cast<std::size_t>(i) * t.nx + j] = a[static_cast<std::size_t>(j) * g.nx + i];
            tb[static_cast<std::size_t>(i) * t.nx + j] = b[static_cast<std::size_t>(j) * g.nx + i];
        }
    }
    const auto transposed = evaluate(from_labels(ta, t), from_labels(tb, t));
    CHECK(transposed.pacc == doctest::Approx(base.pacc).epsilon(1e-14));
    CHECK(transposed.fwiou == doctest::Approx(base.fwiou).epsilon(1e-14));
}

TEST_CASE("metric errors")
{
    const auto a = from_labels(std::vector<int>(4, 1), {2, 2});
    const auto b = from_labels(std::vector<int>(4, 1), {4, 1});
    CHECK_THROWS_WITH_AS(evaluate(a, b), "raster geometry mismatch", Error);
    const auto empty = from_labels(std::vector<int>(4, 0), {2, 2});
    CHECK_THROWS_WITH_AS(evaluate(a, empty), "ground truth has no labeled cells", Error);

    const auto j = metrics_to_json(evaluate(a, a));
    CHECK(j.at("pacc") == 1.0);
    CHECK(j.at("evaluated_cells") == 4);
    CHECK(j.contains("confusion"));
}
