/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "blueprint/error.hpp"
#include "blueprint/field.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

using namespace blueprint;

namespace {

EncoderConfig raw_coordinates()
{
    EncoderConfig e;
    e.kind = EncoderKind::identity;
    return e;
}

const BlueprintBounds kBounds{-2.0, 3.0, 1.0, 5.0};

std::vector<BlueprintSample> random_batch(std::mt19937_64& rng, int n, int classes)
{
    std::uniform_real_distribution<double> ux(kBounds.x_min, kBounds.x_max);
    std::uniform_real_distribution<double> uy(kBounds.y_min, kBounds.y_max);
    std::uniform_int_distribution<int> lab(1, classes);
    std::vector<BlueprintSample> b(static_cast<std::size_t>(n));
    for (auto& s : b) {
        s.coord = {ux(rng), uy(rng)};
        s.label = lab(rng);
    }
    return b;
}

EncoderConfig small_encoder(EncoderKind kind)
{
    EncoderConfig e;
    e.kind = kind;
    e.frequencies = 4;
    e.hash.levels = 3;
    e.hash.base_resolution = 4;
    e.hash.table_size = 64;
    return e;
}

} // namespace

TEST_CASE("forward pass matches the reference implementation")
{
    std::mt19937_64 rng(11);
    for (auto kind : {EncoderKind::identity, EncoderKind::positional, EncoderKind::hash, EncoderKind::sinusoidal}) {
        CAPTURE(to_string(kind));
        auto p = make_field(small_encoder(kind), {2, 16}, 5, kBounds);
        initialize_field(p, 3);
        if (kind == EncoderKind::hash) {
            // Larger table values so the hash path actually matters.
            for (std::size_t i = p.hash_offset(); i < p.size(); ++i) {
                p.values[i] = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
            }
        }
        for (const auto& s : random_batch(rng, 50, 5)) {
            const auto got = forward(p, s.coord, kBounds);
            const auto want = oracle::ref_forward(p, p.values, s.coord);
            REQUIRE(got.size() == 5);
            for (int k = 0; k < 5; ++k) {
                CHECK(std::abs(got[k] - static_cast<double>(want.logits[k])) < 1e-9);
            }
        }
    }
}

TEST_CASE("analytic gradient agrees with central differences")
{
    for (auto kind : {EncoderKind::identity, EncoderKind::positional, EncoderKind::hash, EncoderKind::sinusoidal}) {
        CAPTURE(to_string(kind));
        const auto r = oracle::check_gradient(kind, 100 + static_cast<int>(kind));
        CHECK(r.loss_error < 1e-10);
        CHECK(r.checked >= 64);
        CHECK(r.worst < 1e-4);
    }
}

TEST_CASE("positional encoding values")
{
    const auto e = positional_encoding({0.0, 0.0}, 1);
    REQUIRE(e.size() == 6);
    CHECK(e[0] == 0.0);
    CHECK(e[1] == 0.0);
    CHECK(e[2] == 0.0); // sin(0)
    CHECK(e[3] == 1.0); // cos(0)
    CHECK(e[4] == 0.0);
    CHECK(e[5] == 1.0);
    CHECK(positional_encoding({0.3, -0.2}, 10).size() == 42);

    const auto h = positional_encoding({0.5, -1.0}, 2);
    CHECK(h[2] == doctest::Approx(1.0));                // sin(pi/2)
    CHECK(h[3] == doctest::Approx(0.0));                // cos(pi/2)
    CHECK(h[4] == doctest::Approx(0.0));                // sin(pi)
    CHECK(h[5] == doctest::Approx(-1.0));               // cos(pi)
    CHECK(h[7] == doctest::Approx(-1.0));               // cos(-pi)
    CHECK(h[9] == doctest::Approx(1.0));                // cos(-2pi)
}

TEST_CASE("spatial hash")
{
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::int64_t> v(0, 5000);
    for (int n = 0; n < 1000; ++n) {
        const auto i = v(rng);
        const auto j = v(rng);
        CHECK(hash_vertex(i, j, 1u << 14) == oracle::ref_hash(i, j, 1u << 14));
        CHECK(hash_vertex(i, j, 64) == oracle::ref_hash(i, j, 64));
    }
    CHECK(hash_vertex(0, 0, 1024) == 0);
    CHECK(hash_vertex(1, 0, 1u << 31) == (2165219737u & ((1u << 31) - 1)));
}

TEST_CASE("zero weights tie toward the lowest class")
{
    auto p = make_field({}, {2, 8}, 6, kBounds);
    const auto logits = forward(p, {0.0, 2.0}, kBounds);
    CHECK(predict_label(logits) == 1);
    const std::vector<BlueprintSample> batch{{{0.0, 2.0}, 3, 0.0}};
    CHECK(loss_and_grad(p, batch, kBounds).loss == doctest::Approx(std::log(6.0)));

    auto four = make_field({}, {1, 4}, 4, kBounds);
    CHECK(loss_and_grad(four, batch, kBounds).loss == doctest::Approx(std::log(4.0)).epsilon(1e-12));

    Eigen::VectorXd l(4);
    l << 0.5, 2.0, 2.0, -1.0;
    CHECK(predict_label(l) == 2);
}

TEST_CASE("two-class half-plane is learned")
{
    std::mt19937_64 rng(1);
    std::vector<BlueprintSample> samples;
    std::uniform_real_distribution<double> ux(kBounds.x_min, kBounds.x_max);
    std::uniform_real_distribution<double> uy(kBounds.y_min, kBounds.y_max);
    for (int n = 0; n < 4000; ++n) {
        const double x = ux(rng);
        samples.push_back({{x, uy(rng)}, x < 0.0 ? 1 : 2, 0.0});
    }
    TrainConfig tc;
    tc.bounds = kBounds;
    tc.mlp = {2, 16};
    tc.batch_size = 256;
    tc.steps = 400;
    tc.learning_rate = 5e-3;
    const auto r = train_field(samples, raw_coordinates(), tc);
    CHECK(r.log.back().loss < r.log.front().loss);
    const auto raster = rasterize_field(r.params, kBounds, {100, 80});
    int correct = 0;
    for (int j = 0; j < 80; ++j) {
        for (int i = 0; i < 100; ++i) {
            const auto c = cell_center(kBounds, {100, 80}, {i, j});
            correct += raster.at(i, j) == (c.x < 0.0 ? 1 : 2) ? 1 : 0;
        }
    }
    CHECK(correct >= 0.99 * 8000);
}

TEST_CASE("positional encoding fits a checkerboard better than raw coordinates")
{
    // 8x8 checkerboard over the normalized square; 10 seeds.
    auto label_at = [](double x, double y) {
        const int cx = static_cast<int>(std::floor((x - kBounds.x_min) / kBounds.width() * 8));
        const int cy = static_cast<int>(std::floor((y - kBounds.y_min) / kBounds.depth() * 8));
        return ((cx + cy) % 2) + 1;
    };
    const GridSize g{64, 64};
    auto accuracy = [&](const FieldParams& p) {
        const auto r = rasterize_field(p, kBounds, g);
        int ok = 0;
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const auto c = cell_center(kBounds, g, {i, j});
                ok += r.at(i, j) == label_at(c.x, c.y) ? 1 : 0;
            }
        }
        return static_cast<double>(ok) / static_cast<double>(g.cells());
    };
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> ux(kBounds.x_min, kBounds.x_max);
        std::uniform_real_distribution<double> uy(kBounds.y_min, kBounds.y_max);
        std::vector<BlueprintSample> samples;
        for (int n = 0; n < 4000; ++n) {
            const double x = ux(rng);
            const double y = uy(rng);
            samples.push_back({{x, y}, label_at(x, y), 0.0});
        }
        TrainConfig tc;
        tc.bounds = kBounds;
        tc.mlp = {2, 32};
        tc.batch_size = 256;
        tc.steps = 300;
        tc.learning_rate = 5e-3;
        tc.seed = seed;
        EncoderConfig pe;
        pe.frequencies = 4;
        const double a_pe = accuracy(train_field(samples, pe, tc).params);
        const double a_id = accuracy(train_field(samples, raw_coordinates(), tc).params);
        wins += a_pe > a_id ? 1 : 0;
    }
    CHECK(wins >= 9);
}

TEST_CASE("training is deterministic and thread independent")
{
    std::mt19937_64 rng(3);
    const auto samples = random_batch(rng, 2000, 3);
    TrainConfig tc;
    tc.bounds = kBounds;
    tc.mlp = {2, 16};
    tc.batch_size = 600;
    tc.steps = 20;
    tc.seed = 9;
    for (auto kind : {EncoderKind::positional, EncoderKind::hash}) {
        const auto e = small_encoder(kind);
        const auto a = train_field(samples, e, tc);
        const auto b = train_field(samples, e, tc);
        tc.threads = 3;
        const auto c = train_field(samples, e, tc);
        tc.threads = 1;
        CHECK(a.params.values == b.params.values);
        CHECK(a.params.values == c.params.values);
        CHECK(rasterize_field(a.params, kBounds, {30, 20}, 1).labels ==
              rasterize_field(a.params, kBounds, {30, 20}, 4).labels);
    }
}

TEST_CASE("training input validation")
{
    std::vector<BlueprintSample> none;
    TrainConfig tc;
    tc.bounds = kBounds;
    CHECK_THROWS_AS(train_field(none, {}, tc), Error);
    std::vector<BlueprintSample> bad{{{0.0, 2.0}, 0, 0.0}};
    CHECK_THROWS_AS(train_field(bad, {}, tc), Error);
    EncoderConfig e;
    e.kind = EncoderKind::hash;
    e.hash.table_size = 1000;
    CHECK_THROWS_AS(e.validate(), Error);
    CHECK_THROWS_AS(encoder_kind_from_string("fourier"), Error);
    CHECK(encoder_kind_from_string("siren") == EncoderKind::sinusoidal);
}

TEST_CASE("field file round trip")
{
    for (auto kind : {EncoderKind::identity, EncoderKind::positional, EncoderKind::hash, EncoderKind::sinusoidal}) {
        auto p = make_field(small_encoder(kind), {2, 8}, 4, kBounds);
        initialize_field(p, 1);
        // Values representable in float survive exactly.
        for (auto& v : p.values) {
            v = static_cast<float>(v);
        }
        std::stringstream ss;
        write_field(p, ss);
        const auto q = read_field(ss);
        CHECK(q.values == p.values);
        CHECK(q.num_classes == 4);
        CHECK(q.bounds == kBounds);
        CHECK(q.encoder.kind == kind);
        CHECK(rasterize_field(q, kBounds, {10, 10}).labels == rasterize_field(p, kBounds, {10, 10}).labels);
    }
    std::stringstream junk("NOPE");
    CHECK_THROWS_WITH_AS(read_field(junk), "not a field file (bad magic)", Error);

    auto p = make_field({}, {1, 4}, 3, kBounds);
    std::stringstream ss;
    write_field(p, ss);
    const std::string full = ss.str();
    std::stringstream cut(full.substr(0, full.size() - 5));
    CHECK_THROWS_WITH_AS(read_field(cut), "truncated field file", Error);
    CHECK_THROWS_AS(load_field("/nonexistent/field.blnf"), Error);
}

TEST_CASE("rasterized field has no void cells")
{
    auto p = make_field({}, {2, 8}, 5, kBounds);
    initialize_field(p, 4);
    const auto r = rasterize_field(p, kBounds, {37, 23});
    CHECK(std::none_of(r.labels.begin(), r.labels.end(), [](int l) { return l == kVoidClass; }));
    CHECK(std::all_of(r.labels.begin(), r.labels.end(), [](int l) { return l >= 1 && l <= 5; }));
}
