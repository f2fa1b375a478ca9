/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

// Reference implementations shared by the unit tests and the acceptance
// runner. They are written from the documented definitions, not from the
// library code, and favour clarity over speed.

#pragma once

#include "blueprint/editing.hpp"
#include "blueprint/field.hpp"
#include "blueprint/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <vector>

namespace oracle {

using namespace blueprint;

using Real = long double;

// Independent reference forward pass, straight from the parameter layout
// description. Returns the logits and, for ReLU nets, the sign pattern of
// every hidden pre-activation so callers can detect kinks.
struct Reference {
    std::vector<Real> logits;
    std::vector<bool> signs;
};

inline std::uint32_t ref_hash(std::int64_t i, std::int64_t j, std::uint32_t T)
{
    const std::uint64_t a = static_cast<std::uint32_t>(i) * 2165219737ull;
    const std::uint64_t b = static_cast<std::uint32_t>(j) * 2654435761ull;
    return static_cast<std::uint32_t>((a ^ b) & 0xffffffffull) % T;
}

inline std::vector<Real> ref_encode(const FieldParams& p, const std::vector<double>& theta, const BlueprintCoord& c)
{
    const auto& b = p.bounds;
    Real x = 2.0L * (c.x - b.x_min) / (static_cast<Real>(b.x_max) - b.x_min) - 1.0L;
    Real y = 2.0L * (c.y - b.y_min) / (static_cast<Real>(b.y_max) - b.y_min) - 1.0L;
    x = std::clamp(x, -1.0L, 1.0L);
    y = std::clamp(y, -1.0L, 1.0L);
    const auto& e = p.encoder;
    std::vector<Real> out{x, y};
    if (e.kind == EncoderKind::positional) {
        for (Real v : {x, y}) {
            for (int l = 0; l < e.frequencies; ++l) {
                const Real arg = std::pow(2.0L, l) * std::numbers::pi_v<Real> * v;
                out.push_back(std::sin(arg));
                out.push_back(std::cos(arg));
            }
        }
    } else if (e.kind == EncoderKind::hash) {
        out.clear();
        const std::size_t base = p.hash_offset();
        const int F = e.hash.features_per_entry;
        for (int l = 0; l < e.hash.levels; ++l) {
            const auto res = static_cast<std::int64_t>(std::floor(e.hash.base_resolution * std::pow(e.hash.per_level_scale, l)));
            const Real gx = (x + 1.0L) / 2.0L * res;
            const Real gy = (y + 1.0L) / 2.0L * res;
            const std::int64_t i = std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(gx)), res - 1);
            const std::int64_t j = std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(gy)), res - 1);
            const Real fx = gx - i;
            const Real fy = gy - j;
            for (int f = 0; f < F; ++f) {
                auto entry = [&](std::int64_t a, std::int64_t b) -> Real {
                    const std::size_t slot = static_cast<std::size_t>(l) * e.hash.table_size + ref_hash(a, b, e.hash.table_size);
                    return theta[base + slot * F + f];
                };
                out.push_back((1 - fx) * (1 - fy) * entry(i, j) + fx * (1 - fy) * entry(i + 1, j) +
                              (1 - fx) * fy * entry(i, j + 1) + fx * fy * entry(i + 1, j + 1));
            }
        }
    }
    return out;
}

inline Reference ref_forward(const FieldParams& p, const std::vector<double>& theta, const BlueprintCoord& c)
{
    Reference r;
    std::vector<Real> a = ref_encode(p, theta, c);
    std::size_t off = 0;
    for (std::size_t k = 0; k < p.layers.size(); ++k) {
        const int in = p.layers[k].in;
        const int out = p.layers[k].out;
        std::vector<Real> z(out, 0.0L);
        for (int o = 0; o < out; ++o) {
            Real s = theta[off + static_cast<std::size_t>(in) * out + o];
            for (int i = 0; i < in; ++i) {
                s += theta[off + static_cast<std::size_t>(i) * out + o] * a[i];
            }
            z[o] = s;
        }
        off += static_cast<std::size_t>(in + 1) * out;
        if (k + 1 == p.layers.size()) {
            r.logits = z;
            break;
        }
        a.assign(out, 0.0L);
        for (int o = 0; o < out; ++o) {
            if (p.encoder.kind == EncoderKind::sinusoidal) {
                a[o] = std::sin(static_cast<Real>(p.encoder.omega0) * z[o]);
            } else {
                a[o] = std::max(z[o], 0.0L);
                r.signs.push_back(z[o] > 0.0L);
            }
        }
    }
    return r;
}

struct RefLoss {
    Real loss = 0.0L;
    std::vector<bool> signs;
};

inline RefLoss ref_loss(const FieldParams& p, const std::vector<double>& theta, const std::vector<BlueprintSample>& batch)
{
    RefLoss out;
    for (const auto& s : batch) {
        const auto r = ref_forward(p, theta, s.coord);
        Real m = *std::max_element(r.logits.begin(), r.logits.end());
        Real sum = 0.0L;
        for (Real z : r.logits) {
            sum += std::exp(z - m);
        }
        out.loss += m + std::log(sum) - r.logits[static_cast<std::size_t>(s.label - 1)];
        out.signs.insert(out.signs.end(), r.signs.begin(), r.signs.end());
    }
    out.loss /= static_cast<Real>(batch.size());
    return out;
}

// ---- gradient check ----

struct GradientCheck {
    int checked = 0;
    int skipped = 0; ///< parameters whose stencil crossed a ReLU kink
    double worst = 0.0;
    double loss_error = 0.0;
};

/// Central differences of the reference loss against loss_and_grad on a
/// random batch, for `count` parameters mixing MLP weights and (for hash
/// encoding) table entries the batch reads.
inline GradientCheck check_gradient(EncoderKind kind, std::uint64_t seed, int count = 96, double eps = 1e-4)
{
    const BlueprintBounds bounds{-2.0, 3.0, 1.0, 5.0};
    EncoderConfig enc;
    enc.kind = kind;
    enc.frequencies = 4;
    enc.hash.levels = 3;
    enc.hash.base_resolution = 4;
    enc.hash.table_size = 64;
    std::mt19937_64 rng(seed);
    auto p = make_field(enc, {2, 12}, 4, bounds);
    initialize_field(p, seed + 1);
    for (std::size_t i = p.hash_offset(); i < p.size(); ++i) {
        p.values[i] = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
    }
    std::vector<BlueprintSample> batch(300);
    std::uniform_real_distribution<double> ux(bounds.x_min, bounds.x_max);
    std::uniform_real_distribution<double> uy(bounds.y_min, bounds.y_max);
    std::uniform_int_distribution<int> lab(1, 4);
    for (auto& s : batch) {
        s.coord = {ux(rng), uy(rng)};
        s.label = lab(rng);
    }
    const auto lg = loss_and_grad(p, batch, bounds);
    const auto base = ref_loss(p, p.values, batch);

    GradientCheck out;
    out.loss_error = std::abs(lg.loss - static_cast<double>(base.loss));

    std::vector<std::size_t> mlp(p.hash_offset());
    std::iota(mlp.begin(), mlp.end(), std::size_t{0});
    std::vector<std::size_t> table;
    for (std::size_t i = p.hash_offset(); i < p.size(); ++i) {
        if (lg.grad[i] != 0.0) {
            table.push_back(i);
        }
    }
    std::shuffle(mlp.begin(), mlp.end(), rng);
    std::shuffle(table.begin(), table.end(), rng);
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < std::max(mlp.size(), table.size()); ++k) {
        if (k < table.size()) {
            order.push_back(table[k]);
        }
        if (k < mlp.size()) {
            order.push_back(mlp[k]);
        }
    }
    for (std::size_t idx : order) {
        if (out.checked >= count) {
            break;
        }
        auto plus = p.values;
        auto minus = p.values;
        plus[idx] += eps;
        minus[idx] -= eps;
        const auto lp = ref_loss(p, plus, batch);
        const auto lm = ref_loss(p, minus, batch);
        if (lp.signs != base.signs || lm.signs != base.signs) {
            ++out.skipped;
            continue;
        }
        const double numeric = static_cast<double>((lp.loss - lm.loss) / (2.0L * eps));
        const double analytic = lg.grad[idx];
        const double err = std::abs(numeric - analytic) / std::max(1e-3, std::abs(numeric) + std::abs(analytic));
        out.worst = std::max(out.worst, err);
        ++out.checked;
    }
    return out;
}

// ---- metrics ----

struct Brute {
    double pacc = 0.0;
    double fwiou = 0.0;
    double completeness = 0.0;
};

// Per-class counting straight from the definitions, one pass per class.
inline Brute brute_force(const blueprint::BlueprintRaster& pred, const blueprint::BlueprintRaster& gt)
{
    Brute b;
    std::size_t valid = 0;
    for (int l : pred.labels) {
        valid += l != 0 ? 1 : 0;
    }
    b.completeness = static_cast<double>(valid) / pred.labels.size();
    std::set<int> classes;
    double total = 0.0;
    double correct = 0.0;
    for (std::size_t k = 0; k < gt.labels.size(); ++k) {
        if (gt.labels[k] != 0 && pred.labels[k] != 0) {
            total += 1.0;
            correct += gt.labels[k] == pred.labels[k] ? 1.0 : 0.0;
            classes.insert(gt.labels[k]);
            classes.insert(pred.labels[k]);
        }
    }
    b.pacc = correct / total;
    double fw = 0.0;
    for (int c : classes) {
        double inter = 0.0;
        double uni = 0.0;
        double freq = 0.0;
        for (std::size_t k = 0; k < gt.labels.size(); ++k) {
            if (gt.labels[k] == 0 || pred.labels[k] == 0) {
                continue;
            }
            const bool g = gt.labels[k] == c;
            const bool p = pred.labels[k] == c;
            inter += (g && p) ? 1.0 : 0.0;
            uni += (g || p) ? 1.0 : 0.0;
            freq += g ? 1.0 : 0.0;
        }
        fw += freq * (uni > 0.0 ? inter / uni : 0.0);
    }
    b.fwiou = fw / total;
    return b;
}

// ---- connected components ----

// Union-find over 4-neighbours, used as the reference partition.
inline std::vector<int> union_find_partition(const blueprint::BlueprintRaster& r)
{
    const int nx = r.size.nx;
    const int ny = r.size.ny;
    std::vector<int> parent(r.labels.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int k = j * nx + i;
            if (r.labels[k] == 0) {
                continue;
            }
            if (i + 1 < nx && r.labels[k + 1] == r.labels[k]) {
                parent[find(k)] = find(k + 1);
            }
            if (j + 1 < ny && r.labels[k + nx] == r.labels[k]) {
                parent[find(k)] = find(k + nx);
            }
        }
    }
    std::vector<int> root(r.labels.size(), -1);
    for (std::size_t k = 0; k < r.labels.size(); ++k) {
        if (r.labels[k] != 0) {
            root[k] = find(static_cast<int>(k));
        }
    }
    return root;
}

/// True when `ids` (0 = none) and `root` (-1 = none) describe the same
/// partition of the cells.
inline bool same_partition(const std::vector<int>& ids, const std::vector<int>& root)
{
    std::map<int, int> a;
    std::map<int, int> b;
    for (std::size_t k = 0; k < ids.size(); ++k) {
        if ((ids[k] == 0) != (root[k] < 0)) {
            return false;
        }
        if (ids[k] == 0) {
            continue;
        }
        const auto [ia, fa] = a.emplace(ids[k], root[k]);
        const auto [ib, fb] = b.emplace(root[k], ids[k]);
        if (ia->second != root[k] || ib->second != ids[k]) {
            return false;
        }
    }
    return true;
}

} // namespace oracle
