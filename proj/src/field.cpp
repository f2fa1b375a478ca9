/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "blueprint/field.hpp"
#include "blueprint/error.hpp"
#include "blueprint/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>

namespace blueprint {

namespace {

// Samples per reduction chunk. Fixed so gradients are summed in the same
// order whatever the thread count.
constexpr std::size_t kChunk = 256;

constexpr std::uint32_t kPrimeX = 2165219737u;
constexpr std::uint32_t kPrimeY = 2654435761u;

} // namespace

std::string to_string(EncoderKind kind)
{
    switch (kind) {
    case EncoderKind::identity:
        return "identity";
    case EncoderKind::positional:
        return "positional";
    case EncoderKind::hash:
        return "hash";
    case EncoderKind::sinusoidal:
        return "sinusoidal";
    }
    return "identity";
}

EncoderKind encoder_kind_from_string(const std::string& s)
{
    if (s == "identity" || s == "none") {
        return EncoderKind::identity;
    }
    if (s == "positional" || s == "pe") {
        return EncoderKind::positional;
    }
    if (s == "hash") {
        return EncoderKind::hash;
    }
    if (s == "sinusoidal" || s == "siren") {
        return EncoderKind::sinusoidal;
    }
    throw Error("unknown encoder kind '" + s + "'");
}

void EncoderConfig::validate() const
{
    switch (kind) {
    case EncoderKind::positional:
        if (frequencies < 1) {
            throw Error("positional encoding needs at least one frequency");
        }
        break;
    case EncoderKind::hash:
        if (hash.levels < 1 || hash.features_per_entry < 1 || hash.base_resolution < 1) {
            throw Error("invalid hash encoding configuration");
        }
        if (!std::has_single_bit(hash.table_size)) {
            throw Error("hash table size must be a power of two");
        }
        if (!(hash.per_level_scale > 1.0)) {
            throw Error("hash per-level scale must exceed 1");
        }
        break;
    case EncoderKind::sinusoidal:
        if (!(omega0 > 0.0)) {
            throw Error("omega0 must be positive");
        }
        break;
    case EncoderKind::identity:
        break;
    }
}

int EncoderConfig::output_dim() const
{
    switch (kind) {
    case EncoderKind::positional:
        return 2 + 4 * frequencies;
    case EncoderKind::hash:
        return hash.levels * hash.features_per_entry;
    case EncoderKind::identity:
    case EncoderKind::sinusoidal:
        return 2;
    }
    return 2;
}

int EncoderConfig::hash_resolution(int level) const
{
    return static_cast<int>(std::floor(hash.base_resolution * std::pow(hash.per_level_scale, level)));
}

std::size_t FieldParams::weight_offset(std::size_t layer) const
{
    std::size_t off = 0;
    for (std::size_t k = 0; k < layer; ++k) {
        off += static_cast<std::size_t>(layers[k].in + 1) * layers[k].out;
    }
    return off;
}

std::size_t FieldParams::bias_offset(std::size_t layer) const
{
    return weight_offset(layer) + static_cast<std::size_t>(layers[layer].in) * layers[layer].out;
}

std::size_t FieldParams::hash_offset() const { return weight_offset(layers.size()); }

std::size_t FieldParams::hash_size() const
{
    if (encoder.kind != EncoderKind::hash) {
        return 0;
    }
    return static_cast<std::size_t>(encoder.hash.levels) * encoder.hash.table_size * encoder.hash.features_per_entry;
}

Eigen::Map<const Eigen::MatrixXd> FieldParams::weight(std::size_t layer) const
{
    return {values.data() + weight_offset(layer), layers[layer].out, layers[layer].in};
}

Eigen::Map<const Eigen::VectorXd> FieldParams::bias(std::size_t layer) const
{
    return {values.data() + bias_offset(layer), layers[layer].out};
}

FieldParams make_field(const EncoderConfig& encoder, const MlpConfig& mlp, int num_classes,
                       const BlueprintBounds& bounds)
{
    encoder.validate();
    if (num_classes < 1) {
        throw Error("field needs at least one class");
    }
    if (mlp.hidden_layers < 0 || (mlp.hidden_layers > 0 && mlp.hidden_width < 1)) {
        throw Error("invalid MLP shape");
    }
    if (!bounds.valid()) {
        throw Error("invalid normalization bounds");
    }
    FieldParams p;
    p.encoder = encoder;
    p.num_classes = num_classes;
    p.bounds = bounds;
    int in = encoder.output_dim();
    for (int k = 0; k < mlp.hidden_layers; ++k) {
        p.layers.push_back({in, mlp.hidden_width});
        in = mlp.hidden_width;
    }
    p.layers.push_back({in, num_classes});
    p.values.assign(p.hash_offset() + p.hash_size(), 0.0);
    return p;
}

void initialize_field(FieldParams& params, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const bool siren = params.encoder.kind == EncoderKind::sinusoidal;
    for (std::size_t k = 0; k < params.layers.size(); ++k) {
        const auto [in, out] = params.layers[k];
        const bool last = k + 1 == params.layers.size();
        double w_limit = std::sqrt(6.0 / in);
        double b_limit = 0.0;
        if (siren) {
            w_limit = k == 0 ? 1.0 / in : std::sqrt(6.0 / in) / params.encoder.omega0;
            if (last) {
                w_limit = std::sqrt(6.0 / in) / params.encoder.omega0;
            }
            b_limit = 1.0 / std::sqrt(static_cast<double>(in));
        }
        std::uniform_real_distribution<double> wdist(-w_limit, w_limit);
        const std::size_t w0 = params.weight_offset(k);
        for (std::size_t i = 0; i < static_cast<std::size_t>(in) * out; ++i) {
            params.values[w0 + i] = wdist(rng);
        }
        const std::size_t b0 = params.bias_offset(k);
        if (b_limit > 0.0) {
            std::uniform_real_distribution<double> bdist(-b_limit, b_limit);
            for (int i = 0; i < out; ++i) {
                params.values[b0 + static_cast<std::size_t>(i)] = bdist(rng);
            }
        } else {
            std::fill_n(params.values.begin() + static_cast<std::ptrdiff_t>(b0), out, 0.0);
        }
    }
    std::uniform_real_distribution<double> hdist(-1e-4, 1e-4);
    const std::size_t h0 = params.hash_offset();
    for (std::size_t i = 0; i < params.hash_size(); ++i) {
        params.values[h0 + i] = hdist(rng);
    }
}

Eigen::Vector2d normalize_coord(const BlueprintCoord& c, const BlueprintBounds& bounds)
{
    const double x = 2.0 * (c.x - bounds.x_min) / bounds.width() - 1.0;
    const double y = 2.0 * (c.y - bounds.y_min) / bounds.depth() - 1.0;
    return {std::clamp(x, -1.0, 1.0), std::clamp(y, -1.0, 1.0)};
}

Eigen::VectorXd positional_encoding(const Eigen::Vector2d& p, int frequencies)
{
    Eigen::VectorXd out(2 + 4 * frequencies);
    out[0] = p.x();
    out[1] = p.y();
    int k = 2;
    for (int axis = 0; axis < 2; ++axis) {
        for (int l = 0; l < frequencies; ++l) {
            const double arg = std::ldexp(std::numbers::pi, l) * p[axis];
            out[k++] = std::sin(arg);
            out[k++] = std::cos(arg);
        }
    }
    return out;
}

std::uint32_t hash_vertex(std::int64_t i, std::int64_t j, std::uint32_t table_size)
{
    const auto ui = static_cast<std::uint32_t>(i);
    const auto uj = static_cast<std::uint32_t>(j);
    return ((ui * kPrimeX) ^ (uj * kPrimeY)) & (table_size - 1u);
}

namespace {

/// Corner addresses and bilinear weights of one sample on every hash level.
struct HashCorners {
    std::vector<std::uint32_t> index; // levels * 4 table addresses (entry, not scalar)
    std::vector<double> weight;       // levels * 4
};

void hash_corners(const EncoderConfig& enc, const Eigen::Vector2d& p, std::uint32_t* index, double* weight)
{
    const double x01 = 0.5 * (p.x() + 1.0);
    const double y01 = 0.5 * (p.y() + 1.0);
    for (int l = 0; l < enc.hash.levels; ++l) {
        const int res = enc.hash_resolution(l);
        const double px = x01 * res;
        const double py = y01 * res;
        const auto i0 = std::min(static_cast<std::int64_t>(std::floor(px)), static_cast<std::int64_t>(res - 1));
        const auto j0 = std::min(static_cast<std::int64_t>(std::floor(py)), static_cast<std::int64_t>(res - 1));
        const double fx = px - static_cast<double>(i0);
        const double fy = py - static_cast<double>(j0);
        const std::uint32_t level_base = static_cast<std::uint32_t>(l) * enc.hash.table_size;
        const int b = 4 * l;
        index[b + 0] = level_base + hash_vertex(i0, j0, enc.hash.table_size);
        index[b + 1] = level_base + hash_vertex(i0 + 1, j0, enc.hash.table_size);
        index[b + 2] = level_base + hash_vertex(i0, j0 + 1, enc.hash.table_size);
        index[b + 3] = level_base + hash_vertex(i0 + 1, j0 + 1, enc.hash.table_size);
        weight[b + 0] = (1.0 - fx) * (1.0 - fy);
        weight[b + 1] = fx * (1.0 - fy);
        weight[b + 2] = (1.0 - fx) * fy;
        weight[b + 3] = fx * fy;
    }
}

/// Encodes `count` coordinates into the columns of `X`. For hash encoding the
/// corner lookups are kept in `corners` for the backward pass.
template <class CoordAt>
void encode_batch(const FieldParams& params, const BlueprintBounds& bounds, std::size_t count, CoordAt&& coord_at,
                  Eigen::MatrixXd& X, HashCorners* corners)
{
    const auto& enc = params.encoder;
    const int dim = enc.output_dim();
    X.resize(dim, static_cast<Eigen::Index>(count));
    const int F = enc.hash.features_per_entry;
    if (enc.kind == EncoderKind::hash && corners) {
        corners->index.resize(count * enc.hash.levels * 4);
        corners->weight.resize(count * enc.hash.levels * 4);
    }
    std::vector<std::uint32_t> idx(enc.kind == EncoderKind::hash ? enc.hash.levels * 4 : 0);
    std::vector<double> w(idx.size());
    const double* table = params.values.data() + params.hash_offset();

    for (std::size_t n = 0; n < count; ++n) {
        const Eigen::Vector2d p = normalize_coord(coord_at(n), bounds);
        const auto col = static_cast<Eigen::Index>(n);
        switch (enc.kind) {
        case EncoderKind::identity:
        case EncoderKind::sinusoidal:
            X.col(col) = p;
            break;
        case EncoderKind::positional:
            X.col(col) = positional_encoding(p, enc.frequencies);
            break;
        case EncoderKind::hash: {
            std::uint32_t* ip = idx.data();
            double* wp = w.data();
            if (corners) {
                ip = corners->index.data() + n * idx.size();
                wp = corners->weight.data() + n * w.size();
            }
            hash_corners(enc, p, ip, wp);
            for (int l = 0; l < enc.hash.levels; ++l) {
                for (int f = 0; f < F; ++f) {
                    double v = 0.0;
                    for (int c = 0; c < 4; ++c) {
                        v += wp[4 * l + c] * table[static_cast<std::size_t>(ip[4 * l + c]) * F + f];
                    }
                    X(l * F + f, col) = v;
                }
            }
            break;
        }
        }
    }
}

/// Activations of one forward pass; Z[k] are pre-activations of layer k and
/// A[k] its input (A[0] = encoded features).
struct ForwardPass {
    std::vector<Eigen::MatrixXd> Z;
    std::vector<Eigen::MatrixXd> A;
};

void run_mlp(const FieldParams& params, ForwardPass& fp)
{
    const std::size_t L = params.layers.size();
    const bool siren = params.encoder.kind == EncoderKind::sinusoidal;
    const double w0 = params.encoder.omega0;
    fp.Z.resize(L);
    fp.A.resize(L + 1);
    for (std::size_t k = 0; k < L; ++k) {
        fp.Z[k].noalias() = params.weight(k) * fp.A[k];
        fp.Z[k].colwise() += params.bias(k);
        if (k + 1 == L) {
            break;
        }
        if (siren) {
            fp.A[k + 1] = (w0 * fp.Z[k].array()).sin().matrix();
        } else {
            fp.A[k + 1] = fp.Z[k].cwiseMax(0.0);
        }
    }
}

void check_finite(const FieldParams& params)
{
    for (double v : params.values) {
        if (!std::isfinite(v)) {
            throw Error("diverged parameters");
        }
    }
}

/// Loss sum and gradient sum (scaled by 1 / total) for one chunk.
double chunk_loss_grad(const FieldParams& params, std::span<const BlueprintSample> chunk, const BlueprintBounds& bounds,
                       double scale, std::vector<double>& grad)
{
    const std::size_t B = chunk.size();
    HashCorners corners;
    ForwardPass fp;
    fp.A.resize(1);
    encode_batch(params, bounds, B, [&](std::size_t n) { return chunk[n].coord; }, fp.A[0],
                 params.encoder.kind == EncoderKind::hash ? &corners : nullptr);
    run_mlp(params, fp);

    const std::size_t L = params.layers.size();
    Eigen::MatrixXd G = fp.Z[L - 1];
    double loss = 0.0;
    for (std::size_t n = 0; n < B; ++n) {
        const auto col = static_cast<Eigen::Index>(n);
        const int target = chunk[n].label - 1;
        if (target < 0 || target >= params.num_classes) {
            throw Error("sample label outside the field's classes");
        }
        const double m = G.col(col).maxCoeff();
        G.col(col) = (G.col(col).array() - m).exp().matrix();
        const double sum = G.col(col).sum();
        loss += -(fp.Z[L - 1](target, col) - m - std::log(sum));
        G.col(col) /= sum;
        G(target, col) -= 1.0;
    }
    G *= scale;

    const bool siren = params.encoder.kind == EncoderKind::sinusoidal;
    const double w0 = params.encoder.omega0;
    Eigen::MatrixXd dA;
    for (std::size_t k = L; k-- > 0;) {
        const auto [in, out] = params.layers[k];
        Eigen::Map<Eigen::MatrixXd> dW(grad.data() + params.weight_offset(k), out, in);
        Eigen::Map<Eigen::VectorXd> db(grad.data() + params.bias_offset(k), out);
        dW.noalias() += G * fp.A[k].transpose();
        db += G.rowwise().sum();
        const bool need_input_grad = k > 0 || params.encoder.kind == EncoderKind::hash;
        if (!need_input_grad) {
            break;
        }
        dA.noalias() = params.weight(k).transpose() * G;
        if (k == 0) {
            break;
        }
        if (siren) {
            G = dA.cwiseProduct((w0 * (w0 * fp.Z[k - 1].array()).cos()).matrix());
        } else {
            G = dA.cwiseProduct((fp.Z[k - 1].array() > 0.0).cast<double>().matrix());
        }
    }

    if (params.encoder.kind == EncoderKind::hash) {
        const int levels = params.encoder.hash.levels;
        const int F = params.encoder.hash.features_per_entry;
        double* table_grad = grad.data() + params.hash_offset();
        for (std::size_t n = 0; n < B; ++n) {
            const std::uint32_t* ip = corners.index.data() + n * levels * 4;
            const double* wp = corners.weight.data() + n * levels * 4;
            for (int l = 0; l < levels; ++l) {
                for (int c = 0; c < 4; ++c) {
                    const std::size_t base = static_cast<std::size_t>(ip[4 * l + c]) * F;
                    for (int f = 0; f < F; ++f) {
                        table_grad[base + f] += wp[4 * l + c] * dA(l * F + f, static_cast<Eigen::Index>(n));
                    }
                }
            }
        }
    }
    return loss;
}

} // namespace

Eigen::VectorXd encode(const FieldParams& params, const BlueprintCoord& c, const BlueprintBounds& bounds)
{
    Eigen::MatrixXd X;
    encode_batch(params, bounds, 1, [&](std::size_t) { return c; }, X, nullptr);
    return X.col(0);
}

Eigen::VectorXd forward(const FieldParams& params, const BlueprintCoord& c, const BlueprintBounds& bounds)
{
    check_finite(params);
    ForwardPass fp;
    fp.A.resize(1);
    fp.A[0] = encode(params, c, bounds);
    run_mlp(params, fp);
    return fp.Z.back().col(0);
}

int predict_label(const Eigen::Ref<const Eigen::VectorXd>& logits)
{
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < logits.size(); ++k) {
        if (logits[k] > logits[best]) {
            best = k;
        }
    }
    return static_cast<int>(best) + 1;
}

LossAndGrad loss_and_grad(const FieldParams& params, std::span<const BlueprintSample> batch,
                          const BlueprintBounds& bounds, int threads)
{
    if (batch.empty()) {
        throw Error("empty batch");
    }
    const std::size_t chunks = (batch.size() + kChunk - 1) / kChunk;
    const double scale = 1.0 / static_cast<double>(batch.size());

    LossAndGrad out;
    out.grad.assign(params.size(), 0.0);
    std::vector<double> chunk_loss(chunks, 0.0);

    threads = resolve_threads(threads);
    if (threads <= 1 || chunks == 1) {
        std::vector<double> g(params.size());
        for (std::size_t c = 0; c < chunks; ++c) {
            std::fill(g.begin(), g.end(), 0.0);
            const auto part = batch.subspan(c * kChunk, std::min(kChunk, batch.size() - c * kChunk));
            chunk_loss[c] = chunk_loss_grad(params, part, bounds, scale, g);
            for (std::size_t i = 0; i < g.size(); ++i) {
                out.grad[i] += g[i];
            }
        }
    } else {
        std::vector<std::vector<double>> grads(chunks, std::vector<double>(params.size(), 0.0));
        parallel_for(chunks, threads, [&](std::size_t c0, std::size_t c1) {
            for (std::size_t c = c0; c < c1; ++c) {
                const auto part = batch.subspan(c * kChunk, std::min(kChunk, batch.size() - c * kChunk));
                chunk_loss[c] = chunk_loss_grad(params, part, bounds, scale, grads[c]);
            }
        });
        for (const auto& g : grads) {
            for (std::size_t i = 0; i < g.size(); ++i) {
                out.grad[i] += g[i];
            }
        }
    }
    double total = 0.0;
    for (double l : chunk_loss) {
        total += l;
    }
    out.loss = total * scale;
    if (!std::isfinite(out.loss)) {
        throw Error("diverged");
    }
    return out;
}

TrainResult train_field(std::span<const BlueprintSample> samples, const EncoderConfig& encoder,
                        const TrainConfig& tc)
{
    if (samples.empty()) {
        throw Error("no training samples");
    }
    if (!(tc.learning_rate > 0.0) || tc.batch_size < 1 || tc.steps < 0) {
        throw Error("invalid training configuration");
    }
    int num_classes = tc.num_classes;
    if (num_classes <= 0) {
        for (const auto& s : samples) {
            num_classes = std::max(num_classes, s.label);
        }
    }
    for (const auto& s : samples) {
        if (s.label < 1 || s.label > num_classes) {
            throw Error("training label outside [1, C_s]");
        }
    }

    TrainResult result;
    result.params = make_field(encoder, tc.mlp, num_classes, tc.bounds);
    initialize_field(result.params, tc.seed);
    auto& theta = result.params.values;

    std::vector<double> m(theta.size(), 0.0);
    std::vector<double> v(theta.size(), 0.0);
    std::mt19937_64 rng(tc.seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
    std::vector<BlueprintSample> batch(static_cast<std::size_t>(tc.batch_size));

    double beta1_t = 1.0;
    double beta2_t = 1.0;
    for (int step = 1; step <= tc.steps; ++step) {
        for (auto& s : batch) {
            s = samples[pick(rng)];
        }
        LossAndGrad lg;
        try {
            lg = loss_and_grad(result.params, batch, tc.bounds, tc.threads);
        } catch (const Error&) {
            throw Error("diverged at step " + std::to_string(step));
        }
        beta1_t *= tc.beta1;
        beta2_t *= tc.beta2;
        const double lr_t = tc.learning_rate * std::sqrt(1.0 - beta2_t) / (1.0 - beta1_t);
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double g = lg.grad[i];
            m[i] = tc.beta1 * m[i] + (1.0 - tc.beta1) * g;
            v[i] = tc.beta2 * v[i] + (1.0 - tc.beta2) * g * g;
            theta[i] -= lr_t * m[i] / (std::sqrt(v[i]) + tc.epsilon);
        }
        if (step == 1 || step == tc.steps || (tc.log_every > 0 && step % tc.log_every == 0)) {
            result.log.push_back({step, lg.loss});
        }
    }
    check_finite(result.params);
    return result;
}

BlueprintRaster rasterize_field(const FieldParams& params, const BlueprintBounds& bounds, GridSize res, int threads)
{
    if (!bounds.valid() || res.nx < 1 || res.ny < 1) {
        throw Error("invalid blueprint geometry");
    }
    check_finite(params);
    BlueprintRaster raster(bounds, res, kVoidClass);
    const std::size_t total = res.cells();
    const std::size_t chunks = (total + kChunk - 1) / kChunk;
    parallel_for(chunks, threads, [&](std::size_t c0, std::size_t c1) {
        ForwardPass fp;
        fp.A.resize(1);
        for (std::size_t c = c0; c < c1; ++c) {
            const std::size_t first = c * kChunk;
            const std::size_t count = std::min(kChunk, total - first);
            auto coord_at = [&](std::size_t n) {
                const std::size_t k = first + n;
                return cell_center(bounds, res, {static_cast<int>(k % res.nx), static_cast<int>(k / res.nx)});
            };
            encode_batch(params, params.bounds, count, coord_at, fp.A[0], nullptr);
            run_mlp(params, fp);
            for (std::size_t n = 0; n < count; ++n) {
                raster.labels[first + n] = predict_label(fp.Z.back().col(static_cast<Eigen::Index>(n)));
            }
        }
    });
    return raster;
}

} // namespace blueprint
