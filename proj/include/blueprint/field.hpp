/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "blueprint/dataset.hpp"
#include "blueprint/geometry.hpp"
#include "blueprint/scene.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace blueprint {

enum class EncoderKind : std::uint32_t {
    identity = 0,
    positional = 1,
    hash = 2,
    sinusoidal = 3, ///< identity input, sine activations in the MLP
};

std::string to_string(EncoderKind kind);
EncoderKind encoder_kind_from_string(const std::string& s);

struct HashConfig {
    int levels = 8;
    int base_resolution = 16;
    double per_level_scale = 1.5;
    std::uint32_t table_size = 1u << 14;
    int features_per_entry = 2;
};

struct EncoderConfig {
    EncoderKind kind = EncoderKind::positional;
    int frequencies = 10; ///< L for the positional ladder
    HashConfig hash;
    double omega0 = 30.0;

    void validate() const;
    int output_dim() const;
    /// Grid resolution of hash level `level`.
    int hash_resolution(int level) const;
};

struct MlpConfig {
    int hidden_layers = 4;
    int hidden_width = 128;
};

struct LayerShape {
    int in = 0;
    int out = 0;
};

/// Trainable state of the blueprint field: MLP layers followed by the hash
/// feature tables (if any), stored in one flat vector so optimizers and
/// gradient checks can treat every parameter uniformly.
///
/// Layer k stores its weight matrix column-major (out x in) followed by its
/// bias. Hash tables are laid out level-major, then entry, then feature.
struct FieldParams {
    EncoderConfig encoder;
    int num_classes = 1;
    BlueprintBounds bounds;
    std::vector<LayerShape> layers;
    std::vector<double> values;

    std::size_t weight_offset(std::size_t layer) const;
    std::size_t bias_offset(std::size_t layer) const;
    std::size_t hash_offset() const;
    std::size_t hash_size() const;
    std::size_t size() const { return values.size(); }

    Eigen::Map<const Eigen::MatrixXd> weight(std::size_t layer) const;
    Eigen::Map<const Eigen::VectorXd> bias(std::size_t layer) const;
};

/// Zero-valued parameters with the layout for the given architecture.
FieldParams make_field(const EncoderConfig& encoder, const MlpConfig& mlp, int num_classes,
                       const BlueprintBounds& bounds);

/// Seeded uniform He initialization (SIREN scheme for sinusoidal fields);
/// hash tables uniform in [-1e-4, 1e-4].
void initialize_field(FieldParams& params, std::uint64_t seed);

/// Maps a floor-plane coordinate to [-1, 1]^2, clamping outside points.
Eigen::Vector2d normalize_coord(const BlueprintCoord& c, const BlueprintBounds& bounds);

/// (x, y, sin(2^0 pi x), cos(2^0 pi x), ..., sin(2^0 pi y), ...) for
/// normalized p; dimension 2 + 4L.
Eigen::VectorXd positional_encoding(const Eigen::Vector2d& p, int frequencies);

/// Spatial hash of an integer grid vertex, masked to the table size.
std::uint32_t hash_vertex(std::int64_t i, std::int64_t j, std::uint32_t table_size);

/// Encoded feature vector for c. Hash encoding reads the tables in `params`.
Eigen::VectorXd encode(const FieldParams& params, const BlueprintCoord& c, const BlueprintBounds& bounds);

/// Class logits for labels 1..C_s (entry k is class k + 1).
Eigen::VectorXd forward(const FieldParams& params, const BlueprintCoord& c, const BlueprintBounds& bounds);

/// argmax of the logits as a class id; ties go to the lowest id.
int predict_label(const Eigen::Ref<const Eigen::VectorXd>& logits);

struct LossAndGrad {
    double loss = 0.0;
    std::vector<double> grad;
};

/// Mean softmax cross-entropy over the batch and its exact gradient with
/// respect to every parameter. The batch is reduced in fixed chunks, so the
/// result does not depend on `threads`.
LossAndGrad loss_and_grad(const FieldParams& params, std::span<const BlueprintSample> batch,
                          const BlueprintBounds& bounds, int threads = 1);

struct TrainConfig {
    double learning_rate = 1e-3;
    int batch_size = 4096;
    int steps = 20000;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 0;
    BlueprintBounds bounds;
    MlpConfig mlp;
    int num_classes = 0; ///< 0: largest label in the samples
    int log_every = 100;
    int threads = 1;
};

struct TrainLogEntry {
    int step = 0;
    double loss = 0.0;
};

struct TrainResult {
    FieldParams params;
    std::vector<TrainLogEntry> log;
};

/// Adam on seeded random minibatches (sampled with replacement).
TrainResult train_field(std::span<const BlueprintSample> samples, const EncoderConfig& encoder,
                        const TrainConfig& tc);

/// Evaluates the field at every cell center. No cell is left void.
BlueprintRaster rasterize_field(const FieldParams& params, const BlueprintBounds& bounds, GridSize res,
                                int threads = 1);

void write_field(const FieldParams& params, std::ostream& out);
FieldParams read_field(std::istream& in);
void save_field(const FieldParams& params, const std::string& path);
FieldParams load_field(const std::string& path);
void save_train_log(std::span<const TrainLogEntry> log, const std::string& path);

} // namespace blueprint
