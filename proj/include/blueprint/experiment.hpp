/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "blueprint/field.hpp"
#include "blueprint/scene.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace blueprint {

enum class Method { blunf, mvr, nerf_top };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

enum class DepthSource { gt, degraded };

std::string to_string(DepthSource d);
DepthSource depth_source_from_string(const std::string& s);

struct ExperimentConfig {
    std::string scene_path; ///< empty: bundled two-room scene
    std::vector<int> frame_counts{90, 45, 9};
    std::vector<Method> methods{Method::blunf, Method::mvr, Method::nerf_top};
    std::vector<DepthSource> depth_sources{DepthSource::gt};
    std::vector<EncoderKind> encoders{EncoderKind::positional};
    double cell_size = 0.1; ///< blueprint resolution in meters
    std::vector<std::uint64_t> seeds{0};
    std::string output_dir = "results";

    // Ground truth.
    double gt_height = 2.2;
    std::optional<std::vector<int>> culled_classes; ///< default: ceiling and lamps

    // Views.
    TrajectoryConfig trajectory;
    DepthNoise depth_noise;

    // Field.
    int frequencies = 10;
    HashConfig hash;
    double omega0 = 30.0;
    MlpConfig mlp;
    double learning_rate = 1e-3;
    int batch_size = 4096;
    int steps = 20000;

    // NeRF-top.
    double voxel_size = 0.05;
    int nerf_samples = 64;

    int threads = 1;

    void validate() const;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_experiment_config(const std::string& path);

struct ExperimentRow {
    std::uint64_t seed = 0;
    DepthSource depth = DepthSource::gt;
    int frames = 0;
    Method method = Method::mvr;
    std::optional<EncoderKind> encoder; ///< blunf only
    bool ok = false;
    std::string error;
    double pacc = 0.0;
    double fwiou = 0.0;
    double completeness = 0.0;
    std::int64_t evaluated_cells = 0;
    std::optional<double> best_height; ///< nerf_top only
    std::string directory;             ///< relative to the output directory
};

/// Runs every (seed x depth source x frame count x method x encoder)
/// configuration. Each writes metrics.json and blueprint.png/.json under
/// <out>/seed_<s>/<depth>/frames_<n>/<method>[_<encoder>]/; all rows are
/// collected in <out>/results.csv. A failing configuration is recorded as a
/// failed row and the rest still run.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg);

/// blunf and mvr over `counts` (sorted descending) on nested trajectories.
/// Writes <out>/sweep.csv.
std::vector<ExperimentRow> run_frame_sweep(const ExperimentConfig& cfg, const std::vector<int>& counts);

std::string rows_to_csv(const std::vector<ExperimentRow>& rows);

/// Scene named by the config, or the bundled one.
Scene experiment_scene(const ExperimentConfig& cfg);
BlueprintBounds experiment_bounds(const Scene& scene);
GridSize experiment_grid(const Scene& scene, double cell_size);
BlueprintRaster experiment_ground_truth(const Scene& scene, const ExperimentConfig& cfg);
TrainConfig experiment_train_config(const ExperimentConfig& cfg, const Scene& scene, std::uint64_t seed);
EncoderConfig experiment_encoder(const ExperimentConfig& cfg, EncoderKind kind);

} // namespace blueprint
