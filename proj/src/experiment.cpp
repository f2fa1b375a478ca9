/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "blueprint/experiment.hpp"
#include "blueprint/baselines.hpp"
#include "blueprint/dataset.hpp"
#include "blueprint/error.hpp"
#include "blueprint/image_io.hpp"
#include "blueprint/metrics.hpp"
#include "blueprint/volume.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

namespace blueprint {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Method m)
{
    switch (m) {
    case Method::blunf:
        return "blunf";
    case Method::mvr:
        return "mvr";
    case Method::nerf_top:
        return "nerf_top";
    }
    return "mvr";
}

Method method_from_string(const std::string& s)
{
    if (s == "blunf") {
        return Method::blunf;
    }
    if (s == "mvr") {
        return Method::mvr;
    }
    if (s == "nerf_top" || s == "nerf-top") {
        return Method::nerf_top;
    }
    throw Error("unknown method '" + s + "'");
}

std::string to_string(DepthSource d) { return d == DepthSource::gt ? "gt" : "degraded"; }

DepthSource depth_source_from_string(const std::string& s)
{
    if (s == "gt") {
        return DepthSource::gt;
    }
    if (s == "degraded") {
        return DepthSource::degraded;
    }
    throw Error("unknown depth source '" + s + "'");
}

void ExperimentConfig::validate() const
{
    if (frame_counts.empty()) {
        throw Error("experiment needs at least one frame count");
    }
    for (int n : frame_counts) {
        if (n < 1) {
            throw Error("frame counts must be positive");
        }
    }
    if (methods.empty()) {
        throw Error("experiment needs at least one method");
    }
    if (depth_sources.empty() || seeds.empty()) {
        throw Error("experiment needs a depth source and a seed");
    }
    if (std::count(methods.begin(), methods.end(), Method::blunf) > 0 && encoders.empty()) {
        throw Error("blunf runs need at least one encoder");
    }
    if (!(cell_size > 0.0) || !(voxel_size > 0.0)) {
        throw Error("cell and voxel sizes must be positive");
    }
    if (!(learning_rate > 0.0) || batch_size < 1 || steps < 0) {
        throw Error("invalid training settings");
    }
    if (nerf_samples < 2) {
        throw Error("nerf_samples must be at least 2");
    }
    if (output_dir.empty()) {
        throw Error("output directory not set");
    }
}

namespace {

template <class T>
void read_opt(const json& j, const char* key, T& out)
{
    if (auto it = j.find(key); it != j.end()) {
        out = it->get<T>();
    }
}

json trajectory_to_json(const TrajectoryConfig& t)
{
    return {{"width", t.width},
            {"height", t.height},
            {"hfov_deg", t.hfov_deg},
            {"eye_height", t.eye_height},
            {"height_jitter", t.height_jitter},
            {"pitch_min_deg", t.pitch_min_deg},
            {"pitch_max_deg", t.pitch_max_deg},
            {"loop_scale", t.loop_scale},
            {"position_jitter", t.position_jitter},
            {"yaw_jitter_rad", t.yaw_jitter_rad},
            {"clearance", t.clearance}};
}

TrajectoryConfig trajectory_from_json(const json& j)
{
    TrajectoryConfig t;
    read_opt(j, "width", t.width);
    read_opt(j, "height", t.height);
    read_opt(j, "hfov_deg", t.hfov_deg);
    read_opt(j, "eye_height", t.eye_height);
    read_opt(j, "height_jitter", t.height_jitter);
    read_opt(j, "pitch_min_deg", t.pitch_min_deg);
    read_opt(j, "pitch_max_deg", t.pitch_max_deg);
    read_opt(j, "loop_scale", t.loop_scale);
    read_opt(j, "position_jitter", t.position_jitter);
    read_opt(j, "yaw_jitter_rad", t.yaw_jitter_rad);
    read_opt(j, "clearance", t.clearance);
    return t;
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

/// Keeps CSV cells on one line and free of separators.
std::string csv_text(std::string s)
{
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r' || c == '"') {
            c = ' ';
        }
    }
    return s;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << text;
}

/// Views and ground truth shared by every configuration of one seed.
struct SeedData {
    std::vector<View> gt_views;
    std::vector<View> degraded_views;
};

SeedData render_seed(const Scene& scene, const ExperimentConfig& cfg, std::uint64_t seed, int max_frames)
{
    SeedData d;
    const auto cams = sample_trajectory(scene, max_frames, seed, cfg.trajectory);
    const bool need_degraded = std::count(cfg.depth_sources.begin(), cfg.depth_sources.end(), DepthSource::degraded) > 0;
    for (std::size_t k = 0; k < cams.size(); ++k) {
        d.gt_views.push_back(render_view(scene, cams[k], cfg.threads));
        if (need_degraded) {
            d.degraded_views.push_back(degrade_depth(d.gt_views.back(), cfg.depth_noise.sigma_rel,
                                                     cfg.depth_noise.dropout, seed * 1000003ull + k));
        }
    }
    return d;
}

struct RunContext {
    const ExperimentConfig& cfg;
    const Scene& scene;
    BlueprintBounds bounds;
    GridSize grid;
    BlueprintRaster gt;
    std::vector<Rgb8> palette;
    fs::path out;
};

void finish_row(ExperimentRow& row, const RunContext& ctx, const BlueprintRaster& raster, const fs::path& dir)
{
    const auto report = evaluate(raster, ctx.gt);
    row.pacc = report.pacc;
    row.fwiou = report.fwiou;
    row.completeness = report.completeness;
    row.evaluated_cells = report.evaluated_cells;
    auto j = metrics_to_json(report);
    j["seed"] = row.seed;
    j["depth"] = to_string(row.depth);
    j["frames"] = row.frames;
    j["method"] = to_string(row.method);
    if (row.encoder) {
        j["encoder"] = to_string(*row.encoder);
    }
    if (row.best_height) {
        j["best_height"] = *row.best_height;
    }
    write_text(dir / "metrics.json", j.dump(2) + "\n");
    save_raster(raster, ctx.palette, (dir / "blueprint").string());
    row.ok = true;
}

std::string row_dir(const ExperimentRow& row)
{
    std::string leaf = to_string(row.method);
    if (row.encoder) {
        leaf += "_" + to_string(*row.encoder);
    }
    return "seed_" + std::to_string(row.seed) + "/" + to_string(row.depth) + "/frames_" + std::to_string(row.frames) +
           "/" + leaf;
}

/// One configuration; errors are captured in the row.
template <class Build>
ExperimentRow run_one(const RunContext& ctx, ExperimentRow row, Build&& build)
{
    row.directory = row_dir(row);
    try {
        const fs::path dir = ctx.out / row.directory;
        fs::create_directories(dir);
        const BlueprintRaster raster = build(row, dir);
        finish_row(row, ctx, raster, dir);
    } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
    }
    return row;
}

RunContext make_context(const ExperimentConfig& cfg, const Scene& scene)
{
    RunContext ctx{cfg, scene, experiment_bounds(scene), experiment_grid(scene, cfg.cell_size), {}, scene.palette(),
                   fs::path(cfg.output_dir)};
    ctx.gt = experiment_ground_truth(scene, cfg);
    fs::create_directories(ctx.out);
    save_raster(ctx.gt, ctx.palette, (ctx.out / "ground_truth").string());
    write_text(ctx.out / "config.json", experiment_config_to_json(cfg).dump(2) + "\n");
    return ctx;
}

BlueprintRaster train_and_rasterize(const RunContext& ctx, std::span<const View> views, EncoderKind kind,
                                    std::uint64_t seed, const fs::path& dir)
{
    const auto ds = project_dataset(views, ctx.bounds);
    const auto tc = experiment_train_config(ctx.cfg, ctx.scene, seed);
    const auto result = train_field(ds.samples, experiment_encoder(ctx.cfg, kind), tc);
    save_field(result.params, (dir / "field.blnf").string());
    save_train_log(result.log, (dir / "train_log.jsonl").string());
    return rasterize_field(result.params, ctx.bounds, ctx.grid, ctx.cfg.threads);
}

} // namespace

ExperimentConfig experiment_config_from_json(const json& j)
{
    ExperimentConfig c;
    try {
        read_opt(j, "scene", c.scene_path);
        read_opt(j, "frame_counts", c.frame_counts);
        if (auto it = j.find("methods"); it != j.end()) {
            c.methods.clear();
            for (const auto& m : *it) {
                c.methods.push_back(method_from_string(m.get<std::string>()));
            }
        }
        if (auto it = j.find("depth_sources"); it != j.end()) {
            c.depth_sources.clear();
            for (const auto& d : *it) {
                c.depth_sources.push_back(depth_source_from_string(d.get<std::string>()));
            }
        }
        if (auto it = j.find("encoders"); it != j.end()) {
            c.encoders.clear();
            for (const auto& e : *it) {
                c.encoders.push_back(encoder_kind_from_string(e.get<std::string>()));
            }
        }
        read_opt(j, "cell_size", c.cell_size);
        read_opt(j, "seeds", c.seeds);
        read_opt(j, "output_dir", c.output_dir);
        read_opt(j, "gt_height", c.gt_height);
        if (auto it = j.find("culled_classes"); it != j.end()) {
            c.culled_classes = it->get<std::vector<int>>();
        }
        if (auto it = j.find("trajectory"); it != j.end()) {
            c.trajectory = trajectory_from_json(*it);
        }
        if (auto it = j.find("depth_noise"); it != j.end()) {
            read_opt(*it, "sigma_rel", c.depth_noise.sigma_rel);
            read_opt(*it, "dropout", c.depth_noise.dropout);
        }
        read_opt(j, "frequencies", c.frequencies);
        if (auto it = j.find("hash"); it != j.end()) {
            read_opt(*it, "levels", c.hash.levels);
            read_opt(*it, "base_resolution", c.hash.base_resolution);
            read_opt(*it, "per_level_scale", c.hash.per_level_scale);
            read_opt(*it, "table_size", c.hash.table_size);
            read_opt(*it, "features_per_entry", c.hash.features_per_entry);
        }
        read_opt(j, "omega0", c.omega0);
        if (auto it = j.find("mlp"); it != j.end()) {
            read_opt(*it, "hidden_layers", c.mlp.hidden_layers);
            read_opt(*it, "hidden_width", c.mlp.hidden_width);
        }
        read_opt(j, "learning_rate", c.learning_rate);
        read_opt(j, "batch_size", c.batch_size);
        read_opt(j, "steps", c.steps);
        read_opt(j, "voxel_size", c.voxel_size);
        read_opt(j, "nerf_samples", c.nerf_samples);
        read_opt(j, "threads", c.threads);
    } catch (const json::exception& e) {
        throw Error(std::string("experiment config: ") + e.what());
    }
    c.validate();
    return c;
}

json experiment_config_to_json(const ExperimentConfig& c)
{
    json methods = json::array();
    for (auto m : c.methods) {
        methods.push_back(to_string(m));
    }
    json depths = json::array();
    for (auto d : c.depth_sources) {
        depths.push_back(to_string(d));
    }
    json encoders = json::array();
    for (auto e : c.encoders) {
        encoders.push_back(to_string(e));
    }
    json j = {{"scene", c.scene_path},
              {"frame_counts", c.frame_counts},
              {"methods", methods},
              {"depth_sources", depths},
              {"encoders", encoders},
              {"cell_size", c.cell_size},
              {"seeds", c.seeds},
              {"output_dir", c.output_dir},
              {"gt_height", c.gt_height},
              {"trajectory", trajectory_to_json(c.trajectory)},
              {"depth_noise", {{"sigma_rel", c.depth_noise.sigma_rel}, {"dropout", c.depth_noise.dropout}}},
              {"frequencies", c.frequencies},
              {"hash",
               {{"levels", c.hash.levels},
                {"base_resolution", c.hash.base_resolution},
                {"per_level_scale", c.hash.per_level_scale},
                {"table_size", c.hash.table_size},
                {"features_per_entry", c.hash.features_per_entry}}},
              {"omega0", c.omega0},
              {"mlp", {{"hidden_layers", c.mlp.hidden_layers}, {"hidden_width", c.mlp.hidden_width}}},
              {"learning_rate", c.learning_rate},
              {"batch_size", c.batch_size},
              {"steps", c.steps},
              {"voxel_size", c.voxel_size},
              {"nerf_samples", c.nerf_samples},
              {"threads", c.threads}};
    if (c.culled_classes) {
        j["culled_classes"] = *c.culled_classes;
    }
    return j;
}

ExperimentConfig load_experiment_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open experiment config " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error("experiment config " + path + ": " + e.what());
    }
    return experiment_config_from_json(j);
}

Scene experiment_scene(const ExperimentConfig& cfg)
{
    return cfg.scene_path.empty() ? two_room_scene() : load_scene(cfg.scene_path);
}

BlueprintBounds experiment_bounds(const Scene& scene) { return scene.floor_bounds(); }

GridSize experiment_grid(const Scene& scene, double cell_size)
{
    const auto b = scene.floor_bounds();
    return {std::max(1, static_cast<int>(std::lround(b.width() / cell_size))),
            std::max(1, static_cast<int>(std::lround(b.depth() / cell_size)))};
}

BlueprintRaster experiment_ground_truth(const Scene& scene, const ExperimentConfig& cfg)
{
    std::set<int> culled = default_culled_classes(scene);
    if (cfg.culled_classes) {
        culled = {scene.ceiling_class};
        culled.insert(cfg.culled_classes->begin(), cfg.culled_classes->end());
    }
    return ground_truth_blueprint(scene, experiment_bounds(scene), experiment_grid(scene, cfg.cell_size),
                                  scene.room.min.z() + cfg.gt_height, culled);
}

TrainConfig experiment_train_config(const ExperimentConfig& cfg, const Scene& scene, std::uint64_t seed)
{
    TrainConfig tc;
    tc.learning_rate = cfg.learning_rate;
    tc.batch_size = cfg.batch_size;
    tc.steps = cfg.steps;
    tc.seed = seed;
    tc.bounds = experiment_bounds(scene);
    tc.mlp = cfg.mlp;
    tc.num_classes = scene.num_classes();
    tc.threads = cfg.threads;
    return tc;
}

EncoderConfig experiment_encoder(const ExperimentConfig& cfg, EncoderKind kind)
{
    EncoderConfig e;
    e.kind = kind;
    e.frequencies = cfg.frequencies;
    e.hash = cfg.hash;
    e.omega0 = cfg.omega0;
    e.validate();
    return e;
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    const Scene scene = experiment_scene(cfg);
    RunContext ctx = make_context(cfg, scene);
    const int max_frames = *std::max_element(cfg.frame_counts.begin(), cfg.frame_counts.end());
    const bool want_nerf = std::count(cfg.methods.begin(), cfg.methods.end(), Method::nerf_top) > 0;

    std::optional<VolumeProxy> proxy;
    std::optional<NerfTopResult> nerf;
    if (want_nerf) {
        proxy = build_volume_proxy(scene, cfg.voxel_size);
    }

    std::vector<ExperimentRow> rows;
    for (const auto seed : cfg.seeds) {
        std::optional<SeedData> data;
        std::string data_error;
        try {
            data = render_seed(scene, cfg, seed, max_frames);
        } catch (const std::exception& e) {
            data_error = e.what();
        }
        for (const auto depth : cfg.depth_sources) {
            for (const int frames : cfg.frame_counts) {
                for (const auto method : cfg.methods) {
                    std::vector<std::optional<EncoderKind>> encoders{std::nullopt};
                    if (method == Method::blunf) {
                        encoders.assign(cfg.encoders.begin(), cfg.encoders.end());
                    }
                    for (const auto& enc : encoders) {
                        ExperimentRow row;
                        row.seed = seed;
                        row.depth = depth;
                        row.frames = frames;
                        row.method = method;
                        row.encoder = enc;
                        rows.push_back(run_one(ctx, row, [&](ExperimentRow& r, const fs::path& dir) {
                            if (!data) {
                                throw Error(data_error);
                            }
                            const auto& all = depth == DepthSource::gt ? data->gt_views : data->degraded_views;
                            const std::span<const View> views(all.data(), static_cast<std::size_t>(frames));
                            switch (method) {
                            case Method::mvr:
                                return mvr_blueprint(views, ctx.bounds, ctx.grid);
                            case Method::blunf:
                                return train_and_rasterize(ctx, views, *enc, seed, dir);
                            case Method::nerf_top:
                                break;
                            }
                            // The proxy stands in for a NeRF trained on all views, so
                            // the result does not depend on frames or depth source.
                            if (!nerf) {
                                nerf = nerf_top_blueprint(*proxy, default_nerf_top_config(scene), ctx.bounds,
                                                          ctx.grid, ctx.gt, cfg.threads);
                            }
                            r.best_height = nerf->best_height;
                            return nerf->raster;
                        }));
                    }
                }
            }
        }
    }
    write_text(ctx.out / "results.csv", rows_to_csv(rows));
    return rows;
}

std::vector<ExperimentRow> run_frame_sweep(const ExperimentConfig& base, const std::vector<int>& counts)
{
    if (counts.empty()) {
        throw Error("sweep needs at least one frame count");
    }
    if (!std::is_sorted(counts.begin(), counts.end(), std::greater<>())) {
        throw Error("sweep frame counts must be sorted in descending order");
    }
    ExperimentConfig cfg = base;
    cfg.frame_counts = counts;
    cfg.methods = {Method::blunf, Method::mvr};
    cfg.validate();
    const Scene scene = experiment_scene(cfg);
    RunContext ctx = make_context(cfg, scene);

    std::vector<ExperimentRow> rows;
    for (const auto seed : cfg.seeds) {
        std::optional<SeedData> data;
        std::string data_error;
        try {
            data = render_seed(scene, cfg, seed, counts.front());
        } catch (const std::exception& e) {
            data_error = e.what();
        }
        for (const auto depth : cfg.depth_sources) {
            for (const int frames : counts) {
                std::vector<ExperimentRow> pending;
                for (const auto enc : cfg.encoders) {
                    ExperimentRow row;
                    row.method = Method::blunf;
                    row.encoder = enc;
                    pending.push_back(row);
                }
                ExperimentRow mvr;
                mvr.method = Method::mvr;
                pending.push_back(mvr);
                for (auto row : pending) {
                    row.seed = seed;
                    row.depth = depth;
                    row.frames = frames;
                    rows.push_back(run_one(ctx, row, [&](ExperimentRow& r, const fs::path& dir) {
                        if (!data) {
                            throw Error(data_error);
                        }
                        const auto& all = depth == DepthSource::gt ? data->gt_views : data->degraded_views;
                        const std::span<const View> views(all.data(), static_cast<std::size_t>(frames));
                        if (r.method == Method::mvr) {
                            return mvr_blueprint(views, ctx.bounds, ctx.grid);
                        }
                        return train_and_rasterize(ctx, views, *r.encoder, seed, dir);
                    }));
                }
            }
        }
    }
    write_text(ctx.out / "sweep.csv", rows_to_csv(rows));
    return rows;
}

std::string rows_to_csv(const std::vector<ExperimentRow>& rows)
{
    std::string out = "seed,depth,frames,method,encoder,status,pacc,fwiou,completeness,evaluated_cells,best_height,"
                      "directory,error\n";
    for (const auto& r : rows) {
        out += std::to_string(r.seed) + "," + to_string(r.depth) + "," + std::to_string(r.frames) + "," +
               to_string(r.method) + "," + (r.encoder ? to_string(*r.encoder) : std::string("-")) + "," +
               (r.ok ? "ok" : "failed") + ",";
        if (r.ok) {
            out += fmt(r.pacc) + "," + fmt(r.fwiou) + "," + fmt(r.completeness) + "," +
                   std::to_string(r.evaluated_cells) + ",";
        } else {
            out += ",,,,";
        }
        out += (r.best_height ? fmt(*r.best_height) : std::string()) + "," + r.directory + "," + csv_text(r.error) +
               "\n";
    }
    return out;
}

} // namespace blueprint
