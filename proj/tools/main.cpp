/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

// Command line front end: scene generation, view rendering, training,
// reconstruction, evaluation, experiments and the HTTP service.

#include "blueprint/baselines.hpp"
#include "blueprint/dataset.hpp"
#include "blueprint/error.hpp"
#include "blueprint/experiment.hpp"
#include "blueprint/field.hpp"
#include "blueprint/image_io.hpp"
#include "blueprint/metrics.hpp"
#include "blueprint/scene.hpp"
#include "blueprint/service.hpp"
#include "blueprint/volume.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace blueprint;
namespace fs = std::filesystem;

namespace {

Scene scene_or_default(const std::string& path) { return path.empty() ? two_room_scene() : load_scene(path); }

GridSize grid(const Scene& scene, double cell) { return experiment_grid(scene, cell); }

struct ViewSource {
    std::string views_dir;
    std::string scene;
    int frames = 9;
    std::uint64_t seed = 0;
    bool degraded = false;

    void add(CLI::App* app)
    {
        app->add_option("--views", views_dir, "directory written by render-views");
        app->add_option("--scene", scene, "scene JSON (default: bundled two-room scene)");
        app->add_option("--frames", frames, "trajectory frames when rendering on the fly")->check(CLI::PositiveNumber);
        app->add_option("--seed", seed, "trajectory seed");
        app->add_flag("--degraded", degraded, "use noisy depth");
    }

    std::vector<View> load(const Scene& s) const
    {
        if (!views_dir.empty()) {
            return load_views(views_dir);
        }
        std::vector<View> views;
        for (const auto& cam : sample_trajectory(s, frames, seed)) {
            View v = render_view(s, cam);
            if (degraded) {
                const DepthNoise noise;
                v = degrade_depth(v, noise.sigma_rel, noise.dropout, seed * 1000003ull + views.size());
            }
            views.push_back(std::move(v));
        }
        return views;
    }
};

void write_json(const std::string& path, const nlohmann::json& j)
{
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path);
    }
    out << j.dump(2) << '\n';
}

HttpServer* g_server = nullptr;

void on_signal(int)
{
    if (g_server) {
        g_server->stop();
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Semantic blueprint reconstruction and editing"};
    app.require_subcommand(1);

    // gen-scene
    std::string gen_out = "two_room.json";
    auto* gen = app.add_subcommand("gen-scene", "write the bundled two-room scene as JSON");
    gen->add_option("-o,--out", gen_out, "output path");

    // render-views
    std::string rv_scene;
    std::string rv_out = "views";
    int rv_frames = 9;
    std::uint64_t rv_seed = 0;
    bool rv_degraded = false;
    auto* rv = app.add_subcommand("render-views", "render semantic/depth/rgb views along the trajectory");
    rv->add_option("--scene", rv_scene, "scene JSON (default: bundled)");
    rv->add_option("--frames", rv_frames, "number of views")->check(CLI::PositiveNumber);
    rv->add_option("--seed", rv_seed, "trajectory seed");
    rv->add_flag("--degraded", rv_degraded, "apply depth noise and dropout");
    rv->add_option("-o,--out", rv_out, "output directory");

    // train
    ViewSource tr_src;
    std::string tr_encoder = "positional";
    std::string tr_out = "field.blnf";
    std::string tr_log;
    TrainConfig tr_cfg;
    EncoderConfig tr_enc;
    int tr_threads = 1;
    auto* tr = app.add_subcommand("train", "train a blueprint field");
    tr_src.add(tr);
    tr->add_option("--encoder", tr_encoder, "identity | positional | hash | sinusoidal");
    tr->add_option("--frequencies", tr_enc.frequencies, "positional encoding frequencies");
    tr->add_option("--steps", tr_cfg.steps, "Adam steps");
    tr->add_option("--batch", tr_cfg.batch_size, "batch size");
    tr->add_option("--lr", tr_cfg.learning_rate, "learning rate");
    tr->add_option("--layers", tr_cfg.mlp.hidden_layers, "hidden layers");
    tr->add_option("--width", tr_cfg.mlp.hidden_width, "hidden width");
    tr->add_option("--train-seed", tr_cfg.seed, "initialization and batching seed");
    tr->add_option("--threads", tr_threads, "worker threads (1 = bit-reproducible)");
    tr->add_option("-o,--out", tr_out, "field file");
    tr->add_option("--log", tr_log, "training log (JSON lines)");

    // reconstruct
    ViewSource rc_src;
    std::string rc_method = "mvr";
    std::string rc_field;
    std::string rc_out = "blueprint";
    double rc_cell = 0.1;
    double rc_gt_height = 2.2;
    double rc_voxel = 0.05;
    auto* rc = app.add_subcommand("reconstruct", "build a blueprint raster");
    rc_src.add(rc);
    rc->add_option("--method", rc_method, "blunf | mvr | nerf-top")
        ->check(CLI::IsMember({"blunf", "mvr", "nerf-top", "nerf_top"}));
    rc->add_option("--field", rc_field, "trained field (blunf)");
    rc->add_option("--cell", rc_cell, "cell size in meters");
    rc->add_option("--gt-height", rc_gt_height, "ground-truth height used to pick the NeRF-top height");
    rc->add_option("--voxel", rc_voxel, "volume proxy voxel size (nerf-top)");
    rc->add_option("-o,--out", rc_out, "output stem (writes .png and .json)");

    // eval
    std::string ev_pred;
    std::string ev_gt;
    std::string ev_scene;
    std::string ev_out;
    double ev_gt_height = 2.2;
    auto* ev = app.add_subcommand("eval", "score a blueprint raster against ground truth");
    ev->add_option("--pred", ev_pred, "predicted raster (.png or .json)")->required();
    ev->add_option("--gt", ev_gt, "ground-truth raster; computed from --scene when omitted");
    ev->add_option("--scene", ev_scene, "scene JSON (default: bundled)");
    ev->add_option("--gt-height", ev_gt_height, "height of the ground-truth projection");
    ev->add_option("-o,--out", ev_out, "metrics JSON (default: stdout)");

    // experiment
    std::string ex_config;
    std::string ex_out;
    auto* ex = app.add_subcommand("experiment", "run a configured experiment grid");
    ex->add_option("--config", ex_config, "experiment JSON")->required();
    ex->add_option("-o,--out", ex_out, "override output directory");

    // sweep
    std::string sw_config;
    std::string sw_out;
    std::vector<int> sw_counts{90, 45, 9, 5, 3, 1};
    auto* sw = app.add_subcommand("sweep", "blunf vs mvr across descending frame counts");
    sw->add_option("--config", sw_config, "experiment JSON (defaults when omitted)");
    sw->add_option("--counts", sw_counts, "frame counts, descending")->delimiter(',');
    sw->add_option("-o,--out", sw_out, "override output directory");

    // serve
    std::string sv_bind = "127.0.0.1:8080";
    std::string sv_scene;
    std::string sv_field;
    ServiceOptions sv_opts;
    StartupTraining sv_train;
    sv_train.train.steps = 1500;
    sv_train.train.batch_size = 1024;
    sv_train.train.mlp = {3, 64};
    auto* sv = app.add_subcommand("serve", "serve the blueprint/edit/render HTTP API");
    sv->add_option("--bind", sv_bind, "host:port");
    sv->add_option("--scene", sv_scene, "scene JSON (default: bundled)");
    sv->add_option("--field", sv_field, "trained field; trains on start when omitted");
    sv->add_option("--train-frames", sv_train.frames, "frames used when training on start");
    sv->add_option("--train-steps", sv_train.train.steps, "steps used when training on start");
    sv->add_option("--cameras", sv_opts.cameras, "render cameras offered by /api/cameras");
    sv->add_option("--samples", sv_opts.samples_per_ray, "samples per ray");
    sv->add_option("--threads", sv_opts.threads, "render threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            save_scene(two_room_scene(), gen_out);
            std::cout << "wrote " << gen_out << '\n';
        } else if (*rv) {
            const Scene scene = scene_or_default(rv_scene);
            ViewSource src;
            src.frames = rv_frames;
            src.seed = rv_seed;
            src.degraded = rv_degraded;
            const auto views = src.load(scene);
            save_views(views, scene.palette(), rv_out);
            std::cout << "wrote " << views.size() << " views to " << rv_out << '\n';
        } else if (*tr) {
            const Scene scene = scene_or_default(tr_src.scene);
            const auto views = tr_src.load(scene);
            const auto ds = project_dataset(views, scene.floor_bounds());
            tr_enc.kind = encoder_kind_from_string(tr_encoder);
            tr_cfg.bounds = scene.floor_bounds();
            tr_cfg.num_classes = scene.num_classes();
            tr_cfg.threads = tr_threads;
            const auto result = train_field(ds.samples, tr_enc, tr_cfg);
            save_field(result.params, tr_out);
            if (!tr_log.empty()) {
                save_train_log(result.log, tr_log);
            }
            std::cout << "trained on " << ds.samples.size() << " samples, final loss "
                      << (result.log.empty() ? 0.0 : result.log.back().loss) << ", wrote " << tr_out << '\n';
        } else if (*rc) {
            const Scene scene = scene_or_default(rc_src.scene);
            const auto bounds = scene.floor_bounds();
            const auto res = grid(scene, rc_cell);
            BlueprintRaster raster;
            if (rc_method == "mvr") {
                raster = mvr_blueprint(rc_src.load(scene), bounds, res);
            } else if (rc_method == "blunf") {
                if (rc_field.empty()) {
                    throw Error("--field is required for blunf");
                }
                raster = rasterize_field(load_field(rc_field), bounds, res);
            } else {
                const auto gt = ground_truth_blueprint(scene, bounds, res, scene.room.min.z() + rc_gt_height,
                                                       default_culled_classes(scene));
                const auto proxy = build_volume_proxy(scene, rc_voxel);
                const auto r = nerf_top_blueprint(proxy, default_nerf_top_config(scene), bounds, res, gt);
                raster = r.raster;
                std::cout << "best height " << r.best_height << '\n';
            }
            save_raster(raster, scene.palette(), rc_out);
            std::cout << "wrote " << rc_out << ".png, completeness " << completeness(raster) << '\n';
        } else if (*ev) {
            const auto pred = load_raster(ev_pred);
            BlueprintRaster gt;
            if (!ev_gt.empty()) {
                gt = load_raster(ev_gt);
            } else {
                const Scene scene = scene_or_default(ev_scene);
                gt = ground_truth_blueprint(scene, pred.bounds, pred.size, scene.room.min.z() + ev_gt_height,
                                            default_culled_classes(scene));
            }
            write_json(ev_out, metrics_to_json(evaluate(pred, gt)));
        } else if (*ex) {
            auto cfg = load_experiment_config(ex_config);
            if (!ex_out.empty()) {
                cfg.output_dir = ex_out;
            }
            const auto rows = run_experiment(cfg);
            std::size_t failed = 0;
            for (const auto& r : rows) {
                failed += r.ok ? 0 : 1;
            }
            std::cout << rows.size() << " configurations, " << failed << " failed; results in "
                      << (fs::path(cfg.output_dir) / "results.csv").string() << '\n';
            return failed == 0 ? 0 : 3;
        } else if (*sw) {
            ExperimentConfig cfg = sw_config.empty() ? ExperimentConfig{} : load_experiment_config(sw_config);
            if (!sw_out.empty()) {
                cfg.output_dir = sw_out;
            }
            const auto rows = run_frame_sweep(cfg, sw_counts);
            std::cout << rows_to_csv(rows);
        } else if (*sv) {
            Scene scene = scene_or_default(sv_scene);
            std::unique_ptr<Service> service;
            if (sv_field.empty()) {
                std::cout << "training field on " << sv_train.frames << " frames..." << std::endl;
                sv_train.encoder.kind = EncoderKind::positional;
                service = Service::train_on_start(std::move(scene), sv_train, sv_opts);
            } else {
                service = std::make_unique<Service>(std::move(scene), load_field(sv_field), sv_opts);
            }
            const auto [host, port] = parse_bind_address(sv_bind);
            HttpServer server(*service);
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cout << "listening on " << host << ":" << port << std::endl;
            server.run(host, port);
            g_server = nullptr;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
