/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

// Thin bindings. Structured values cross the boundary as JSON strings or
// NumPy arrays; the Python package wraps them in friendlier helpers.

#include "blueprint/baselines.hpp"
#include "blueprint/dataset.hpp"
#include "blueprint/error.hpp"
#include "blueprint/experiment.hpp"
#include "blueprint/field.hpp"
#include "blueprint/metrics.hpp"
#include "blueprint/scene.hpp"

#include <nlohmann/json.hpp>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace blueprint;

namespace {

py::array_t<std::int32_t> raster_array(const BlueprintRaster& r)
{
    // Row j of the array is blueprint row j (y increasing).
    py::array_t<std::int32_t> out({r.size.ny, r.size.nx});
    auto v = out.mutable_unchecked<2>();
    for (int j = 0; j < r.size.ny; ++j) {
        for (int i = 0; i < r.size.nx; ++i) {
            v(j, i) = r.at(i, j);
        }
    }
    return out;
}

BlueprintRaster raster_from(const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& a,
                            const std::vector<double>& b)
{
    if (a.ndim() != 2 || b.size() != 4) {
        throw Error("expected a 2-D label array and bounds [x_min, x_max, y_min, y_max]");
    }
    const BlueprintBounds bounds{b[0], b[1], b[2], b[3]};
    BlueprintRaster r(bounds, {static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0))});
    auto v = a.unchecked<2>();
    for (int j = 0; j < r.size.ny; ++j) {
        for (int i = 0; i < r.size.nx; ++i) {
            r.at(i, j) = v(j, i);
        }
    }
    return r;
}

std::vector<double> bounds_list(const BlueprintBounds& b) { return {b.x_min, b.x_max, b.y_min, b.y_max}; }

Scene scene_from(const std::string& scene_json)
{
    return scene_json.empty() ? two_room_scene() : parse_scene(nlohmann::json::parse(scene_json));
}

std::vector<View> views_for(const Scene& scene, int frames, std::uint64_t seed)
{
    std::vector<View> views;
    for (const auto& c : sample_trajectory(scene, frames, seed)) {
        views.push_back(render_view(scene, c));
    }
    return views;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Blueprint field core";
    py::register_exception<Error>(m, "BlueprintError", PyExc_ValueError);

    m.def("two_room_scene_json", [] { return scene_to_json(two_room_scene()).dump(); });

    m.def(
        "ground_truth",
        [](const std::string& scene_json, double cell_size, double gt_height) {
            const Scene s = scene_from(scene_json);
            ExperimentConfig cfg;
            cfg.cell_size = cell_size;
            cfg.gt_height = gt_height;
            const auto r = experiment_ground_truth(s, cfg);
            return py::make_tuple(raster_array(r), bounds_list(r.bounds));
        },
        py::arg("scene_json") = "", py::arg("cell_size") = 0.1, py::arg("gt_height") = 2.2);

    m.def(
        "project_views",
        [](const std::string& scene_json, int frames, std::uint64_t seed) {
            const Scene s = scene_from(scene_json);
            const auto ds = project_dataset(views_for(s, frames, seed), s.floor_bounds());
            const auto n = static_cast<py::ssize_t>(ds.samples.size());
            py::array_t<double> xyz({n, py::ssize_t{3}});
            py::array_t<std::int32_t> labels(n);
            auto p = xyz.mutable_unchecked<2>();
            auto l = labels.mutable_unchecked<1>();
            for (py::ssize_t k = 0; k < n; ++k) {
                const auto& smp = ds.samples[static_cast<std::size_t>(k)];
                p(k, 0) = smp.coord.x;
                p(k, 1) = smp.coord.y;
                p(k, 2) = smp.z;
                l(k) = smp.label;
            }
            return py::make_tuple(xyz, labels);
        },
        py::arg("scene_json") = "", py::arg("frames") = 9, py::arg("seed") = 0);

    m.def(
        "mvr",
        [](const std::string& scene_json, int frames, std::uint64_t seed, double cell_size) {
            const Scene s = scene_from(scene_json);
            const auto bounds = experiment_bounds(s);
            const auto r = mvr_blueprint(views_for(s, frames, seed), bounds, experiment_grid(s, cell_size));
            return raster_array(r);
        },
        py::arg("scene_json") = "", py::arg("frames") = 9, py::arg("seed") = 0, py::arg("cell_size") = 0.1);

    m.def(
        "train_blueprint",
        [](const std::string& scene_json, const std::string& config_json, int frames, std::uint64_t seed) {
            const Scene s = scene_from(scene_json);
            ExperimentConfig cfg = experiment_config_from_json(nlohmann::json::parse(config_json));
            const auto bounds = experiment_bounds(s);
            const auto ds = project_dataset(views_for(s, frames, seed), bounds);
            const auto enc = experiment_encoder(cfg, cfg.encoders.front());
            TrainResult result;
            {
                py::gil_scoped_release release;
                result = train_field(ds.samples, enc, experiment_train_config(cfg, s, seed));
            }
            std::vector<double> losses;
            for (const auto& e : result.log) {
                losses.push_back(e.loss);
            }
            const auto r = rasterize_field(result.params, bounds, experiment_grid(s, cfg.cell_size), cfg.threads);
            return py::make_tuple(raster_array(r), losses);
        },
        py::arg("scene_json") = "", py::arg("config_json") = "{}", py::arg("frames") = 9, py::arg("seed") = 0);

    m.def(
        "evaluate",
        [](const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& pred,
           const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& gt,
           const std::vector<double>& bounds) {
            return metrics_to_json(evaluate(raster_from(pred, bounds), raster_from(gt, bounds))).dump();
        },
        py::arg("pred"), py::arg("gt"), py::arg("bounds") = std::vector<double>{0.0, 1.0, 0.0, 1.0});

    m.def(
        "run_experiment",
        [](const std::string& config_json) {
            const auto cfg = experiment_config_from_json(nlohmann::json::parse(config_json));
            std::vector<ExperimentRow> rows;
            {
                py::gil_scoped_release release;
                rows = run_experiment(cfg);
            }
            return rows_to_csv(rows);
        },
        py::arg("config_json"));
}
