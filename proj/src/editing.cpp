/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "blueprint/editing.hpp"
#include "blueprint/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace blueprint {

std::vector<CellIndex> ComponentMap::cells_of(int id) const
{
    std::vector<CellIndex> out;
    for (int j = 0; j < size.ny; ++j) {
        for (int i = 0; i < size.nx; ++i) {
            if (at(i, j) == id) {
                out.push_back({i, j});
            }
        }
    }
    return out;
}

ComponentMap connected_components(const BlueprintRaster& raster, std::span<const BlueprintSample> samples,
                                  double room_z_min, double room_z_max)
{
    ComponentMap cmap;
    cmap.bounds = raster.bounds;
    cmap.size = raster.size;
    cmap.ids.assign(raster.size.cells(), 0);

    const int nx = raster.size.nx;
    const int ny = raster.size.ny;
    const double cw = raster.bounds.width() / nx;
    const double ch = raster.bounds.depth() / ny;

    std::deque<CellIndex> queue;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int cls = raster.at(i, j);
            if (cls == kVoidClass || cmap.ids[static_cast<std::size_t>(j) * nx + i] != 0) {
                continue;
            }
            ComponentInfo info;
            info.id = static_cast<int>(cmap.components.size()) + 1;
            info.class_id = cls;
            info.min_cell = {i, j};
            info.max_cell = {i, j};

            cmap.ids[static_cast<std::size_t>(j) * nx + i] = info.id;
            queue.push_back({i, j});
            while (!queue.empty()) {
                const CellIndex c = queue.front();
                queue.pop_front();
                ++info.cells;
                info.min_cell = {std::min(info.min_cell.i, c.i), std::min(info.min_cell.j, c.j)};
                info.max_cell = {std::max(info.max_cell.i, c.i), std::max(info.max_cell.j, c.j)};
                const CellIndex next[4] = {{c.i - 1, c.j}, {c.i + 1, c.j}, {c.i, c.j - 1}, {c.i, c.j + 1}};
                for (const auto& n : next) {
                    if (n.i < 0 || n.j < 0 || n.i >= nx || n.j >= ny) {
                        continue;
                    }
                    int& id = cmap.ids[static_cast<std::size_t>(n.j) * nx + n.i];
                    if (id == 0 && raster.at(n.i, n.j) == cls) {
                        id = info.id;
                        queue.push_back(n);
                    }
                }
            }
            info.extent = {raster.bounds.x_min + info.min_cell.i * cw, raster.bounds.x_min + (info.max_cell.i + 1) * cw,
                           raster.bounds.y_min + info.min_cell.j * ch, raster.bounds.y_min + (info.max_cell.j + 1) * ch};
            info.z_min = std::numeric_limits<double>::infinity();
            info.z_max = -std::numeric_limits<double>::infinity();
            cmap.components.push_back(info);
        }
    }

    for (const auto& s : samples) {
        const auto cell = blueprint_to_cell(cmap.bounds, cmap.size, s.coord);
        if (!cell) {
            continue;
        }
        const int id = cmap.at(cell->i, cell->j);
        if (id == 0) {
            continue;
        }
        auto& info = cmap.components[static_cast<std::size_t>(id - 1)];
        if (info.class_id != s.label) {
            continue;
        }
        info.z_min = std::min(info.z_min, s.z);
        info.z_max = std::max(info.z_max, s.z);
    }
    for (auto& info : cmap.components) {
        if (info.z_min > info.z_max) {
            info.z_min = room_z_min;
            info.z_max = room_z_max;
        }
    }
    return cmap;
}

int select_component(const ComponentMap& cmap, const BlueprintCoord& c)
{
    const auto cell = blueprint_to_cell(cmap.bounds, cmap.size, c);
    if (!cell) {
        throw Error("coordinate outside blueprint");
    }
    return cmap.at(cell->i, cell->j);
}

std::string to_string(EditKind kind)
{
    switch (kind) {
    case EditKind::mask:
        return "mask";
    case EditKind::recolor:
        return "recolor";
    case EditKind::texture:
        return "texture";
    case EditKind::sketch:
        return "sketch";
    case EditKind::remove:
        return "remove";
    }
    return "mask";
}

EditKind edit_kind_from_string(const std::string& s)
{
    for (EditKind k : {EditKind::mask, EditKind::recolor, EditKind::texture, EditKind::sketch, EditKind::remove}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    throw Error("unknown edit kind '" + s + "'");
}

EditCommand parse_edit_command(const nlohmann::json& j,
                               const std::function<Image<Rgba8>(const std::string&)>& load_image)
{
    EditCommand cmd;
    try {
        cmd.component = j.at("component").get<int>();
        cmd.kind = edit_kind_from_string(j.at("kind").get<std::string>());
        if (j.contains("color")) {
            const auto c = j.at("color").get<std::vector<double>>();
            if (c.size() != 3) {
                throw Error("edit color needs 3 numbers");
            }
            for (int k = 0; k < 3; ++k) {
                cmd.color[k] = std::clamp(c[k], 0.0, 255.0) / 255.0;
            }
        } else if (cmd.kind == EditKind::recolor) {
            throw Error("recolor edit needs a color");
        }
        if (j.contains("image") && !j.at("image").is_null()) {
            cmd.image_path = j.at("image").get<std::string>();
            if (!load_image) {
                throw Error("no image loader available");
            }
            cmd.image = load_image(cmd.image_path);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("edit command: ") + e.what());
    }
    return cmd;
}

nlohmann::json edit_command_to_json(const EditCommand& cmd)
{
    nlohmann::json j = {{"component", cmd.component}, {"kind", to_string(cmd.kind)}};
    if (cmd.kind == EditKind::recolor) {
        j["color"] = {std::lround(cmd.color[0] * 255.0), std::lround(cmd.color[1] * 255.0),
                      std::lround(cmd.color[2] * 255.0)};
    }
    if (!cmd.image_path.empty()) {
        j["image"] = cmd.image_path;
    }
    return j;
}

EditSet compile_edits(const ComponentMap& cmap, std::span<const EditCommand> cmds, const EditOptions& opts)
{
    EditSet es;
    es.bounds = cmap.bounds;
    es.size = cmap.size;
    es.cell_region.assign(cmap.size.cells(), -1);

    std::vector<int> seen;
    for (const auto& cmd : cmds) {
        if (!cmap.has(cmd.component)) {
            throw Error("unknown component " + std::to_string(cmd.component));
        }
        if (std::find(seen.begin(), seen.end(), cmd.component) != seen.end()) {
            throw Error("duplicate component " + std::to_string(cmd.component) + " in edit list");
        }
        seen.push_back(cmd.component);
        if ((cmd.kind == EditKind::texture || cmd.kind == EditKind::sketch) &&
            (!cmd.image || cmd.image->width < 1 || cmd.image->height < 1)) {
            throw Error(to_string(cmd.kind) + " edit needs an image");
        }

        const auto& info = cmap.info(cmd.component);
        EditRegion region;
        region.component = cmd.component;
        region.kind = cmd.kind;
        region.z_min = std::max(info.z_min - opts.vertical_padding, opts.room_z_min);
        region.z_max = std::min(info.z_max + opts.vertical_padding, opts.room_z_max);
        region.color = cmd.color;
        if (cmd.image) {
            region.image = *cmd.image;
        }
        region.uv_box = info.extent;

        const int index = static_cast<int>(es.regions.size());
        for (std::size_t k = 0; k < cmap.ids.size(); ++k) {
            if (cmap.ids[k] == cmd.component) {
                es.cell_region[k] = index;
            }
        }
        es.regions.push_back(std::move(region));
    }
    return es;
}

const EditRegion* EditSet::region_at(const WorldPoint& p) const
{
    if (regions.empty()) {
        return nullptr;
    }
    const auto cell = blueprint_to_cell(bounds, size, world_to_blueprint(p));
    if (!cell) {
        return nullptr;
    }
    const int r = cell_region[static_cast<std::size_t>(cell->j) * size.nx + cell->i];
    if (r < 0) {
        return nullptr;
    }
    const auto& region = regions[static_cast<std::size_t>(r)];
    if (p.z < region.z_min || p.z > region.z_max) {
        return nullptr;
    }
    return &region;
}

namespace {

Color texture_lookup(const EditRegion& region, const WorldPoint& p, const Color& base)
{
    const auto& img = region.image;
    const double u = (p.x - region.uv_box.x_min) / region.uv_box.width();
    const double v = (p.y - region.uv_box.y_min) / region.uv_box.depth();
    // Image rows run from +y (top) to -y, matching the blueprint PNG layout.
    const int col = std::clamp(static_cast<int>(std::floor(u * img.width)), 0, img.width - 1);
    const int row = std::clamp(static_cast<int>(std::floor((1.0 - v) * img.height)), 0, img.height - 1);
    const Rgba8& px = img.at(col, row);
    const double a = px[3] / 255.0;
    Color out{};
    for (int k = 0; k < 3; ++k) {
        out[k] = (1.0 - a) * base[k] + a * (px[k] / 255.0);
    }
    return out;
}

} // namespace

EditedSample apply_to_sample(const EditSet& es, const WorldPoint& p, double sigma, const Color& color)
{
    EditedSample out{sigma, color, false, false};
    const EditRegion* region = es.region_at(p);
    if (!region) {
        return out;
    }
    out.in_region = true;
    switch (region->kind) {
    case EditKind::remove:
        out.sigma = 0.0;
        break;
    case EditKind::recolor:
        out.color = region->color;
        break;
    case EditKind::texture:
    case EditKind::sketch:
        out.color = texture_lookup(*region, p, color);
        break;
    case EditKind::mask:
        out.in_mask = true;
        break;
    }
    return out;
}

} // namespace blueprint
