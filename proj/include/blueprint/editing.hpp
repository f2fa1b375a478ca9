/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "blueprint/dataset.hpp"
#include "blueprint/geometry.hpp"
#include "blueprint/image.hpp"
#include "blueprint/scene.hpp"

#include <nlohmann/json_fwd.hpp>

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace blueprint {

struct ComponentInfo {
    int id = 0;
    int class_id = kVoidClass;
    std::size_t cells = 0;
    CellIndex min_cell;
    CellIndex max_cell;
    /// Floor-plane box covered by the component's cells.
    BlueprintBounds extent;
    /// Vertical extent of the instance in meters.
    double z_min = 0.0;
    double z_max = 0.0;
};

/// Instance partition of a blueprint. Component ids start at 1; 0 marks
/// void cells.
struct ComponentMap {
    BlueprintBounds bounds;
    GridSize size;
    std::vector<int> ids;
    std::vector<ComponentInfo> components; ///< component k at index k - 1

    int at(int i, int j) const { return ids[static_cast<std::size_t>(j) * size.nx + i]; }
    bool has(int id) const { return id >= 1 && id <= static_cast<int>(components.size()); }
    const ComponentInfo& info(int id) const { return components.at(static_cast<std::size_t>(id - 1)); }
    std::vector<CellIndex> cells_of(int id) const;
};

/// 4-connected same-class labeling of the non-void cells, scanned in row-major
/// order. A component's vertical extent spans the heights of the samples of
/// its class that land inside it, or [room_z_min, room_z_max] when none do.
ComponentMap connected_components(const BlueprintRaster& raster, std::span<const BlueprintSample> samples,
                                  double room_z_min, double room_z_max);

/// Component under a floor-plane coordinate, 0 for a void cell. Throws when
/// the coordinate lies outside the blueprint.
int select_component(const ComponentMap& cmap, const BlueprintCoord& c);

enum class EditKind { mask, recolor, texture, sketch, remove };

std::string to_string(EditKind kind);
EditKind edit_kind_from_string(const std::string& s);

struct EditCommand {
    int component = 0;
    EditKind kind = EditKind::mask;
    Color color{1.0, 1.0, 1.0};
    /// Texture or sketch image, mapped onto the component's floor-plane box.
    std::optional<Image<Rgba8>> image;
    std::string image_path;
};

/// Parses {component, kind, color?, image?}. `color` accepts 0-255 integers.
/// `image` is a PNG path resolved through `load_image`.
EditCommand parse_edit_command(const nlohmann::json& j,
                               const std::function<Image<Rgba8>(const std::string&)>& load_image);
nlohmann::json edit_command_to_json(const EditCommand& cmd);

struct EditRegion {
    int component = 0;
    EditKind kind = EditKind::mask;
    double z_min = 0.0;
    double z_max = 0.0;
    Color color{1.0, 1.0, 1.0};
    Image<Rgba8> image;
    BlueprintBounds uv_box;
};

/// Compiled edits: per blueprint cell, the region (if any) that owns it.
struct EditSet {
    BlueprintBounds bounds;
    GridSize size;
    std::vector<EditRegion> regions;
    std::vector<int> cell_region; ///< index into regions, -1 when unedited

    bool empty() const { return regions.empty(); }
    /// Region containing p, or nullptr.
    const EditRegion* region_at(const WorldPoint& p) const;
};

struct EditOptions {
    /// Grows each region's vertical extent by this much on both sides
    /// before clamping it to the room.
    double vertical_padding = 0.0;
    double room_z_min = -std::numeric_limits<double>::infinity();
    double room_z_max = std::numeric_limits<double>::infinity();
};

EditSet compile_edits(const ComponentMap& cmap, std::span<const EditCommand> cmds, const EditOptions& opts = {});

struct EditedSample {
    double sigma = 0.0;
    Color color{0.0, 0.0, 0.0};
    bool in_mask = false;
    bool in_region = false; ///< p lies inside some edit region
};

EditedSample apply_to_sample(const EditSet& es, const WorldPoint& p, double sigma, const Color& color);

} // namespace blueprint
