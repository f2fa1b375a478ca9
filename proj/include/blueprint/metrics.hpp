/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "blueprint/scene.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <map>
#include <vector>

namespace blueprint {

struct MetricsReport {
    double pacc = 0.0;
    double fwiou = 0.0;
    double completeness = 0.0;
    std::map<int, double> per_class_iou;
    /// confusion[i][j]: cells with ground truth i predicted as j, over cells
    /// where both are non-void. Row/column 0 stay zero.
    std::vector<std::vector<std::int64_t>> confusion;
    std::int64_t evaluated_cells = 0;
};

/// Fraction of cells with a non-void label.
double completeness(const BlueprintRaster& pred);

/// pAcc and frequency-weighted IoU over the cells where both rasters are
/// non-void; void predictions only lower completeness.
MetricsReport evaluate(const BlueprintRaster& pred, const BlueprintRaster& gt);

nlohmann::json metrics_to_json(const MetricsReport& report);

} // namespace blueprint
