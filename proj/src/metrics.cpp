/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "blueprint/metrics.hpp"
#include "blueprint/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace blueprint {

double completeness(const BlueprintRaster& pred)
{
    if (pred.labels.empty()) {
        return 0.0;
    }
    const auto valid = std::count_if(pred.labels.begin(), pred.labels.end(), [](int l) { return l != kVoidClass; });
    return static_cast<double>(valid) / static_cast<double>(pred.labels.size());
}

MetricsReport evaluate(const BlueprintRaster& pred, const BlueprintRaster& gt)
{
    if (!pred.same_geometry(gt) || pred.labels.size() != gt.labels.size()) {
        throw Error("raster geometry mismatch");
    }
    if (std::all_of(gt.labels.begin(), gt.labels.end(), [](int l) { return l == kVoidClass; })) {
        throw Error("ground truth has no labeled cells");
    }
    int classes = 0;
    for (std::size_t k = 0; k < gt.labels.size(); ++k) {
        if (gt.labels[k] < 0 || pred.labels[k] < 0) {
            throw Error("negative label in raster");
        }
        classes = std::max({classes, gt.labels[k], pred.labels[k]});
    }

    MetricsReport r;
    r.completeness = completeness(pred);
    const auto n = static_cast<std::size_t>(classes) + 1;
    r.confusion.assign(n, std::vector<std::int64_t>(n, 0));
    for (std::size_t k = 0; k < gt.labels.size(); ++k) {
        const int g = gt.labels[k];
        const int p = pred.labels[k];
        if (g == kVoidClass || p == kVoidClass) {
            continue;
        }
        ++r.confusion[static_cast<std::size_t>(g)][static_cast<std::size_t>(p)];
        ++r.evaluated_cells;
    }
    if (r.evaluated_cells == 0) {
        return r;
    }

    std::vector<std::int64_t> gt_count(n, 0);
    std::vector<std::int64_t> pred_count(n, 0);
    std::int64_t correct = 0;
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = 1; j < n; ++j) {
            gt_count[i] += r.confusion[i][j];
            pred_count[j] += r.confusion[i][j];
        }
        correct += r.confusion[i][i];
    }
    const auto total = static_cast<double>(r.evaluated_cells);
    r.pacc = static_cast<double>(correct) / total;
    double weighted = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const std::int64_t denom = gt_count[i] + pred_count[i] - r.confusion[i][i];
        if (gt_count[i] == 0 && pred_count[i] == 0) {
            continue;
        }
        const double iou = denom > 0 ? static_cast<double>(r.confusion[i][i]) / static_cast<double>(denom) : 0.0;
        r.per_class_iou[static_cast<int>(i)] = iou;
        weighted += static_cast<double>(gt_count[i]) * iou;
    }
    r.fwiou = weighted / total;
    return r;
}

nlohmann::json metrics_to_json(const MetricsReport& report)
{
    nlohmann::json per_class = nlohmann::json::object();
    for (const auto& [id, iou] : report.per_class_iou) {
        per_class[std::to_string(id)] = iou;
    }
    return {{"pacc", report.pacc},
            {"fwiou", report.fwiou},
            {"completeness", report.completeness},
            {"per_class_iou", per_class},
            {"confusion", report.confusion},
            {"evaluated_cells", report.evaluated_cells}};
}

} // namespace blueprint
