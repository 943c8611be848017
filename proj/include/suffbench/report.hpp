#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "suffbench/metrics.hpp"
#include "suffbench/runstore.hpp"

namespace suffbench {

enum class ReportKind { tables, heatmap, curves };

std::optional<ReportKind> parse_report_kind(std::string_view s);

/// Probability as a percentage with two decimals, e.g. 0.71172 -> "71.17".
std::string format_percent(double p);

/// Heatmap of mean cosine: one <rect> per (model, level) cell carrying
/// data-model, data-level and data-value (empty cells get data-missing).
/// Darker fill means higher similarity.
std::string render_heatmap_svg(const HeatmapMatrix& m, std::string_view title);

/// Matrix CSV: generator_model then one column per level; empty cells blank.
std::string heatmap_csv(const HeatmapMatrix& m);

/// Writes report files under <store>/reports and returns their paths.
/// Throws StoreError when aggregates.csv is missing.
std::vector<std::filesystem::path> write_report(const RunStore& store, ReportKind kind);

}  // namespace suffbench
