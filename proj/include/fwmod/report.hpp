#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fwmod/evaluate.hpp"
#include "fwmod/llm.hpp"

namespace fwmod {

// "121 modules, 8556 functions, 0.77/0.69/0.72"
std::string modularization_summary_line(const ModularizationReport& report);

// Aligned-column table: Device, Modules, Functions, P_w, R_w, F1_w.
std::string render_modularization_table(const std::vector<ModularizationReport>& rows);

// Aligned-column table of "mean ± std" cells, devices by rows, models by
// columns.
std::string render_similarity_table(const std::vector<SimilarityReport>& cells);

struct CategoryCell {
    double precision = 0.0, recall = 0.0, f1 = 0.0;
    // upper bound from the normalized-source run, shown in parentheses
    std::optional<double> ub_precision, ub_recall, ub_f1;
};

struct CategoryTableRow {
    std::string device;
    Category category = Category::other;
    std::map<std::string, CategoryCell> cells;  // model -> scores
};

std::string render_category_table(const std::vector<CategoryTableRow>& rows,
                                  const std::vector<std::string>& models);

// Rows for one device from a per-model report set, with optional upper-bound
// reports from normalized-source runs.
std::vector<CategoryTableRow> category_table_rows(
    const std::string& device, const std::map<std::string, CategoryReport>& by_model,
    const std::map<std::string, CategoryReport>& upper_bounds = {});

// "20.0 h" for 72000 seconds.
std::string format_hours(double seconds);

// Per-stage request timing block in the shape of the runtime analysis.
std::string render_timing(const std::map<std::string, TimingAggregator::StageTotal>& totals);

}  // namespace fwmod
