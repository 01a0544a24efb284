#include "fwmod/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace fwmod {

namespace {

std::string fmt2(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

// Left-aligned columns, single-space gaps, each column as wide as its widest
// cell (so uniform metric cells keep single spaces between them).
std::string layout_table(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        if (widths.size() < row.size()) widths.resize(row.size(), 0);
        for (std::size_t i = 0; i < row.size(); ++i) {
            widths[i] = std::max(widths[i], row[i].size());
        }
    }
    std::ostringstream out;
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            line += row[i];
            if (i + 1 < row.size()) line.append(widths[i] - row[i].size() + 1, ' ');
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out << line << "\n";
    }
    return out.str();
}

}  // namespace

std::string modularization_summary_line(const ModularizationReport& report) {
    std::ostringstream out;
    out << report.module_count << " modules, " << report.function_count << " functions, "
        << fmt2(report.p_w) << "/" << fmt2(report.r_w) << "/" << fmt2(report.f1_w);
    return out.str();
}

std::string render_modularization_table(const std::vector<ModularizationReport>& rows) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"Device", "Modules", "Functions", "P_w", "R_w", "F1_w"});
    for (const auto& r : rows) {
        cells.push_back({r.device, std::to_string(r.module_count),
                         std::to_string(r.function_count), fmt2(r.p_w), fmt2(r.r_w),
                         fmt2(r.f1_w)});
    }
    return layout_table(cells);
}

std::string render_similarity_table(const std::vector<SimilarityReport>& reports) {
    std::vector<std::string> devices, models;
    for (const auto& r : reports) {
        if (std::find(devices.begin(), devices.end(), r.device) == devices.end()) {
            devices.push_back(r.device);
        }
        if (std::find(models.begin(), models.end(), r.model) == models.end()) {
            models.push_back(r.model);
        }
    }
    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> header = {"Device"};
    header.insert(header.end(), models.begin(), models.end());
    cells.push_back(std::move(header));
    for (const auto& device : devices) {
        std::vector<std::string> row = {device};
        for (const auto& model : models) {
            auto it = std::find_if(reports.begin(), reports.end(), [&](const SimilarityReport& r) {
                return r.device == device && r.model == model;
            });
            row.push_back(it == reports.end() ? "-" : fmt2(it->mean) + " ± " + fmt2(it->stddev));
        }
        cells.push_back(std::move(row));
    }
    return layout_table(cells);
}

std::vector<CategoryTableRow> category_table_rows(
    const std::string& device, const std::map<std::string, CategoryReport>& by_model,
    const std::map<std::string, CategoryReport>& upper_bounds) {
    std::vector<CategoryTableRow> rows;
    for (Category c : kAllCategories) {
        CategoryTableRow row;
        row.device = device;
        row.category = c;
        for (const auto& [model, report] : by_model) {
            auto it = report.per_category.find(c);
            if (it == report.per_category.end()) continue;
            CategoryCell cell;
            cell.precision = it->second.precision;
            cell.recall = it->second.recall;
            cell.f1 = it->second.f1;
            auto ub = upper_bounds.find(model);
            if (ub != upper_bounds.end()) {
                auto ub_it = ub->second.per_category.find(c);
                if (ub_it != ub->second.per_category.end()) {
                    cell.ub_precision = ub_it->second.precision;
                    cell.ub_recall = ub_it->second.recall;
                    cell.ub_f1 = ub_it->second.f1;
                }
            }
            row.cells[model] = cell;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string render_category_table(const std::vector<CategoryTableRow>& rows,
                                  const std::vector<std::string>& models) {
    auto metric = [](double value, const std::optional<double>& upper) {
        std::string s = fmt2(value);
        if (upper) s += " (" + fmt2(*upper) + ")";
        return s;
    };
    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> header = {"Device", "Category"};
    for (const auto& model : models) {
        header.push_back(model + " P");
        header.push_back(model + " R");
        header.push_back(model + " F1");
    }
    cells.push_back(std::move(header));
    for (const auto& row : rows) {
        std::vector<std::string> line = {row.device, std::string(category_display_name(row.category))};
        for (const auto& model : models) {
            auto it = row.cells.find(model);
            if (it == row.cells.end()) {
                line.insert(line.end(), {"-", "-", "-"});
                continue;
            }
            const auto& cell = it->second;
            line.push_back(metric(cell.precision, cell.ub_precision));
            line.push_back(metric(cell.recall, cell.ub_recall));
            line.push_back(metric(cell.f1, cell.ub_f1));
        }
        cells.push_back(std::move(line));
    }
    return layout_table(cells);
}

std::string format_hours(double seconds) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f h", seconds / 3600.0);
    return buf;
}

std::string render_timing(const std::map<std::string, TimingAggregator::StageTotal>& totals) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"Stage", "Requests", "Cached", "Seconds", "Hours"});
    for (const auto& [stage, total] : totals) {
        char secs[32];
        std::snprintf(secs, sizeof(secs), "%.2f", total.seconds);
        cells.push_back({stage, std::to_string(total.requests), std::to_string(total.cached), secs,
                         format_hours(total.seconds)});
    }
    return layout_table(cells);
}

}  // namespace fwmod
