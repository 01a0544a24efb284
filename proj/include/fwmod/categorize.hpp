#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fwmod/category.hpp"
#include "fwmod/evaluate.hpp"
#include "fwmod/llm.hpp"
#include "fwmod/summarize.hpp"

namespace fwmod {

struct CategoryDefinition {
    Category category;
    std::string definition_text;
};

// Expert-written defaults shipped with the toolkit; user-overridable.
std::vector<CategoryDefinition> default_category_definitions();

// JSON file: {"data_transfer": "....", ...}; all five must be present.
std::vector<CategoryDefinition> load_category_definitions(const std::filesystem::path& path);

// Ranked answer for one module: a full permutation of the five categories,
// most likely first, plus the raw model text for audit.
struct CategoryRanking {
    std::uint32_t module = 0;
    std::array<Category, 5> ordered = kAllCategories;
    std::string raw_text;

    nlohmann::json to_json() const;
    static CategoryRanking from_json(const nlohmann::json& j);
};

// Three sections in order: the five category definitions, the numbered
// function summaries, and the ranking instruction. Deterministic.
// Throws missing_definition, no_summaries.
ChatRequest build_category_prompt(const std::vector<CategoryDefinition>& definitions,
                                  const std::vector<FunctionSummary>& summaries,
                                  const std::string& model, int max_tokens = 64);

// Scans for category names (case-insensitive, with synonyms); first
// occurrence defines the rank, unmentioned categories follow in canonical
// order. Throws unparseable_ranking when no category name occurs.
CategoryRanking parse_ranking(const std::string& raw);

// First k of the ranking; throws bad_k unless 1 <= k <= 5.
ModulePrediction select_top_k(const CategoryRanking& ranking, int k, std::string module_label);

struct CategorizeResult {
    std::optional<CategoryRanking> ranking;
    bool skipped_no_summaries = false;
};

// Prompt, chat, parse; one reformat retry on an unparseable answer. Modules
// whose summaries all failed are skipped with a marker.
CategorizeResult categorize_module(std::uint32_t module_id,
                                   const std::vector<FunctionSummary>& summaries,
                                   const std::vector<CategoryDefinition>& definitions,
                                   LlmGateway& gateway, TimingAggregator* timing = nullptr);

}  // namespace fwmod
