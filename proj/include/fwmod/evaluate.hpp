#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fwmod/category.hpp"
#include "fwmod/cluster.hpp"
#include "fwmod/corpus.hpp"

namespace fwmod {

class LlmGateway;

// Scoring of one ground-truth module against its best-overlapping cluster.
struct ModuleMatch {
    std::string gt_module;
    std::uint32_t predicted_cluster = 0;
    std::size_t tp = 0, fp = 0, fn = 0;
    double precision = 0.0, recall = 0.0, f1 = 0.0;
    std::size_t n = 0;  // ground-truth module size
};

struct ModularizationReport {
    std::string device;
    std::size_t module_count = 0;
    std::size_t function_count = 0;
    double p_w = 0.0, r_w = 0.0, f1_w = 0.0;
    std::vector<ModuleMatch> matches;

    nlohmann::json to_json() const;
    static ModularizationReport from_json(const nlohmann::json& j);
};

// Top-k category selection for one module, joined with its ground-truth name.
struct ModulePrediction {
    std::string module;
    std::set<Category> selected;
    int k = 0;
};

struct CategoryScore {
    std::size_t tp = 0, fp = 0, fn = 0;
    double precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct CategoryReport {
    std::string device;
    std::string model;
    std::map<Category, CategoryScore> per_category;

    nlohmann::json to_json() const;
    static CategoryReport from_json(const nlohmann::json& j);
};

struct SimilarityReport {
    std::string device;
    std::string model;
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t count = 0;

    nlohmann::json to_json() const;
    static SimilarityReport from_json(const nlohmann::json& j);
};

// Each ground-truth module is matched to the predicted cluster sharing the
// most functions (ties: lower cluster id); several modules may match one
// cluster. False positives count only ground-truth-covered functions.
// Throws uncovered_function when a ground-truth function is unassigned.
std::vector<ModuleMatch> match_clusters(const Partition& predicted, const GroundTruthModules& gt);

// Weighted precision/recall/F1: each per-module metric weighted by module
// size over the total function count.
ModularizationReport weighted_metrics(const std::vector<ModuleMatch>& matches);

// Module-level category retrieval metrics; zero denominators score 0.
CategoryReport category_metrics(const std::vector<ModulePrediction>& predictions,
                                const GroundTruthCategories& gt);

double cosine_similarity(const std::vector<double>& u, const std::vector<double>& v);

struct SummaryPair {
    std::string decompiled_summary;
    std::string normalized_summary;
};

// Embeds both sides of each pair and reports mean and standard deviation of
// their cosine similarity.
SimilarityReport summary_similarity(const std::vector<SummaryPair>& pairs, LlmGateway& gateway);

}  // namespace fwmod
