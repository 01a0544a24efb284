#include "fwmod/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "fwmod/errors.hpp"
#include "fwmod/llm.hpp"

namespace fwmod {

namespace {

double safe_ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic_f1(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

}  // namespace

std::vector<ModuleMatch> match_clusters(const Partition& predicted, const GroundTruthModules& gt) {
    // group ground truth by module name
    std::map<std::string, std::vector<std::uint64_t>> modules;
    for (const auto& [entry, name] : gt.mapping) {
        auto it = predicted.assignment.find(entry);
        if (it == predicted.assignment.end()) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "0x%08llx", static_cast<unsigned long long>(entry));
            raise(errc::uncovered_function,
                  std::string(buf) + " (" + name + ") is not in the partition");
        }
        modules[name].push_back(entry);
    }

    // per predicted cluster: how many ground-truth-covered functions it holds
    std::map<std::uint32_t, std::size_t> covered_per_cluster;
    for (const auto& [entry, name] : gt.mapping) {
        covered_per_cluster[predicted.assignment.at(entry)] += 1;
    }

    std::vector<ModuleMatch> matches;
    matches.reserve(modules.size());
    for (const auto& [name, members] : modules) {
        std::map<std::uint32_t, std::size_t> overlap;
        for (auto entry : members) overlap[predicted.assignment.at(entry)] += 1;

        std::uint32_t best_cluster = 0;
        std::size_t best_overlap = 0;
        for (const auto& [cluster, count] : overlap) {  // ascending id: ties keep lower id
            if (count > best_overlap) {
                best_overlap = count;
                best_cluster = cluster;
            }
        }

        ModuleMatch match;
        match.gt_module = name;
        match.predicted_cluster = best_cluster;
        match.n = members.size();
        match.tp = best_overlap;
        match.fp = covered_per_cluster.at(best_cluster) - best_overlap;
        match.fn = members.size() - best_overlap;
        match.precision = safe_ratio(match.tp, match.tp + match.fp);
        match.recall = safe_ratio(match.tp, match.tp + match.fn);
        match.f1 = harmonic_f1(match.precision, match.recall);
        matches.push_back(std::move(match));
    }
    return matches;
}

ModularizationReport weighted_metrics(const std::vector<ModuleMatch>& matches) {
    std::size_t total = 0;
    for (const auto& m : matches) total += m.n;
    if (total == 0) raise(errc::empty_ground_truth, "no ground-truth functions to score");

    ModularizationReport report;
    report.module_count = matches.size();
    report.function_count = total;
    for (const auto& m : matches) {
        const double w = static_cast<double>(m.n);
        report.p_w += m.precision * w;
        report.r_w += m.recall * w;
        report.f1_w += m.f1 * w;
    }
    report.p_w /= static_cast<double>(total);
    report.r_w /= static_cast<double>(total);
    report.f1_w /= static_cast<double>(total);
    report.matches = matches;
    return report;
}

CategoryReport category_metrics(const std::vector<ModulePrediction>& predictions,
                                const GroundTruthCategories& gt) {
    CategoryReport report;
    for (Category c : kAllCategories) report.per_category[c] = {};

    for (const auto& pred : predictions) {
        auto it = gt.mapping.find(pred.module);
        if (it == gt.mapping.end()) {
            raise(errc::missing_ground_truth, "module " + pred.module + " has no category labels");
        }
        const auto& truth = it->second;
        for (Category c : kAllCategories) {
            const bool selected = pred.selected.count(c) != 0;
            const bool expected = truth.count(c) != 0;
            auto& score = report.per_category[c];
            if (selected && expected) score.tp += 1;
            else if (selected && !expected) score.fp += 1;
            else if (!selected && expected) score.fn += 1;
        }
    }
    for (auto& [c, score] : report.per_category) {
        score.precision = safe_ratio(score.tp, score.tp + score.fp);
        score.recall = safe_ratio(score.tp, score.tp + score.fn);
        score.f1 = harmonic_f1(score.precision, score.recall);
    }
    return report;
}

double cosine_similarity(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) raise(errc::dimension_mismatch, "vectors differ in length");
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) raise(errc::zero_vector, "cosine of a zero vector");
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

SimilarityReport summary_similarity(const std::vector<SummaryPair>& pairs, LlmGateway& gateway) {
    SimilarityReport report;
    std::vector<double> values;
    values.reserve(pairs.size());
    for (const auto& pair : pairs) {
        auto u = gateway.embed(pair.decompiled_summary);
        auto v = gateway.embed(pair.normalized_summary);
        values.push_back(cosine_similarity(u.values, v.values));
    }
    report.count = values.size();
    if (values.empty()) return report;

    double sum = 0.0;
    for (double x : values) sum += x;
    report.mean = sum / static_cast<double>(values.size());
    double var = 0.0;
    for (double x : values) var += (x - report.mean) * (x - report.mean);
    report.stddev = std::sqrt(var / static_cast<double>(values.size()));
    return report;
}

nlohmann::json ModularizationReport::to_json() const {
    nlohmann::json matches_json = nlohmann::json::array();
    for (const auto& m : matches) {
        matches_json.push_back({{"gt_module", m.gt_module},
                                {"predicted_cluster", m.predicted_cluster},
                                {"tp", m.tp},
                                {"fp", m.fp},
                                {"fn", m.fn},
                                {"precision", m.precision},
                                {"recall", m.recall},
                                {"f1", m.f1},
                                {"n", m.n}});
    }
    return {{"device", device},
            {"module_count", module_count},
            {"function_count", function_count},
            {"p_w", p_w},
            {"r_w", r_w},
            {"f1_w", f1_w},
            {"matches", std::move(matches_json)}};
}

ModularizationReport ModularizationReport::from_json(const nlohmann::json& j) {
    ModularizationReport r;
    r.device = j.at("device").get<std::string>();
    r.module_count = j.at("module_count").get<std::size_t>();
    r.function_count = j.at("function_count").get<std::size_t>();
    r.p_w = j.at("p_w").get<double>();
    r.r_w = j.at("r_w").get<double>();
    r.f1_w = j.at("f1_w").get<double>();
    for (const auto& m : j.at("matches")) {
        ModuleMatch match;
        match.gt_module = m.at("gt_module").get<std::string>();
        match.predicted_cluster = m.at("predicted_cluster").get<std::uint32_t>();
        match.tp = m.at("tp").get<std::size_t>();
        match.fp = m.at("fp").get<std::size_t>();
        match.fn = m.at("fn").get<std::size_t>();
        match.precision = m.at("precision").get<double>();
        match.recall = m.at("recall").get<double>();
        match.f1 = m.at("f1").get<double>();
        match.n = m.at("n").get<std::size_t>();
        r.matches.push_back(std::move(match));
    }
    return r;
}

nlohmann::json CategoryReport::to_json() const {
    nlohmann::json per = nlohmann::json::object();
    for (const auto& [c, s] : per_category) {
        per[std::string(category_name(c))] = {{"tp", s.tp},       {"fp", s.fp},
                                              {"fn", s.fn},       {"precision", s.precision},
                                              {"recall", s.recall}, {"f1", s.f1}};
    }
    return {{"device", device}, {"model", model}, {"per_category", std::move(per)}};
}

CategoryReport CategoryReport::from_json(const nlohmann::json& j) {
    CategoryReport r;
    r.device = j.at("device").get<std::string>();
    r.model = j.at("model").get<std::string>();
    for (const auto& [name, s] : j.at("per_category").items()) {
        auto c = category_from_name(name);
        if (!c) raise(errc::unknown_category, name);
        CategoryScore score;
        score.tp = s.at("tp").get<std::size_t>();
        score.fp = s.at("fp").get<std::size_t>();
        score.fn = s.at("fn").get<std::size_t>();
        score.precision = s.at("precision").get<double>();
        score.recall = s.at("recall").get<double>();
        score.f1 = s.at("f1").get<double>();
        r.per_category[*c] = score;
    }
    return r;
}

nlohmann::json SimilarityReport::to_json() const {
    return {{"device", device},
            {"model", model},
            {"mean", mean},
            {"stddev", stddev},
            {"count", count}};
}

SimilarityReport SimilarityReport::from_json(const nlohmann::json& j) {
    SimilarityReport r;
    r.device = j.at("device").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.mean = j.at("mean").get<double>();
    r.stddev = j.at("stddev").get<double>();
    r.count = j.at("count").get<std::size_t>();
    return r;
}

}  // namespace fwmod
