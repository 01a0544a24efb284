#include "fwmod/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fwmod/arm.hpp"
#include "fwmod/binary.hpp"
#include "fwmod/categorize.hpp"
#include "fwmod/cluster.hpp"
#include "fwmod/corpus.hpp"
#include "fwmod/errors.hpp"
#include "fwmod/evaluate.hpp"
#include "fwmod/graph.hpp"
#include "fwmod/hash.hpp"
#include "fwmod/llm.hpp"
#include "fwmod/normalize.hpp"
#include "fwmod/report.hpp"
#include "fwmod/store.hpp"
#include "fwmod/summarize.hpp"

namespace fwmod {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string hex_addr(std::uint64_t addr) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "0x%08llx", static_cast<unsigned long long>(addr));
    return buf;
}

struct ProjectConfig {
    fs::path config_dir;
    std::string device = "device";
    fs::path binary;
    fs::path store = "store";
    fs::path manifest;
    fs::path gt_modules;
    fs::path gt_categories;
    fs::path source_root;
    fs::path category_definitions;
    int length_threshold = 15;
    GraphWeights weights;
    bool drg_binary_weights = false;
    GatewayConfig llm;
    int char_budget = 12000;

    fs::path resolve(const fs::path& p) const {
        if (p.empty() || p.is_absolute()) return p;
        return config_dir / p;
    }
};

ProjectConfig load_config(const fs::path& path) {
    ProjectConfig cfg;
    cfg.llm.max_retries = 2;
    if (!fs::exists(path)) {
        if (path.filename() != "fwmod.json") {
            raise(errc::config, "config file " + path.string() + " does not exist");
        }
        cfg.config_dir = fs::current_path();
        return cfg;  // defaults; flags may fill in the rest
    }
    std::ifstream in(path, std::ios::binary);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        raise(errc::config, path.string() + ": " + e.what());
    }
    cfg.config_dir = fs::absolute(path).parent_path();

    cfg.device = j.value("device", std::string{});
    if (j.contains("binary")) cfg.binary = j.at("binary").get<std::string>();
    if (cfg.device.empty()) {
        cfg.device = cfg.binary.empty() ? "device" : cfg.binary.stem().string();
    }
    cfg.store = j.value("store", std::string{"store"});
    if (j.contains("manifest")) cfg.manifest = j.at("manifest").get<std::string>();
    if (j.contains("ground_truth_modules")) {
        cfg.gt_modules = j.at("ground_truth_modules").get<std::string>();
    }
    if (j.contains("ground_truth_categories")) {
        cfg.gt_categories = j.at("ground_truth_categories").get<std::string>();
    }
    if (j.contains("source_root")) cfg.source_root = j.at("source_root").get<std::string>();
    if (j.contains("category_definitions")) {
        cfg.category_definitions = j.at("category_definitions").get<std::string>();
    }
    cfg.length_threshold = j.value("length_threshold", 15);
    if (j.contains("weights")) {
        const auto& w = j.at("weights");
        cfg.weights.alpha = w.value("alpha", 1.0);
        cfg.weights.beta = w.value("beta", 1.0);
        cfg.weights.gamma = w.value("gamma", 1.0);
    }
    cfg.drg_binary_weights = j.value("drg_binary_weights", false);
    if (j.contains("llm")) {
        const auto& l = j.at("llm");
        cfg.llm.base_url = l.value("base_url", std::string{});
        cfg.llm.chat_model = l.value("chat_model", std::string{"default-model"});
        cfg.llm.embedding_model = l.value("embedding_model", std::string{"default-embedding"});
        cfg.llm.max_retries = l.value("max_retries", 2);
        cfg.llm.backoff_ms = l.value("backoff_ms", 200);
        cfg.llm.concurrency = l.value("concurrency", 4);
        cfg.llm.timeout_seconds = l.value("timeout_seconds", 300);
        cfg.char_budget = l.value("char_budget", 12000);
        if (l.contains("api_key_env")) {
            if (const char* key = std::getenv(l.at("api_key_env").get<std::string>().c_str())) {
                cfg.llm.api_key = key;
            }
        }
    }
    return cfg;
}

std::string file_digest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(errc::config, "config key \"binary\": cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return sha256_hex(buf.str());
}

// ---- decompose -----------------------------------------------------------

int cmd_decompose(const ProjectConfig& cfg, const std::vector<std::uint64_t>& seeds) {
    if (cfg.binary.empty()) raise(errc::config, "config key \"binary\" is required for decompose");
    const fs::path binary_path = cfg.resolve(cfg.binary);
    if (!fs::exists(binary_path)) {
        raise(errc::config, "config key \"binary\": " + binary_path.string() + " does not exist");
    }
    cfg.weights.validate();

    ProjectStore store(cfg.resolve(cfg.store));
    StoreLock lock(store.root());

    BinaryImage image = load_elf(binary_path);
    auto functions = recover_functions(image, seeds);
    AnalysisStats stats;
    auto calls = extract_calls(image, functions, &stats);
    auto datarefs = extract_data_refs(image, functions);

    std::vector<std::uint64_t> nodes;
    nodes.reserve(functions.size());
    for (const auto& f : functions) nodes.push_back(f.entry);

    auto sg = build_sequence_graph(functions);
    auto drg = build_data_reference_graph(nodes, datarefs, cfg.drg_binary_weights);
    auto cg = build_call_graph(nodes, calls);
    auto combined = combine(sg, drg, cg, cfg.weights);

    ClusterRunInfo info;
    Partition partition = cluster_newman(combined, &info);

    const std::string upstream = sha256_hex(
        file_digest(binary_path) + json{{"alpha", cfg.weights.alpha},
                                        {"beta", cfg.weights.beta},
                                        {"gamma", cfg.weights.gamma},
                                        {"drg_binary", cfg.drg_binary_weights}}
                                       .dump());

    store.write_artifact(store.graphs_dir() / "sg.json", "graph", upstream, sg.to_json());
    store.write_artifact(store.graphs_dir() / "drg.json", "graph", upstream, drg.to_json());
    store.write_artifact(store.graphs_dir() / "cg.json", "graph", upstream, cg.to_json());
    store.write_artifact(store.graphs_dir() / "combined.json", "graph", upstream,
                         combined.to_json());

    json partition_payload = partition.to_json();
    partition_payload["weights"] = {{"alpha", cfg.weights.alpha},
                                    {"beta", cfg.weights.beta},
                                    {"gamma", cfg.weights.gamma}};
    partition_payload["modularity"] = info.q;
    store.write_artifact(store.partitions_dir() / "partition.json", "partition", upstream,
                         partition_payload);

    auto clusters = partition.clusters();
    std::map<std::size_t, std::size_t> histogram;
    for (const auto& members : clusters) histogram[members.size()] += 1;

    std::cout << cfg.device << ": " << functions.size() << " functions, " << clusters.size()
              << " modules (Q=" << info.q << ")\n";
    std::cout << "call sites: " << calls.size() << ", indirect calls skipped: "
              << stats.indirect_calls << ", data refs: " << datarefs.size() << "\n";
    std::cout << "module size histogram:\n";
    for (const auto& [size, count] : histogram) {
        std::cout << "  " << size << " function" << (size == 1 ? "" : "s") << ": " << count
                  << " module" << (count == 1 ? "" : "s") << "\n";
    }
    return 0;
}

// ---- summarize / categorize ----------------------------------------------

struct CorpusSelection {
    std::string name;  // "decompiled" | "normalized"
    fs::path manifest;
};

CorpusSelection select_corpus(const ProjectConfig& cfg, const ProjectStore& store,
                              const std::string& corpus) {
    if (corpus == "normalized") {
        return {"normalized", store.normalized_dir() / "manifest.json"};
    }
    if (cfg.manifest.empty()) {
        raise(errc::config, "config key \"manifest\" is required for the decompiled corpus");
    }
    return {"decompiled", cfg.resolve(cfg.manifest)};
}

std::string summaries_file(const std::string& device, const CorpusSelection& corpus) {
    return corpus.name == "normalized" ? device + ".normalized.json" : device + ".json";
}

// module id -> functions of that module, from the partition assignment
std::map<std::uint32_t, std::vector<DecompiledFunction>> group_by_module(
    const Partition& partition, const std::vector<DecompiledFunction>& corpus,
    std::size_t* unassigned) {
    std::map<std::uint32_t, std::vector<DecompiledFunction>> grouped;
    for (const auto& f : corpus) {
        auto it = partition.assignment.find(f.entry);
        if (it == partition.assignment.end()) {
            if (unassigned) ++*unassigned;
            continue;
        }
        grouped[it->second].push_back(f);
    }
    return grouped;
}

GatewayConfig gateway_config(const ProjectConfig& cfg, const ProjectStore& store,
                             const std::string& mock_endpoint, const std::string& model) {
    GatewayConfig gw = cfg.llm;
    if (!mock_endpoint.empty()) gw.base_url = mock_endpoint;
    if (!model.empty()) gw.chat_model = model;
    if (gw.base_url.empty()) {
        raise(errc::config, "config key \"llm.base_url\" is required (or pass --mock-endpoint)");
    }
    gw.cache_dir = store.cache_dir();
    return gw;
}

int cmd_summarize(const ProjectConfig& cfg, const std::string& model,
                  const std::string& mock_endpoint, const std::string& corpus_kind,
                  int threshold_override) {
    ProjectStore store(cfg.resolve(cfg.store));
    StoreLock lock(store.root());

    auto partition_artifact =
        store.read_artifact(store.partitions_dir() / "partition.json", "partition");
    Partition partition = Partition::from_json(partition_artifact.payload);

    CorpusSelection corpus = select_corpus(cfg, store, corpus_kind);
    auto functions = load_decompiled_corpus(corpus.manifest);
    const int threshold = threshold_override > 0 ? threshold_override : cfg.length_threshold;
    auto kept = filter_by_length(functions, threshold);

    std::size_t unassigned = 0;
    auto grouped = group_by_module(partition, kept, &unassigned);

    GatewayConfig gw_config = gateway_config(cfg, store, mock_endpoint, model);
    LlmGateway gateway(gw_config);
    TimingAggregator timing;
    SummarizeOptions options;
    options.char_budget = cfg.char_budget;

    const fs::path out_path =
        store.summaries_dir() / gw_config.chat_model / summaries_file(cfg.device, corpus);
    const fs::path partial_path = fs::path(out_path).concat(".partial");

    // resume support: already-summarized entries are kept as-is
    std::map<std::uint64_t, json> done;
    for (const fs::path& existing : {out_path, partial_path}) {
        if (!store.exists(existing)) continue;
        try {
            auto artifact = store.read_artifact(existing, "summaries", partition_artifact.digest);
            for (const auto& s : artifact.payload.at("summaries")) {
                done[std::stoull(s.at("entry").get<std::string>(), nullptr, 16)] = s;
            }
        } catch (const Error&) {
            // stale or unrelated artifact: recompute from scratch
        }
    }

    json summaries = json::array();
    std::size_t new_requests = 0;
    for (const auto& [module_id, members] : grouped) {
        std::vector<DecompiledFunction> pending;
        for (const auto& f : members) {
            if (!done.count(f.entry)) pending.push_back(f);
        }
        if (!pending.empty()) {
            for (auto& summary : summarize_module(module_id, pending, gateway, options, &timing)) {
                done[summary.entry] = summary.to_json();
                ++new_requests;
            }
            // keep a resumable checkpoint after each module
            json partial_payload = {{"corpus", corpus.name}, {"summaries", json::array()}};
            for (const auto& [entry, s] : done) partial_payload["summaries"].push_back(s);
            store.write_artifact(partial_path, "summaries", partition_artifact.digest,
                                 partial_payload);
        }
    }
    for (const auto& [entry, s] : done) summaries.push_back(s);

    json payload = {{"corpus", corpus.name}, {"summaries", std::move(summaries)}};
    store.write_artifact(out_path, "summaries", partition_artifact.digest, payload);
    fs::remove(partial_path);

    std::cout << cfg.device << " [" << gw_config.chat_model << ", " << corpus.name
              << "]: " << done.size() << " summaries across " << grouped.size() << " modules ("
              << new_requests << " computed this run";
    if (unassigned > 0) std::cout << ", " << unassigned << " entries not in the partition";
    std::cout << ")\n";
    std::cout << render_timing(timing.totals());
    double total_seconds = 0.0;
    for (const auto& [stage, t] : timing.totals()) total_seconds += t.seconds;
    std::cout << "total: " << total_seconds << " s (" << format_hours(total_seconds) << ")\n";
    return 0;
}

int cmd_categorize(const ProjectConfig& cfg, const std::string& model,
                   const std::string& mock_endpoint, const std::string& corpus_kind) {
    ProjectStore store(cfg.resolve(cfg.store));
    StoreLock lock(store.root());

    GatewayConfig gw_config = gateway_config(cfg, store, mock_endpoint, model);
    CorpusSelection corpus = select_corpus(cfg, store, corpus_kind);

    const fs::path summaries_path =
        store.summaries_dir() / gw_config.chat_model / summaries_file(cfg.device, corpus);
    auto summaries_artifact = store.read_artifact(summaries_path, "summaries");

    std::map<std::uint32_t, std::vector<FunctionSummary>> by_module;
    for (const auto& s : summaries_artifact.payload.at("summaries")) {
        auto summary = FunctionSummary::from_json(s);
        by_module[summary.module].push_back(summary);
    }

    auto definitions = cfg.category_definitions.empty()
                           ? default_category_definitions()
                           : load_category_definitions(cfg.resolve(cfg.category_definitions));

    LlmGateway gateway(gw_config);
    TimingAggregator timing;

    json rankings = json::array();
    json skipped = json::array();
    for (const auto& [module_id, summaries] : by_module) {
        auto result = categorize_module(module_id, summaries, definitions, gateway, &timing);
        if (result.skipped_no_summaries) {
            skipped.push_back({{"module", module_id}, {"reason", "SkippedNoSummaries"}});
            continue;
        }
        rankings.push_back(result.ranking->to_json());
        // query-mode preview: top-1 category
        auto top1 = select_top_k(*result.ranking, 1, "cluster_" + std::to_string(module_id));
        std::cout << "module " << module_id << " -> "
                  << category_display_name(*top1.selected.begin()) << "\n";
    }

    json payload = {{"corpus", corpus.name},
                    {"model", gw_config.chat_model},
                    {"rankings", std::move(rankings)},
                    {"skipped", std::move(skipped)}};
    const fs::path out_path =
        store.rankings_dir() / gw_config.chat_model / summaries_file(cfg.device, corpus);
    store.write_artifact(out_path, "rankings", summaries_artifact.digest, payload);

    std::cout << render_timing(timing.totals());
    return 0;
}

// ---- normalize -------------------------------------------------------------

int cmd_normalize(const ProjectConfig& cfg) {
    if (cfg.binary.empty()) raise(errc::config, "config key \"binary\" is required for normalize");
    if (cfg.source_root.empty()) {
        raise(errc::config, "config key \"source_root\" is required for normalize");
    }
    ProjectStore store(cfg.resolve(cfg.store));
    StoreLock lock(store.root());

    BinaryImage image = load_elf(cfg.resolve(cfg.binary));
    NameAddressMap names = build_name_address_map(image);

    auto extraction = extract_function_bodies(cfg.resolve(cfg.source_root), names.names());

    json manifest = json::array();
    for (const auto& fn : extraction.functions) {
        auto body = strip_comments(fn.body_text);
        auto normalized = anonymize_identifiers({fn.name, fn.file, body});

        store.write_text(store.normalized_dir() / (fn.name + ".c"), normalized.normalized_text);
        json rename_map = json::object();
        for (const auto& [original, fresh] : normalized.rename_map) rename_map[original] = fresh;
        store.write_json(store.normalized_dir() / (fn.name + ".rename.json"), rename_map);

        if (auto addr = names.address_of(fn.name)) {
            manifest.push_back({{"entry", hex_addr(*addr)}, {"file", fn.name + ".c"}});
        }
    }
    store.write_json(store.normalized_dir() / "manifest.json", manifest);

    std::cout << "normalized " << extraction.functions.size() << " functions";
    if (!extraction.not_found.empty()) {
        std::cout << "; " << extraction.not_found.size() << " names not found in source";
    }
    std::cout << "\n";
    return 0;
}

// ---- evaluate / report -----------------------------------------------------

struct RankingSet {
    std::string model;
    std::string corpus;  // decompiled | normalized
    std::map<std::uint32_t, CategoryRanking> by_module;
};

std::vector<RankingSet> load_rankings(const ProjectStore& store, const std::string& device) {
    std::vector<RankingSet> sets;
    if (!fs::exists(store.rankings_dir())) return sets;
    for (const auto& model_dir : fs::directory_iterator(store.rankings_dir())) {
        if (!model_dir.is_directory()) continue;
        for (const auto& file : fs::directory_iterator(model_dir.path())) {
            const std::string stem = file.path().filename().string();
            std::string corpus;
            if (stem == device + ".json") corpus = "decompiled";
            else if (stem == device + ".normalized.json") corpus = "normalized";
            else continue;
            auto artifact = store.read_artifact(file.path(), "rankings");
            RankingSet set;
            set.model = model_dir.path().filename().string();
            set.corpus = corpus;
            for (const auto& r : artifact.payload.at("rankings")) {
                auto ranking = CategoryRanking::from_json(r);
                set.by_module[ranking.module] = ranking;
            }
            sets.push_back(std::move(set));
        }
    }
    std::sort(sets.begin(), sets.end(), [](const RankingSet& a, const RankingSet& b) {
        return a.model != b.model ? a.model < b.model : a.corpus < b.corpus;
    });
    return sets;
}

CategoryReport score_rankings(const RankingSet& set, const std::vector<ModuleMatch>& matches,
                              const GroundTruthCategories& gt, const std::string& device) {
    std::vector<ModulePrediction> predictions;
    for (const auto& match : matches) {
        auto gt_it = gt.mapping.find(match.gt_module);
        if (gt_it == gt.mapping.end()) continue;
        auto ranking_it = set.by_module.find(match.predicted_cluster);
        if (ranking_it == set.by_module.end()) continue;
        const int k = static_cast<int>(gt_it->second.size());
        predictions.push_back(select_top_k(ranking_it->second, k, match.gt_module));
    }
    CategoryReport report = category_metrics(predictions, gt);
    report.device = device;
    report.model = set.model;
    return report;
}

int cmd_evaluate(const ProjectConfig& cfg, const std::string& mock_endpoint) {
    ProjectStore store(cfg.resolve(cfg.store));
    StoreLock lock(store.root());

    if (cfg.gt_modules.empty() || cfg.gt_categories.empty()) {
        raise(errc::missing_ground_truth,
              "config keys \"ground_truth_modules\" and \"ground_truth_categories\" are required");
    }
    auto [gt_modules, gt_categories] =
        load_ground_truth(cfg.resolve(cfg.gt_modules), cfg.resolve(cfg.gt_categories));

    auto partition_artifact =
        store.read_artifact(store.partitions_dir() / "partition.json", "partition");
    Partition partition = Partition::from_json(partition_artifact.payload);

    auto matches = match_clusters(partition, gt_modules);
    ModularizationReport modularization = weighted_metrics(matches);
    modularization.device = cfg.device;
    store.write_artifact(store.reports_dir() / "modularization.json", "report",
                         partition_artifact.digest, modularization.to_json());

    // per-model category scoring, normalized-source runs becoming upper bounds
    auto ranking_sets = load_rankings(store, cfg.device);
    std::map<std::string, CategoryReport> primary, upper;
    json category_reports = json::array();
    for (const auto& set : ranking_sets) {
        CategoryReport report = score_rankings(set, matches, gt_categories, cfg.device);
        json entry = report.to_json();
        entry["corpus"] = set.corpus;
        category_reports.push_back(std::move(entry));
        if (set.corpus == "decompiled") primary[set.model] = report;
        else upper[set.model] = report;
    }
    if (!ranking_sets.empty()) {
        store.write_artifact(store.reports_dir() / "categories.json", "report",
                             partition_artifact.digest, category_reports);
    }

    // summary-quality similarity when both corpora were summarized
    std::vector<SimilarityReport> similarity;
    for (const auto& [model, category_report] : primary) {
        (void)category_report;
        const fs::path dec_path = store.summaries_dir() / model / (cfg.device + ".json");
        const fs::path norm_path =
            store.summaries_dir() / model / (cfg.device + ".normalized.json");
        if (!store.exists(dec_path) || !store.exists(norm_path)) continue;

        std::map<std::uint64_t, std::string> dec, norm;
        for (const auto& s : store.read_artifact(dec_path, "summaries").payload.at("summaries")) {
            auto summary = FunctionSummary::from_json(s);
            if (summary.ok()) dec[summary.entry] = summary.summary_text;
        }
        for (const auto& s : store.read_artifact(norm_path, "summaries").payload.at("summaries")) {
            auto summary = FunctionSummary::from_json(s);
            if (summary.ok()) norm[summary.entry] = summary.summary_text;
        }
        std::vector<SummaryPair> pairs;
        for (const auto& [entry, text] : dec) {
            auto it = norm.find(entry);
            if (it != norm.end()) pairs.push_back({text, it->second});
        }
        if (pairs.empty()) continue;

        GatewayConfig gw_config = gateway_config(cfg, store, mock_endpoint, "");
        LlmGateway gateway(gw_config);
        SimilarityReport report = summary_similarity(pairs, gateway);
        report.device = cfg.device;
        report.model = model;
        similarity.push_back(report);
    }
    if (!similarity.empty()) {
        json sim_json = json::array();
        for (const auto& r : similarity) sim_json.push_back(r.to_json());
        store.write_artifact(store.reports_dir() / "similarity.json", "report",
                             partition_artifact.digest, sim_json);
    }

    // rendered report
    std::ostringstream text;
    text << "Modularization (" << cfg.device << ": "
         << modularization_summary_line(modularization) << ")\n";
    text << render_modularization_table({modularization}) << "\n";
    if (!primary.empty()) {
        std::vector<std::string> models;
        for (const auto& [model, report] : primary) models.push_back(model);
        text << "Category retrieval (upper bounds from normalized source in parentheses)\n";
        text << render_category_table(category_table_rows(cfg.device, primary, upper), models)
             << "\n";
    }
    if (!similarity.empty()) {
        text << "Summary similarity (cosine, mean ± std)\n";
        text << render_similarity_table(similarity);
    }
    store.write_text(store.reports_dir() / "report.txt", text.str());
    std::cout << text.str();
    return 0;
}

int cmd_report(const ProjectConfig& cfg) {
    ProjectStore store(cfg.resolve(cfg.store));
    const fs::path report_path = store.reports_dir() / "report.txt";
    if (!store.exists(report_path)) {
        raise(errc::missing_artifact, report_path.string() + " does not exist; run evaluate first");
    }
    std::ifstream in(report_path, std::ios::binary);
    std::cout << in.rdbuf();
    return 0;
}

std::vector<std::uint64_t> parse_seed_list(const std::vector<std::string>& seeds) {
    std::vector<std::uint64_t> out;
    out.reserve(seeds.size());
    for (const auto& s : seeds) out.push_back(parse_hex_address(s));
    return out;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Firmware module analysis: decompose stripped ARM firmware into modules, "
                 "summarize and categorize them through an LLM endpoint, and score the results"};
    app.require_subcommand(1);

    std::string config_path = "fwmod.json";
    std::string store_override, device_override;
    app.add_option("--config", config_path, "Project configuration file")->capture_default_str();
    app.add_option("--store", store_override, "Artifact store directory (overrides config)");
    app.add_option("--device", device_override, "Device label (overrides config)");

    auto* decompose = app.add_subcommand("decompose", "Binary -> graphs -> module partition");
    std::string weights_csv;
    std::vector<std::string> seed_strings;
    decompose->add_option("--weights", weights_csv, "SG,DRG,CG coefficients, e.g. 1,0.5,2");
    decompose->add_option("--seed", seed_strings, "Extra function entry seed (hex), repeatable");

    std::string model, mock_endpoint, corpus_kind = "decompiled";
    int threshold_override = 0;
    auto* summarize = app.add_subcommand("summarize", "Summarize decompiled functions per module");
    summarize->add_option("--model", model, "Chat model name (overrides config)");
    summarize->add_option("--mock-endpoint", mock_endpoint, "Endpoint base URL override");
    summarize->add_option("--corpus", corpus_kind, "decompiled|normalized")
        ->check(CLI::IsMember({"decompiled", "normalized"}));
    summarize->add_option("--threshold", threshold_override, "Minimum line count filter");

    auto* categorize = app.add_subcommand("categorize", "Rank module categories from summaries");
    categorize->add_option("--model", model, "Chat model name (overrides config)");
    categorize->add_option("--mock-endpoint", mock_endpoint, "Endpoint base URL override");
    categorize->add_option("--corpus", corpus_kind, "decompiled|normalized")
        ->check(CLI::IsMember({"decompiled", "normalized"}));

    auto* normalize = app.add_subcommand("normalize", "Extract and anonymize source functions");

    auto* evaluate = app.add_subcommand("evaluate", "Score artifacts against ground truth");
    evaluate->add_option("--mock-endpoint", mock_endpoint, "Endpoint base URL override");

    auto* report = app.add_subcommand("report", "Print the stored evaluation report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        ProjectConfig cfg = load_config(config_path);
        if (!store_override.empty()) cfg.store = store_override;
        if (!device_override.empty()) cfg.device = device_override;
        if (!weights_csv.empty()) {
            GraphWeights w;
            if (std::sscanf(weights_csv.c_str(), "%lf,%lf,%lf", &w.alpha, &w.beta, &w.gamma) != 3) {
                raise(errc::config, "--weights expects three comma-separated numbers");
            }
            cfg.weights = w;
        }

        if (decompose->parsed()) return cmd_decompose(cfg, parse_seed_list(seed_strings));
        if (summarize->parsed()) {
            return cmd_summarize(cfg, model, mock_endpoint, corpus_kind, threshold_override);
        }
        if (categorize->parsed()) return cmd_categorize(cfg, model, mock_endpoint, corpus_kind);
        if (normalize->parsed()) return cmd_normalize(cfg);
        if (evaluate->parsed()) return cmd_evaluate(cfg, mock_endpoint);
        if (report->parsed()) return cmd_report(cfg);
        return 2;
    } catch (const Error& e) {
        std::cerr << "fwmod: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "fwmod: internal error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace fwmod
