#include "fwmod/categorize.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fwmod/errors.hpp"

namespace fwmod {

namespace {

bool word_char(char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) != 0 || ch == '_';
}

// Earliest word-bounded, case-insensitive occurrence of any synonym.
std::size_t earliest_match(const std::string& lower, const std::vector<std::string>& synonyms) {
    std::size_t best = std::string::npos;
    for (const auto& syn : synonyms) {
        std::size_t pos = 0;
        while ((pos = lower.find(syn, pos)) != std::string::npos) {
            const bool left_ok = pos == 0 || !word_char(lower[pos - 1]);
            const std::size_t end = pos + syn.size();
            const bool right_ok = end >= lower.size() || !word_char(lower[end]);
            if (left_ok && right_ok) {
                best = std::min(best, pos);
                break;
            }
            ++pos;
        }
    }
    return best;
}

const std::vector<std::string>& synonyms_for(Category c) {
    static const std::vector<std::string> data_transfer = {"data transfer", "data_transfer",
                                                           "data-transfer"};
    static const std::vector<std::string> navigation = {"navigation"};
    static const std::vector<std::string> controller = {"controller", "control"};
    static const std::vector<std::string> safety = {"safety check", "safety_check", "safety-check",
                                                    "safety"};
    static const std::vector<std::string> other = {"other", "others"};
    switch (c) {
        case Category::data_transfer: return data_transfer;
        case Category::navigation: return navigation;
        case Category::controller: return controller;
        case Category::safety_check: return safety;
        case Category::other: return other;
    }
    return other;
}

}  // namespace

std::vector<CategoryDefinition> default_category_definitions() {
    return {
        {Category::data_transfer,
         "Modules that move data between the vehicle and other systems: communication protocol "
         "handling (e.g. MAVLink, UART, SPI), telemetry links, message packing and unpacking, and "
         "exchange with ground stations, peers or peripherals."},
        {Category::navigation,
         "Modules that determine or maintain the vehicle's position, orientation and route: GPS "
         "and sensor integration for positioning, waypoint and path handling, and guidance toward "
         "targets."},
        {Category::controller,
         "Modules that manage the vehicle's behavior and dynamics: regulation of attitude, speed "
         "or actuators, and translation of operational inputs and environmental conditions into "
         "steering, throttle or braking responses."},
        {Category::safety_check,
         "Modules that monitor the integrity and operational status of the vehicle: health and "
         "status checks, failsafe handling, arming checks, and measures that prevent accidents or "
         "malfunctions."},
        {Category::other,
         "Modules that do not fit the previous four categories, such as general utilities, "
         "memory or scheduling plumbing, and math helpers with no vehicle-specific role."},
    };
}

std::vector<CategoryDefinition> load_category_definitions(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(errc::missing_file, "cannot open " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        raise(errc::malformed_json, path.string() + ": " + e.what());
    }
    std::vector<CategoryDefinition> defs;
    for (const auto& [name, text] : j.items()) {
        auto c = category_from_name(name);
        if (!c) raise(errc::unknown_category, name);
        defs.push_back({*c, text.get<std::string>()});
    }
    return defs;
}

ChatRequest build_category_prompt(const std::vector<CategoryDefinition>& definitions,
                                  const std::vector<FunctionSummary>& summaries,
                                  const std::string& model, int max_tokens) {
    for (Category c : kAllCategories) {
        auto found = std::find_if(definitions.begin(), definitions.end(),
                                  [c](const CategoryDefinition& d) { return d.category == c; });
        if (found == definitions.end()) {
            raise(errc::missing_definition, std::string(category_name(c)) + " has no definition");
        }
    }
    if (summaries.empty()) raise(errc::no_summaries, "cannot categorize without summaries");

    std::ostringstream prompt;
    prompt << "Category definitions:\n";
    for (Category c : kAllCategories) {
        auto def = std::find_if(definitions.begin(), definitions.end(),
                                [c](const CategoryDefinition& d) { return d.category == c; });
        prompt << "- " << category_display_name(c) << ": " << def->definition_text << "\n";
    }
    prompt << "\nFunction summaries for one module of a firmware binary:\n";
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        prompt << i + 1 << ". " << summaries[i].summary_text << "\n";
    }
    prompt << "\nRank all five categories by how likely this module belongs to each, based on the "
              "function summaries. Answer with the five category names only, one per line, most "
              "likely first.";

    ChatRequest request;
    request.model = model;
    request.temperature = 0.0;
    request.max_tokens = max_tokens;
    request.messages.push_back(
        {"system", "You classify firmware modules into predefined functional categories."});
    request.messages.push_back({"user", prompt.str()});
    return request;
}

CategoryRanking parse_ranking(const std::string& raw) {
    std::string lower(raw.size(), '\0');
    std::transform(raw.begin(), raw.end(), lower.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });

    std::vector<std::pair<std::size_t, Category>> found;
    for (Category c : kAllCategories) {
        std::size_t pos = earliest_match(lower, synonyms_for(c));
        if (pos != std::string::npos) found.emplace_back(pos, c);
    }
    if (found.empty()) raise(errc::unparseable_ranking, "no category name in answer");

    std::stable_sort(found.begin(), found.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    CategoryRanking ranking;
    ranking.raw_text = raw;
    std::size_t slot = 0;
    auto mentioned = [&found](Category c) {
        return std::any_of(found.begin(), found.end(),
                           [c](const auto& p) { return p.second == c; });
    };
    for (const auto& [pos, c] : found) ranking.ordered[slot++] = c;
    for (Category c : kAllCategories) {
        if (!mentioned(c)) ranking.ordered[slot++] = c;
    }
    return ranking;
}

ModulePrediction select_top_k(const CategoryRanking& ranking, int k, std::string module_label) {
    if (k < 1 || k > 5) raise(errc::bad_k, "k must be in [1,5], got " + std::to_string(k));
    ModulePrediction pred;
    pred.module = std::move(module_label);
    pred.k = k;
    for (int i = 0; i < k; ++i) pred.selected.insert(ranking.ordered[static_cast<std::size_t>(i)]);
    return pred;
}

CategorizeResult categorize_module(std::uint32_t module_id,
                                   const std::vector<FunctionSummary>& summaries,
                                   const std::vector<CategoryDefinition>& definitions,
                                   LlmGateway& gateway, TimingAggregator* timing) {
    std::vector<FunctionSummary> usable;
    for (const auto& s : summaries) {
        if (s.ok()) usable.push_back(s);
    }
    if (usable.empty()) return {.ranking = std::nullopt, .skipped_no_summaries = true};

    auto request = build_category_prompt(definitions, usable, gateway.config().chat_model);
    auto response = gateway.chat(request);
    if (timing) timing->record("categorize", response.latency_seconds, response.from_cache);

    try {
        auto ranking = parse_ranking(response.text);
        ranking.module = module_id;
        return {.ranking = ranking, .skipped_no_summaries = false};
    } catch (const Error& e) {
        if (e.code() != errc::unparseable_ranking) throw;
    }

    // One reformat retry: keep the conversation, append the format reminder.
    ChatRequest retry = request;
    retry.messages.push_back({"assistant", response.text});
    retry.messages.push_back(
        {"user", "Answer with only the five category names, ranked, one per line."});
    auto second = gateway.chat(retry);
    if (timing) timing->record("categorize", second.latency_seconds, second.from_cache);
    auto ranking = parse_ranking(second.text);
    ranking.module = module_id;
    return {.ranking = ranking, .skipped_no_summaries = false};
}

nlohmann::json CategoryRanking::to_json() const {
    nlohmann::json ordered_json = nlohmann::json::array();
    for (Category c : ordered) ordered_json.push_back(std::string(category_name(c)));
    return {{"module", module}, {"ordered", std::move(ordered_json)}, {"raw_text", raw_text}};
}

CategoryRanking CategoryRanking::from_json(const nlohmann::json& j) {
    CategoryRanking r;
    r.module = j.at("module").get<std::uint32_t>();
    r.raw_text = j.at("raw_text").get<std::string>();
    const auto& ordered = j.at("ordered");
    if (ordered.size() != 5) raise(errc::malformed_json, "ranking must list five categories");
    for (std::size_t i = 0; i < 5; ++i) {
        auto c = category_from_name(ordered[i].get<std::string>());
        if (!c) raise(errc::unknown_category, ordered[i].get<std::string>());
        r.ordered[i] = *c;
    }
    return r;
}

}  // namespace fwmod
