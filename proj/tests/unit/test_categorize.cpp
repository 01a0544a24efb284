#include <doctest.h>

#include <algorithm>
#include <random>

#include <nlohmann/json.hpp>

#include "fwmod/categorize.hpp"
#include "support/helpers.hpp"

using namespace fwmod;

namespace {

bool is_permutation_of_all(const std::array<Category, 5>& ordered) {
    std::set<Category> seen(ordered.begin(), ordered.end());
    return seen.size() == 5;
}

std::vector<FunctionSummary> make_summaries(std::initializer_list<const char*> texts) {
    std::vector<FunctionSummary> out;
    std::uint64_t entry = 0x8000;
    for (const char* text : texts) {
        FunctionSummary s;
        s.entry = entry;
        entry += 0x10;
        s.module = 0;
        s.summary_text = text;
        s.model = "test-model";
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

TEST_SUITE("module_categorizer") {

TEST_CASE("a clean five-line answer parses in order") {
    auto r = parse_ranking("1. Controller\n2. Navigation\n3. Data Transfer\n4. Safety Check\n5. Other");
    CHECK(r.ordered == std::array<Category, 5>{Category::controller, Category::navigation,
                                               Category::data_transfer, Category::safety_check,
                                               Category::other});
}

TEST_CASE("prose with one category mention falls back to canonical order") {
    auto r = parse_ranking("Clearly a control module.");
    CHECK(r.ordered == std::array<Category, 5>{Category::controller, Category::data_transfer,
                                               Category::navigation, Category::safety_check,
                                               Category::other});
}

TEST_CASE("text without any category name is unparseable") {
    CHECK_ERRC(parse_ranking("no idea"), errc::unparseable_ranking);
}

TEST_CASE("synonyms and separators are recognized") {
    auto r = parse_ranking("data_transfer then safety, then others");
    CHECK(r.ordered[0] == Category::data_transfer);
    CHECK(r.ordered[1] == Category::safety_check);
    CHECK(r.ordered[2] == Category::other);
}

TEST_CASE("category names inside larger words do not match") {
    // "controlled" and "mother" must not trigger controller/other
    CHECK_ERRC(parse_ranking("controlled by mother ships"), errc::unparseable_ranking);
}

TEST_CASE("parser output is always a full permutation (property)") {
    std::mt19937 rng(7777);
    const std::vector<std::string> names = {"data transfer", "navigation", "controller",
                                            "safety check",  "other",     "others",
                                            "control",       "safety"};
    const std::vector<std::string> noise = {"module", "likely", "the", "ranked", "1.", "-", "\n",
                                            "unsure", "category:"};
    int parsed = 0, unparseable = 0;
    for (int round = 0; round < 10000; ++round) {
        std::string text;
        const int mentions = static_cast<int>(rng() % 6);
        for (int i = 0; i < mentions; ++i) {
            text += names[rng() % names.size()] + " ";
            text += noise[rng() % noise.size()] + " ";
        }
        for (int i = 0; i < 3; ++i) text += noise[rng() % noise.size()] + " ";
        try {
            auto r = parse_ranking(text);
            CHECK(is_permutation_of_all(r.ordered));
            ++parsed;
        } catch (const Error& e) {
            CHECK(e.code() == errc::unparseable_ranking);
            ++unparseable;
        }
    }
    CHECK(parsed > 0);
    CHECK(unparseable > 0);
}

TEST_CASE("select_top_k takes the ranking prefix") {
    CategoryRanking r;
    r.ordered = {Category::controller, Category::navigation, Category::data_transfer,
                 Category::safety_check, Category::other};
    auto pred = select_top_k(r, 2, "M");
    CHECK(pred.selected == std::set<Category>{Category::controller, Category::navigation});
    CHECK(pred.k == 2);

    CHECK(select_top_k(r, 1, "M").selected == std::set<Category>{Category::controller});
    CHECK(select_top_k(r, 5, "M").selected.size() == 5);
    CHECK_ERRC(select_top_k(r, 0, "M"), errc::bad_k);
    CHECK_ERRC(select_top_k(r, 6, "M"), errc::bad_k);
}

TEST_CASE("select_top_k with k=5 returns every category for any ranking") {
    std::mt19937 rng(51);
    std::array<Category, 5> ordered = kAllCategories;
    for (int round = 0; round < 20; ++round) {
        std::shuffle(ordered.begin(), ordered.end(), rng);
        CategoryRanking r;
        r.ordered = ordered;
        CHECK(select_top_k(r, 5, "M").selected.size() == 5);
    }
}

TEST_CASE("category prompt lays out definitions, summaries, instruction") {
    auto defs = default_category_definitions();
    auto summaries = make_summaries({"Sends telemetry packets.", "Validates checksums."});
    auto request = build_category_prompt(defs, summaries, "test-model");
    REQUIRE(request.messages.size() == 2);
    const std::string& prompt = request.messages[1].content;

    // all five definitions, numbered summaries, then the instruction
    for (Category c : kAllCategories) {
        CHECK(prompt.find(std::string(category_display_name(c)) + ":") != std::string::npos);
    }
    CHECK(prompt.find("1. Sends telemetry packets.") != std::string::npos);
    CHECK(prompt.find("2. Validates checksums.") != std::string::npos);
    const auto defs_pos = prompt.find("Category definitions");
    const auto summaries_pos = prompt.find("1. Sends telemetry");
    const auto instruction_pos = prompt.find("Rank all five");
    CHECK(defs_pos < summaries_pos);
    CHECK(summaries_pos < instruction_pos);
}

TEST_CASE("category prompt is deterministic") {
    auto defs = default_category_definitions();
    auto summaries = make_summaries({"Reads GPS fixes."});
    auto a = build_category_prompt(defs, summaries, "m");
    auto b = build_category_prompt(defs, summaries, "m");
    CHECK(a.body().dump() == b.body().dump());
}

TEST_CASE("missing definitions and empty summaries are rejected") {
    auto defs = default_category_definitions();
    defs.pop_back();
    auto summaries = make_summaries({"text"});
    CHECK_ERRC(build_category_prompt(defs, summaries, "m"), errc::missing_definition);

    CHECK_ERRC(build_category_prompt(default_category_definitions(), {}, "m"),
               errc::no_summaries);
}

TEST_CASE("definitions file round-trips and validates") {
    fwmod::test::TempDir dir;
    dir.write("defs.json", R"({
        "data_transfer": "a", "navigation": "b", "controller": "c",
        "safety_check": "d", "other": "e"
    })");
    auto defs = load_category_definitions(dir.path / "defs.json");
    CHECK(defs.size() == 5);

    dir.write("bad.json", R"({"telemetry": "x"})");
    CHECK_ERRC(load_category_definitions(dir.path / "bad.json"), errc::unknown_category);
}

TEST_CASE("ranking json round-trips") {
    CategoryRanking r;
    r.module = 7;
    r.ordered = {Category::navigation, Category::controller, Category::data_transfer,
                 Category::other, Category::safety_check};
    r.raw_text = "Navigation first";
    auto back = CategoryRanking::from_json(r.to_json());
    CHECK(back.module == r.module);
    CHECK(back.ordered == r.ordered);
    CHECK(back.raw_text == r.raw_text);
}

}  // TEST_SUITE
