#include <doctest.h>

#include <nlohmann/json.hpp>

#include "fwmod/corpus.hpp"
#include "support/helpers.hpp"

using namespace fwmod;
using fwmod::test::TempDir;

TEST_SUITE("corpus_ingest") {

TEST_CASE("non-blank line counting") {
    CHECK(count_nonblank_lines("a\nb\nc\n") == 3);
    CHECK(count_nonblank_lines("a\n\n  \nb") == 2);
    CHECK(count_nonblank_lines("") == 0);
    CHECK(count_nonblank_lines("   \t \n") == 0);
    CHECK(count_nonblank_lines("x") == 1);  // no trailing newline
}

TEST_CASE("hex address parsing") {
    CHECK(parse_hex_address("0x08001234") == 0x08001234);
    CHECK(parse_hex_address("8000") == 0x8000);
    CHECK_ERRC(parse_hex_address("0xZZ"), errc::bad_hex);
    CHECK_ERRC(parse_hex_address(""), errc::bad_hex);
}

TEST_CASE("manifest loading reads files and counts lines") {
    TempDir dir;
    dir.write("funcs/a.c", "int f() {\nreturn 1;\n}\n");
    std::string body17;
    for (int i = 0; i < 17; ++i) body17 += "line" + std::to_string(i) + "\n";
    dir.write("funcs/b.c", body17 + "\n\n\n");  // 17 non-blank + 3 blank
    dir.write("manifest.json", R"([
        {"entry": "0x8000", "file": "funcs/a.c"},
        {"entry": "0x8010", "file": "funcs/b.c"}
    ])");

    auto corpus = load_decompiled_corpus(dir.path / "manifest.json");
    REQUIRE(corpus.size() == 2);
    CHECK(corpus[0].entry == 0x8000);
    CHECK(corpus[0].line_count == 3);
    CHECK(corpus[1].line_count == 17);
}

TEST_CASE("manifest rejects duplicate entries") {
    TempDir dir;
    dir.write("a.c", "x\n");
    dir.write("manifest.json", R"([
        {"entry": "0x8000", "file": "a.c"},
        {"entry": "0x8000", "file": "a.c"}
    ])");
    CHECK_ERRC(load_decompiled_corpus(dir.path / "manifest.json"), errc::duplicate_entry);
}

TEST_CASE("manifest rejects missing files and bad hex") {
    TempDir dir;
    dir.write("manifest.json", R"([{"entry": "0x8000", "file": "gone.c"}])");
    CHECK_ERRC(load_decompiled_corpus(dir.path / "manifest.json"), errc::missing_file);

    dir.write("a.c", "x\n");
    dir.write("bad.json", R"([{"entry": "wat?", "file": "a.c"}])");
    CHECK_ERRC(load_decompiled_corpus(dir.path / "bad.json"), errc::bad_hex);

    dir.write("notjson.json", "{");
    CHECK_ERRC(load_decompiled_corpus(dir.path / "notjson.json"), errc::malformed_json);
}

TEST_CASE("length filter keeps >= threshold, order preserved") {
    std::vector<DecompiledFunction> funcs = {
        {0x1, "a", 14}, {0x2, "b", 15}, {0x3, "c", 40}};
    auto kept = filter_by_length(funcs, 15);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].entry == 0x2);
    CHECK(kept[1].entry == 0x3);
}

TEST_CASE("length filter edge cases") {
    std::vector<DecompiledFunction> funcs = {{0x1, "a", 3}, {0x2, "b", 1}};
    CHECK(filter_by_length(funcs, 1).size() == 2);   // identity at threshold 1
    CHECK(filter_by_length({}, 15).empty());
    CHECK_ERRC(filter_by_length(funcs, 0), errc::bad_threshold);
}

TEST_CASE("length filter is idempotent and monotone in the threshold") {
    std::vector<DecompiledFunction> funcs;
    for (int i = 1; i <= 30; ++i) funcs.push_back({std::uint64_t(i), "f", i});
    for (int t1 = 1; t1 <= 30; t1 += 7) {
        auto once = filter_by_length(funcs, t1);
        auto twice = filter_by_length(once, t1);
        CHECK(once.size() == twice.size());
        for (int t2 = t1; t2 <= 30; t2 += 5) {
            auto stricter = filter_by_length(funcs, t2);
            CHECK(stricter.size() <= once.size());
            for (const auto& f : stricter) {
                CHECK(std::any_of(once.begin(), once.end(),
                                  [&](const DecompiledFunction& g) { return g.entry == f.entry; }));
            }
        }
    }
}

TEST_CASE("ground truth loads modules and categories") {
    TempDir dir;
    dir.write("modules.json", R"({"0x08001234": "AC_WPNav", "0x08001300": "GCS_MAVLink"})");
    dir.write("categories.json",
              R"({"AC_WPNav": ["navigation"], "GCS_MAVLink": ["data_transfer"]})");
    auto [modules, categories] =
        load_ground_truth(dir.path / "modules.json", dir.path / "categories.json");
    CHECK(modules.mapping.at(0x08001234) == "AC_WPNav");
    CHECK(categories.mapping.at("AC_WPNav") == std::set<Category>{Category::navigation});
}

TEST_CASE("ground truth rejects unknown categories and empty sets") {
    TempDir dir;
    dir.write("modules.json", R"({"0x1": "M"})");
    dir.write("bad_cat.json", R"({"M": ["telemetry"]})");
    CHECK_ERRC(load_ground_truth(dir.path / "modules.json", dir.path / "bad_cat.json"),
               errc::unknown_category);

    dir.write("empty_cat.json", R"({"M": []})");
    CHECK_ERRC(load_ground_truth(dir.path / "modules.json", dir.path / "empty_cat.json"),
               errc::empty_category_set);
}

TEST_CASE("corpus round-trips through serialization") {
    TempDir dir;
    dir.write("funcs/a.c", "int f() {\n  return 1;\n}\n");
    dir.write("manifest.json", R"([{"entry": "0x8000", "file": "funcs/a.c"}])");
    auto corpus = load_decompiled_corpus(dir.path / "manifest.json");

    // serialize + reload
    nlohmann::json manifest = nlohmann::json::array();
    TempDir dir2;
    for (const auto& f : corpus) {
        char name[32];
        std::snprintf(name, sizeof(name), "%08llx.c", static_cast<unsigned long long>(f.entry));
        dir2.write(name, f.text);
        char entry[32];
        std::snprintf(entry, sizeof(entry), "0x%08llx", static_cast<unsigned long long>(f.entry));
        manifest.push_back({{"entry", entry}, {"file", name}});
    }
    dir2.write("manifest.json", manifest.dump());
    auto reloaded = load_decompiled_corpus(dir2.path / "manifest.json");
    REQUIRE(reloaded.size() == corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        CHECK(reloaded[i].entry == corpus[i].entry);
        CHECK(reloaded[i].text == corpus[i].text);
        CHECK(reloaded[i].line_count == corpus[i].line_count);
    }
}

}  // TEST_SUITE
