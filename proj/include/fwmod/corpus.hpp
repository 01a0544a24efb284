#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fwmod/category.hpp"

namespace fwmod {

// One decompiled function as produced by an external decompiler.
struct DecompiledFunction {
    std::uint64_t entry = 0;
    std::string text;
    int line_count = 0;  // non-blank lines of text
};

struct GroundTruthModules {
    // function entry -> ground-truth module name
    std::unordered_map<std::uint64_t, std::string> mapping;
};

struct GroundTruthCategories {
    // module name -> non-empty category set
    std::map<std::string, std::set<Category>> mapping;
};

int count_nonblank_lines(std::string_view text);

// Parses "0x..." (or bare hex) addresses; throws bad_hex.
std::uint64_t parse_hex_address(const std::string& text);

// Manifest: JSON array of {"entry": "0x...", "file": "relative/path"}.
// Files are resolved relative to the manifest location and read as UTF-8.
// Throws duplicate_entry, missing_file, bad_hex, malformed_json.
std::vector<DecompiledFunction> load_decompiled_corpus(const std::filesystem::path& manifest);

// Keeps functions with line_count >= threshold, order preserved.
std::vector<DecompiledFunction> filter_by_length(const std::vector<DecompiledFunction>& functions,
                                                 int threshold = 15);

// Modules: {"0x08001234": "AC_WPNav", ...}
// Categories: {"AC_WPNav": ["navigation"], ...}
// Throws unknown_category, empty_category_set, malformed_json, bad_hex.
std::pair<GroundTruthModules, GroundTruthCategories> load_ground_truth(
    const std::filesystem::path& modules_path, const std::filesystem::path& categories_path);

}  // namespace fwmod
