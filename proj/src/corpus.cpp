#include "fwmod/corpus.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fwmod/errors.hpp"

namespace fwmod {

namespace {

nlohmann::json parse_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(errc::missing_file, "cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        raise(errc::malformed_json, path.string() + ": " + e.what());
    }
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(errc::missing_file, "cannot open " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return std::move(out).str();
}

}  // namespace

int count_nonblank_lines(std::string_view text) {
    int count = 0;
    bool blank = true;
    for (char ch : text) {
        if (ch == '\n') {
            if (!blank) ++count;
            blank = true;
        } else if (ch != ' ' && ch != '\t' && ch != '\r') {
            blank = false;
        }
    }
    if (!blank) ++count;  // final line without trailing newline
    return count;
}

std::uint64_t parse_hex_address(const std::string& text) {
    std::string_view s = text;
    if (s.substr(0, 2) == "0x" || s.substr(0, 2) == "0X") s.remove_prefix(2);
    if (s.empty() || s.size() > 16) raise(errc::bad_hex, "bad address \"" + text + "\"");
    std::uint64_t value = 0;
    for (char ch : s) {
        value <<= 4;
        if (ch >= '0' && ch <= '9') value |= static_cast<std::uint64_t>(ch - '0');
        else if (ch >= 'a' && ch <= 'f') value |= static_cast<std::uint64_t>(ch - 'a' + 10);
        else if (ch >= 'A' && ch <= 'F') value |= static_cast<std::uint64_t>(ch - 'A' + 10);
        else raise(errc::bad_hex, "bad address \"" + text + "\"");
    }
    return value;
}

std::vector<DecompiledFunction> load_decompiled_corpus(const std::filesystem::path& manifest) {
    nlohmann::json j = parse_json_file(manifest);
    if (!j.is_array()) raise(errc::malformed_json, manifest.string() + ": manifest must be an array");

    const auto base = manifest.parent_path();
    std::vector<DecompiledFunction> out;
    std::set<std::uint64_t> seen;
    out.reserve(j.size());
    for (const auto& row : j) {
        if (!row.is_object() || !row.contains("entry") || !row.contains("file")) {
            raise(errc::malformed_json, manifest.string() + ": rows need entry and file");
        }
        DecompiledFunction f;
        f.entry = parse_hex_address(row.at("entry").get<std::string>());
        if (!seen.insert(f.entry).second) {
            raise(errc::duplicate_entry,
                  "manifest lists entry " + row.at("entry").get<std::string>() + " twice");
        }
        f.text = read_text_file(base / row.at("file").get<std::string>());
        f.line_count = count_nonblank_lines(f.text);
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<DecompiledFunction> filter_by_length(const std::vector<DecompiledFunction>& functions,
                                                 int threshold) {
    if (threshold < 1) raise(errc::bad_threshold, "length threshold must be >= 1");
    std::vector<DecompiledFunction> out;
    for (const auto& f : functions) {
        if (f.line_count >= threshold) out.push_back(f);
    }
    return out;
}

std::pair<GroundTruthModules, GroundTruthCategories> load_ground_truth(
    const std::filesystem::path& modules_path, const std::filesystem::path& categories_path) {
    nlohmann::json jm = parse_json_file(modules_path);
    nlohmann::json jc = parse_json_file(categories_path);
    if (!jm.is_object()) raise(errc::malformed_json, modules_path.string() + ": expected object");
    if (!jc.is_object()) raise(errc::malformed_json, categories_path.string() + ": expected object");

    GroundTruthModules modules;
    for (const auto& [addr, name] : jm.items()) {
        if (!name.is_string()) {
            raise(errc::malformed_json, modules_path.string() + ": module names must be strings");
        }
        modules.mapping[parse_hex_address(addr)] = name.get<std::string>();
    }

    GroundTruthCategories categories;
    for (const auto& [module, cats] : jc.items()) {
        if (!cats.is_array()) {
            raise(errc::malformed_json, categories_path.string() + ": category sets must be arrays");
        }
        std::set<Category> set;
        for (const auto& c : cats) {
            auto parsed = category_from_name(c.get<std::string>());
            if (!parsed) {
                raise(errc::unknown_category,
                      "\"" + c.get<std::string>() + "\" for module " + module);
            }
            set.insert(*parsed);
        }
        if (set.empty()) raise(errc::empty_category_set, "module " + module);
        categories.mapping[module] = std::move(set);
    }
    return {std::move(modules), std::move(categories)};
}

}  // namespace fwmod
