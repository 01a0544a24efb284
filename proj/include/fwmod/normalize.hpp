#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace fwmod {

// A function definition pulled out of a C/C++ source tree, signature through
// the matching closing brace.
struct SourceFunction {
    std::string name;
    std::filesystem::path file;
    std::string body_text;
};

struct NormalizedFunction {
    std::string name;             // original name
    std::string normalized_text;  // comment-free, identifiers anonymized
    std::map<std::string, std::string> rename_map;
};

struct ExtractionResult {
    std::vector<SourceFunction> functions;
    std::vector<std::string> not_found;
};

// Scans .c/.cpp/.h/.hpp under source_root for definitions of the wanted
// names. Lexing is string- and comment-aware; missing names are reported,
// not fatal.
ExtractionResult extract_function_bodies(const std::filesystem::path& source_root,
                                         const std::vector<std::string>& wanted);

// Extraction from an in-memory buffer (exposed for tests and tooling).
std::vector<SourceFunction> extract_from_text(std::string_view text,
                                              const std::filesystem::path& file,
                                              const std::vector<std::string>& wanted);

// Removes // and /* */ comments with literal awareness; block comments
// become a single space. Throws unterminated_comment at EOF inside /* */.
std::string strip_comments(std::string_view text);

// Renames every identifier outside the reserved set: the function's own name
// to FUNC_0, all others to ID_0, ID_1, ... in first-occurrence order.
NormalizedFunction anonymize_identifiers(const SourceFunction& func);

// Non-comment token stream under the normalizer's lexer (test support).
std::vector<std::string> lex_tokens(std::string_view text);

bool is_reserved_identifier(std::string_view token);

}  // namespace fwmod
