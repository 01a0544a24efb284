#include "fwmod/normalize.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "fwmod/errors.hpp"

namespace fwmod {

namespace {

bool ident_start(char ch) {
    return std::isalpha(static_cast<unsigned char>(ch)) != 0 || ch == '_';
}
bool ident_char(char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) != 0 || ch == '_';
}
bool digit(char ch) { return ch >= '0' && ch <= '9'; }

// Lexical element classification shared by all passes.
enum class Lex { whitespace, line_comment, block_comment, string, character, number, identifier,
                 punct, end };

struct Scanner {
    std::string_view text;
    std::size_t pos = 0;

    bool eof() const { return pos >= text.size(); }
    char peek(std::size_t ahead = 0) const {
        return pos + ahead < text.size() ? text[pos + ahead] : '\0';
    }

    // Scans one lexical element starting at pos; returns its kind and leaves
    // [start, pos) as its extent.
    Lex next(std::size_t& start) {
        start = pos;
        if (eof()) return Lex::end;
        char ch = text[pos];

        if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n' || ch == '\f' || ch == '\v') {
            ++pos;
            return Lex::whitespace;
        }
        if (ch == '/' && peek(1) == '/') {
            pos += 2;
            while (!eof() && text[pos] != '\n') ++pos;
            return Lex::line_comment;
        }
        if (ch == '/' && peek(1) == '*') {
            pos += 2;
            while (!eof() && !(text[pos] == '*' && peek(1) == '/')) ++pos;
            if (eof()) raise(errc::unterminated_comment, "EOF inside /* */");
            pos += 2;
            return Lex::block_comment;
        }
        if (ch == 'R' && peek(1) == '"') {
            // raw string: R"delim( ... )delim"
            std::size_t delim_start = pos + 2;
            std::size_t paren = text.find('(', delim_start);
            if (paren != std::string_view::npos && paren - delim_start <= 16) {
                std::string closer = ")";
                closer += text.substr(delim_start, paren - delim_start);
                closer += '"';
                std::size_t close = text.find(closer, paren + 1);
                pos = close == std::string_view::npos ? text.size() : close + closer.size();
                return Lex::string;
            }
        }
        if (ch == '"' || ch == '\'') {
            const char quote = ch;
            ++pos;
            while (!eof() && text[pos] != quote) {
                pos += text[pos] == '\\' ? 2 : 1;
            }
            if (!eof()) ++pos;
            return quote == '"' ? Lex::string : Lex::character;
        }
        if (digit(ch) || (ch == '.' && digit(peek(1)))) {
            ++pos;
            while (!eof()) {
                char c = text[pos];
                if (ident_char(c) || c == '.') {
                    ++pos;
                } else if ((c == '+' || c == '-') && pos > 0 &&
                           (text[pos - 1] == 'e' || text[pos - 1] == 'E' ||
                            text[pos - 1] == 'p' || text[pos - 1] == 'P')) {
                    ++pos;
                } else {
                    break;
                }
            }
            return Lex::number;
        }
        if (ident_start(ch)) {
            ++pos;
            while (!eof() && ident_char(text[pos])) ++pos;
            return Lex::identifier;
        }
        ++pos;
        return Lex::punct;
    }
};

const std::unordered_set<std::string_view>& reserved_set() {
    static const std::unordered_set<std::string_view> set = {
        // C11
        "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else",
        "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long", "register",
        "restrict", "return", "short", "signed", "sizeof", "static", "struct", "switch",
        "typedef", "union", "unsigned", "void", "volatile", "while", "_Bool", "_Complex",
        "_Imaginary", "_Alignas", "_Alignof", "_Atomic", "_Generic", "_Noreturn",
        "_Static_assert", "_Thread_local",
        // C++17 additions
        "alignas", "alignof", "and", "and_eq", "asm", "bitand", "bitor", "bool", "catch",
        "char16_t", "char32_t", "class", "compl", "const_cast", "constexpr", "decltype",
        "delete", "dynamic_cast", "explicit", "export", "false", "friend", "mutable",
        "namespace", "new", "noexcept", "not", "not_eq", "nullptr", "operator", "or", "or_eq",
        "private", "protected", "public", "reinterpret_cast", "static_assert", "static_cast",
        "template", "this", "thread_local", "throw", "true", "try", "typeid", "typename",
        "using", "virtual", "wchar_t", "xor", "xor_eq",
        // fixed-width and friends
        "int8_t", "int16_t", "int32_t", "int64_t", "uint8_t", "uint16_t", "uint32_t", "uint64_t",
        "size_t", "NULL",
        // preprocessor directive names
        "define", "undef", "include", "ifdef", "ifndef", "endif", "elif", "pragma", "error",
        "warning", "line", "defined",
    };
    return set;
}

}  // namespace

bool is_reserved_identifier(std::string_view token) { return reserved_set().count(token) != 0; }

std::string strip_comments(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    Scanner scanner{text};
    std::size_t start = 0;
    for (;;) {
        Lex kind = scanner.next(start);
        if (kind == Lex::end) break;
        switch (kind) {
            case Lex::line_comment:
                break;  // newline stays (scanned as whitespace next)
            case Lex::block_comment:
                out += ' ';
                break;
            default:
                out.append(text.substr(start, scanner.pos - start));
                break;
        }
    }
    return out;
}

std::vector<std::string> lex_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    Scanner scanner{text};
    std::size_t start = 0;
    for (;;) {
        Lex kind = scanner.next(start);
        if (kind == Lex::end) break;
        if (kind == Lex::whitespace || kind == Lex::line_comment || kind == Lex::block_comment) {
            continue;
        }
        tokens.emplace_back(text.substr(start, scanner.pos - start));
    }
    return tokens;
}

NormalizedFunction anonymize_identifiers(const SourceFunction& func) {
    // Original identifiers, collected up-front so fresh names never collide
    // with a different original (keeps renaming leak-free and idempotent).
    std::unordered_set<std::string> originals;
    {
        Scanner scanner{func.body_text};
        std::size_t start = 0;
        for (;;) {
            Lex kind = scanner.next(start);
            if (kind == Lex::end) break;
            if (kind == Lex::identifier) {
                std::string tok(func.body_text.substr(start, scanner.pos - start));
                if (!is_reserved_identifier(tok)) originals.insert(std::move(tok));
            }
        }
    }

    NormalizedFunction out;
    out.name = func.name;

    std::map<std::string, std::string> renames;
    int next_id = 0;
    auto fresh_id = [&](const std::string& original) {
        for (;;) {
            std::string candidate = "ID_" + std::to_string(next_id++);
            if (!originals.count(candidate) || candidate == original) return candidate;
        }
    };

    std::string result;
    result.reserve(func.body_text.size());
    Scanner scanner{func.body_text};
    std::size_t start = 0;
    for (;;) {
        Lex kind = scanner.next(start);
        if (kind == Lex::end) break;
        std::string_view piece = func.body_text.substr(start, scanner.pos - start);
        if (kind == Lex::line_comment) continue;
        if (kind == Lex::block_comment) {
            result += ' ';
            continue;
        }
        if (kind != Lex::identifier || is_reserved_identifier(piece)) {
            result.append(piece);
            continue;
        }
        std::string token(piece);
        auto it = renames.find(token);
        if (it == renames.end()) {
            std::string fresh = token == func.name ? "FUNC_0" : fresh_id(token);
            it = renames.emplace(token, std::move(fresh)).first;
        }
        result += it->second;
    }

    out.normalized_text = std::move(result);
    out.rename_map = std::move(renames);
    return out;
}

namespace {

// Skips whitespace and comments from pos; returns the next significant
// position (or npos).
std::size_t next_significant(std::string_view text, std::size_t pos) {
    Scanner scanner{text, pos};
    std::size_t start = 0;
    for (;;) {
        Lex kind = scanner.next(start);
        switch (kind) {
            case Lex::end: return std::string_view::npos;
            case Lex::whitespace:
            case Lex::line_comment:
            case Lex::block_comment: continue;
            default: return start;
        }
    }
}

// Matches a balanced (...) or {...} group starting at an opener; returns the
// position just past the closer, npos when unbalanced.
std::size_t match_group(std::string_view text, std::size_t open_pos, char open, char close) {
    Scanner scanner{text, open_pos};
    std::size_t start = 0;
    int depth = 0;
    for (;;) {
        Lex kind = scanner.next(start);
        if (kind == Lex::end) return std::string_view::npos;
        if (kind != Lex::punct) continue;
        char ch = text[start];
        if (ch == open) ++depth;
        if (ch == close && --depth == 0) return scanner.pos;
    }
}

}  // namespace

std::vector<SourceFunction> extract_from_text(std::string_view text,
                                              const std::filesystem::path& file,
                                              const std::vector<std::string>& wanted) {
    std::unordered_set<std::string_view> wanted_set(wanted.begin(), wanted.end());
    std::vector<SourceFunction> found;

    Scanner scanner{text};
    std::size_t start = 0;
    std::size_t boundary = 0;  // start of the current declaration
    for (;;) {
        Lex kind = scanner.next(start);
        if (kind == Lex::end) break;

        if (kind == Lex::punct) {
            char ch = text[start];
            if (ch == ';' || ch == '{' || ch == '}') boundary = scanner.pos;
            if (ch == '#') {
                // preprocessor line: declaration context restarts after it
                while (!scanner.eof() && text[scanner.pos] != '\n') {
                    if (text[scanner.pos] == '\\' && scanner.pos + 1 < text.size()) ++scanner.pos;
                    ++scanner.pos;
                }
                boundary = scanner.pos;
            }
            continue;
        }
        if (kind != Lex::identifier) continue;
        std::string_view name = text.substr(start, scanner.pos - start);
        if (!wanted_set.count(name)) continue;

        // definition shape: name ( params ) [qualifiers / init-list] {
        std::size_t after_name = next_significant(text, scanner.pos);
        if (after_name == std::string_view::npos || text[after_name] != '(') continue;
        std::size_t params_end = match_group(text, after_name, '(', ')');
        if (params_end == std::string_view::npos) continue;

        std::size_t cursor = params_end;
        bool in_initializer = false;
        std::size_t body_open = std::string_view::npos;
        for (;;) {
            std::size_t sig = next_significant(text, cursor);
            if (sig == std::string_view::npos) break;
            char ch = text[sig];
            if (ch == '{') {
                if (in_initializer) {  // brace initializer inside a ctor init-list
                    cursor = match_group(text, sig, '{', '}');
                    if (cursor == std::string_view::npos) break;
                    in_initializer = false;
                    continue;
                }
                body_open = sig;
                break;
            }
            if (ch == ';' || ch == '=' || ch == ')' || ch == '}') break;  // declaration or usage
            if (ch == ':') {
                in_initializer = true;
                cursor = sig + 1;
                continue;
            }
            if (ch == ',') {
                in_initializer = true;
                cursor = sig + 1;
                continue;
            }
            if (ch == '(') {  // init-list entry like a_(1)
                cursor = match_group(text, sig, '(', ')');
                if (cursor == std::string_view::npos) break;
                in_initializer = false;
                continue;
            }
            if (ident_start(ch)) {  // const, noexcept, override, member name...
                Scanner word{text, sig};
                std::size_t ws = 0;
                word.next(ws);
                cursor = word.pos;
                continue;
            }
            break;
        }
        if (body_open == std::string_view::npos) continue;

        std::size_t body_end = match_group(text, body_open, '{', '}');
        if (body_end == std::string_view::npos) continue;

        // signature from the last declaration boundary, trimmed
        std::size_t sig_start = boundary;
        while (sig_start < start &&
               (std::isspace(static_cast<unsigned char>(text[sig_start])) != 0)) {
            ++sig_start;
        }
        SourceFunction fn;
        fn.name = std::string(name);
        fn.file = file;
        fn.body_text = std::string(text.substr(sig_start, body_end - sig_start));
        found.push_back(std::move(fn));

        scanner.pos = body_end;
        boundary = body_end;
    }
    return found;
}

ExtractionResult extract_function_bodies(const std::filesystem::path& source_root,
                                         const std::vector<std::string>& wanted) {
    std::vector<std::filesystem::path> files;
    if (std::filesystem::exists(source_root)) {
        for (const auto& entry : std::filesystem::recursive_directory_iterator(source_root)) {
            if (!entry.is_regular_file()) continue;
            auto ext = entry.path().extension().string();
            if (ext == ".c" || ext == ".cpp" || ext == ".h" || ext == ".hpp") {
                files.push_back(entry.path());
            }
        }
    }
    std::sort(files.begin(), files.end());

    ExtractionResult result;
    std::unordered_set<std::string> remaining(wanted.begin(), wanted.end());
    for (const auto& file : files) {
        if (remaining.empty()) break;
        std::ifstream in(file, std::ios::binary);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        std::string text = std::move(buffer).str();

        std::vector<std::string> still_wanted(remaining.begin(), remaining.end());
        std::sort(still_wanted.begin(), still_wanted.end());
        for (auto& fn : extract_from_text(text, file, still_wanted)) {
            if (remaining.erase(fn.name) > 0) {
                result.functions.push_back(std::move(fn));
            }
        }
    }
    std::vector<std::string> missing(remaining.begin(), remaining.end());
    std::sort(missing.begin(), missing.end());
    result.not_found = std::move(missing);
    std::sort(result.functions.begin(), result.functions.end(),
              [](const SourceFunction& a, const SourceFunction& b) { return a.name < b.name; });
    return result;
}

}  // namespace fwmod
