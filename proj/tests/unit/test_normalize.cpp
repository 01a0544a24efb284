#include <doctest.h>

#include "fwmod/normalize.hpp"
#include "support/helpers.hpp"

using namespace fwmod;
using fwmod::test::TempDir;

TEST_SUITE("source_normalizer") {

TEST_CASE("strip removes line comments, keeps the newline") {
    CHECK(strip_comments("x = 1; // set\ny = 2;") == "x = 1; \ny = 2;");
}

TEST_CASE("strip replaces block comments with one space") {
    CHECK(strip_comments("a/*x*/b") == "a b");
    CHECK(strip_comments("a /* multi\nline */ b") == "a   b");
}

TEST_CASE("strip leaves literals alone") {
    CHECK(strip_comments("s = \"// not a comment\";") == "s = \"// not a comment\";");
    CHECK(strip_comments("c = '/'; d = '*';") == "c = '/'; d = '*';");
    CHECK(strip_comments("s = \"/* nope */\";") == "s = \"/* nope */\";");
}

TEST_CASE("strip handles escapes inside strings") {
    CHECK(strip_comments(R"(s = "a\"b // c";)") == R"(s = "a\"b // c";)");
}

TEST_CASE("unterminated block comment raises") {
    CHECK_ERRC(strip_comments("/* open"), errc::unterminated_comment);
}

TEST_CASE("the add example anonymizes exactly as specified") {
    SourceFunction fn{"add", {}, "int add(int a,int b){return a+b;}"};
    auto out = anonymize_identifiers(fn);
    CHECK(out.normalized_text == "int FUNC_0(int ID_0,int ID_1){return ID_0+ID_1;}");
    CHECK(out.rename_map.at("add") == "FUNC_0");
    CHECK(out.rename_map.at("a") == "ID_0");
    CHECK(out.rename_map.at("b") == "ID_1");
}

TEST_CASE("repeated identifiers rename consistently") {
    SourceFunction fn{"f", {}, "int f(int a){return a+a;}"};
    auto out = anonymize_identifiers(fn);
    CHECK(out.normalized_text == "int FUNC_0(int ID_0){return ID_0+ID_0;}");
}

TEST_CASE("keyword-only bodies are untouched") {
    SourceFunction fn{"f", {}, "return 0;"};
    auto out = anonymize_identifiers(fn);
    CHECK(out.normalized_text == "return 0;");
    CHECK(out.rename_map.empty());
}

TEST_CASE("reserved identifiers survive") {
    SourceFunction fn{"f", {}, "uint32_t f(size_t n){ if (n == NULL) return sizeof(int); }"};
    auto out = anonymize_identifiers(fn);
    CHECK(out.normalized_text.find("uint32_t") != std::string::npos);
    CHECK(out.normalized_text.find("size_t") != std::string::npos);
    CHECK(out.normalized_text.find("NULL") != std::string::npos);
    CHECK(out.normalized_text.find("sizeof") != std::string::npos);
}

TEST_CASE("literals and numbers are untouched") {
    SourceFunction fn{"f", {}, "int f(){ return x * 0x1F + \"text\"[0] + 1.5e-3f; }"};
    auto out = anonymize_identifiers(fn);
    CHECK(out.normalized_text.find("0x1F") != std::string::npos);
    CHECK(out.normalized_text.find("\"text\"") != std::string::npos);
    CHECK(out.normalized_text.find("1.5e-3f") != std::string::npos);
    CHECK(out.normalized_text.find(" x ") == std::string::npos);
}

TEST_CASE("preprocessor lines keep directives, anonymize the rest") {
    SourceFunction fn{"f", {}, "#define LIMIT 10\nint f(){return LIMIT;}"};
    auto out = anonymize_identifiers(fn);
    CHECK(out.normalized_text.find("#define") != std::string::npos);
    CHECK(out.normalized_text.find("LIMIT") == std::string::npos);
    // the macro name and its use rename to the same fresh identifier
    CHECK(out.normalized_text.find("#define ID_0 10") != std::string::npos);
    CHECK(out.normalized_text.find("return ID_0;") != std::string::npos);
}

TEST_CASE("normalization is idempotent") {
    std::vector<std::string> bodies = {
        "int add(int a,int b){return a+b;}",
        "static uint32_t mix(uint32_t seed){ uint32_t h = seed * 31u; return h ^ (h >> 7); }",
        "void log_msg(const char *fmt){ printf(fmt, \"}\" ); }",
    };
    std::vector<std::string> names = {"add", "mix", "log_msg"};
    for (std::size_t i = 0; i < bodies.size(); ++i) {
        auto first = anonymize_identifiers({names[i], {}, strip_comments(bodies[i])});
        auto second = anonymize_identifiers(
            {first.rename_map.count(names[i]) ? first.rename_map.at(names[i]) : names[i],
             {},
             strip_comments(first.normalized_text)});
        CHECK(second.normalized_text == first.normalized_text);
    }
}

TEST_CASE("token count is preserved by normalization") {
    std::string body = "int f(int a){ return a + g(a, 0x10) * \"s\"[0]; }";
    auto stripped = strip_comments(body);
    auto out = anonymize_identifiers({"f", {}, stripped});
    CHECK(lex_tokens(out.normalized_text).size() == lex_tokens(stripped).size());
}

TEST_CASE("no original identifier leaks into the output") {
    SourceFunction fn{"update_state",
                      {},
                      "void update_state(struct state *s, int delta){"
                      " s->value += delta; apply_hooks(s); }"};
    auto out = anonymize_identifiers(fn);
    for (const auto& [original, fresh] : out.rename_map) {
        for (const auto& token : lex_tokens(out.normalized_text)) {
            CHECK(token != original);
        }
    }
}

TEST_CASE("extraction finds a plain definition") {
    TempDir dir;
    dir.write("a.c", "int add(int a,int b){return a+b;}\n");
    auto result = extract_function_bodies(dir.path, {"add"});
    REQUIRE(result.functions.size() == 1);
    CHECK(result.functions[0].name == "add");
    CHECK(result.functions[0].body_text == "int add(int a,int b){return a+b;}");
    CHECK(result.not_found.empty());
}

TEST_CASE("call sites are not definitions") {
    TempDir dir;
    dir.write("a.c", "int main(){ return add(1, 2); }\n");
    auto result = extract_function_bodies(dir.path, {"add"});
    CHECK(result.functions.empty());
    REQUIRE(result.not_found.size() == 1);
    CHECK(result.not_found[0] == "add");
}

TEST_CASE("declarations are not definitions") {
    TempDir dir;
    dir.write("a.h", "int add(int a, int b);\n");
    dir.write("a.c", "#include \"a.h\"\nint add(int a, int b) { return a + b; }\n");
    auto result = extract_function_bodies(dir.path, {"add"});
    REQUIRE(result.functions.size() == 1);
    CHECK(result.functions[0].body_text.find("return a + b") != std::string::npos);
}

TEST_CASE("string literal braces do not break matching") {
    TempDir dir;
    dir.write("a.c", "const char *brace(void){ return \"}\"; }\n");
    auto result = extract_function_bodies(dir.path, {"brace"});
    REQUIRE(result.functions.size() == 1);
    const auto& body = result.functions[0].body_text;
    CHECK(body.back() == '}');
    CHECK(body.find("\"}\"") != std::string::npos);
}

TEST_CASE("extraction handles methods and constructors") {
    TempDir dir;
    dir.write("a.cpp",
              "Widget::Widget(int size) : size_(size), buf_{0} { init(); }\n"
              "int Widget::area() const noexcept { return size_ * size_; }\n");
    auto result = extract_function_bodies(dir.path, {"Widget", "area"});
    REQUIRE(result.functions.size() == 2);
    CHECK(result.functions[0].name == "Widget");
    CHECK(result.functions[0].body_text.find("init()") != std::string::npos);
    CHECK(result.functions[1].name == "area");
    CHECK(result.functions[1].body_text.find("noexcept") != std::string::npos);
}

TEST_CASE("extraction skips comments that mention the wanted name") {
    TempDir dir;
    dir.write("a.c", "/* add() is defined below */\nint add(int a,int b){return a+b;}\n");
    auto result = extract_function_bodies(dir.path, {"add"});
    REQUIRE(result.functions.size() == 1);
    auto stripped = strip_comments(result.functions[0].body_text);
    CHECK(stripped.find("/*") == std::string::npos);
}

}  // TEST_SUITE
