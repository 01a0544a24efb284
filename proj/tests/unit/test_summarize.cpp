#include <doctest.h>

#include <nlohmann/json.hpp>

#include "fwmod/categorize.hpp"
#include "fwmod/summarize.hpp"
#include "support/helpers.hpp"
#include "support/mock_llm.hpp"

using namespace fwmod;
using fwmod::test::MockLlmServer;
using fwmod::test::TempDir;

namespace {

DecompiledFunction func_at(std::uint64_t entry, const std::string& text) {
    return {entry, text, count_nonblank_lines(text)};
}

GatewayConfig config_for(const MockLlmServer& server, const std::filesystem::path& cache = {}) {
    GatewayConfig cfg;
    cfg.base_url = server.base_url();
    cfg.chat_model = "mock-model";
    cfg.embedding_model = "mock-embed";
    cfg.max_retries = 1;
    cfg.backoff_ms = 1;
    cfg.cache_dir = cache;
    return cfg;
}

}  // namespace

TEST_SUITE("summarizer") {

TEST_CASE("prompt has two messages with the function text verbatim") {
    auto func = func_at(0x8000, "void f(void) {\n  g();\n}\n");
    auto request = build_summarization_prompt(func, "m");
    REQUIRE(request.messages.size() == 2);
    CHECK(request.messages[0].role == "system");
    CHECK(request.messages[1].role == "user");
    CHECK(request.messages[1].content.find(func.text) != std::string::npos);
    CHECK(request.temperature == 0.0);
}

TEST_CASE("prompt construction is deterministic") {
    auto func = func_at(0x8000, "int f() { return 1; }");
    CHECK(build_summarization_prompt(func, "m").body().dump() ==
          build_summarization_prompt(func, "m").body().dump());
}

TEST_CASE("oversized functions are truncated with a marker line") {
    SummarizeOptions options;
    options.char_budget = 32;
    auto func = func_at(0x8000, std::string(500, 'x'));
    auto request = build_summarization_prompt(func, "m", options);
    const std::string& content = request.messages[1].content;
    CHECK(content.size() < 500);
    CHECK(content.substr(content.size() - std::string(kTruncationMarker).size()) ==
          kTruncationMarker);
}

TEST_CASE("summarize_module yields one summary per function, address order") {
    MockLlmServer server;
    LlmGateway gateway(config_for(server));
    std::vector<DecompiledFunction> funcs = {
        func_at(0x9000, "void c() { three(); }"),
        func_at(0x8000, "void a() { one(); }"),
        func_at(0x8800, "void b() { two(); }"),
    };
    auto summaries = summarize_module(3, funcs, gateway);
    REQUIRE(summaries.size() == 3);
    CHECK(summaries[0].entry == 0x8000);
    CHECK(summaries[1].entry == 0x8800);
    CHECK(summaries[2].entry == 0x9000);
    for (const auto& s : summaries) {
        CHECK(s.ok());
        CHECK(s.module == 3);
        CHECK_FALSE(s.summary_text.empty());
    }
}

TEST_CASE("a hard failure becomes a placeholder and the module proceeds") {
    MockLlmServer server;
    server.fail_next(2, 404);  // 404 is not retried: first request fails hard
    LlmGateway gateway(config_for(server));
    std::vector<DecompiledFunction> funcs = {
        func_at(0x8000, "void a() {}"),
        func_at(0x8800, "void b() {}"),
        func_at(0x9000, "void c() {}"),
    };
    auto summaries = summarize_module(1, funcs, gateway);
    REQUIRE(summaries.size() == 3);
    int failures = 0;
    for (const auto& s : summaries) {
        if (!s.ok()) {
            ++failures;
            CHECK(s.summary_text.empty());
        }
    }
    CHECK(failures == 2);
}

TEST_CASE("warm cache reruns issue zero network requests") {
    MockLlmServer server;
    TempDir cache;
    std::vector<DecompiledFunction> funcs = {func_at(0x8000, "void a() { x(); }"),
                                             func_at(0x8800, "void b() { y(); }")};
    LlmGateway gateway(config_for(server, cache.path));
    auto first = summarize_module(0, funcs, gateway);
    const int hits_after_first = server.chat_hits();
    auto second = summarize_module(0, funcs, gateway);
    CHECK(server.chat_hits() == hits_after_first);
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].summary_text == second[i].summary_text);
    }
}

TEST_CASE("categorize_module parses the mock ranking") {
    MockLlmServer server;
    LlmGateway gateway(config_for(server));
    std::vector<FunctionSummary> summaries(1);
    summaries[0].entry = 0x8000;
    summaries[0].summary_text = "Adjusts motor output based on attitude error.";
    summaries[0].model = "mock-model";

    auto result = categorize_module(4, summaries, default_category_definitions(), gateway);
    REQUIRE(result.ranking.has_value());
    CHECK(result.ranking->module == 4);
    CHECK(result.ranking->ordered[0] == Category::controller);
    CHECK_FALSE(result.skipped_no_summaries);
}

TEST_CASE("categorize_module retries once on an unparseable answer") {
    MockLlmServer server;
    int calls = 0;
    server.set_responder([&calls](const nlohmann::json&) -> std::string {
        ++calls;
        if (calls == 1) return "hmm, hard to say";
        return "navigation, controller, data transfer, safety check, other";
    });
    LlmGateway gateway(config_for(server));
    std::vector<FunctionSummary> summaries(1);
    summaries[0].summary_text = "Reads GPS.";

    auto result = categorize_module(0, summaries, default_category_definitions(), gateway);
    REQUIRE(result.ranking.has_value());
    CHECK(result.ranking->ordered[0] == Category::navigation);
    CHECK(server.chat_hits() == 2);
}

TEST_CASE("modules whose summaries all failed are skipped") {
    MockLlmServer server;
    LlmGateway gateway(config_for(server));
    std::vector<FunctionSummary> summaries(2);
    summaries[0].error = "HttpError: status 500";
    summaries[1].error = "RetriesExhausted: gave up";

    auto result = categorize_module(9, summaries, default_category_definitions(), gateway);
    CHECK(result.skipped_no_summaries);
    CHECK_FALSE(result.ranking.has_value());
    CHECK(server.chat_hits() == 0);
}

TEST_CASE("function summary json round-trips") {
    FunctionSummary s;
    s.entry = 0x08001234;
    s.module = 7;
    s.summary_text = "Does a thing.";
    s.model = "m";
    s.truncated = true;
    s.inference_seconds = 1.25;
    auto back = FunctionSummary::from_json(s.to_json());
    CHECK(back.entry == s.entry);
    CHECK(back.module == s.module);
    CHECK(back.summary_text == s.summary_text);
    CHECK(back.truncated == s.truncated);
    CHECK(back.inference_seconds == s.inference_seconds);
    CHECK(back.ok());
}

}  // TEST_SUITE
