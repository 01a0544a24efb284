#include <doctest.h>

#include <future>

#include <nlohmann/json.hpp>

#include "fwmod/llm.hpp"
#include "support/helpers.hpp"
#include "support/mock_llm.hpp"

using namespace fwmod;
using fwmod::test::MockLlmServer;
using fwmod::test::TempDir;

namespace {

GatewayConfig config_for(const MockLlmServer& server, const std::filesystem::path& cache = {}) {
    GatewayConfig cfg;
    cfg.base_url = server.base_url();
    cfg.chat_model = "mock-model";
    cfg.embedding_model = "mock-embed";
    cfg.max_retries = 2;
    cfg.backoff_ms = 1;
    cfg.concurrency = 4;
    cfg.cache_dir = cache;
    return cfg;
}

ChatRequest simple_request(const std::string& text) {
    ChatRequest req;
    req.model = "mock-model";
    req.messages = {{"system", "test"}, {"user", text}};
    req.max_tokens = 64;
    return req;
}

}  // namespace

TEST_SUITE("llm_gateway") {

TEST_CASE("chat returns the first choice text") {
    MockLlmServer server;
    server.set_responder([](const nlohmann::json&) { return "OK"; });
    LlmGateway gateway(config_for(server));
    auto response = gateway.chat(simple_request("hello"));
    CHECK(response.text == "OK");
    CHECK_FALSE(response.from_cache);
    CHECK(response.latency_seconds >= 0.0);
    CHECK(server.chat_hits() == 1);
}

TEST_CASE("identical requests hit the cache with zero network calls") {
    MockLlmServer server;
    TempDir cache;
    LlmGateway gateway(config_for(server, cache.path));

    auto first = gateway.chat(simple_request("cached?"));
    auto second = gateway.chat(simple_request("cached?"));
    CHECK(server.chat_hits() == 1);
    CHECK_FALSE(first.from_cache);
    CHECK(second.from_cache);
    CHECK(second.text == first.text);
    CHECK(second.inference_seconds == doctest::Approx(first.inference_seconds));
}

TEST_CASE("distinct requests get distinct cache entries") {
    MockLlmServer server;
    TempDir cache;
    LlmGateway gateway(config_for(server, cache.path));
    auto a = gateway.chat(simple_request("alpha"));
    auto b = gateway.chat(simple_request("beta"));
    CHECK(server.chat_hits() == 2);
    CHECK(a.text != b.text);  // digest-stamped mock output

    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(cache.path)) ++files;
    CHECK(files == 2);
}

TEST_CASE("persistent failure exhausts retries") {
    MockLlmServer server;
    server.fail_next(3, 500);  // R=2 means 3 attempts total
    LlmGateway gateway(config_for(server));
    CHECK_ERRC(gateway.chat(simple_request("x")), errc::retries_exhausted);
    CHECK(server.chat_hits() == 3);
}

TEST_CASE("transient failures are retried to success") {
    MockLlmServer server;
    server.fail_next(2, 500);
    server.set_responder([](const nlohmann::json&) { return "recovered"; });
    LlmGateway gateway(config_for(server));
    auto response = gateway.chat(simple_request("x"));
    CHECK(response.text == "recovered");
    CHECK(server.chat_hits() == 3);
}

TEST_CASE("4xx statuses fail immediately") {
    MockLlmServer server;
    server.fail_next(1, 404);
    LlmGateway gateway(config_for(server));
    CHECK_ERRC(gateway.chat(simple_request("x")), errc::http_error);
    CHECK(server.chat_hits() == 1);
}

TEST_CASE("unreachable endpoint reports endpoint_unreachable") {
    GatewayConfig cfg;
    cfg.base_url = "http://127.0.0.1:1";  // nothing listens there
    cfg.chat_model = "m";
    cfg.max_retries = 1;
    cfg.backoff_ms = 1;
    LlmGateway gateway(cfg);
    CHECK_ERRC(gateway.chat(simple_request("x")), errc::endpoint_unreachable);
}

TEST_CASE("embeddings work, cache, and reject empty text") {
    MockLlmServer server;
    TempDir cache;
    LlmGateway gateway(config_for(server, cache.path));

    auto v1 = gateway.embed("some summary");
    auto v2 = gateway.embed("some summary");
    CHECK(v1.values.size() == 8);
    CHECK(v1.values == v2.values);
    CHECK(server.embed_hits() == 1);

    CHECK_ERRC(gateway.embed(""), errc::empty_text);
}

TEST_CASE("embedding vectors are deterministic per text") {
    MockLlmServer server;
    LlmGateway gateway(config_for(server));
    auto a = gateway.embed("alpha");
    auto b = gateway.embed("alpha");
    CHECK(a.values == b.values);
    CHECK(gateway.embed("beta").values != a.values);
}

TEST_CASE("concurrency never exceeds the configured bound") {
    MockLlmServer server;
    auto cfg = config_for(server);
    cfg.concurrency = 2;
    LlmGateway gateway(cfg);

    std::vector<std::future<ChatResponse>> futures;
    for (int i = 0; i < 12; ++i) {
        futures.push_back(std::async(std::launch::async, [&gateway, i] {
            return gateway.chat(simple_request("req " + std::to_string(i)));
        }));
    }
    for (auto& f : futures) f.get();
    CHECK(server.chat_hits() == 12);
    CHECK(server.max_in_flight() <= 2);
}

TEST_CASE("request bodies are canonical: equal requests, equal digests") {
    auto a = simple_request("same").body().dump();
    auto b = simple_request("same").body().dump();
    CHECK(a == b);
    CHECK(sha256_hex(a) == sha256_hex(b));
    CHECK(sha256_hex(a) != sha256_hex(simple_request("different").body().dump()));
}

TEST_CASE("timing aggregation sums per stage") {
    TimingAggregator timing;
    timing.record("summarize", 1.5, false);
    timing.record("summarize", 2.5, false);
    timing.record("categorize", 0.5, true);
    auto totals = timing.totals();
    CHECK(totals.at("summarize").seconds == doctest::Approx(4.0));
    CHECK(totals.at("summarize").requests == 2);
    CHECK(totals.at("summarize").cached == 0);
    CHECK(totals.at("categorize").cached == 1);
}

}  // TEST_SUITE
