#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace fwmod {

struct ChatMessage {
    std::string role;  // system | user | assistant
    std::string content;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    int max_tokens = 512;

    // Canonical wire body; equal requests serialize identically.
    nlohmann::json body() const;
};

struct ChatResponse {
    std::string text;
    std::string model;
    double latency_seconds = 0.0;    // this call (cache lookup when cached)
    double inference_seconds = 0.0;  // original network cost, replayed on cache hits
    bool from_cache = false;
};

struct EmbeddingVector {
    std::vector<double> values;
    std::string model;
};

struct GatewayConfig {
    std::string base_url;  // e.g. http://127.0.0.1:8000 or https://host/v1
    std::string api_key;   // sent as a bearer token when non-empty
    std::string chat_model;
    std::string embedding_model;
    int max_retries = 2;      // retries after the first attempt
    int backoff_ms = 200;     // doubled per retry
    int concurrency = 4;      // in-flight request bound
    int timeout_seconds = 300;
    std::filesystem::path cache_dir;  // empty disables caching
    bool verbose = false;
};

// Per-stage wall-clock accounting for pipeline reports. Thread-safe.
class TimingAggregator {
public:
    struct StageTotal {
        double seconds = 0.0;
        std::size_t requests = 0;
        std::size_t cached = 0;
    };

    void record(const std::string& stage, double seconds, bool cached);
    std::map<std::string, StageTotal> totals() const;
    nlohmann::json to_json() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, StageTotal> totals_;
};

// Chat-completion and embedding access over an HTTP endpoint speaking the
// common JSON schema (POST <base>/chat/completions, POST <base>/embeddings),
// with persistent response caching and bounded concurrency.
class LlmGateway {
public:
    explicit LlmGateway(GatewayConfig config);
    ~LlmGateway();

    LlmGateway(const LlmGateway&) = delete;
    LlmGateway& operator=(const LlmGateway&) = delete;

    ChatResponse chat(const ChatRequest& request);
    EmbeddingVector embed(const std::string& text);

    const GatewayConfig& config() const { return config_; }

    struct Impl;

private:
    GatewayConfig config_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace fwmod
