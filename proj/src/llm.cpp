#include "fwmod/llm.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "fwmod/errors.hpp"
#include "fwmod/hash.hpp"

namespace fwmod {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Splits "http://host:port/prefix" into origin and path prefix.
std::pair<std::string, std::string> split_base_url(const std::string& base) {
    auto scheme_end = base.find("://");
    std::size_t path_start =
        scheme_end == std::string::npos ? base.find('/') : base.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {base, ""};
    std::string prefix = base.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {base.substr(0, path_start), prefix};
}

bool transient_status(int status) { return status == 429 || (status >= 500 && status < 600); }

// Runtime-bounded semaphore (std::counting_semaphore has a compile-time max).
class Semaphore {
public:
    explicit Semaphore(int count) : count_(count) {}
    void acquire() {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [this] { return count_ > 0; });
        --count_;
    }
    void release() {
        {
            std::lock_guard lock(mutex_);
            ++count_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int count_;
};

struct SemaphoreGuard {
    explicit SemaphoreGuard(Semaphore& s) : sem(s) { sem.acquire(); }
    ~SemaphoreGuard() { sem.release(); }
    Semaphore& sem;
};

}  // namespace

nlohmann::json ChatRequest::body() const {
    nlohmann::json msgs = nlohmann::json::array();
    for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    return {{"model", model},
            {"messages", std::move(msgs)},
            {"temperature", temperature},
            {"max_tokens", max_tokens}};
}

void TimingAggregator::record(const std::string& stage, double seconds, bool cached) {
    std::lock_guard lock(mutex_);
    auto& total = totals_[stage];
    total.seconds += seconds;
    total.requests += 1;
    if (cached) total.cached += 1;
}

std::map<std::string, TimingAggregator::StageTotal> TimingAggregator::totals() const {
    std::lock_guard lock(mutex_);
    return totals_;
}

nlohmann::json TimingAggregator::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [stage, total] : totals()) {
        j[stage] = {{"seconds", total.seconds},
                    {"requests", total.requests},
                    {"cached", total.cached}};
    }
    return j;
}

struct LlmGateway::Impl {
    std::string origin;
    std::string path_prefix;
    Semaphore semaphore;
    std::atomic<std::uint64_t> temp_counter{0};

    explicit Impl(const GatewayConfig& cfg) : semaphore(std::max(1, cfg.concurrency)) {
        std::tie(origin, path_prefix) = split_base_url(cfg.base_url);
    }
};

LlmGateway::LlmGateway(GatewayConfig config)
    : config_(std::move(config)), impl_(std::make_unique<Impl>(config_)) {
    if (!config_.cache_dir.empty()) std::filesystem::create_directories(config_.cache_dir);
}

LlmGateway::~LlmGateway() = default;

namespace {

struct WireResult {
    nlohmann::json body;
    double network_seconds = 0.0;
};

// POST with retry/backoff on transient failures. Throws the endpoint error
// family; on success returns the parsed response body.
WireResult post_json(const GatewayConfig& cfg, LlmGateway::Impl& impl, const std::string& path,
                     const std::string& payload) {
    const std::string full_path = impl.path_prefix + path;
    int attempts = cfg.max_retries + 1;
    bool saw_connection_failure = false;
    int last_status = 0;

    auto start = Clock::now();
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(static_cast<long>(cfg.backoff_ms) << (attempt - 1)));
        }
        httplib::Client client(impl.origin);
        client.set_connection_timeout(std::chrono::seconds(10));
        client.set_read_timeout(std::chrono::seconds(cfg.timeout_seconds));
        httplib::Headers headers;
        if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);

        auto res = client.Post(full_path, headers, payload, "application/json");
        if (!res) {
            saw_connection_failure = true;
            if (cfg.verbose) std::cerr << "llm: connection failure, attempt " << attempt + 1 << "\n";
            continue;
        }
        last_status = res->status;
        if (res->status == 200) {
            try {
                return {nlohmann::json::parse(res->body), elapsed_seconds(start)};
            } catch (const nlohmann::json::exception& e) {
                raise(errc::malformed_response, std::string("response is not JSON: ") + e.what());
            }
        }
        if (!transient_status(res->status)) {
            raise(errc::http_error, "status " + std::to_string(res->status) + " from " + full_path);
        }
        if (cfg.verbose) std::cerr << "llm: status " << res->status << ", attempt " << attempt + 1 << "\n";
    }
    if (saw_connection_failure && last_status == 0) {
        raise(errc::endpoint_unreachable, "cannot reach " + cfg.base_url + full_path);
    }
    raise(errc::retries_exhausted, "gave up after " + std::to_string(attempts) + " attempts (last status " +
                                       std::to_string(last_status) + ")");
}

std::filesystem::path cache_path(const GatewayConfig& cfg, const std::string& digest) {
    return cfg.cache_dir / (digest + ".json");
}

std::optional<nlohmann::json> cache_load(const GatewayConfig& cfg, const std::string& digest) {
    if (cfg.cache_dir.empty()) return std::nullopt;
    std::ifstream in(cache_path(cfg, digest), std::ios::binary);
    if (!in) return std::nullopt;
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;  // corrupt cache entry: refetch
    }
}

void cache_store(const GatewayConfig& cfg, LlmGateway::Impl& impl, const std::string& digest,
                 const nlohmann::json& entry) {
    if (cfg.cache_dir.empty()) return;
    auto final_path = cache_path(cfg, digest);
    auto tmp = final_path;
    tmp += ".tmp" + std::to_string(impl.temp_counter.fetch_add(1));
    {
        std::ofstream out(tmp, std::ios::binary);
        out << entry.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, final_path);
}

}  // namespace

ChatResponse LlmGateway::chat(const ChatRequest& request) {
    if (request.messages.empty()) raise(errc::internal, "chat request without messages");
    const std::string payload = request.body().dump();
    const std::string digest = sha256_hex("chat\n" + request.model + "\n" + payload);

    auto start = Clock::now();
    if (auto cached = cache_load(config_, digest)) {
        ChatResponse out;
        out.text = cached->at("text").get<std::string>();
        out.model = cached->value("model", request.model);
        out.inference_seconds = cached->value("latency_seconds", 0.0);
        out.latency_seconds = elapsed_seconds(start);
        out.from_cache = true;
        if (config_.verbose) std::cerr << "llm: chat cache hit " << digest.substr(0, 8) << "\n";
        return out;
    }

    WireResult wire;
    {
        SemaphoreGuard guard(impl_->semaphore);
        wire = post_json(config_, *impl_, "/chat/completions", payload);
    }

    ChatResponse out;
    try {
        out.text = wire.body.at("choices").at(0).at("message").at("content").get<std::string>();
        out.model = wire.body.value("model", request.model);
    } catch (const nlohmann::json::exception& e) {
        raise(errc::malformed_response, std::string("chat response shape: ") + e.what());
    }
    out.latency_seconds = elapsed_seconds(start);
    out.inference_seconds = wire.network_seconds;
    out.from_cache = false;

    cache_store(config_, *impl_, digest,
                {{"text", out.text}, {"model", out.model}, {"latency_seconds", out.inference_seconds}});
    return out;
}

EmbeddingVector LlmGateway::embed(const std::string& text) {
    if (text.empty()) raise(errc::empty_text, "cannot embed an empty string");
    nlohmann::json body = {{"model", config_.embedding_model}, {"input", text}};
    const std::string payload = body.dump();
    const std::string digest = sha256_hex("embed\n" + config_.embedding_model + "\n" + payload);

    if (auto cached = cache_load(config_, digest)) {
        EmbeddingVector out;
        out.model = cached->value("model", config_.embedding_model);
        out.values = cached->at("values").get<std::vector<double>>();
        return out;
    }

    WireResult wire;
    {
        SemaphoreGuard guard(impl_->semaphore);
        wire = post_json(config_, *impl_, "/embeddings", payload);
    }

    EmbeddingVector out;
    try {
        out.values = wire.body.at("data").at(0).at("embedding").get<std::vector<double>>();
        out.model = wire.body.value("model", config_.embedding_model);
    } catch (const nlohmann::json::exception& e) {
        raise(errc::malformed_response, std::string("embedding response shape: ") + e.what());
    }
    if (out.values.empty()) raise(errc::malformed_response, "embedding vector is empty");

    cache_store(config_, *impl_, digest,
                {{"values", out.values}, {"model", out.model}, {"latency_seconds", wire.network_seconds}});
    return out;
}

}  // namespace fwmod
