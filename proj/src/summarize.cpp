#include "fwmod/summarize.hpp"

#include <algorithm>
#include <cstdio>
#include <future>

#include <nlohmann/json.hpp>

#include "fwmod/errors.hpp"

namespace fwmod {

namespace {

const char* kSystemContext =
    "You are a reverse engineer examining decompiled pseudo-C from a stripped embedded "
    "firmware binary. Identifier names are synthetic and carry no meaning; reason from the "
    "code structure, constants and call patterns.";

}  // namespace

ChatRequest build_summarization_prompt(const DecompiledFunction& func, const std::string& model,
                                       const SummarizeOptions& options) {
    std::string text = func.text;
    if (options.char_budget > 0 && text.size() > static_cast<std::size_t>(options.char_budget)) {
        text.resize(static_cast<std::size_t>(options.char_budget));
        text += "\n";
        text += kTruncationMarker;
    }

    ChatRequest request;
    request.model = model;
    request.temperature = 0.0;
    request.max_tokens = options.max_tokens;
    request.messages.push_back({"system", kSystemContext});
    request.messages.push_back(
        {"user",
         "Summarize the purpose of the following decompiled function in 2-4 sentences of plain "
         "prose. Do not include code.\n\n" +
             text});
    return request;
}

std::vector<FunctionSummary> summarize_module(std::uint32_t module_id,
                                              const std::vector<DecompiledFunction>& functions,
                                              LlmGateway& gateway, const SummarizeOptions& options,
                                              TimingAggregator* timing) {
    std::vector<FunctionSummary> out(functions.size());

    auto run_one = [&](std::size_t i) {
        const auto& func = functions[i];
        FunctionSummary summary;
        summary.entry = func.entry;
        summary.module = module_id;
        summary.model = gateway.config().chat_model;
        summary.truncated = options.char_budget > 0 &&
                            func.text.size() > static_cast<std::size_t>(options.char_budget);
        try {
            auto request = build_summarization_prompt(func, gateway.config().chat_model, options);
            auto response = gateway.chat(request);
            summary.summary_text = response.text;
            summary.inference_seconds = response.inference_seconds;
            if (timing) timing->record("summarize", response.latency_seconds, response.from_cache);
        } catch (const Error& e) {
            summary.error = e.what();
        }
        out[i] = std::move(summary);
    };

    // Fan out; the gateway bounds actual in-flight requests.
    std::vector<std::future<void>> workers;
    workers.reserve(functions.size());
    for (std::size_t i = 0; i < functions.size(); ++i) {
        workers.push_back(std::async(std::launch::async, run_one, i));
    }
    for (auto& w : workers) w.get();

    std::sort(out.begin(), out.end(),
              [](const FunctionSummary& a, const FunctionSummary& b) { return a.entry < b.entry; });
    return out;
}

nlohmann::json FunctionSummary::to_json() const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "0x%08llx", static_cast<unsigned long long>(entry));
    return {{"entry", buf},
            {"module", module},
            {"summary_text", summary_text},
            {"model", model},
            {"truncated", truncated},
            {"inference_seconds", inference_seconds},
            {"error", error}};
}

FunctionSummary FunctionSummary::from_json(const nlohmann::json& j) {
    FunctionSummary s;
    s.entry = std::stoull(j.at("entry").get<std::string>(), nullptr, 16);
    s.module = j.at("module").get<std::uint32_t>();
    s.summary_text = j.at("summary_text").get<std::string>();
    s.model = j.at("model").get<std::string>();
    s.truncated = j.at("truncated").get<bool>();
    s.inference_seconds = j.at("inference_seconds").get<double>();
    s.error = j.at("error").get<std::string>();
    return s;
}

}  // namespace fwmod
