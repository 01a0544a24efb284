#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fwmod/corpus.hpp"
#include "fwmod/llm.hpp"

namespace fwmod {

struct FunctionSummary {
    std::uint64_t entry = 0;
    std::uint32_t module = 0;
    std::string summary_text;  // non-empty on success
    std::string model;
    bool truncated = false;
    double inference_seconds = 0.0;
    std::string error;  // empty on success

    bool ok() const { return error.empty(); }

    nlohmann::json to_json() const;
    static FunctionSummary from_json(const nlohmann::json& j);
};

struct SummarizeOptions {
    int char_budget = 12000;  // function text truncated beyond this
    int max_tokens = 256;
};

inline constexpr const char* kTruncationMarker = "[function text truncated]";

// Two messages: a system message setting the stripped-firmware context and a
// user message with the instruction plus the function text verbatim.
// Deterministic for a given function.
ChatRequest build_summarization_prompt(const DecompiledFunction& func, const std::string& model,
                                       const SummarizeOptions& options = {});

// One summary per function, ordered by entry address. Hard failures become
// error placeholders; the module still proceeds.
std::vector<FunctionSummary> summarize_module(std::uint32_t module_id,
                                              const std::vector<DecompiledFunction>& functions,
                                              LlmGateway& gateway,
                                              const SummarizeOptions& options = {},
                                              TimingAggregator* timing = nullptr);

}  // namespace fwmod
