#pragma once

#include <stdexcept>
#include <string>

namespace fwmod {

// One code per failure family named in the module contracts. The CLI maps
// codes to process exit codes; tests match on the code, not the message.
enum class errc {
    // binary model
    not_elf,
    unsupported_machine,
    truncated_file,
    overlapping_sections,
    no_symbol_information,
    // arm analysis
    no_executable_section,
    // graph builder
    node_set_mismatch,
    invalid_weights,
    // community detection
    incomplete_partition,
    too_large,
    // corpus ingest
    duplicate_entry,
    missing_file,
    bad_hex,
    unknown_category,
    empty_category_set,
    malformed_json,
    bad_threshold,
    // llm gateway
    endpoint_unreachable,
    http_error,
    malformed_response,
    retries_exhausted,
    empty_text,
    // summarizer / categorizer
    missing_definition,
    no_summaries,
    unparseable_ranking,
    bad_k,
    // source normalizer
    unterminated_comment,
    // evaluation
    uncovered_function,
    empty_ground_truth,
    missing_ground_truth,
    zero_vector,
    dimension_mismatch,
    // cli / project store
    config,
    missing_artifact,
    artifact_mismatch,
    locked,
    internal,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message);

    errc code() const noexcept { return code_; }

    // Exit-code families: 0 success, 1 internal, 2 config/usage,
    // 3 missing artifact, 4 endpoint failure.
    int exit_code() const noexcept;

private:
    errc code_;
};

[[noreturn]] void raise(errc code, const std::string& message);

}  // namespace fwmod
