#include "fwmod/errors.hpp"

namespace fwmod {

const char* errc_name(errc code) {
    switch (code) {
        case errc::not_elf: return "NotElf";
        case errc::unsupported_machine: return "UnsupportedMachine";
        case errc::truncated_file: return "TruncatedFile";
        case errc::overlapping_sections: return "OverlappingSections";
        case errc::no_symbol_information: return "NoSymbolInformation";
        case errc::no_executable_section: return "NoExecutableSection";
        case errc::node_set_mismatch: return "NodeSetMismatch";
        case errc::invalid_weights: return "InvalidWeights";
        case errc::incomplete_partition: return "IncompletePartition";
        case errc::too_large: return "TooLarge";
        case errc::duplicate_entry: return "DuplicateEntry";
        case errc::missing_file: return "MissingFile";
        case errc::bad_hex: return "BadHex";
        case errc::unknown_category: return "UnknownCategory";
        case errc::empty_category_set: return "EmptyCategorySet";
        case errc::malformed_json: return "MalformedJson";
        case errc::bad_threshold: return "BadThreshold";
        case errc::endpoint_unreachable: return "EndpointUnreachable";
        case errc::http_error: return "HttpError";
        case errc::malformed_response: return "MalformedResponse";
        case errc::retries_exhausted: return "RetriesExhausted";
        case errc::empty_text: return "EmptyText";
        case errc::missing_definition: return "MissingDefinition";
        case errc::no_summaries: return "NoSummaries";
        case errc::unparseable_ranking: return "UnparseableRanking";
        case errc::bad_k: return "BadK";
        case errc::unterminated_comment: return "UnterminatedComment";
        case errc::uncovered_function: return "UncoveredFunction";
        case errc::empty_ground_truth: return "EmptyGroundTruth";
        case errc::missing_ground_truth: return "MissingGroundTruth";
        case errc::zero_vector: return "ZeroVector";
        case errc::dimension_mismatch: return "DimensionMismatch";
        case errc::config: return "Config";
        case errc::missing_artifact: return "MissingArtifact";
        case errc::artifact_mismatch: return "ArtifactMismatch";
        case errc::locked: return "Locked";
        case errc::internal: return "Internal";
    }
    return "Unknown";
}

Error::Error(errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

int Error::exit_code() const noexcept {
    switch (code_) {
        // config / usage / bad input
        case errc::config:
        case errc::locked:
        case errc::bad_threshold:
        case errc::bad_k:
        case errc::invalid_weights:
        case errc::duplicate_entry:
        case errc::missing_file:
        case errc::bad_hex:
        case errc::unknown_category:
        case errc::empty_category_set:
        case errc::malformed_json:
        case errc::not_elf:
        case errc::unsupported_machine:
        case errc::truncated_file:
        case errc::overlapping_sections:
            return 2;
        // missing or stale pipeline artifact
        case errc::missing_artifact:
        case errc::artifact_mismatch:
        case errc::missing_ground_truth:
            return 3;
        // endpoint failures
        case errc::endpoint_unreachable:
        case errc::http_error:
        case errc::malformed_response:
        case errc::retries_exhausted:
            return 4;
        default:
            return 1;
    }
}

void raise(errc code, const std::string& message) { throw Error(code, message); }

}  // namespace fwmod
