#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace fwmod {

// On-disk layout for pipeline artifacts:
//   <root>/{graphs,partitions,summaries,rankings,reports,cache,normalized}/
// Artifacts are JSON envelopes {meta:{stage,digest,upstream}, payload:...};
// the digest covers the payload only, so identical inputs rewrite identical
// bytes.
class ProjectStore {
public:
    explicit ProjectStore(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path graphs_dir() const { return root_ / "graphs"; }
    std::filesystem::path partitions_dir() const { return root_ / "partitions"; }
    std::filesystem::path summaries_dir() const { return root_ / "summaries"; }
    std::filesystem::path rankings_dir() const { return root_ / "rankings"; }
    std::filesystem::path reports_dir() const { return root_ / "reports"; }
    std::filesystem::path cache_dir() const { return root_ / "cache"; }
    std::filesystem::path normalized_dir() const { return root_ / "normalized"; }

    void write_text(const std::filesystem::path& path, std::string_view text) const;

    // Canonical serialization (sorted keys, 2-space indent, trailing newline).
    void write_json(const std::filesystem::path& path, const nlohmann::json& value) const;

    // Throws missing_artifact when absent, malformed_json when unparseable.
    nlohmann::json read_json(const std::filesystem::path& path) const;
    bool exists(const std::filesystem::path& path) const;

    static std::string digest_of(const nlohmann::json& payload);

    // stage/upstream envelope helpers
    void write_artifact(const std::filesystem::path& path, const std::string& stage,
                        const std::string& upstream_digest, const nlohmann::json& payload) const;

    struct Artifact {
        nlohmann::json payload;
        std::string stage;
        std::string digest;
        std::string upstream_digest;
    };
    // Verifies the stage name and, when expected_upstream is non-empty, the
    // recorded upstream digest (throws artifact_mismatch on staleness).
    Artifact read_artifact(const std::filesystem::path& path, const std::string& stage,
                           const std::string& expected_upstream = {}) const;

private:
    std::filesystem::path root_;
};

// Exclusive per-store lock; throws locked when another command holds it.
class StoreLock {
public:
    explicit StoreLock(const std::filesystem::path& store_root);
    ~StoreLock();
    StoreLock(const StoreLock&) = delete;
    StoreLock& operator=(const StoreLock&) = delete;

private:
    std::filesystem::path lock_path_;
};

}  // namespace fwmod
