#include "fwmod/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <fstream>

#include <nlohmann/json.hpp>

#include "fwmod/errors.hpp"
#include "fwmod/hash.hpp"

namespace fwmod {

namespace {
std::atomic<std::uint64_t> g_temp_counter{0};
}

ProjectStore::ProjectStore(std::filesystem::path root) : root_(std::move(root)) {
    for (const auto& dir : {graphs_dir(), partitions_dir(), summaries_dir(), rankings_dir(),
                            reports_dir(), cache_dir(), normalized_dir()}) {
        std::filesystem::create_directories(dir);
    }
}

void ProjectStore::write_text(const std::filesystem::path& path, std::string_view text) const {
    std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp" + std::to_string(g_temp_counter.fetch_add(1));
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) raise(errc::internal, "cannot write " + tmp.string());
        out << text;
    }
    std::filesystem::rename(tmp, path);
}

void ProjectStore::write_json(const std::filesystem::path& path,
                              const nlohmann::json& value) const {
    write_text(path, value.dump(2) + "\n");
}

nlohmann::json ProjectStore::read_json(const std::filesystem::path& path) const {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(errc::missing_artifact, path.string() + " does not exist; run the earlier stage");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        raise(errc::malformed_json, path.string() + ": " + e.what());
    }
}

bool ProjectStore::exists(const std::filesystem::path& path) const {
    return std::filesystem::exists(path);
}

std::string ProjectStore::digest_of(const nlohmann::json& payload) {
    return sha256_hex(payload.dump());
}

void ProjectStore::write_artifact(const std::filesystem::path& path, const std::string& stage,
                                  const std::string& upstream_digest,
                                  const nlohmann::json& payload) const {
    nlohmann::json envelope = {
        {"meta",
         {{"stage", stage}, {"digest", digest_of(payload)}, {"upstream", upstream_digest}}},
        {"payload", payload}};
    write_json(path, envelope);
}

ProjectStore::Artifact ProjectStore::read_artifact(const std::filesystem::path& path,
                                                   const std::string& stage,
                                                   const std::string& expected_upstream) const {
    nlohmann::json envelope = read_json(path);
    Artifact artifact;
    try {
        artifact.stage = envelope.at("meta").at("stage").get<std::string>();
        artifact.digest = envelope.at("meta").at("digest").get<std::string>();
        artifact.upstream_digest = envelope.at("meta").at("upstream").get<std::string>();
        artifact.payload = envelope.at("payload");
    } catch (const nlohmann::json::exception& e) {
        raise(errc::malformed_json, path.string() + ": " + e.what());
    }
    if (artifact.stage != stage) {
        raise(errc::artifact_mismatch,
              path.string() + " holds stage " + artifact.stage + ", expected " + stage);
    }
    if (!expected_upstream.empty() && artifact.upstream_digest != expected_upstream) {
        raise(errc::artifact_mismatch,
              path.string() + " was produced from different upstream inputs; re-run that stage");
    }
    return artifact;
}

StoreLock::StoreLock(const std::filesystem::path& store_root) {
    std::filesystem::create_directories(store_root);
    lock_path_ = store_root / ".lock";
    int fd = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        raise(errc::locked, "another command holds " + lock_path_.string() +
                                " (remove it if that process is gone)");
    }
    auto pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto written = ::write(fd, pid.data(), pid.size());
    ::close(fd);
}

StoreLock::~StoreLock() {
    std::error_code ec;
    std::filesystem::remove(lock_path_, ec);
}

}  // namespace fwmod
