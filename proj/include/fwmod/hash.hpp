#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fwmod {

// Lowercase hex SHA-256. Used for response cache keys and artifact digests.
std::string sha256_hex(std::string_view data);
std::string sha256_hex(const std::vector<std::uint8_t>& data);

}  // namespace fwmod
