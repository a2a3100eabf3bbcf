#pragma once

#include <cstdint>
#include <string>

namespace grsurf {

/// Hex SHA-256 digest of a byte string (FIPS 180-4).
std::string sha256_hex(const std::string& data);

} // namespace grsurf
