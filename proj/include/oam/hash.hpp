#pragma once

#include <span>
#include <string>
#include <string_view>

namespace oam {

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);
std::string sha256_hex(std::span<const unsigned char> data);

}  // namespace oam
