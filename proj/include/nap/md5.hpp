#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace nap {

// RFC 1321 MD5 digest of a byte string.
std::array<std::uint8_t, 16> md5_digest(const std::string& data);

std::string md5_hex(const std::string& data);

// Digest interpreted as an unsigned big-endian integer, reduced mod m.
std::uint64_t md5_mod(const std::string& data, std::uint64_t m);

}  // namespace nap
