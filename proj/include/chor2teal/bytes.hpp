#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace chor2teal {

// Raw byte strings (keys, values, arguments). std::string keeps map keys and
// literals cheap; contents are not assumed to be text.
using Bytes = std::string;

std::string to_hex(std::string_view bytes);
Bytes from_hex(std::string_view hex);

Bytes encode_uint64(std::uint64_t value);
std::uint64_t decode_uint64(std::string_view bytes);

struct Address {
  std::array<std::uint8_t, 32> bytes{};

  Bytes as_bytes() const { return Bytes(bytes.begin(), bytes.end()); }
  std::string hex() const { return to_hex(as_bytes()); }

  static Address from_bytes(std::string_view raw);
  static Address from_hex(std::string_view hex);
  // Deterministic pseudo-address for a label (role name, application id).
  static Address derive(std::string_view label);

  auto operator<=>(const Address&) const = default;
};

} // namespace chor2teal
