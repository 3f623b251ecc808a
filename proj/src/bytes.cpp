#include "chor2teal/bytes.hpp"

#include "chor2teal/errors.hpp"

namespace chor2teal {

namespace {

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace

std::string to_hex(std::string_view bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 0xf]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  if (hex.size() % 2 != 0) throw ParseError("odd-length hex string");
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = hex_digit(hex[i]);
    const int lo = hex_digit(hex[i + 1]);
    if (hi < 0 || lo < 0) throw ParseError("invalid hex digit in '" + std::string(hex) + "'");
    out.push_back(static_cast<char>((hi << 4) | lo));
  }
  return out;
}

Bytes encode_uint64(std::uint64_t value) {
  Bytes out(8, '\0');
  for (int i = 7; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = static_cast<char>(value & 0xff);
    value >>= 8;
  }
  return out;
}

std::uint64_t decode_uint64(std::string_view bytes) {
  std::uint64_t value = 0;
  for (unsigned char c : bytes) value = (value << 8) | c;
  return value;
}

Address Address::from_bytes(std::string_view raw) {
  if (raw.size() != 32) throw ParseError("address must be 32 bytes, got " + std::to_string(raw.size()));
  Address a;
  for (std::size_t i = 0; i < 32; ++i) a.bytes[i] = static_cast<std::uint8_t>(raw[i]);
  return a;
}

Address Address::from_hex(std::string_view hex) { return from_bytes(chor2teal::from_hex(hex)); }

Address Address::derive(std::string_view label) {
  // FNV-1a seed, expanded with splitmix64.
  std::uint64_t state = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    state ^= c;
    state *= 0x100000001b3ULL;
  }
  Address a;
  for (std::size_t word = 0; word < 4; ++word) {
    const std::uint64_t v = splitmix64(state);
    for (std::size_t i = 0; i < 8; ++i) a.bytes[word * 8 + i] = static_cast<std::uint8_t>(v >> (56 - 8 * i));
  }
  return a;
}

} // namespace chor2teal
