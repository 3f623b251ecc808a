#include "chor2teal/storage.hpp"

#include "chor2teal/errors.hpp"

namespace chor2teal {

std::string_view to_string(StorageVariant variant) {
  switch (variant) {
  case StorageVariant::uint_slot: return "uint";
  case StorageVariant::byte_slot: return "byte";
  case StorageVariant::box: return "box";
  }
  return "?";
}

StorageVariant parse_storage_variant(std::string_view text) {
  if (text == "uint") return StorageVariant::uint_slot;
  if (text == "byte") return StorageVariant::byte_slot;
  if (text == "box") return StorageVariant::box;
  throw ParseError("unknown storage variant '" + std::string(text) + "' (expected uint, byte or box)");
}

} // namespace chor2teal
