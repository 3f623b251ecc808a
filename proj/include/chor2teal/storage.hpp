#pragma once

#include <string>
#include <string_view>

namespace chor2teal {

// Algorand application storage used to hold instance markings.
enum class StorageVariant { uint_slot, byte_slot, box };

std::string_view to_string(StorageVariant variant);
// Accepts "uint", "byte", "box" (case-sensitive). Throws ParseError.
StorageVariant parse_storage_variant(std::string_view text);

} // namespace chor2teal
