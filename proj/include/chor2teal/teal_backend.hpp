#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "chor2teal/bytes.hpp"
#include "chor2teal/net_ir.hpp"
#include "chor2teal/storage.hpp"

namespace chor2teal::teal {

inline constexpr std::string_view instantiate_tag = "inst";
inline constexpr std::string_view task_tag = "task";
inline constexpr std::string_view uint_key = "m";
inline constexpr std::string_view box_name = "b";

struct BoxSpec {
  Bytes name;
  std::size_t size = 0;

  bool operator==(const BoxSpec&) const = default;
};

struct Schema {
  std::size_t uints = 0;
  std::size_t byte_slots = 0;
  std::vector<BoxSpec> boxes;
  std::size_t extra_pages = 0;

  bool operator==(const Schema&) const = default;
};

using RoleBindings = std::map<std::string, Address>;

struct CompilationUnit {
  std::string approval_source;
  std::string clear_source;
  StorageVariant variant = StorageVariant::uint_slot;
  Schema schema;
  RoleBindings role_bindings;
  net::InstanceLayout layout;
  net::EncodedNet net;
  std::size_t approval_size = 0; // assembled bytes
  std::size_t clear_size = 0;
};

struct InstanceAddress {
  std::size_t slot = 0; // byte-slot index; always 0 for Uint and Box
  std::size_t offset = 0;
  std::size_t length = 0;

  bool operator==(const InstanceAddress&) const = default;
};

// Instances per 128-byte slot, chosen so no instance straddles two slots.
std::size_t instances_per_slot(std::size_t k);
std::size_t byte_slot_count(const net::InstanceLayout& layout);
// Word-aligned box value size holding every instance region.
std::size_t box_size(const net::InstanceLayout& layout);

// Throws std::out_of_range when i >= C_n.
InstanceAddress instance_address(const net::InstanceLayout& layout, StorageVariant variant, std::size_t i);

// Deterministic address per role, for simulations without real keys.
RoleBindings derive_bindings(const net::EncodedNet& net);
// {"Role": "<64 hex digits>", ...}. Throws ParseError.
RoleBindings parse_bindings(const std::string& json_text);

// Throws EmissionError for unbound initiator roles, layouts beyond the
// variant's capacity, and programs over 8192 bytes.
CompilationUnit emit(const net::EncodedNet& net, StorageVariant variant, const net::InstanceLayout& layout,
                     const RoleBindings& bindings);

// Application call arguments: (tag, itob(instance), itob(task id)).
std::vector<Bytes> call_args(std::string_view tag, std::uint64_t instance, std::uint64_t task);

nlohmann::json manifest(const CompilationUnit& unit);
// Rebuilds the unit (re-emitting the programs) from a manifest document.
CompilationUnit load_manifest(const nlohmann::json& doc);

// Writes approval.teal, clear.teal and manifest.json into `dir`.
void write_unit(const CompilationUnit& unit, const std::filesystem::path& dir);

} // namespace chor2teal::teal
