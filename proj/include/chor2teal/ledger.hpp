#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chor2teal/avm.hpp"
#include "chor2teal/bytes.hpp"

namespace chor2teal::avm {

inline constexpr std::uint64_t first_app_id = 1001;

// Storage an account pays minimum balance for.
struct AllocationInventory {
  std::uint64_t apps_created = 0;
  std::uint64_t uint_slots = 0;
  std::uint64_t byte_slots = 0;
  std::uint64_t extra_pages = 0;
  std::uint64_t boxes = 0;
  std::uint64_t box_bytes = 0; // name + value bytes over all boxes

  bool empty() const { return *this == AllocationInventory{}; }
  bool operator==(const AllocationInventory&) const = default;
};

std::uint64_t min_balance(const AllocationInventory& inventory);

struct Account {
  std::uint64_t balance = 0;
  AllocationInventory inventory;

  bool operator==(const Account&) const = default;
};

struct StateSchema {
  std::uint64_t uints = 0;
  std::uint64_t byte_slices = 0;

  bool operator==(const StateSchema&) const = default;
};

struct Application {
  std::uint64_t id = 0;
  Address creator;
  Address address;
  std::shared_ptr<const Program> approval;
  std::shared_ptr<const Program> clear;
  StateSchema schema;
  std::uint64_t extra_pages = 0;
  std::map<Bytes, Value> globals;

  bool operator==(const Application& other) const;
};

Address application_address(std::uint64_t app_id);

struct LedgerState {
  std::map<Address, Account> accounts;
  std::map<std::uint64_t, Application> applications;
  std::map<std::pair<std::uint64_t, Bytes>, Bytes> boxes;
  Address fee_sink = Address::derive("fee-sink");
  std::uint64_t next_app_id = first_app_id;

  std::uint64_t balance(const Address& who) const;
  std::uint64_t min_balance(const Address& who) const;
  std::uint64_t total_balance() const; // fee sink included
  const Application& application(std::uint64_t id) const;

  void fund(const Address& who, std::uint64_t amount) { accounts[who].balance += amount; }

  bool operator==(const LedgerState&) const = default;
};

enum class TxKind { payment, app_create, app_call };

enum class OnCompletion : std::uint64_t {
  noop = 0, opt_in = 1, close_out = 2, clear_state = 3, update_application = 4, delete_application = 5,
};

struct BoxReference {
  std::uint64_t app_id = 0; // 0 = the called application
  Bytes name;
};

struct References {
  std::vector<Address> accounts;
  std::vector<std::uint64_t> apps;
  std::vector<BoxReference> boxes;

  std::size_t count() const { return accounts.size() + apps.size() + boxes.size(); }
};

struct Transaction {
  TxKind kind = TxKind::payment;
  Address sender;
  std::uint64_t fee = 1000;

  Address receiver;
  std::uint64_t amount = 0;

  std::uint64_t app_id = 0;
  OnCompletion on_completion = OnCompletion::noop;
  std::vector<Bytes> args;
  References refs;

  std::shared_ptr<const Program> approval;
  std::shared_ptr<const Program> clear;
  StateSchema schema;
  std::uint64_t extra_pages = 0;

  static Transaction payment(Address from, Address to, std::uint64_t amount, std::uint64_t fee = 1000);
  static Transaction create(Address from, std::shared_ptr<const Program> approval,
                            std::shared_ptr<const Program> clear, StateSchema schema,
                            std::uint64_t extra_pages = 0, std::uint64_t fee = 1000);
  static Transaction call(Address from, std::uint64_t app, std::vector<Bytes> args, References refs = {},
                          std::uint64_t fee = 1000);
};

// Length of a deterministic field-tagged encoding; programs count with their
// assembled size. Used for fee-per-byte pricing.
std::size_t serialized_size(const Transaction& tx);

// max(1000, ceil(congestion * size)).
std::uint64_t required_fee(const Transaction& tx, double congestion);

// Extra pages needed for a program pair; throws SimulationError past 8 KB.
std::uint64_t required_extra_pages(const Program& approval, const Program& clear);

struct TxTelemetry {
  std::size_t tx_index = 0;
  bool accepted = false;
  std::size_t opcode_cost = 0;
  std::uint64_t fee = 0;
  std::int64_t mb_delta = 0; // change of summed minimum balance over all accounts
  std::optional<std::uint64_t> created_app;
  std::string reason;
};

struct GroupResult {
  bool accepted = false;
  std::string reason;
  std::optional<std::size_t> failed_index;
  std::size_t opcode_budget = 0;
  std::vector<TxTelemetry> transactions;
};

inline constexpr std::size_t max_group_size = 16;
inline constexpr std::size_t budget_per_transaction = 700;
inline constexpr std::size_t max_references = 8;
inline constexpr std::size_t box_quota_bytes = 1024;

// Applies the group atomically: the ledger is modified only when every
// transaction succeeds and all touched accounts meet their minimum balance.
GroupResult submit_group(const std::vector<Transaction>& group, LedgerState& ledger, double congestion = 0.0);

std::string telemetry_json(const GroupResult& result);

} // namespace chor2teal::avm
