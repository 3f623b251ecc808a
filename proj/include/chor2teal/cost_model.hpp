#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "chor2teal/storage.hpp"

namespace chor2teal::cost {

// Algorand fee and opcode constants.
inline constexpr std::uint64_t base_fee = 1'000; // malgo, b_alg
inline constexpr std::uint64_t opcode_limit = 700;
inline constexpr std::uint64_t max_group_size = 16;
inline constexpr std::uint64_t max_inner_transactions = 256; // modelled, never executed
inline constexpr std::uint64_t max_extra_references = 8;

// Ethereum constants.
inline constexpr std::uint64_t eth_base_gas = 21'000;
inline constexpr std::uint64_t eth_slot_refund_gas = 4'800;
inline constexpr std::uint64_t eth_refund_divisor = 5;

// Minimum-balance schedule (malgo) and storage limits (bytes).
struct MinBalanceSchedule {
  static constexpr std::uint64_t account = 100'000;
  static constexpr std::uint64_t application = 100'000;
  static constexpr std::uint64_t uint_slot = 28'500;
  static constexpr std::uint64_t uint_slot_bytes = 72;  // 64 B key + 8 B value
  static constexpr std::uint64_t uint_value_bytes = 8;  // payload only (key length 0)
  static constexpr std::uint64_t byte_slot = 50'000;
  static constexpr std::uint64_t byte_slot_bytes = 128;
  static constexpr std::uint64_t box_flat = 2'500;
  static constexpr std::uint64_t box_per_byte = 400;    // name + value bytes
  static constexpr std::uint64_t extra_page = 100'000;  // assumption: per extra 2,048 B program page
  static constexpr std::uint64_t contract_page_bytes = 2'048;
  static constexpr std::uint64_t contract_max_bytes = 8'192;
  static constexpr std::uint64_t byte_storage_limit = 8'192;
  static constexpr std::uint64_t uint_storage_limit = 4'608;
  static constexpr std::uint64_t box_max_bytes = 32'768;
  static constexpr std::uint64_t max_global_slots = 64;
};

struct EthFeeParams {
  std::uint64_t gas = eth_base_gas;
  double base_fee_gwei = 0;
  double priority_fee_gwei = 0;
};

// n_gas * (b_gas + p_gas), in gwei.
double eth_tx_cost(const EthFeeParams& params);

// min(4,800 * slots_freed, n_gas / 5), in gas.
std::uint64_t eth_storage_refund(std::uint64_t slots_freed, std::uint64_t gas);

struct AlgFeeParams {
  double congestion = 0;     // f_alg, malgo per byte
  std::uint64_t tx_bytes = 0; // s_tx
};

// max(1,000, f_alg * s_tx); the congestion product is rounded up to whole malgo.
std::uint64_t alg_tx_cost(const AlgFeeParams& params);

// tx_cost * (1 + floor((n_op - 1) / 700)). Throws std::invalid_argument for n_op == 0.
std::uint64_t alg_opcode_cost(std::uint64_t tx_cost, std::uint64_t opcodes);

// Minimum balance for storing `bytes` in one storage system. The Box arm
// includes funding the application account. Throws std::invalid_argument when
// `bytes` is zero or over the system's limit.
std::uint64_t min_balance_storage(StorageVariant system, std::uint64_t bytes);
std::uint64_t storage_limit(StorageVariant system);

struct StorageSpec {
  StorageVariant system = StorageVariant::uint_slot;
  std::uint64_t bytes = 0;
};

struct BalanceQuery {
  std::uint64_t accounts = 0;
  std::uint64_t applications = 0;
  std::vector<StorageSpec> storage;
  std::uint64_t extra_pages = 0;
};

std::uint64_t min_balance_total(const BalanceQuery& query);

struct CurvePoint {
  std::uint64_t instances = 0;
  std::uint64_t min_balance = 0;

  bool operator==(const CurvePoint&) const = default;
};

// Byte slots needed for `instances` regions of `k` bytes when no region may
// straddle a 128-byte slot.
std::uint64_t byte_slots_for(std::uint64_t instances, std::uint64_t k);
// Box value bytes for `instances` regions of `k` bytes, in whole uint64 words.
std::uint64_t box_bytes_for(std::uint64_t instances, std::uint64_t k);

// Minimum balance of running C parallel instances (C in [first, last]).
// Uint redeploys an application per instance. Throws std::invalid_argument
// when k == 0 or a Byte layout needs more than 64 slots.
std::vector<CurvePoint> multi_instance_curve(StorageVariant variant, std::uint64_t k, std::uint64_t first,
                                             std::uint64_t last);

struct CrossoverRow {
  std::uint64_t bytes = 0;
  std::uint64_t uint_cost = 0;
  std::uint64_t uint_value_only = 0; // 8 B per slot view (key length 0)
  std::uint64_t byte_cost = 0;
  std::uint64_t box_cost = 0;
  std::uint64_t box_prefunded = 0; // application account already funded
  StorageVariant cheapest = StorageVariant::uint_slot;
  StorageVariant cheapest_prefunded = StorageVariant::uint_slot;
};

struct Crossover {
  std::uint64_t bytes = 0; // first n_B at which the cheapest system changes
  StorageVariant from = StorageVariant::uint_slot;
  StorageVariant to = StorageVariant::uint_slot;
};

struct CrossoverTable {
  std::vector<CrossoverRow> rows;
  std::vector<Crossover> crossovers;
  std::vector<Crossover> crossovers_prefunded;
};

// Pointwise argmin of min_balance_storage over [first, last]. Ties resolve in
// the order Uint, Byte, Box. Box rows add `box_name_bytes` to n_B.
CrossoverTable storage_crossover(std::uint64_t first, std::uint64_t last, std::uint64_t box_name_bytes = 1);

enum class Asset { eth, alg };

// Native units: gwei for ETH, malgo for ALG. Throws std::invalid_argument for
// a non-positive rate.
double to_fiat(double amount, Asset asset, double usd_per_asset);

struct ExchangeTable {
  // Column labels in display order, e.g. "1", "2019", "2023", "2024".
  std::vector<std::string> labels;
  std::vector<double> eth_usd;
  std::vector<double> alg_usd;
  double gas_price_gwei = 0;
};

ExchangeTable default_exchange_table();
// JSON: {"gas_price_gwei": x, "rates": [{"label": "2019", "ETH": 178.94, "ALG": 0.53}, ...]}
ExchangeTable parse_exchange_table(const std::string& json_text);

// Reference figures for a cloud workflow service running the incident
// management case; reported verbatim, never recomputed.
inline constexpr double swf_usd_24h_retention = 0.0009;
inline constexpr double swf_usd_99y_retention = 0.1816;
// Gas used by the Solidity build of the incident management case.
inline constexpr std::uint64_t reference_evm_gas = 599'463;

struct FiatRow {
  std::string label;
  double native_cost = 0; // gas, malgo or USD
  std::string unit;
  std::vector<double> usd; // one per exchange-table label; empty for fixed USD rows
};

// Rows: EVM (gas), AVM tx, AVM incl. mb (cost column shows the balance
// requirement; USD columns convert tx + mb), SWF 24 h and 99 y.
std::vector<FiatRow> fiat_comparison(std::uint64_t evm_gas, std::uint64_t avm_tx_malgo, std::uint64_t avm_mb_malgo,
                                     const ExchangeTable& rates);

} // namespace chor2teal::cost
