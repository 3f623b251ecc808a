#include "chor2teal/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "chor2teal/errors.hpp"

namespace chor2teal::cost {

namespace {

using Schedule = MinBalanceSchedule;

constexpr std::uint64_t unavailable = std::numeric_limits<std::uint64_t>::max();
constexpr std::uint64_t max_box_name_bytes = 64;

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return a == 0 ? 0 : 1 + (a - 1) / b; }

} // namespace

double eth_tx_cost(const EthFeeParams& params) {
  return static_cast<double>(params.gas) * (params.base_fee_gwei + params.priority_fee_gwei);
}

std::uint64_t eth_storage_refund(std::uint64_t slots_freed, std::uint64_t gas) {
  return std::min(eth_slot_refund_gas * slots_freed, gas / eth_refund_divisor);
}

std::uint64_t alg_tx_cost(const AlgFeeParams& params) {
  if (params.congestion < 0) throw std::invalid_argument("congestion factor must be non-negative");
  const double scaled = std::ceil(params.congestion * static_cast<double>(params.tx_bytes));
  return std::max(base_fee, static_cast<std::uint64_t>(scaled));
}

std::uint64_t alg_opcode_cost(std::uint64_t tx_cost, std::uint64_t opcodes) {
  if (opcodes == 0) throw std::invalid_argument("opcode cost is undefined for zero metered opcodes");
  return tx_cost * (1 + (opcodes - 1) / opcode_limit);
}

std::uint64_t storage_limit(StorageVariant system) {
  switch (system) {
  case StorageVariant::uint_slot: return Schedule::uint_storage_limit;
  case StorageVariant::byte_slot: return Schedule::byte_storage_limit;
  case StorageVariant::box: return Schedule::box_max_bytes + max_box_name_bytes;
  }
  return 0;
}

std::uint64_t min_balance_storage(StorageVariant system, std::uint64_t bytes) {
  if (bytes == 0) throw std::invalid_argument("storage size must be at least one byte");
  if (bytes > storage_limit(system))
    throw std::invalid_argument(std::to_string(bytes) + " bytes exceed the " + std::string(to_string(system)) +
                                " storage limit of " + std::to_string(storage_limit(system)));
  switch (system) {
  case StorageVariant::uint_slot: return Schedule::uint_slot * (1 + (bytes - 1) / Schedule::uint_slot_bytes);
  case StorageVariant::byte_slot: return Schedule::byte_slot * (1 + (bytes - 1) / Schedule::byte_slot_bytes);
  case StorageVariant::box: return Schedule::application + Schedule::box_flat + Schedule::box_per_byte * bytes;
  }
  return 0;
}

std::uint64_t min_balance_total(const BalanceQuery& query) {
  std::uint64_t total = query.accounts * Schedule::account + query.applications * Schedule::application +
                        query.extra_pages * Schedule::extra_page;
  for (const auto& spec : query.storage) total += min_balance_storage(spec.system, spec.bytes);
  return total;
}

std::uint64_t byte_slots_for(std::uint64_t instances, std::uint64_t k) {
  if (k == 0 || k > Schedule::byte_slot_bytes) throw std::invalid_argument("instance size must be in [1, 128] bytes");
  return ceil_div(instances, Schedule::byte_slot_bytes / k);
}

std::uint64_t box_bytes_for(std::uint64_t instances, std::uint64_t k) {
  if (k == 0) throw std::invalid_argument("instance size must be at least one byte");
  return 8 * ceil_div(instances * k, 8);
}

std::vector<CurvePoint> multi_instance_curve(StorageVariant variant, std::uint64_t k, std::uint64_t first,
                                             std::uint64_t last) {
  if (k == 0) throw std::invalid_argument("instance size must be at least one byte");
  if (first == 0 || first > last) throw std::invalid_argument("instance range must be non-empty and start at 1 or more");
  std::vector<CurvePoint> series;
  for (std::uint64_t c = first; c <= last; ++c) {
    std::uint64_t mb = 0;
    switch (variant) {
    case StorageVariant::uint_slot: mb = c * (Schedule::application + Schedule::uint_slot); break;
    case StorageVariant::byte_slot: {
      const auto slots = byte_slots_for(c, k);
      if (slots > Schedule::max_global_slots)
        throw std::invalid_argument(std::to_string(c) + " instances of " + std::to_string(k) +
                                    " bytes need more than 64 byte slots");
      mb = Schedule::application + Schedule::byte_slot * slots;
      break;
    }
    case StorageVariant::box: {
      const auto value_bytes = box_bytes_for(c, k);
      if (value_bytes > Schedule::box_max_bytes)
        throw std::invalid_argument(std::to_string(c) + " instances exceed the 32 KB box limit");
      mb = Schedule::application + min_balance_storage(StorageVariant::box, 1 + value_bytes);
      break;
    }
    }
    series.push_back({c, mb});
  }
  return series;
}

CrossoverTable storage_crossover(std::uint64_t first, std::uint64_t last, std::uint64_t box_name_bytes) {
  if (first == 0 || first > last) throw std::invalid_argument("byte range must be non-empty and start at 1 or more");
  auto cost_or_unavailable = [](StorageVariant system, std::uint64_t bytes) {
    return bytes <= storage_limit(system) ? min_balance_storage(system, bytes) : unavailable;
  };
  auto argmin = [](std::uint64_t u, std::uint64_t b, std::uint64_t x) {
    if (u <= b && u <= x) return StorageVariant::uint_slot;
    if (b <= x) return StorageVariant::byte_slot;
    return StorageVariant::box;
  };

  CrossoverTable table;
  for (std::uint64_t n = first; n <= last; ++n) {
    CrossoverRow row;
    row.bytes = n;
    row.uint_cost = cost_or_unavailable(StorageVariant::uint_slot, n);
    row.uint_value_only = Schedule::uint_slot * ceil_div(n, Schedule::uint_value_bytes);
    row.byte_cost = cost_or_unavailable(StorageVariant::byte_slot, n);
    row.box_cost = cost_or_unavailable(StorageVariant::box, n + box_name_bytes);
    row.box_prefunded = row.box_cost == unavailable ? unavailable : row.box_cost - Schedule::application;
    row.cheapest = argmin(row.uint_cost, row.byte_cost, row.box_cost);
    row.cheapest_prefunded = argmin(row.uint_cost, row.byte_cost, row.box_prefunded);
    if (!table.rows.empty()) {
      const auto& prev = table.rows.back();
      if (prev.cheapest != row.cheapest) table.crossovers.push_back({n, prev.cheapest, row.cheapest});
      if (prev.cheapest_prefunded != row.cheapest_prefunded)
        table.crossovers_prefunded.push_back({n, prev.cheapest_prefunded, row.cheapest_prefunded});
    }
    table.rows.push_back(row);
  }
  return table;
}

double to_fiat(double amount, Asset asset, double usd_per_asset) {
  if (!(usd_per_asset > 0)) throw std::invalid_argument("exchange rate must be positive");
  const double scale = asset == Asset::eth ? 1e-9 : 1e-6;
  return amount * scale * usd_per_asset;
}

ExchangeTable default_exchange_table() {
  return ExchangeTable{{"1", "2019", "2023", "2024"}, {1.0, 178.94, 1744.0, 3156.0}, {1.0, 0.53, 0.16, 0.20}, 33.55};
}

ExchangeTable parse_exchange_table(const std::string& json_text) {
  ExchangeTable table;
  try {
    const auto doc = nlohmann::json::parse(json_text);
    table.gas_price_gwei = doc.at("gas_price_gwei").get<double>();
    for (const auto& rate : doc.at("rates")) {
      table.labels.push_back(rate.at("label").get<std::string>());
      table.eth_usd.push_back(rate.at("ETH").get<double>());
      table.alg_usd.push_back(rate.at("ALG").get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid exchange table: ") + e.what());
  }
  auto positive = [](double v) { return v > 0; };
  if (!std::ranges::all_of(table.eth_usd, positive) || !std::ranges::all_of(table.alg_usd, positive) ||
      !(table.gas_price_gwei >= 0))
    throw ParseError("exchange table prices must be positive");
  return table;
}

std::vector<FiatRow> fiat_comparison(std::uint64_t evm_gas, std::uint64_t avm_tx_malgo, std::uint64_t avm_mb_malgo,
                                     const ExchangeTable& rates) {
  FiatRow evm{"EVM", static_cast<double>(evm_gas), "gas", {}};
  FiatRow tx{"AVM tx", static_cast<double>(avm_tx_malgo), "malgo", {}};
  FiatRow mb{"AVM incl. mb", static_cast<double>(avm_mb_malgo), "malgo", {}};
  const double gwei = eth_tx_cost({evm_gas, rates.gas_price_gwei, 0});
  for (std::size_t i = 0; i < rates.labels.size(); ++i) {
    evm.usd.push_back(to_fiat(gwei, Asset::eth, rates.eth_usd[i]));
    tx.usd.push_back(to_fiat(static_cast<double>(avm_tx_malgo), Asset::alg, rates.alg_usd[i]));
    mb.usd.push_back(to_fiat(static_cast<double>(avm_tx_malgo + avm_mb_malgo), Asset::alg, rates.alg_usd[i]));
  }
  return {evm,
          tx,
          mb,
          {"SWF (24 hours)", swf_usd_24h_retention, "USD", {}},
          {"SWF (99 years)", swf_usd_99y_retention, "USD", {}}};
}

} // namespace chor2teal::cost
