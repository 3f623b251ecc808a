#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "chor2teal/conformance.hpp"
#include "chor2teal/pipeline.hpp"
#include "chor2teal/cost_model.hpp"
#include "chor2teal/storage.hpp"

namespace chor2teal::report {

struct VariantSummary {
  std::string process;
  StorageVariant variant = StorageVariant::uint_slot;
  std::size_t places = 0;
  std::size_t cases = 0;
  std::size_t accepted_cases = 0;
  double avg_opcodes_per_call = 0;
  std::size_t max_opcodes_per_call = 0;
  double avg_fee_per_case = 0;
  std::uint64_t min_balance_per_case = 0;
  std::uint64_t external_balance = 0;
  std::size_t participants = 0;
  std::optional<double> reference_avg_opcodes; // published figure, for comparison only
};

// Aggregates accepted cases; min balance is the maximum over cases.
VariantSummary summarize(const std::string& process, StorageVariant variant, std::size_t places,
                         std::span<const conformance::CaseResult> cases);

std::optional<double> reference_avg_opcodes(const std::string& process, StorageVariant variant);

std::string table2_csv(std::span<const VariantSummary> rows);
std::string fiat_csv(std::span<const cost::FiatRow> rows, const cost::ExchangeTable& rates);
std::string crossover_csv(const cost::CrossoverTable& table);
std::string multi_instance_csv(std::size_t k, std::size_t max_instances);

nlohmann::json to_json(const VariantSummary& row);

struct BenchConfig {
  std::vector<StorageVariant> variants{StorageVariant::uint_slot, StorageVariant::byte_slot, StorageVariant::box};
  std::size_t instances = 1; // C_n for Byte and Box; Uint always holds one
  std::size_t length_bound = 64;
  conformance::FuzzConfig fuzz;
  conformance::SimSetup sim;
};

struct Disagreement {
  StorageVariant variant = StorageVariant::uint_slot;
  bool mutant = false;
  std::size_t trace = 0;
  bool oracle_accepted = false;
  bool sim_accepted = false;
  std::string sim_reason;
};

struct BenchResult {
  std::string process;
  std::vector<net::Trace> conforming;
  bool truncated = false;
  std::vector<net::Trace> mutants;
  std::vector<VariantSummary> rows;
  std::vector<Disagreement> disagreements;
  std::size_t oracle_checks = 0;
};

// Enumerates conforming traces, fuzzes mutants, and replays both sets on the
// oracle and on every variant's contract in the simulator.
BenchResult bench(const Process& process, const teal::RoleBindings& bindings, const BenchConfig& config);

nlohmann::json to_json(const BenchResult& result);

} // namespace chor2teal::report
