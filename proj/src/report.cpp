#include "chor2teal/report.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace chor2teal::report {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (const char c : s) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
  return quoted + "\"";
}

std::string cost_or_dash(std::uint64_t v) {
  return v == std::numeric_limits<std::uint64_t>::max() ? std::string("-") : std::to_string(v);
}

} // namespace

VariantSummary summarize(const std::string& process, StorageVariant variant, std::size_t places,
                         std::span<const conformance::CaseResult> cases) {
  VariantSummary row;
  row.process = process;
  row.variant = variant;
  row.places = places;
  row.cases = cases.size();
  row.reference_avg_opcodes = reference_avg_opcodes(process, variant);

  std::size_t calls = 0, opcodes = 0;
  std::uint64_t fees = 0;
  for (const auto& c : cases) {
    row.participants = c.cost.participants;
    row.external_balance = c.cost.external_balance;
    if (!c.verdict.accepted) continue;
    ++row.accepted_cases;
    fees += c.cost.fees;
    row.min_balance_per_case = std::max(row.min_balance_per_case, c.cost.min_balance);
    for (const auto cost : c.cost.call_opcode_costs) {
      ++calls;
      opcodes += cost;
      row.max_opcodes_per_call = std::max(row.max_opcodes_per_call, cost);
    }
  }
  if (calls > 0) row.avg_opcodes_per_call = static_cast<double>(opcodes) / static_cast<double>(calls);
  if (row.accepted_cases > 0) row.avg_fee_per_case = static_cast<double>(fees) / static_cast<double>(row.accepted_cases);
  return row;
}

std::optional<double> reference_avg_opcodes(const std::string& process, StorageVariant variant) {
  static const std::map<std::pair<std::string, StorageVariant>, double> published{
      {{"supply_chain", StorageVariant::uint_slot}, 67},
      {{"supply_chain", StorageVariant::byte_slot}, 83},
      {{"supply_chain", StorageVariant::box}, 83},
      {{"incident_management", StorageVariant::uint_slot}, 95},
      {{"incident_management", StorageVariant::byte_slot}, 111},
      {{"incident_management", StorageVariant::box}, 110},
  };
  const auto it = published.find({process, variant});
  if (it == published.end()) return std::nullopt;
  return it->second;
}

std::string table2_csv(std::span<const VariantSummary> rows) {
  std::ostringstream out;
  out << "process,places,variant,cases,accepted,avg_opcodes_per_tx,max_opcodes_per_tx,reference_avg_opcodes,"
         "avg_fee_per_case_malgo,min_balance_per_case_malgo,participants,external_balance_malgo\n";
  for (const auto& r : rows) {
    out << csv_field(r.process) << ',' << r.places << ',' << to_string(r.variant) << ',' << r.cases << ','
        << r.accepted_cases << ',' << fmt::format("{:.2f}", r.avg_opcodes_per_call) << ',' << r.max_opcodes_per_call
        << ',' << (r.reference_avg_opcodes ? fmt::format("{:.0f}", *r.reference_avg_opcodes) : std::string())
        << ',' << fmt::format("{:.0f}", r.avg_fee_per_case) << ',' << r.min_balance_per_case << ','
        << r.participants << ',' << r.external_balance << '\n';
  }
  return out.str();
}

std::string fiat_csv(std::span<const cost::FiatRow> rows, const cost::ExchangeTable& rates) {
  std::ostringstream out;
  out << "row,native_cost,unit";
  for (const auto& label : rates.labels) out << ",usd_" << csv_field(label);
  out << '\n';
  for (const auto& r : rows) {
    out << csv_field(r.label) << ',' << fmt::format("{}", r.native_cost) << ',' << r.unit;
    for (std::size_t i = 0; i < rates.labels.size(); ++i)
      out << ',' << (i < r.usd.size() ? fmt::format("{:.4f}", r.usd[i]) : std::string());
    out << '\n';
  }
  return out.str();
}

std::string crossover_csv(const cost::CrossoverTable& table) {
  std::ostringstream out;
  out << "bytes,uint,uint_value_only,byte,box,box_prefunded,cheapest,cheapest_prefunded\n";
  for (const auto& r : table.rows) {
    out << r.bytes << ',' << cost_or_dash(r.uint_cost) << ',' << r.uint_value_only << ',' << cost_or_dash(r.byte_cost)
        << ',' << cost_or_dash(r.box_cost) << ',' << cost_or_dash(r.box_prefunded) << ',' << to_string(r.cheapest)
        << ',' << to_string(r.cheapest_prefunded) << '\n';
  }
  return out.str();
}

std::string multi_instance_csv(std::size_t k, std::size_t max_instances) {
  const auto uint_curve = cost::multi_instance_curve(StorageVariant::uint_slot, k, 1, max_instances);
  std::ostringstream out;
  out << "instances,uint,byte,box\n";
  for (std::size_t c = 1; c <= max_instances; ++c) {
    auto column = [&](StorageVariant v) {
      try {
        return std::to_string(cost::multi_instance_curve(v, k, c, c).front().min_balance);
      } catch (const std::invalid_argument&) {
        return std::string("-");
      }
    };
    out << c << ',' << uint_curve[c - 1].min_balance << ',' << column(StorageVariant::byte_slot) << ','
        << column(StorageVariant::box) << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const VariantSummary& r) {
  nlohmann::json doc{{"process", r.process},
                     {"variant", std::string(to_string(r.variant))},
                     {"places", r.places},
                     {"cases", r.cases},
                     {"accepted_cases", r.accepted_cases},
                     {"avg_opcodes_per_tx", r.avg_opcodes_per_call},
                     {"max_opcodes_per_tx", r.max_opcodes_per_call},
                     {"avg_fee_per_case", r.avg_fee_per_case},
                     {"min_balance_per_case", r.min_balance_per_case},
                     {"participants", r.participants},
                     {"external_balance", r.external_balance}};
  if (r.reference_avg_opcodes) doc["reference_avg_opcodes"] = *r.reference_avg_opcodes;
  return doc;
}

BenchResult bench(const Process& process, const teal::RoleBindings& bindings, const BenchConfig& config) {
  const auto& net = process.encoded;
  BenchResult result;
  result.process = net.process;
  auto enumeration = conformance::enumerate_conforming(net, config.length_bound);
  result.conforming = std::move(enumeration.traces);
  result.truncated = enumeration.truncated;
  if (config.fuzz.count > 0 && !result.conforming.empty())
    result.mutants = conformance::generate_nonconforming(result.conforming, net, config.fuzz);

  std::vector<bool> oracle_conforming, oracle_mutant;
  for (const auto& t : result.conforming) oracle_conforming.push_back(net::replay_oracle(net, t).accepted);
  for (const auto& t : result.mutants) oracle_mutant.push_back(net::replay_oracle(net, t).accepted);

  for (const auto variant : config.variants) {
    const auto instances = variant == StorageVariant::uint_slot ? 1 : config.instances;
    const auto unit = teal::emit(net, variant, net::layout(net.place_count(), instances), bindings);
    auto check = [&](const std::vector<net::Trace>& traces, const std::vector<bool>& oracle, bool mutant) {
      auto cases = conformance::replay_on_sim(traces, unit, config.sim);
      for (std::size_t i = 0; i < cases.size(); ++i) {
        ++result.oracle_checks;
        if (cases[i].verdict.accepted != oracle[i])
          result.disagreements.push_back(
              {variant, mutant, i, oracle[i], cases[i].verdict.accepted, cases[i].verdict.reason});
      }
      return cases;
    };
    const auto conforming_cases = check(result.conforming, oracle_conforming, false);
    check(result.mutants, oracle_mutant, true);
    result.rows.push_back(summarize(net.process, variant, net.place_count(), conforming_cases));
  }
  return result;
}

nlohmann::json to_json(const BenchResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : result.rows) rows.push_back(to_json(r));
  nlohmann::json disagreements = nlohmann::json::array();
  for (const auto& d : result.disagreements)
    disagreements.push_back({{"variant", std::string(to_string(d.variant))},
                             {"set", d.mutant ? "mutant" : "conforming"},
                             {"trace", d.trace},
                             {"oracle", d.oracle_accepted},
                             {"sim", d.sim_accepted},
                             {"sim_reason", d.sim_reason}});
  return {{"process", result.process},
          {"conforming_traces", result.conforming.size()},
          {"enumeration_truncated", result.truncated},
          {"mutants", result.mutants.size()},
          {"checks", result.oracle_checks},
          {"variants", std::move(rows)},
          {"disagreements", std::move(disagreements)}};
}

} // namespace chor2teal::report
