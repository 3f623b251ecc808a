#include "chor2teal/conformance.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "chor2teal/cost_model.hpp"
#include "chor2teal/ledger.hpp"
#include "xml.hpp"

namespace chor2teal::conformance {

namespace {

using Schedule = cost::MinBalanceSchedule;

// concept:name and org:role values among an element's <string> children.
std::optional<std::string> string_attribute(const xml::Tree& node, std::string_view key) {
  for (const auto& [tag, child] : node) {
    if (xml::local_name(tag) != "string") continue;
    if (xml::attribute(child, "key") == key) return xml::attribute(child, "value");
  }
  return std::nullopt;
}

void enumerate(const net::EncodedNet& net, net::Marking m, net::Trace& prefix, std::size_t bound,
               std::set<net::Trace>& out, bool& truncated) {
  if (net.is_final(m)) out.insert(prefix);
  for (std::size_t id = 0; id < net.tasks.size(); ++id) {
    const auto& t = net.task_transition(id);
    if (!net::enabled(m, t)) continue;
    if (prefix.size() >= bound) {
      truncated = true;
      return;
    }
    prefix.push_back({net.tasks[id], net.task_initiators[id]});
    enumerate(net, net::settle(net, net::fire(m, t)), prefix, bound, out, truncated);
    prefix.pop_back();
  }
}

double unit_interval(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Mutation pick_mutation(std::mt19937_64& rng, const std::array<double, 3>& weights) {
  const double total = weights[0] + weights[1] + weights[2];
  const double x = unit_interval(rng) * total;
  if (x < weights[0]) return Mutation::add;
  if (x < weights[0] + weights[1]) return Mutation::remove;
  return Mutation::swap;
}

std::optional<net::Trace> mutate(std::mt19937_64& rng, Mutation op, net::Trace trace,
                                 std::span<const net::TraceEvent> event_pool) {
  switch (op) {
  case Mutation::add: {
    if (event_pool.empty()) return std::nullopt;
    const auto& event = event_pool[bounded(rng, event_pool.size())];
    const auto at = bounded(rng, trace.size() + 1);
    trace.insert(trace.begin() + static_cast<std::ptrdiff_t>(at), event);
    return trace;
  }
  case Mutation::remove: {
    if (trace.empty()) return std::nullopt;
    trace.erase(trace.begin() + static_cast<std::ptrdiff_t>(bounded(rng, trace.size())));
    return trace;
  }
  case Mutation::swap: {
    if (trace.size() < 2) return std::nullopt;
    const auto i = bounded(rng, trace.size());
    auto j = bounded(rng, trace.size() - 1);
    if (j >= i) ++j;
    if (trace[i] == trace[j]) return std::nullopt;
    std::swap(trace[i], trace[j]);
    return trace;
  }
  }
  return std::nullopt;
}

// Whether the instance region in committed storage is all zero.
bool region_is_zero(const avm::LedgerState& ledger, std::uint64_t app_id, const teal::CompilationUnit& unit,
                    std::uint64_t instance) {
  const auto where = teal::instance_address(unit.layout, unit.variant, instance);
  const auto& app = ledger.application(app_id);
  auto zero_bytes = [&](const Bytes& value) {
    if (where.offset + where.length > value.size()) return true;
    return std::all_of(value.begin() + static_cast<std::ptrdiff_t>(where.offset),
                       value.begin() + static_cast<std::ptrdiff_t>(where.offset + where.length),
                       [](char c) { return c == 0; });
  };
  switch (unit.variant) {
  case StorageVariant::uint_slot: {
    const auto it = app.globals.find(Bytes(teal::uint_key));
    return it == app.globals.end() || it->second == avm::Value{std::uint64_t{0}};
  }
  case StorageVariant::byte_slot: {
    const auto it = app.globals.find(Bytes(1, static_cast<char>(where.slot)));
    if (it == app.globals.end()) return true;
    const auto* value = std::get_if<Bytes>(&it->second);
    return value == nullptr || zero_bytes(*value);
  }
  case StorageVariant::box: {
    const auto it = ledger.boxes.find({app_id, Bytes(teal::box_name)});
    return it == ledger.boxes.end() || zero_bytes(it->second);
  }
  }
  return false;
}

std::uint64_t contract_min_balance(const avm::LedgerState& ledger, std::size_t participants) {
  std::uint64_t total = 0;
  for (const auto& [address, account] : ledger.accounts) {
    if (address == ledger.fee_sink) continue;
    if (account.balance == 0 && account.inventory.empty()) continue;
    total += avm::min_balance(account.inventory);
  }
  return total - participants * Schedule::account;
}

} // namespace

EventLog parse_xes(std::string_view text) {
  const auto doc = xml::parse(text, "XES log");
  const xml::Tree* root = nullptr;
  for (const auto& [tag, child] : doc)
    if (xml::local_name(tag) == "log") root = &child;
  if (root == nullptr) throw ParseError("XES document has no <log> element");

  EventLog log;
  log.name = string_attribute(*root, "concept:name").value_or("");
  std::size_t trace_index = 0;
  for (const auto& [tag, trace] : *root) {
    if (xml::local_name(tag) != "trace") continue;
    Case c;
    c.id = string_attribute(trace, "concept:name").value_or("case_" + std::to_string(trace_index));
    std::size_t event_index = 0;
    for (const auto& [etag, event] : trace) {
      if (xml::local_name(etag) != "event") continue;
      auto task = string_attribute(event, "concept:name");
      auto role = string_attribute(event, "org:role");
      if (!task || !role)
        throw ParseError("XES trace '" + c.id + "' event " + std::to_string(event_index) + " lacks " +
                         (!task ? "concept:name" : "org:role"));
      c.events.push_back({std::move(*task), std::move(*role)});
      ++event_index;
    }
    log.cases.push_back(std::move(c));
    ++trace_index;
  }
  return log;
}

EventLog load_xes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_xes(text.str());
}

std::string write_xes(const EventLog& log) {
  std::ostringstream out;
  auto attr = [&](int indent, std::string_view key, std::string_view value) {
    out << std::string(indent, ' ') << "<string key=\"" << key << "\" value=\"" << xml::escape(value) << "\"/>\n";
  };
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<log xes.version=\"1.0\" xmlns=\"http://www.xes-standard.org/\">\n";
  out << "  <extension name=\"Concept\" prefix=\"concept\" uri=\"http://www.xes-standard.org/concept.xesext\"/>\n";
  out << "  <extension name=\"Organizational\" prefix=\"org\" uri=\"http://www.xes-standard.org/org.xesext\"/>\n";
  attr(2, "concept:name", log.name);
  for (const auto& c : log.cases) {
    out << "  <trace>\n";
    attr(4, "concept:name", c.id);
    for (const auto& e : c.events) {
      out << "    <event>\n";
      attr(6, "concept:name", e.task);
      attr(6, "org:role", e.role);
      out << "    </event>\n";
    }
    out << "  </trace>\n";
  }
  out << "</log>\n";
  return out.str();
}

EventLog make_log(std::string name, std::span<const net::Trace> traces) {
  EventLog log{std::move(name), {}};
  for (std::size_t i = 0; i < traces.size(); ++i) log.cases.push_back({"case_" + std::to_string(i + 1), traces[i]});
  return log;
}

std::vector<std::string> unknown_tasks(const EventLog& log, const net::EncodedNet& net) {
  std::vector<std::string> unknown;
  for (const auto& c : log.cases)
    for (const auto& e : c.events)
      if (!net.task_id(e.task) && std::find(unknown.begin(), unknown.end(), e.task) == unknown.end())
        unknown.push_back(e.task);
  return unknown;
}

void check_log(const EventLog& log, const net::EncodedNet& net) {
  const auto unknown = unknown_tasks(log, net);
  if (unknown.empty()) return;
  std::string names;
  for (const auto& u : unknown) names += (names.empty() ? "'" : ", '") + u + "'";
  throw ValidationError("log refers to tasks missing from '" + net.process + "': " + names);
}

Enumeration enumerate_conforming(const net::EncodedNet& net, std::size_t length_bound) {
  std::set<net::Trace> found;
  net::Trace prefix;
  Enumeration result;
  enumerate(net, net::start_marking(net), prefix, length_bound, found, result.truncated);
  result.traces.assign(found.begin(), found.end());
  return result;
}

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("bounded() needs a non-empty range");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

void FuzzConfig::validate() const {
  if (count == 0) throw std::invalid_argument("mutant count must be at least 1");
  if (attempts_per_mutant == 0) throw std::invalid_argument("attempt budget must be at least 1");
  for (const double w : weights)
    if (!(w >= 0)) throw std::invalid_argument("mutation weights must be non-negative");
  if (weights[0] + weights[1] + weights[2] <= 0) throw std::invalid_argument("mutation weights must not all be zero");
}

std::vector<net::Trace> generate_nonconforming(std::span<const net::Trace> conforming, const net::EncodedNet& net,
                                               const FuzzConfig& config) {
  config.validate();
  if (conforming.empty()) throw std::invalid_argument("mutation needs at least one conforming trace");
  std::vector<net::TraceEvent> event_pool;
  for (const auto& trace : conforming) event_pool.insert(event_pool.end(), trace.begin(), trace.end());

  std::mt19937_64 rng(config.seed);
  std::vector<net::Trace> mutants;
  mutants.reserve(config.count);
  while (mutants.size() < config.count) {
    bool produced = false;
    for (std::size_t attempt = 0; attempt < config.attempts_per_mutant && !produced; ++attempt) {
      const auto& source = conforming[bounded(rng, conforming.size())];
      auto mutant = mutate(rng, pick_mutation(rng, config.weights), source, event_pool);
      if (!mutant || net::replay_oracle(net, *mutant).accepted) continue;
      mutants.push_back(std::move(*mutant));
      produced = true;
    }
    if (!produced)
      throw GenerationStall("no non-conforming mutant after " + std::to_string(config.attempts_per_mutant) +
                            " attempts (" + std::to_string(mutants.size()) + " of " + std::to_string(config.count) +
                            " generated)");
  }
  return mutants;
}

CaseResult replay_case(const net::Trace& trace, const teal::CompilationUnit& unit, const SimSetup& setup) {
  const auto& net = unit.net;
  auto address_of = [&](const std::string& role) {
    const auto it = unit.role_bindings.find(role);
    return it == unit.role_bindings.end() ? Address::derive(role) : it->second;
  };
  if (net.participants.empty()) throw SimulationError("process has no participants");

  avm::LedgerState ledger;
  for (const auto& role : net.participants) ledger.fund(address_of(role), setup.participant_funding);
  const auto creator = address_of(net.participants.front());

  CaseResult result;
  auto& cost = result.cost;
  cost.participants = net.participants.size();
  cost.external_balance = cost.participants * Schedule::account;

  auto submit = [&](const avm::Transaction& tx) {
    auto priced = tx;
    priced.fee = avm::required_fee(tx, setup.congestion);
    auto outcome = avm::submit_group({priced}, ledger, setup.congestion);
    if (outcome.accepted) {
      cost.fees += priced.fee;
      ++cost.transactions;
    }
    return outcome;
  };

  const auto approval = std::make_shared<const avm::Program>(avm::assemble(unit.approval_source));
  const auto clear = std::make_shared<const avm::Program>(avm::assemble(unit.clear_source));
  const auto created = submit(avm::Transaction::create(
      creator, approval, clear, {unit.schema.uints, unit.schema.byte_slots}, unit.schema.extra_pages));
  if (!created.accepted) throw SimulationError("deployment failed: " + created.reason);
  const auto app_id = *created.transactions.front().created_app;
  cost.create_opcode_cost = created.transactions.front().opcode_cost;

  avm::References refs;
  if (unit.variant == StorageVariant::box) {
    const auto& box = unit.schema.boxes.front();
    const auto funding =
        Schedule::account + Schedule::box_flat + Schedule::box_per_byte * (box.name.size() + box.size);
    const auto paid = submit(avm::Transaction::payment(creator, avm::application_address(app_id), funding));
    if (!paid.accepted) throw SimulationError("application funding failed: " + paid.reason);
    const auto units = std::max<std::size_t>(1, (box.size + avm::box_quota_bytes - 1) / avm::box_quota_bytes);
    for (std::size_t u = 0; u < units; ++u) refs.boxes.push_back({0, box.name});
  }

  const bool needs_instantiation = unit.variant != StorageVariant::uint_slot;
  bool all_accepted = true;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& event = trace[i];
    const auto task = net.task_id(event.task).value_or(net.tasks.size());
    const auto tag = needs_instantiation && i == 0 ? teal::instantiate_tag : teal::task_tag;
    const auto outcome = submit(
        avm::Transaction::call(address_of(event.role), app_id, teal::call_args(tag, setup.instance, task), refs));
    if (!outcome.accepted) {
      all_accepted = false;
      result.verdict.rejected_event = i;
      result.verdict.reason = outcome.reason;
      break;
    }
    cost.call_opcode_costs.push_back(outcome.transactions.front().opcode_cost);
  }

  cost.min_balance = contract_min_balance(ledger, cost.participants);
  if (all_accepted) {
    const bool instantiated = !needs_instantiation || !trace.empty();
    if (!instantiated) {
      result.verdict.reason = "instance never instantiated";
      result.verdict.rejected_event = 0;
    } else if (!region_is_zero(ledger, app_id, unit, setup.instance)) {
      result.verdict.reason = "final marking not reached";
      result.verdict.rejected_event = trace.size();
    } else {
      result.verdict.accepted = true;
    }
  }
  return result;
}

std::vector<CaseResult> replay_on_sim(std::span<const net::Trace> traces, const teal::CompilationUnit& unit,
                                      const SimSetup& setup) {
  std::vector<CaseResult> results;
  results.reserve(traces.size());
  for (const auto& trace : traces) results.push_back(replay_case(trace, unit, setup));
  return results;
}

} // namespace chor2teal::conformance
