#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chor2teal/errors.hpp"
#include "chor2teal/net_ir.hpp"
#include "chor2teal/teal_backend.hpp"

namespace chor2teal::conformance {

struct Case {
  std::string id;
  net::Trace events;

  bool operator==(const Case&) const = default;
};

struct EventLog {
  std::string name;
  std::vector<Case> cases;

  bool operator==(const EventLog&) const = default;
};

// Events need concept:name and org:role string attributes. Throws ParseError.
EventLog parse_xes(std::string_view xml);
EventLog load_xes(const std::filesystem::path& path);
std::string write_xes(const EventLog& log);
EventLog make_log(std::string name, std::span<const net::Trace> traces);

// Task names in the log that the net does not know, in first-seen order.
std::vector<std::string> unknown_tasks(const EventLog& log, const net::EncodedNet& net);
// Throws ValidationError listing every unknown task name.
void check_log(const EventLog& log, const net::EncodedNet& net);

struct Enumeration {
  std::vector<net::Trace> traces; // sorted
  bool truncated = false;         // some run hit the length bound
};

Enumeration enumerate_conforming(const net::EncodedNet& net, std::size_t length_bound);

// Bounded integer in [0, n) by rejection sampling; identical on every platform.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n);

enum class Mutation { add, remove, swap };

struct FuzzConfig {
  std::size_t count = 2000;
  std::uint64_t seed = 0;
  std::array<double, 3> weights{1.0, 1.0, 1.0}; // add, remove, swap
  std::size_t attempts_per_mutant = 1000;

  void validate() const; // throws std::invalid_argument
};

class GenerationStall : public Error {
public:
  using Error::Error;
};

// One mutation per mutant, applied to a uniformly drawn conforming trace.
// Mutants the oracle accepts are discarded.
std::vector<net::Trace> generate_nonconforming(std::span<const net::Trace> conforming, const net::EncodedNet& net,
                                               const FuzzConfig& config);

struct SimSetup {
  std::uint64_t participant_funding = 10'000'000;
  double congestion = 0.0;
  std::uint64_t instance = 0;
};

struct CaseCostRecord {
  std::size_t create_opcode_cost = 0;
  std::vector<std::size_t> call_opcode_costs; // accepted task calls, in order
  std::uint64_t fees = 0;                     // every committed transaction
  std::uint64_t min_balance = 0;              // contract-attributable, participants' base excluded
  std::uint64_t external_balance = 0;         // participants * account minimum
  std::size_t participants = 0;
  std::size_t transactions = 0;
};

struct SimVerdict {
  bool accepted = false;
  std::optional<std::size_t> rejected_event;
  std::string reason;
};

struct CaseResult {
  SimVerdict verdict;
  CaseCostRecord cost;
};

// Deploys the unit into a fresh ledger per trace and submits one application
// call per event. Throws SimulationError when deployment itself fails.
std::vector<CaseResult> replay_on_sim(std::span<const net::Trace> traces, const teal::CompilationUnit& unit,
                                      const SimSetup& setup = {});
CaseResult replay_case(const net::Trace& trace, const teal::CompilationUnit& unit, const SimSetup& setup = {});

} // namespace chor2teal::conformance
