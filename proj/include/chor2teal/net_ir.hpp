#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chor2teal/petri_net.hpp"
#include "chor2teal/storage.hpp"

namespace chor2teal::net {

using Mask = std::uint64_t;

inline constexpr std::size_t max_places_per_word = 64;

// Bit b set <=> token in the place with index b.
struct Marking {
  Mask value = 0;

  bool has_token(std::size_t place) const { return (value >> place) & 1U; }
  auto operator<=>(const Marking&) const = default;
};

struct EncodedTransition {
  std::string name;
  Mask consume = 0;
  Mask produce = 0;
  std::optional<std::size_t> task; // task id for visible transitions
};

struct EncodedNet {
  std::string process;
  std::vector<std::string> participants;
  std::vector<std::string> place_names;     // index = bit position
  std::vector<std::string> tasks;           // task id -> task name (sorted by name)
  std::vector<std::string> task_initiators; // task id -> initiator role
  std::vector<EncodedTransition> transitions;
  Marking initial;
  Mask end_places = 0;

  std::size_t place_count() const { return place_names.size(); }
  Mask place_mask() const;
  std::optional<std::size_t> task_id(std::string_view task) const;
  const EncodedTransition& task_transition(std::size_t task) const;
  std::vector<std::string> roles() const; // distinct initiators, sorted

  // Non-empty and every token in an end place.
  bool is_final(Marking m) const { return m.value != 0 && (m.value & ~end_places) == 0; }
};

// Series fusion of silent transitions with one consumed and one produced
// place, where the consumed place has no other consumer. Applied to fixpoint.
PetriNet reduce(const PetriNet& net);

struct SafetyReport {
  // Token count per place of the first marking with two tokens in a place.
  std::optional<std::vector<unsigned>> counterexample;
  std::size_t explored = 0;

  bool ok() const { return !counterexample.has_value(); }
};

inline constexpr std::size_t default_state_cap = 1'000'000;

// Exhaustive interleaving search. Throws ValidationError when more than
// `state_cap` markings are reachable.
SafetyReport validate_one_safe(const PetriNet& net, std::size_t state_cap = default_state_cap);

// Deterministic place indexing: topological order over the place graph,
// ties (and cycles) broken by name. Throws ValidationError for p > 64 or for
// silent transitions that compete with another transition for a place.
EncodedNet encode(const PetriNet& net);

bool enabled(Marking m, const EncodedTransition& t);
// Throws ValidationError when `t` is not enabled in `m`.
Marking fire(Marking m, const EncodedTransition& t);
// Fires enabled silent transitions until none is enabled. Throws
// ValidationError if more silent firings happen than there are transitions.
Marking settle(const EncodedNet& net, Marking m);
// settle(net, net.initial): the marking a fresh instance starts in.
Marking start_marking(const EncodedNet& net);

struct TraceEvent {
  std::string task;
  std::string role;

  bool operator==(const TraceEvent&) const = default;
  auto operator<=>(const TraceEvent&) const = default;
};

using Trace = std::vector<TraceEvent>;

struct ReplayVerdict {
  bool accepted = false;
  // Index of the first rejected event; trace length when every event fired
  // but no final marking was reached.
  std::size_t position = 0;

  bool operator==(const ReplayVerdict&) const = default;
};

ReplayVerdict replay_oracle(const EncodedNet& net, std::span<const TraceEvent> trace);

struct InstanceLayout {
  std::size_t places = 1;
  std::size_t bytes_per_instance = 1; // k
  std::size_t max_instances = 1;      // C_n
  std::optional<StorageVariant> variant_hint;

  std::size_t total_bytes() const { return bytes_per_instance * max_instances; }
  std::size_t offset(std::size_t instance) const { return instance * bytes_per_instance; }
  bool operator==(const InstanceLayout&) const = default;
};

// k = 1 + floor((p - 1) / 8). Throws std::invalid_argument for p == 0 or C_n == 0.
InstanceLayout layout(std::size_t places, std::size_t max_instances);

} // namespace chor2teal::net
