#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace chor2teal {

struct TaskLabel {
  std::string task;
  std::string initiator;

  bool operator==(const TaskLabel&) const = default;
};

struct Place {
  std::string name;
  bool end = false;

  bool operator==(const Place&) const = default;
};

struct Transition {
  std::string name;
  std::vector<std::size_t> consume; // sorted, unique place indices
  std::vector<std::size_t> produce; // sorted, unique place indices
  std::optional<TaskLabel> label;   // nullopt for silent transitions

  bool silent() const { return !label.has_value(); }
  bool operator==(const Transition&) const = default;
};

// Labeled place/transition net produced from a choreography. The marking is a
// set: the nets handled here are expected to be 1-safe.
struct PetriNet {
  std::string process;
  std::vector<std::string> participants;
  std::vector<Place> places;
  std::vector<Transition> transitions;
  std::vector<std::size_t> initial_marking;

  std::size_t place_index(const std::string& name) const;
  std::vector<std::size_t> consumers(std::size_t place) const;
  std::vector<std::size_t> producers(std::size_t place) const;
  // Throws ValidationError when arcs reference missing places or are empty.
  void check_structure() const;

  bool operator==(const PetriNet&) const = default;
};

} // namespace chor2teal
