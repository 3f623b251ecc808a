#include "chor2teal/petri_net.hpp"

#include <algorithm>

#include "chor2teal/errors.hpp"

namespace chor2teal {

std::size_t PetriNet::place_index(const std::string& name) const {
  for (std::size_t i = 0; i < places.size(); ++i)
    if (places[i].name == name) return i;
  throw ValidationError("no place named '" + name + "'");
}

std::vector<std::size_t> PetriNet::consumers(std::size_t place) const {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < transitions.size(); ++t)
    if (std::ranges::binary_search(transitions[t].consume, place)) out.push_back(t);
  return out;
}

std::vector<std::size_t> PetriNet::producers(std::size_t place) const {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < transitions.size(); ++t)
    if (std::ranges::binary_search(transitions[t].produce, place)) out.push_back(t);
  return out;
}

void PetriNet::check_structure() const {
  auto check_arcs = [&](const Transition& t, const std::vector<std::size_t>& arcs, const char* side) {
    if (arcs.empty()) throw ValidationError("transition '" + t.name + "' has an empty " + side + " set");
    if (!std::ranges::is_sorted(arcs) || std::ranges::adjacent_find(arcs) != arcs.end())
      throw ValidationError("transition '" + t.name + "' has unsorted or duplicate " + side + " arcs");
    if (arcs.back() >= places.size())
      throw ValidationError("transition '" + t.name + "' references a missing place");
  };
  for (const auto& t : transitions) {
    check_arcs(t, t.consume, "consume");
    check_arcs(t, t.produce, "produce");
  }
  if (initial_marking.size() != 1 || initial_marking.front() >= places.size())
    throw ValidationError("initial marking must be exactly one start place");
}

} // namespace chor2teal
