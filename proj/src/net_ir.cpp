#include "chor2teal/net_ir.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <set>
#include <stdexcept>

#include "chor2teal/errors.hpp"

namespace chor2teal::net {

Mask EncodedNet::place_mask() const {
  return place_count() >= 64 ? ~Mask{0} : (Mask{1} << place_count()) - 1;
}

std::optional<std::size_t> EncodedNet::task_id(std::string_view task) const {
  const auto it = std::ranges::lower_bound(tasks, task);
  if (it == tasks.end() || *it != task) return std::nullopt;
  return static_cast<std::size_t>(it - tasks.begin());
}

const EncodedTransition& EncodedNet::task_transition(std::size_t task) const {
  // Visible transitions come first, ordered by task id.
  return transitions.at(task);
}

std::vector<std::string> EncodedNet::roles() const {
  std::vector<std::string> out = task_initiators;
  std::ranges::sort(out);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

bool contains(const std::vector<std::size_t>& sorted, std::size_t value) {
  return std::ranges::binary_search(sorted, value);
}

void replace_place(std::vector<std::size_t>& arcs, std::size_t from, std::size_t to) {
  for (auto& p : arcs)
    if (p == from) p = to;
  std::ranges::sort(arcs);
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
}

void drop_place(PetriNet& net, std::size_t place) {
  net.places.erase(net.places.begin() + static_cast<std::ptrdiff_t>(place));
  auto shift = [place](std::vector<std::size_t>& arcs) {
    for (auto& p : arcs)
      if (p > place) --p;
  };
  for (auto& t : net.transitions) {
    shift(t.consume);
    shift(t.produce);
  }
  shift(net.initial_marking);
}

bool fusable(const PetriNet& net, std::size_t t) {
  const auto& tr = net.transitions[t];
  if (!tr.silent() || tr.consume.size() != 1 || tr.produce.size() != 1) return false;
  const auto a = tr.consume.front();
  const auto b = tr.produce.front();
  if (a == b || net.places[a].end) return false;
  if (net.consumers(a) != std::vector<std::size_t>{t}) return false;
  const bool a_initial = contains(net.initial_marking, a);
  if (a_initial && contains(net.initial_marking, b)) return false;
  for (auto u : net.producers(a))
    if (contains(net.transitions[u].produce, b)) return false;
  return true;
}

} // namespace

PetriNet reduce(const PetriNet& input) {
  PetriNet net = input;
  for (;;) {
    std::optional<std::size_t> candidate;
    for (std::size_t t = 0; t < net.transitions.size() && !candidate; ++t)
      if (fusable(net, t)) candidate = t;
    if (!candidate) return net;

    const auto a = net.transitions[*candidate].consume.front();
    const auto b = net.transitions[*candidate].produce.front();
    net.transitions.erase(net.transitions.begin() + static_cast<std::ptrdiff_t>(*candidate));
    for (auto& t : net.transitions) replace_place(t.produce, a, b);
    replace_place(net.initial_marking, a, b);
    drop_place(net, a);
  }
}

SafetyReport validate_one_safe(const PetriNet& net, std::size_t state_cap) {
  net.check_structure();
  using Counts = std::vector<unsigned>;
  Counts initial(net.places.size(), 0);
  for (auto p : net.initial_marking) ++initial[p];

  SafetyReport report;
  std::set<Counts> seen{initial};
  std::deque<Counts> queue{initial};
  while (!queue.empty()) {
    const Counts m = std::move(queue.front());
    queue.pop_front();
    ++report.explored;
    for (const auto& t : net.transitions) {
      if (!std::ranges::all_of(t.consume, [&](auto p) { return m[p] > 0; })) continue;
      Counts next = m;
      for (auto p : t.consume) --next[p];
      for (auto p : t.produce) ++next[p];
      if (std::ranges::any_of(next, [](unsigned c) { return c > 1; })) {
        report.counterexample = std::move(next);
        return report;
      }
      if (seen.insert(next).second) {
        if (seen.size() > state_cap)
          throw ValidationError("state space exceeds " + std::to_string(state_cap) + " markings");
        queue.push_back(std::move(next));
      }
    }
  }
  return report;
}

namespace {

std::vector<std::size_t> place_order(const PetriNet& net) {
  const auto n = net.places.size();
  std::vector<std::set<std::size_t>> successors(n), predecessors(n);
  for (const auto& t : net.transitions)
    for (auto a : t.consume)
      for (auto b : t.produce)
        if (a != b) {
          successors[a].insert(b);
          predecessors[b].insert(a);
        }

  auto by_name = [&](std::size_t x, std::size_t y) {
    return std::tie(net.places[x].name, x) < std::tie(net.places[y].name, y);
  };
  std::vector<std::size_t> pending(n);
  std::vector<bool> placed(n, false);
  for (std::size_t p = 0; p < n; ++p) pending[p] = predecessors[p].size();

  std::vector<std::size_t> order;
  std::vector<std::size_t> ready;
  for (std::size_t p = 0; p < n; ++p)
    if (pending[p] == 0) ready.push_back(p);

  while (order.size() < n) {
    if (ready.empty()) {
      // Cycle: release the start place first, then places already fed by an
      // ordered place, then anything.
      std::optional<std::size_t> pick;
      for (auto s : net.initial_marking)
        if (!placed[s]) pick = s;
      if (!pick) {
        for (std::size_t p = 0; p < n; ++p) {
          if (placed[p]) continue;
          const bool fed = std::ranges::any_of(predecessors[p], [&](auto q) { return placed[q]; });
          if (fed && (!pick || by_name(p, *pick))) pick = p;
        }
      }
      if (!pick)
        for (std::size_t p = 0; p < n; ++p)
          if (!placed[p] && (!pick || by_name(p, *pick))) pick = p;
      ready.push_back(*pick);
    }
    const auto next_it = std::ranges::min_element(ready, by_name);
    const auto p = *next_it;
    ready.erase(next_it);
    if (placed[p]) continue;
    placed[p] = true;
    order.push_back(p);
    for (auto s : successors[p]) {
      if (placed[s] || pending[s] == 0) continue;
      if (--pending[s] == 0) ready.push_back(s);
    }
  }
  return order;
}

} // namespace

EncodedNet encode(const PetriNet& net) {
  net.check_structure();
  const auto p = net.places.size();
  if (p > max_places_per_word)
    throw ValidationError("net has " + std::to_string(p) +
                          " places; a single marking word holds at most 64 (multi-word packing would be required)");

  for (std::size_t t = 0; t < net.transitions.size(); ++t) {
    if (!net.transitions[t].silent()) continue;
    for (auto place : net.transitions[t].consume)
      if (net.consumers(place).size() != 1)
        throw ValidationError("silent transition '" + net.transitions[t].name + "' competes for place '" +
                              net.places[place].name + "' with another transition");
  }

  const auto order = place_order(net);
  std::vector<std::size_t> bit_of(p);
  EncodedNet out;
  out.process = net.process;
  out.participants = net.participants;
  for (std::size_t bit = 0; bit < order.size(); ++bit) {
    bit_of[order[bit]] = bit;
    out.place_names.push_back(net.places[order[bit]].name);
    if (net.places[order[bit]].end) out.end_places |= Mask{1} << bit;
  }
  auto mask_of = [&](const std::vector<std::size_t>& places) {
    Mask m = 0;
    for (auto place : places) m |= Mask{1} << bit_of[place];
    return m;
  };

  std::vector<const Transition*> visible;
  for (const auto& t : net.transitions)
    if (!t.silent()) visible.push_back(&t);
  std::ranges::sort(visible, {}, [](const Transition* t) { return t->label->task; });
  for (std::size_t id = 0; id < visible.size(); ++id) {
    if (id > 0 && visible[id]->label->task == visible[id - 1]->label->task)
      throw ValidationError("task '" + visible[id]->label->task + "' labels more than one transition");
    out.tasks.push_back(visible[id]->label->task);
    out.task_initiators.push_back(visible[id]->label->initiator);
    out.transitions.push_back({visible[id]->name, mask_of(visible[id]->consume), mask_of(visible[id]->produce), id});
  }
  for (const auto& t : net.transitions)
    if (t.silent()) out.transitions.push_back({t.name, mask_of(t.consume), mask_of(t.produce), std::nullopt});

  out.initial.value = mask_of(net.initial_marking);
  return out;
}

bool enabled(Marking m, const EncodedTransition& t) { return (m.value & t.consume) == t.consume; }

Marking fire(Marking m, const EncodedTransition& t) {
  if (!enabled(m, t)) throw ValidationError("transition '" + t.name + "' is not enabled");
  return Marking{(m.value & ~t.consume) | t.produce};
}

Marking settle(const EncodedNet& net, Marking m) {
  std::size_t fired = 0;
  for (bool progress = true; progress;) {
    progress = false;
    for (const auto& t : net.transitions) {
      if (t.task || !enabled(m, t)) continue;
      m = fire(m, t);
      progress = true;
      if (++fired > net.transitions.size())
        throw ValidationError("silent transitions of '" + net.process + "' do not quiesce");
    }
  }
  return m;
}

Marking start_marking(const EncodedNet& net) { return settle(net, net.initial); }

ReplayVerdict replay_oracle(const EncodedNet& net, std::span<const TraceEvent> trace) {
  Marking m = start_marking(net);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto id = net.task_id(trace[i].task);
    if (!id || net.task_initiators[*id] != trace[i].role) return {false, i};
    const auto& t = net.task_transition(*id);
    if (!enabled(m, t)) return {false, i};
    m = settle(net, fire(m, t));
  }
  return {net.is_final(m), trace.size()};
}

InstanceLayout layout(std::size_t places, std::size_t max_instances) {
  if (places == 0) throw std::invalid_argument("layout needs at least one place");
  if (max_instances == 0) throw std::invalid_argument("layout needs at least one instance");
  return InstanceLayout{places, 1 + (places - 1) / 8, max_instances, std::nullopt};
}

} // namespace chor2teal::net
