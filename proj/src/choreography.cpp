#include "chor2teal/choreography.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "chor2teal/errors.hpp"
#include "xml.hpp"

namespace chor2teal::bpmn {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
  case NodeKind::start_event: return "startEvent";
  case NodeKind::end_event: return "endEvent";
  case NodeKind::task: return "choreographyTask";
  case NodeKind::exclusive_gateway: return "exclusiveGateway";
  case NodeKind::parallel_gateway: return "parallelGateway";
  case NodeKind::event_based_gateway: return "eventBasedGateway";
  }
  return "?";
}

const Node* ChoreographyGraph::find(std::string_view node_id) const {
  for (const auto& n : nodes)
    if (n.id == node_id) return &n;
  return nullptr;
}

std::vector<const Flow*> ChoreographyGraph::incoming(std::string_view node_id) const {
  std::vector<const Flow*> out;
  for (const auto& f : flows)
    if (f.target == node_id) out.push_back(&f);
  return out;
}

std::vector<const Flow*> ChoreographyGraph::outgoing(std::string_view node_id) const {
  std::vector<const Flow*> out;
  for (const auto& f : flows)
    if (f.source == node_id) out.push_back(&f);
  return out;
}

std::vector<const Node*> ChoreographyGraph::tasks() const {
  std::vector<const Node*> out;
  for (const auto& n : nodes)
    if (n.kind == NodeKind::task) out.push_back(&n);
  return out;
}

void ChoreographyGraph::validate() const {
  std::set<std::string> ids;
  for (const auto& n : nodes)
    if (!ids.insert(n.id).second) throw ValidationError("duplicate element id '" + n.id + "'");
  for (const auto& f : flows)
    if (!ids.insert(f.id).second) throw ValidationError("duplicate element id '" + f.id + "'");

  std::vector<const Node*> starts;
  std::size_t ends = 0;
  for (const auto& n : nodes) {
    if (n.kind == NodeKind::start_event) starts.push_back(&n);
    if (n.kind == NodeKind::end_event) ++ends;
  }
  if (starts.empty()) throw ValidationError("choreography '" + id + "' has no start event");
  if (starts.size() > 1)
    throw ValidationError("choreography '" + id + "' has multiple start events (second: '" + starts[1]->id + "')");
  if (ends == 0) throw ValidationError("choreography '" + id + "' has no end event");

  for (const auto& f : flows) {
    if (!find(f.source)) throw ValidationError("sequence flow '" + f.id + "' references missing source '" + f.source + "'");
    if (!find(f.target)) throw ValidationError("sequence flow '" + f.id + "' references missing target '" + f.target + "'");
  }

  const std::set<std::string> roles(participants.begin(), participants.end());
  std::set<std::string> task_names;
  for (const auto* t : tasks()) {
    if (!roles.contains(t->initiator))
      throw ValidationError("task '" + t->id + "' initiator '" + t->initiator + "' is not a participant");
    if (!roles.contains(t->recipient))
      throw ValidationError("task '" + t->id + "' recipient '" + t->recipient + "' is not a participant");
    if (!task_names.insert(t->name).second)
      throw ValidationError("task name '" + t->name + "' is used by more than one task (id '" + t->id + "')");
  }

  std::set<std::string> seen{starts.front()->id};
  std::vector<std::string> frontier{starts.front()->id};
  while (!frontier.empty()) {
    const auto current = frontier.back();
    frontier.pop_back();
    for (const auto* f : outgoing(current))
      if (seen.insert(f->target).second) frontier.push_back(f->target);
  }
  for (const auto& n : nodes)
    if (!seen.contains(n.id)) throw ValidationError("element '" + n.id + "' is not reachable from the start event");
}

namespace {

using xml::Tree;

const std::set<std::string_view> ignored_choreography_children = {
    "messageFlow", "documentation", "extensionElements", "textAnnotation", "association", "correlationKey",
};

const std::set<std::string_view> ignored_flow_node_children = {
    "incoming", "outgoing", "documentation", "extensionElements", "participantRef", "messageFlowRef",
};

std::string element_id(const Tree& node) { return xml::attribute(node, "id").value_or("<no id>"); }

void reject_unknown_children(const Tree& node, std::string_view owner) {
  for (const auto& [tag, child] : node) {
    if (xml::is_meta(tag)) continue;
    const auto local = xml::local_name(tag);
    if (!ignored_flow_node_children.contains(local))
      throw ParseError("unsupported element <" + std::string(local) + "> inside '" + std::string(owner) + "'");
  }
}

std::string required_attribute(const Tree& node, const std::string& name, std::string_view tag) {
  auto value = xml::attribute(node, name);
  if (!value || value->empty())
    throw ParseError("<" + std::string(tag) + "> '" + element_id(node) + "' is missing attribute '" + name + "'");
  return *value;
}

const Tree* find_choreography(const Tree& root) {
  for (const auto& [tag, top] : root) {
    if (xml::local_name(tag) == "choreography") return &top;
    if (xml::local_name(tag) != "definitions") continue;
    for (const auto& [child_tag, child] : top)
      if (xml::local_name(child_tag) == "choreography") return &child;
  }
  return nullptr;
}

} // namespace

ChoreographyGraph parse_choreography(std::string_view text) {
  const Tree root = xml::parse(text, "BPMN");
  const Tree* chor = find_choreography(root);
  if (!chor) throw ParseError("document contains no <choreography> element");

  ChoreographyGraph graph;
  graph.id = xml::attribute(*chor, "id").value_or("choreography");

  std::map<std::string, std::string> participant_names;
  for (const auto& [tag, child] : *chor) {
    if (xml::local_name(tag) != "participant") continue;
    const auto pid = required_attribute(child, "id", "participant");
    const auto name = xml::attribute(child, "name").value_or(pid);
    participant_names[pid] = name;
    graph.participants.push_back(name);
  }
  auto role_of = [&](const std::string& ref) {
    auto it = participant_names.find(ref);
    return it == participant_names.end() ? ref : it->second;
  };

  for (const auto& [tag, child] : *chor) {
    if (xml::is_meta(tag)) continue;
    const auto local = xml::local_name(tag);
    if (local == "participant" || ignored_choreography_children.contains(local)) continue;

    if (local == "sequenceFlow") {
      graph.flows.push_back(Flow{required_attribute(child, "id", local), required_attribute(child, "sourceRef", local),
                                 required_attribute(child, "targetRef", local)});
      continue;
    }

    Node node;
    node.id = required_attribute(child, "id", local);
    if (local == "startEvent") {
      node.kind = NodeKind::start_event;
    } else if (local == "endEvent") {
      node.kind = NodeKind::end_event;
    } else if (local == "exclusiveGateway") {
      node.kind = NodeKind::exclusive_gateway;
    } else if (local == "parallelGateway") {
      node.kind = NodeKind::parallel_gateway;
    } else if (local == "eventBasedGateway") {
      node.kind = NodeKind::event_based_gateway;
    } else if (local == "choreographyTask") {
      node.kind = NodeKind::task;
      node.name = required_attribute(child, "name", local);
      const auto initiator_ref = required_attribute(child, "initiatingParticipantRef", local);
      node.initiator = role_of(initiator_ref);
      node.recipient = node.initiator;
      for (const auto& [ref_tag, ref] : child) {
        if (xml::local_name(ref_tag) != "participantRef") continue;
        const auto ref_id = ref.get_value<std::string>();
        if (ref_id != initiator_ref) node.recipient = role_of(ref_id);
      }
    } else {
      throw ParseError("unsupported element <" + std::string(local) + "> (id '" + element_id(child) + "')");
    }
    reject_unknown_children(child, node.id);
    graph.nodes.push_back(std::move(node));
  }

  graph.validate();
  return graph;
}

ChoreographyGraph load_choreography(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open BPMN file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_choreography(buffer.str());
}

namespace {

bool is_choice(NodeKind kind) {
  return kind == NodeKind::exclusive_gateway || kind == NodeKind::event_based_gateway;
}

class NetBuilder {
public:
  std::size_t add_place(std::string name, bool end = false) {
    places_.push_back(Place{std::move(name), end});
    parent_.push_back(parent_.size());
    return places_.size() - 1;
  }

  std::size_t find(std::size_t p) {
    while (parent_[p] != p) p = parent_[p] = parent_[parent_[p]];
    return p;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

  void add_transition(std::string name, std::vector<std::size_t> consume, std::vector<std::size_t> produce,
                      std::optional<TaskLabel> label = std::nullopt) {
    raw_.push_back(Transition{std::move(name), std::move(consume), std::move(produce), std::move(label)});
  }

  PetriNet finish(std::string process, std::vector<std::string> participants, std::size_t start) {
    std::vector<std::size_t> remap(places_.size(), SIZE_MAX);
    PetriNet net;
    net.process = std::move(process);
    net.participants = std::move(participants);
    for (std::size_t p = 0; p < places_.size(); ++p) {
      if (find(p) != p) continue;
      remap[p] = net.places.size();
      net.places.push_back(places_[p]);
    }
    auto translate = [&](const std::vector<std::size_t>& arcs, const std::string& owner) {
      std::vector<std::size_t> out;
      for (auto p : arcs) out.push_back(remap[find(p)]);
      std::ranges::sort(out);
      if (std::ranges::adjacent_find(out) != out.end())
        throw ValidationError("unsupported gateway configuration: '" + owner +
                              "' would place two arcs on the same place");
      return out;
    };
    for (auto& t : raw_) {
      t.consume = translate(t.consume, t.name);
      t.produce = translate(t.produce, t.name);
      net.transitions.push_back(std::move(t));
    }
    net.initial_marking = {remap[find(start)]};
    return net;
  }

private:
  std::vector<Place> places_;
  std::vector<std::size_t> parent_;
  std::vector<Transition> raw_;
};

} // namespace

PetriNet to_petri_net(const ChoreographyGraph& graph) {
  graph.validate();

  for (const auto& n : graph.nodes) {
    const auto in = graph.incoming(n.id).size();
    const auto out = graph.outgoing(n.id).size();
    switch (n.kind) {
    case NodeKind::start_event:
      if (in != 0 || out != 1) throw ValidationError("start event '" + n.id + "' must have exactly one outgoing flow");
      break;
    case NodeKind::end_event:
      if (in == 0 || out != 0) throw ValidationError("end event '" + n.id + "' must have incoming and no outgoing flows");
      break;
    case NodeKind::task:
      if (in != 1 || out != 1)
        throw ValidationError("task '" + n.id + "' must have exactly one incoming and one outgoing flow");
      break;
    default:
      if (in == 0 || out == 0)
        throw ValidationError("unsupported gateway configuration: '" + n.id + "' lacks incoming or outgoing flows");
      if (in > 1 && out > 1)
        throw ValidationError("unsupported gateway configuration: '" + n.id + "' both joins and splits");
      if (is_choice(n.kind) && out > 1) {
        for (const auto* f : graph.outgoing(n.id)) {
          const auto* target = graph.find(f->target);
          if (target->kind != NodeKind::task && !is_choice(target->kind))
            throw ValidationError("unsupported gateway configuration: choice '" + n.id + "' branches into " +
                                  std::string(to_string(target->kind)) + " '" + target->id + "'");
        }
      }
    }
  }

  NetBuilder builder;
  std::map<std::string, std::size_t> gateway_place;
  for (const auto& n : graph.nodes)
    if (is_choice(n.kind)) gateway_place[n.id] = builder.add_place(n.id);

  std::map<std::string, std::size_t> flow_place;
  for (const auto& f : graph.flows) {
    const auto* source = graph.find(f.source);
    flow_place[f.id] = is_choice(source->kind) ? gateway_place.at(source->id) : builder.add_place(f.id);
  }

  std::size_t start_place = 0;
  for (const auto& n : graph.nodes) {
    const auto in = graph.incoming(n.id);
    const auto out = graph.outgoing(n.id);
    switch (n.kind) {
    case NodeKind::start_event:
      start_place = builder.add_place(n.id);
      builder.add_transition("tau:" + n.id, {start_place}, {flow_place.at(out.front()->id)});
      break;
    case NodeKind::end_event: {
      const auto sink = builder.add_place(n.id, true);
      for (const auto* f : in) builder.add_transition("tau:" + f->id, {flow_place.at(f->id)}, {sink});
      break;
    }
    case NodeKind::task:
      builder.add_transition(n.id, {flow_place.at(in.front()->id)}, {flow_place.at(out.front()->id)},
                             TaskLabel{n.name, n.initiator});
      break;
    case NodeKind::exclusive_gateway:
    case NodeKind::event_based_gateway:
      for (const auto* f : in) {
        if (is_choice(graph.find(f->source)->kind))
          builder.unite(flow_place.at(f->id), gateway_place.at(n.id));
        else
          builder.add_transition("tau:" + f->id, {flow_place.at(f->id)}, {gateway_place.at(n.id)});
      }
      break;
    case NodeKind::parallel_gateway: {
      std::vector<std::size_t> consume, produce;
      for (const auto* f : in) consume.push_back(flow_place.at(f->id));
      for (const auto* f : out) produce.push_back(flow_place.at(f->id));
      builder.add_transition("tau:" + n.id, std::move(consume), std::move(produce));
      break;
    }
    }
  }

  PetriNet net = builder.finish(graph.id, graph.participants, start_place);
  net.check_structure();
  return net;
}

} // namespace chor2teal::bpmn
