#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "chor2teal/petri_net.hpp"

namespace chor2teal::bpmn {

enum class NodeKind {
  start_event,
  end_event,
  task,
  exclusive_gateway,
  parallel_gateway,
  event_based_gateway,
};

std::string_view to_string(NodeKind kind);

struct Node {
  std::string id;
  NodeKind kind = NodeKind::task;
  std::string name;      // task name; empty for events and gateways
  std::string initiator; // participant name (tasks only)
  std::string recipient; // participant name (tasks only)

  bool operator==(const Node&) const = default;
};

struct Flow {
  std::string id;
  std::string source;
  std::string target;

  bool operator==(const Flow&) const = default;
};

// A BPMN 2.0 choreography reduced to its control flow. Node and flow order
// follows the document.
struct ChoreographyGraph {
  std::string id;
  std::vector<std::string> participants;
  std::vector<Node> nodes;
  std::vector<Flow> flows;

  const Node* find(std::string_view node_id) const;
  std::vector<const Flow*> incoming(std::string_view node_id) const;
  std::vector<const Flow*> outgoing(std::string_view node_id) const;
  std::vector<const Node*> tasks() const;

  // Throws ValidationError naming the offending element.
  void validate() const;

  bool operator==(const ChoreographyGraph&) const = default;
};

// Throws ParseError for malformed XML and unsupported elements, and
// ValidationError when the resulting graph breaks an invariant.
ChoreographyGraph parse_choreography(std::string_view xml);
ChoreographyGraph load_choreography(const std::filesystem::path& path);

// Tasks become visible transitions, exclusive and event-based gateways become
// shared places, parallel gateways become silent transitions. Start and end
// events get dedicated source and sink places.
PetriNet to_petri_net(const ChoreographyGraph& graph);

} // namespace chor2teal::bpmn
