#include "chor2teal/pipeline.hpp"

#include "chor2teal/errors.hpp"

namespace chor2teal {

Process build_process(const bpmn::ChoreographyGraph& graph) {
  Process p;
  p.graph = graph;
  p.petri = bpmn::to_petri_net(graph);
  p.reduced = net::reduce(p.petri);
  p.safety = net::validate_one_safe(p.reduced);
  if (!p.safety.ok()) {
    std::string marking;
    const auto& counts = *p.safety.counterexample;
    for (std::size_t i = 0; i < counts.size(); ++i)
      if (counts[i] != 0) marking += (marking.empty() ? "" : ", ") + p.reduced.places[i].name + "=" + std::to_string(counts[i]);
    throw ValidationError("net of '" + graph.id + "' is not 1-safe; reachable marking {" + marking + "}");
  }
  p.encoded = net::encode(p.reduced);
  return p;
}

Process parse_process(std::string_view bpmn_xml) { return build_process(bpmn::parse_choreography(bpmn_xml)); }

Process load_process(const std::filesystem::path& bpmn_path) {
  return build_process(bpmn::load_choreography(bpmn_path));
}

} // namespace chor2teal
