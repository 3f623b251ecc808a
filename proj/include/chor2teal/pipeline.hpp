#pragma once

#include <filesystem>
#include <string_view>

#include "chor2teal/choreography.hpp"
#include "chor2teal/net_ir.hpp"
#include "chor2teal/petri_net.hpp"

namespace chor2teal {

struct Process {
  bpmn::ChoreographyGraph graph;
  PetriNet petri;   // direct translation
  PetriNet reduced; // after silent-transition fusion
  net::SafetyReport safety;
  net::EncodedNet encoded;
};

// Parse, translate, reduce, check 1-safety, encode. Throws ValidationError
// when the reduced net is not 1-safe.
Process build_process(const bpmn::ChoreographyGraph& graph);
Process parse_process(std::string_view bpmn_xml);
Process load_process(const std::filesystem::path& bpmn_path);

} // namespace chor2teal
