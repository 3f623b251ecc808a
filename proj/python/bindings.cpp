#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "chor2teal/conformance.hpp"
#include "chor2teal/cost_model.hpp"
#include "chor2teal/errors.hpp"
#include "chor2teal/pipeline.hpp"
#include "chor2teal/report.hpp"
#include "chor2teal/teal_backend.hpp"

namespace py = pybind11;
using namespace chor2teal;

namespace {

net::Trace to_trace(const std::vector<std::pair<std::string, std::string>>& events) {
  net::Trace trace;
  for (const auto& [task, role] : events) trace.push_back({task, role});
  return trace;
}

std::vector<std::pair<std::string, std::string>> from_trace(const net::Trace& trace) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : trace) out.emplace_back(e.task, e.role);
  return out;
}

teal::RoleBindings bindings_for(const Process& p, const std::optional<std::string>& json_text) {
  return json_text ? teal::parse_bindings(*json_text) : teal::derive_bindings(p.encoded);
}

teal::CompilationUnit compile(const Process& p, const std::string& variant, std::size_t instances,
                              const std::optional<std::string>& bindings) {
  return teal::emit(p.encoded, parse_storage_variant(variant), net::layout(p.encoded.place_count(), instances),
                    bindings_for(p, bindings));
}

py::dict case_dict(const conformance::CaseResult& r) {
  py::dict d;
  d["accepted"] = r.verdict.accepted;
  d["rejected_event"] = r.verdict.rejected_event;
  d["reason"] = r.verdict.reason;
  d["fees"] = r.cost.fees;
  d["min_balance"] = r.cost.min_balance;
  d["external_balance"] = r.cost.external_balance;
  d["call_opcode_costs"] = r.cost.call_opcode_costs;
  d["create_opcode_cost"] = r.cost.create_opcode_cost;
  d["transactions"] = r.cost.transactions;
  return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "BPMN choreography to TEAL compiler and Algorand cost model";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<EmissionError>(m, "EmissionError", base.ptr());
  py::register_exception<SimulationError>(m, "SimulationError", base.ptr());

  py::class_<Process>(m, "Process")
      .def_static("parse", &parse_process, py::arg("xml"))
      .def_static("load", [](const std::string& path) { return load_process(path); }, py::arg("path"))
      .def_property_readonly("name", [](const Process& p) { return p.encoded.process; })
      .def_property_readonly("tasks", [](const Process& p) { return p.encoded.tasks; })
      .def_property_readonly("participants", [](const Process& p) { return p.encoded.participants; })
      .def_property_readonly("places", [](const Process& p) { return p.encoded.place_count(); })
      .def_property_readonly("roles", [](const Process& p) { return p.encoded.roles(); })
      .def(
          "replay",
          [](const Process& p, const std::vector<std::pair<std::string, std::string>>& events) {
            const auto trace = to_trace(events);
            const auto v = net::replay_oracle(p.encoded, trace);
            return std::make_pair(v.accepted, v.position);
          },
          py::arg("trace"))
      .def(
          "conforming_traces",
          [](const Process& p, std::size_t bound) {
            std::vector<std::vector<std::pair<std::string, std::string>>> out;
            for (const auto& t : conformance::enumerate_conforming(p.encoded, bound).traces)
              out.push_back(from_trace(t));
            return out;
          },
          py::arg("length_bound") = 64);

  m.def(
      "compile",
      [](const Process& p, const std::string& variant, std::size_t instances, const std::optional<std::string>& bindings) {
        const auto unit = compile(p, variant, instances, bindings);
        py::dict d;
        d["approval"] = unit.approval_source;
        d["clear"] = unit.clear_source;
        d["approval_size"] = unit.approval_size;
        d["manifest"] = teal::manifest(unit).dump();
        return d;
      },
      py::arg("process"), py::arg("variant") = "uint", py::arg("instances") = 1, py::arg("bindings") = py::none());

  m.def(
      "simulate",
      [](const Process& p, const std::vector<std::pair<std::string, std::string>>& events, const std::string& variant,
         std::size_t instances, std::uint64_t instance, double congestion) {
        const auto unit = compile(p, variant, instances, std::nullopt);
        conformance::SimSetup setup;
        setup.instance = instance;
        setup.congestion = congestion;
        return case_dict(conformance::replay_case(to_trace(events), unit, setup));
      },
      py::arg("process"), py::arg("trace"), py::arg("variant") = "uint", py::arg("instances") = 1,
      py::arg("instance") = 0, py::arg("congestion") = 0.0);

  m.def(
      "bench",
      [](const Process& p, std::size_t count, std::uint64_t seed) {
        report::BenchConfig cfg;
        cfg.fuzz.count = count;
        cfg.fuzz.seed = seed;
        return report::to_json(report::bench(p, teal::derive_bindings(p.encoded), cfg)).dump();
      },
      py::arg("process"), py::arg("count") = 2000, py::arg("seed") = 0);

  m.def(
      "min_balance_total",
      [](std::uint64_t accounts, std::uint64_t applications, const std::vector<std::pair<std::string, std::uint64_t>>& storage,
         std::uint64_t extra_pages) {
        cost::BalanceQuery q{accounts, applications, {}, extra_pages};
        for (const auto& [system, bytes] : storage) q.storage.push_back({parse_storage_variant(system), bytes});
        return cost::min_balance_total(q);
      },
      py::arg("accounts") = 0, py::arg("applications") = 0, py::arg("storage") = std::vector<std::pair<std::string, std::uint64_t>>{},
      py::arg("extra_pages") = 0);
  m.def(
      "min_balance_storage",
      [](const std::string& system, std::uint64_t bytes) {
        return cost::min_balance_storage(parse_storage_variant(system), bytes);
      },
      py::arg("system"), py::arg("bytes"));
  m.def("alg_opcode_cost", &cost::alg_opcode_cost, py::arg("tx_cost"), py::arg("opcodes"));
  m.def(
      "multi_instance_curve",
      [](const std::string& variant, std::uint64_t k, std::uint64_t first, std::uint64_t last) {
        std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
        for (const auto& p : cost::multi_instance_curve(parse_storage_variant(variant), k, first, last))
          out.emplace_back(p.instances, p.min_balance);
        return out;
      },
      py::arg("variant"), py::arg("k"), py::arg("first"), py::arg("last"));
  m.def(
      "crossovers",
      [](std::uint64_t first, std::uint64_t last) {
        std::vector<std::tuple<std::uint64_t, std::string, std::string>> out;
        for (const auto& x : cost::storage_crossover(first, last).crossovers)
          out.emplace_back(x.bytes, std::string(to_string(x.from)), std::string(to_string(x.to)));
        return out;
      },
      py::arg("first") = 1, py::arg("last") = 1024);
}
