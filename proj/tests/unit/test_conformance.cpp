#include <doctest.h>

#include <algorithm>

#include "chor2teal/conformance.hpp"
#include "chor2teal/pipeline.hpp"
#include "models.hpp"

using namespace chor2teal;
using namespace chor2teal::test;

TEST_CASE("xes parsing") {
  const auto log = conformance::parse_xes(R"(<?xml version="1.0"?>
<log xes.version="1.0" xmlns="http://www.xes-standard.org/">
  <string key="concept:name" value="demo"/>
  <trace>
    <string key="concept:name" value="c1"/>
    <event><string key="concept:name" value="Ping"/><string key="org:role" value="Alice"/><date key="time:timestamp" value="2020-01-01T00:00:00"/></event>
  </trace>
</log>)");
  CHECK(log.name == "demo");
  REQUIRE(log.cases.size() == 1);
  CHECK(log.cases[0].id == "c1");
  CHECK(log.cases[0].events == net::Trace{{"Ping", "Alice"}});

  CHECK_THROWS_AS(conformance::parse_xes("<log><trace><event><string key=\"concept:name\" value=\"x\"/></event></trace></log>"),
                  ParseError);
  CHECK_THROWS_AS(conformance::parse_xes("<nolog/>"), ParseError);
  CHECK_THROWS_AS(conformance::parse_xes("<log"), ParseError);
}

TEST_CASE("xes round trip and unknown tasks") {
  const auto p = load_process(fixture("incident_management.bpmn"));
  const auto traces = conformance::enumerate_conforming(p.encoded, 64).traces;
  auto log = conformance::make_log("IM & co", traces);
  CHECK(conformance::parse_xes(conformance::write_xes(log)) == log);
  CHECK(conformance::unknown_tasks(log, p.encoded).empty());
  CHECK_NOTHROW(conformance::check_log(log, p.encoded));
  log.cases[0].events.push_back({"Mystery", "Customer"});
  CHECK(conformance::unknown_tasks(log, p.encoded) == std::vector<std::string>{"Mystery"});
  CHECK_THROWS_AS(conformance::check_log(log, p.encoded), ValidationError);
}

TEST_CASE("conforming trace enumeration") {
  CHECK(conformance::enumerate_conforming(parse_process(minimal_model()).encoded, 10).traces.size() == 1);
  CHECK(conformance::enumerate_conforming(parse_process(parallel_model()).encoded, 10).traces.size() == 2);
  CHECK(conformance::enumerate_conforming(parse_process(choice_model()).encoded, 10).traces.size() == 2);
  const auto im = conformance::enumerate_conforming(load_process(fixture("incident_management.bpmn")).encoded, 64);
  const auto sc = conformance::enumerate_conforming(load_process(fixture("supply_chain.bpmn")).encoded, 64);
  CHECK(im.traces.size() == 4);
  CHECK(sc.traces.size() == 2);
  CHECK_FALSE(im.truncated);
  for (const auto& t : im.traces) CHECK(t.size() == 6);
  for (const auto& t : sc.traces) CHECK(t.size() == 10);
  const auto short_bound = conformance::enumerate_conforming(load_process(fixture("supply_chain.bpmn")).encoded, 5);
  CHECK(short_bound.truncated);
  CHECK(short_bound.traces.empty());
}

TEST_CASE("bounded draws stay in range and are reproducible") {
  std::mt19937_64 a(1), b(1);
  for (int i = 0; i < 1000; ++i) {
    const auto x = conformance::bounded(a, 7);
    CHECK(x < 7);
    CHECK(x == conformance::bounded(b, 7));
  }
  CHECK_THROWS_AS(conformance::bounded(a, 0), std::invalid_argument);
}

TEST_CASE("mutant generation") {
  const auto p = load_process(fixture("incident_management.bpmn"));
  const auto conforming = conformance::enumerate_conforming(p.encoded, 64).traces;
  conformance::FuzzConfig cfg;
  cfg.count = 300;
  cfg.seed = 11;
  const auto first = conformance::generate_nonconforming(conforming, p.encoded, cfg);
  CHECK(first.size() == 300);
  CHECK(first == conformance::generate_nonconforming(conforming, p.encoded, cfg));
  for (const auto& m : first) CHECK_FALSE(net::replay_oracle(p.encoded, m).accepted);
  cfg.seed = 12;
  CHECK(first != conformance::generate_nonconforming(conforming, p.encoded, cfg));

  SUBCASE("single operators") {
    for (std::size_t op = 0; op < 3; ++op) {
      conformance::FuzzConfig only;
      only.count = 50;
      only.weights = {0, 0, 0};
      only.weights[op] = 1;
      for (const auto& m : conformance::generate_nonconforming(conforming, p.encoded, only)) {
        const auto len = m.size();
        if (op == 0) CHECK(len == 7);
        if (op == 1) CHECK(len == 5);
        if (op == 2) CHECK(len == 6);
      }
    }
  }
  SUBCASE("invalid configurations") {
    conformance::FuzzConfig bad;
    bad.count = 0;
    CHECK_THROWS_AS(conformance::generate_nonconforming(conforming, p.encoded, bad), std::invalid_argument);
    bad.count = 1;
    bad.weights = {0, 0, 0};
    CHECK_THROWS_AS(conformance::generate_nonconforming(conforming, p.encoded, bad), std::invalid_argument);
    bad.weights = {-1, 1, 1};
    CHECK_THROWS_AS(conformance::generate_nonconforming(conforming, p.encoded, bad), std::invalid_argument);
  }
}

TEST_CASE("generation stalls when no mutation is possible") {
  const auto p = parse_process(minimal_model());
  const auto conforming = conformance::enumerate_conforming(p.encoded, 4).traces;
  conformance::FuzzConfig swap_only;
  swap_only.count = 1;
  swap_only.weights = {0, 0, 1};
  swap_only.attempts_per_mutant = 50;
  CHECK_THROWS_AS(conformance::generate_nonconforming(conforming, p.encoded, swap_only), conformance::GenerationStall);
}

TEST_CASE("simulator replay: fees, balances and a tampered sender") {
  const auto p = load_process(fixture("incident_management.bpmn"));
  const auto& e = p.encoded;
  const auto traces = conformance::enumerate_conforming(e, 64).traces;
  const auto unit = teal::emit(e, StorageVariant::uint_slot, net::layout(8, 1), teal::derive_bindings(e));
  const auto results = conformance::replay_on_sim(traces, unit);
  for (const auto& r : results) {
    CHECK(r.verdict.accepted);
    CHECK(r.cost.fees == 7'000);
    CHECK(r.cost.min_balance == 128'500);
    CHECK(r.cost.external_balance == 800'000);
    CHECK(r.cost.transactions == 7);
  }
  auto tampered = traces[0];
  std::swap(tampered[0].role, tampered[1].role);
  const auto bad = conformance::replay_case(tampered, unit);
  CHECK_FALSE(bad.verdict.accepted);
  CHECK(bad.verdict.rejected_event == 0);
  CHECK(bad.cost.fees == 1'000);
}
