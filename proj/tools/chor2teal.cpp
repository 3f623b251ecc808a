#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "chor2teal/conformance.hpp"
#include "chor2teal/cost_model.hpp"
#include "chor2teal/errors.hpp"
#include "chor2teal/pipeline.hpp"
#include "chor2teal/report.hpp"
#include "chor2teal/teal_backend.hpp"

namespace fs = std::filesystem;
using namespace chor2teal;

namespace {

enum Exit { ok = 0, other = 1, usage = 2, parse = 3, validation = 4, emission = 5, simulation = 6 };

struct Options {
  std::vector<std::string> inputs;
  std::string variant = "uint";
  bool all_variants = false;
  std::size_t instances = 1;
  std::uint64_t seed = 0;
  std::size_t count = 2000;
  double congestion = 0.0;
  std::string rates;
  std::string bindings;
  std::string xes;
  std::string out = "out";
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  spdlog::info("wrote {}", path.string());
}

teal::RoleBindings bindings_for(const Options& o, const net::EncodedNet& net) {
  auto bindings = teal::derive_bindings(net);
  if (o.bindings.empty()) return bindings;
  return teal::parse_bindings(read_file(o.bindings));
}

int cmd_compile(const Options& o) {
  const auto process = load_process(o.inputs.front());
  const auto variant = parse_storage_variant(o.variant);
  const auto unit = teal::emit(process.encoded, variant, net::layout(process.encoded.place_count(), o.instances),
                               bindings_for(o, process.encoded));
  teal::write_unit(unit, o.out);
  std::cout << process.encoded.process << ": " << to_string(variant) << ", p=" << process.encoded.place_count()
            << ", k=" << unit.layout.bytes_per_instance << ", approval " << unit.approval_size << " bytes -> "
            << o.out << "\n";
  return ok;
}

int cmd_bench(const Options& o) {
  report::BenchConfig config;
  if (!o.all_variants) config.variants = {parse_storage_variant(o.variant)};
  config.instances = o.instances;
  config.fuzz.count = o.count;
  config.fuzz.seed = o.seed;
  config.sim.congestion = o.congestion;
  const auto rates = o.rates.empty() ? cost::default_exchange_table() : cost::parse_exchange_table(read_file(o.rates));

  std::vector<report::VariantSummary> rows;
  nlohmann::json doc{{"processes", nlohmann::json::array()}, {"seed", o.seed}, {"congestion", o.congestion}};
  std::size_t disagreements = 0;
  for (const auto& input : o.inputs) {
    const auto process = load_process(input);
    const auto& net = process.encoded;
    spdlog::info("{}: p={}, {} tasks", net.process, net.place_count(), net.tasks.size());
    const auto result = report::bench(process, bindings_for(o, net), config);
    disagreements += result.disagreements.size();
    rows.insert(rows.end(), result.rows.begin(), result.rows.end());
    doc["processes"].push_back(report::to_json(result));
    write_file(fs::path(o.out) / (net.process + "_conforming.xes"),
               conformance::write_xes(conformance::make_log(net.process, result.conforming)));

    for (const auto& row : result.rows) {
      if (row.variant != StorageVariant::uint_slot || row.accepted_cases == 0) continue;
      const auto fiat = cost::fiat_comparison(cost::reference_evm_gas, static_cast<std::uint64_t>(row.avg_fee_per_case),
                                              row.min_balance_per_case + row.external_balance, rates);
      write_file(fs::path(o.out) / ("table3_" + net.process + ".csv"), report::fiat_csv(fiat, rates));
    }
    for (const auto& row : result.rows)
      std::cout << fmt::format("{:<22} {:<4} p={:<2} cases={}/{} opcodes/tx={:.1f} (max {}) fee/case={:.0f} "
                               "mb/case={} external={}\n",
                               row.process, to_string(row.variant), row.places, row.accepted_cases, row.cases,
                               row.avg_opcodes_per_call, row.max_opcodes_per_call, row.avg_fee_per_case,
                               row.min_balance_per_case, row.external_balance);
    std::cout << fmt::format("{:<22} {} conforming, {} mutants, {} disagreements\n", net.process,
                             result.conforming.size(), result.mutants.size(), result.disagreements.size());
  }
  write_file(fs::path(o.out) / "table2.csv", report::table2_csv(rows));
  write_file(fs::path(o.out) / "crossover.csv", report::crossover_csv(cost::storage_crossover(1, 1024)));
  write_file(fs::path(o.out) / "multi_instance.csv", report::multi_instance_csv(1, 64));
  write_file(fs::path(o.out) / "report.json", doc.dump(2) + "\n");
  return disagreements == 0 ? ok : simulation;
}

int cmd_replay(const Options& o) {
  const auto process = load_process(o.inputs.front());
  const auto& net = process.encoded;
  const auto log = conformance::load_xes(o.xes);
  const auto unknown = conformance::unknown_tasks(log, net);
  for (const auto& task : unknown) spdlog::warn("unknown task '{}' in {}", task, o.xes);
  const auto variant = parse_storage_variant(o.variant);
  const auto unit = teal::emit(net, variant, net::layout(net.place_count(), o.instances), bindings_for(o, net));

  nlohmann::json verdicts = nlohmann::json::array();
  conformance::SimSetup setup;
  setup.congestion = o.congestion;
  std::size_t disagreements = 0;
  for (const auto& c : log.cases) {
    const auto oracle = net::replay_oracle(net, c.events);
    const auto sim = conformance::replay_case(c.events, unit, setup);
    disagreements += oracle.accepted != sim.verdict.accepted;
    verdicts.push_back({{"case", c.id},
                        {"oracle", oracle.accepted},
                        {"oracle_position", oracle.position},
                        {"sim", sim.verdict.accepted},
                        {"sim_reason", sim.verdict.reason},
                        {"fees", sim.cost.fees},
                        {"opcode_costs", sim.cost.call_opcode_costs}});
    std::cout << fmt::format("{:<16} oracle={} sim={}{}\n", c.id, oracle.accepted ? "accept" : "reject",
                             sim.verdict.accepted ? "accept" : "reject",
                             sim.verdict.reason.empty() ? "" : "  (" + sim.verdict.reason + ")");
  }
  write_file(fs::path(o.out) / "verdicts.json", verdicts.dump(2) + "\n");
  return disagreements == 0 ? ok : simulation;
}

int cmd_fuzz(const Options& o) {
  const auto process = load_process(o.inputs.front());
  const auto& net = process.encoded;
  conformance::FuzzConfig config;
  config.count = o.count;
  config.seed = o.seed;
  const auto conforming = conformance::enumerate_conforming(net, 64).traces;
  const auto mutants = conformance::generate_nonconforming(conforming, net, config);
  write_file(fs::path(o.out) / (net.process + "_mutants.xes"),
             conformance::write_xes(conformance::make_log(net.process + " mutants", mutants)));
  std::cout << mutants.size() << " non-conforming traces from " << conforming.size() << " conforming\n";
  return ok;
}

Options load_config(const std::string& path) {
  Options o;
  try {
    const auto doc = nlohmann::json::parse(read_file(path));
    const auto base = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? p : (base / p).string(); };
    for (const auto& input : doc.at("inputs")) o.inputs.push_back(resolve(input.get<std::string>()));
    if (doc.contains("variant")) {
      const auto v = doc.at("variant").get<std::string>();
      if (v == "all") o.all_variants = true;
      else o.variant = v;
    } else {
      o.all_variants = true;
    }
    o.instances = doc.value("instances", o.instances);
    o.seed = doc.value("seed", o.seed);
    o.count = doc.value("count", o.count);
    o.congestion = doc.value("congestion", o.congestion);
    if (doc.contains("rates")) o.rates = resolve(doc.at("rates").get<std::string>());
    if (doc.contains("bindings")) o.bindings = resolve(doc.at("bindings").get<std::string>());
    o.out = resolve(doc.value("out", std::string("out")));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid run manifest " + path + ": " + e.what());
  }
  for (const auto& input : o.inputs)
    if (!fs::exists(input)) throw ParseError("run manifest input does not exist: " + input);
  parse_storage_variant(o.variant);
  return o;
}

void configure_logging() {
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("CHOR2TEAL_LOG")) spdlog::set_level(spdlog::level::from_str(level));
  spdlog::set_pattern("[%l] %v");
}

} // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Compile BPMN choreographies to TEAL contracts and measure their Algorand costs"};
  app.require_subcommand(1);
  Options o;
  std::string config_path;

  auto add_variant = [&](CLI::App* cmd) {
    cmd->add_option("--variant", o.variant, "Storage variant")->check(CLI::IsMember({"uint", "byte", "box"}));
    cmd->add_option("--instances", o.instances, "Parallel instances (C_n)")->check(CLI::PositiveNumber);
    cmd->add_option("--bindings", o.bindings, "JSON map of role to hex address")->check(CLI::ExistingFile);
  };

  auto* compile = app.add_subcommand("compile", "Emit approval/clear TEAL and a manifest");
  compile->add_option("bpmn", o.inputs, "Choreography file")->required()->check(CLI::ExistingFile)->expected(1);
  add_variant(compile);
  compile->add_option("--out", o.out, "Output directory");

  auto* bench = app.add_subcommand("bench", "Replay conforming and mutated traces and write cost reports");
  bench->add_option("bpmn", o.inputs, "Choreography files")->required()->check(CLI::ExistingFile);
  add_variant(bench);
  bench->add_flag("--all-variants", o.all_variants, "Benchmark uint, byte and box");
  bench->add_option("--seed", o.seed, "Mutation seed");
  bench->add_option("--count", o.count, "Mutants per process");
  bench->add_option("--congestion", o.congestion, "Fee per byte (f_alg)")->check(CLI::NonNegativeNumber);
  bench->add_option("--rates", o.rates, "Exchange-rate JSON")->check(CLI::ExistingFile);
  bench->add_option("--out", o.out, "Output directory");

  auto* replay = app.add_subcommand("replay", "Replay an XES log on the oracle and the simulator");
  replay->add_option("bpmn", o.inputs, "Choreography file")->required()->check(CLI::ExistingFile)->expected(1);
  replay->add_option("--xes", o.xes, "Event log")->required()->check(CLI::ExistingFile);
  add_variant(replay);
  replay->add_option("--congestion", o.congestion, "Fee per byte (f_alg)")->check(CLI::NonNegativeNumber);
  replay->add_option("--out", o.out, "Output directory");

  auto* fuzz = app.add_subcommand("fuzz", "Write non-conforming traces as XES");
  fuzz->add_option("bpmn", o.inputs, "Choreography file")->required()->check(CLI::ExistingFile)->expected(1);
  fuzz->add_option("--seed", o.seed, "Mutation seed");
  fuzz->add_option("--count", o.count, "Number of mutants")->check(CLI::PositiveNumber);
  fuzz->add_option("--out", o.out, "Output directory");

  auto* run = app.add_subcommand("run", "Benchmark from a JSON run manifest");
  run->add_option("--config", config_path, "Run manifest")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    if (*compile) return cmd_compile(o);
    if (*bench) return cmd_bench(o);
    if (*replay) return cmd_replay(o);
    if (*fuzz) return cmd_fuzz(o);
    if (*run) return cmd_bench(load_config(config_path));
  } catch (const ParseError& e) {
    spdlog::error("{}", e.what());
    return parse;
  } catch (const ValidationError& e) {
    spdlog::error("{}", e.what());
    return validation;
  } catch (const EmissionError& e) {
    spdlog::error("{}", e.what());
    return emission;
  } catch (const SimulationError& e) {
    spdlog::error("{}", e.what());
    return simulation;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return other;
  }
  return usage;
}
