// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <cmath>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "chor2teal/conformance.hpp"
#include "chor2teal/cost_model.hpp"
#include "chor2teal/ledger.hpp"
#include "chor2teal/pipeline.hpp"
#include "chor2teal/report.hpp"
#include "chor2teal/teal_backend.hpp"

using namespace chor2teal;

namespace {

constexpr StorageVariant variants[] = {StorageVariant::uint_slot, StorageVariant::byte_slot, StorageVariant::box};

struct Fixture {
  const char* file;
  const char* label;
  std::size_t participants;
  std::uint64_t fees[3];
};

const Fixture fixtures[] = {
    {"supply_chain.bpmn", "SC", 9, {11'000, 11'000, 12'000}},
    {"incident_management.bpmn", "IM", 8, {7'000, 7'000, 8'000}},
};

const std::uint64_t expected_mb[] = {128'500, 150'000, 206'100};

std::string fixture_path(const char* name) { return std::string(CHOR2TEAL_FIXTURES) + "/" + name; }

// Collects failures for one criterion.
class Check {
public:
  void expect(bool ok, const std::string& what) {
    ++total_;
    if (!ok && failures_.size() < 8) failures_.push_back(what);
    failed_ += !ok;
  }
  bool ok() const { return failed_ == 0; }
  std::string summary() const {
    std::string s = fmt::format("{} checks", total_);
    if (failed_ > 0) s += fmt::format(", {} failed", failed_);
    for (const auto& f : failures_) s += "\n      - " + f;
    return s;
  }

private:
  std::size_t total_ = 0, failed_ = 0;
  std::vector<std::string> failures_;
};

struct Loaded {
  Process process;
  std::vector<net::Trace> conforming;
};

const std::vector<Loaded>& loaded() {
  static const std::vector<Loaded> cache = [] {
    std::vector<Loaded> out;
    for (const auto& f : fixtures) {
      auto p = load_process(fixture_path(f.file));
      auto traces = conformance::enumerate_conforming(p.encoded, 64).traces;
      out.push_back({std::move(p), std::move(traces)});
    }
    return out;
  }();
  return cache;
}

teal::CompilationUnit compile(const Process& p, StorageVariant v, std::size_t instances = 1) {
  return teal::emit(p.encoded, v, net::layout(p.encoded.place_count(), instances), teal::derive_bindings(p.encoded));
}

// Contract minimum balance of one case as the cost model states it.
std::uint64_t modeled_case_mb(StorageVariant v, std::size_t k) {
  switch (v) {
  case StorageVariant::uint_slot: return cost::min_balance_total({0, 1, {{StorageVariant::uint_slot, 8}}, 0});
  case StorageVariant::byte_slot: return cost::min_balance_total({0, 1, {{StorageVariant::byte_slot, k}}, 0});
  case StorageVariant::box:
    return cost::min_balance_total({0, 1, {{StorageVariant::box, 1 + cost::box_bytes_for(1, k)}}, 0});
  }
  return 0;
}

std::string criterion_1(Check& c) {
  std::ostringstream detail;
  for (std::size_t f = 0; f < 2; ++f) {
    const auto& [process, conforming] = loaded()[f];
    const auto k = net::layout(process.encoded.place_count(), 1).bytes_per_instance;
    for (std::size_t v = 0; v < 3; ++v) {
      const auto model = modeled_case_mb(variants[v], k);
      const auto curve = cost::multi_instance_curve(variants[v], k, 1, 1).front().min_balance;
      const auto cases = conformance::replay_on_sim(conforming, compile(process, variants[v]));
      for (const auto& r : cases) {
        c.expect(r.cost.min_balance == model,
                 fmt::format("{} {} ledger {} != model {}", fixtures[f].label, to_string(variants[v]),
                             r.cost.min_balance, model));
      }
      c.expect(model == expected_mb[v], fmt::format("{} model {} != {}", to_string(variants[v]), model, expected_mb[v]));
      c.expect(curve == expected_mb[v], fmt::format("{} curve {} != {}", to_string(variants[v]), curve, expected_mb[v]));
      if (f == 0) detail << to_string(variants[v]) << "=" << model << " ";
    }
  }
  detail << "(model = ledger for SC and IM)";
  return detail.str();
}

std::string criterion_2(Check& c) {
  std::ostringstream detail;
  for (std::size_t f = 0; f < 2; ++f) {
    const auto& [process, conforming] = loaded()[f];
    detail << fixtures[f].label << ":";
    for (std::size_t v = 0; v < 3; ++v) {
      const auto cases = conformance::replay_on_sim(conforming, compile(process, variants[v]), {10'000'000, 0.0, 0});
      for (const auto& r : cases)
        c.expect(r.verdict.accepted && r.cost.fees == fixtures[f].fees[v],
                 fmt::format("{} {} fees {}", fixtures[f].label, to_string(variants[v]), r.cost.fees));
      detail << " " << cases.front().cost.fees;
    }
    detail << (f == 0 ? "; " : "");
  }
  return detail.str() + " malgo at f_alg=0";
}

std::string criterion_3(Check& c) {
  std::uint64_t external[2];
  for (std::size_t f = 0; f < 2; ++f) {
    const auto& [process, conforming] = loaded()[f];
    const auto r = conformance::replay_case(conforming.front(), compile(process, StorageVariant::uint_slot));
    external[f] = r.cost.external_balance;
    c.expect(process.encoded.participants.size() == fixtures[f].participants, "participant count");
    c.expect(external[f] == fixtures[f].participants * 100'000, fmt::format("external {}", external[f]));
  }
  const std::uint64_t published_tx = 11'000;
  const auto mb_row = cost::min_balance_total({8, 1, {{StorageVariant::uint_slot, 8}}, 0});
  const auto total = mb_row + published_tx;
  const double share = 100.0 * static_cast<double>(external[1]) / static_cast<double>(total);
  c.expect(mb_row == 928'500, fmt::format("mb row {}", mb_row));
  c.expect(total == 939'500, fmt::format("total {}", total));
  c.expect(std::abs(share - 85.0) <= 1.0, fmt::format("share {:.2f}%", share));
  const auto measured = mb_row + fixtures[1].fees[0];
  return fmt::format("SC {} / IM {} malgo; IM total {} = {} + {}; accounts {:.2f}% (measured fees: {} -> {:.2f}%)",
                     external[0], external[1], total, mb_row, published_tx, share, measured,
                     100.0 * static_cast<double>(external[1]) / static_cast<double>(measured));
}

std::vector<report::BenchResult>& bench_results() {
  static std::vector<report::BenchResult> results = [] {
    std::vector<report::BenchResult> out;
    report::BenchConfig cfg;
    cfg.fuzz.count = 2'000;
    cfg.fuzz.seed = 20'240'101;
    for (const auto& l : loaded()) out.push_back(report::bench(l.process, teal::derive_bindings(l.process.encoded), cfg));
    return out;
  }();
  return results;
}

std::string criterion_4(Check& c) {
  std::ostringstream detail;
  const std::size_t expected_traces[] = {2, 4};
  for (std::size_t f = 0; f < 2; ++f) {
    const auto& r = bench_results()[f];
    const auto& net = loaded()[f].process.encoded;
    c.expect(r.conforming.size() == expected_traces[f], fmt::format("{} traces {}", fixtures[f].label, r.conforming.size()));
    c.expect(r.mutants.size() == 2'000, fmt::format("{} mutants {}", fixtures[f].label, r.mutants.size()));
    c.expect(r.disagreements.empty(), fmt::format("{} disagreements {}", fixtures[f].label, r.disagreements.size()));
    for (const auto& t : r.conforming) c.expect(net::replay_oracle(net, t).accepted, "oracle rejects conforming");
    std::size_t oracle_rejects = 0;
    for (const auto& t : r.mutants) oracle_rejects += !net::replay_oracle(net, t).accepted;
    c.expect(oracle_rejects == r.mutants.size(), "oracle accepts a mutant");
    for (const auto& row : r.rows)
      c.expect(row.accepted_cases == row.cases && row.cases == expected_traces[f],
               fmt::format("{} {} sim accepted {}/{}", fixtures[f].label, to_string(row.variant), row.accepted_cases,
                           row.cases));
    detail << fmt::format("{}: {} conforming accepted, {} mutants rejected, {} checks, {} disagreements; ",
                          fixtures[f].label, r.conforming.size(), oracle_rejects, r.oracle_checks,
                          r.disagreements.size());
  }
  auto s = detail.str();
  return s.substr(0, s.size() - 2);
}

std::string repeat(const std::string& line, std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += line + "\n";
  return s;
}

std::string criterion_5(Check& c) {
  const std::uint64_t opcodes[] = {1, 700, 701, 1'400, 1'401};
  const std::uint64_t multiples[] = {1, 1, 2, 2, 3};
  std::string mapped;
  for (std::size_t i = 0; i < 5; ++i) {
    const auto fee = cost::alg_opcode_cost(1'000, opcodes[i]);
    c.expect(fee == multiples[i] * 1'000, fmt::format("{} opcodes -> {}", opcodes[i], fee));
    mapped += fmt::format("{}->{} ", opcodes[i], fee / 1'000);
  }

  avm::LedgerState l;
  const auto alice = Address::derive("alice");
  l.fund(alice, 10'000'000);
  // 701 metered opcodes on a call: 2 (branch) + 698 + 1.
  const auto heavy = std::make_shared<const avm::Program>(
      avm::assemble("#pragma version 8\ntxn ApplicationID\nbnz main\nint 1\nreturn\nmain:\n" +
                    repeat("int 1; pop", 349) + "int 1\n"));
  const auto trivial = std::make_shared<const avm::Program>(avm::assemble("#pragma version 8\nint 1\n"));
  const auto created = avm::submit_group({avm::Transaction::create(alice, heavy, trivial, {})}, l);
  c.expect(created.accepted, "deploy");
  const auto app = *created.transactions.front().created_app;
  const auto lone = avm::submit_group({avm::Transaction::call(alice, app, {})}, l);
  const auto pair =
      avm::submit_group({avm::Transaction::call(alice, app, {}), avm::Transaction::payment(alice, alice, 0)}, l);
  c.expect(!lone.accepted, "lone 701-opcode call accepted");
  c.expect(pair.accepted, "grouped 701-opcode call rejected: " + pair.reason);
  c.expect(pair.accepted && pair.transactions.front().opcode_cost == 701, "metered cost");
  return mapped + fmt::format("fee multiples; sim: lone 701-op tx {}, in 2-tx group {} (budget {})",
                              lone.accepted ? "accepted" : "rejected", pair.accepted ? "accepted" : "rejected",
                              pair.opcode_budget);
}

// Pointwise storage cost by explicit slot counting.
struct Pointwise {
  std::uint64_t uint_cost, byte_cost, box_cost, box_prefunded;
};

Pointwise brute_storage(std::uint64_t n) {
  std::uint64_t uint_slots = 0, byte_slots = 0;
  while (uint_slots * (64 + 8) < n) ++uint_slots;
  while (byte_slots * 128 < n) ++byte_slots;
  const auto box = 100'000 + 2'500 + 400 * (n + 1);
  return {28'500 * uint_slots, 50'000 * byte_slots, box, box - 100'000};
}

StorageVariant cheapest(std::uint64_t u, std::uint64_t b, std::uint64_t x) {
  if (u <= b && u <= x) return StorageVariant::uint_slot;
  return b <= x ? StorageVariant::byte_slot : StorageVariant::box;
}

std::string criterion_6(Check& c) {
  const auto table = cost::storage_crossover(1, 1'024);
  c.expect(table.rows.size() == 1'024, "row count");
  std::vector<cost::Crossover> crossings;
  StorageVariant previous = StorageVariant::uint_slot;
  for (std::uint64_t n = 1; n <= 1'024; ++n) {
    const auto& row = table.rows[n - 1];
    const auto b = brute_storage(n);
    const auto best = cheapest(b.uint_cost, b.byte_cost, b.box_cost);
    c.expect(row.bytes == n && row.uint_cost == b.uint_cost && row.byte_cost == b.byte_cost &&
                 row.box_cost == b.box_cost && row.box_prefunded == b.box_prefunded,
             fmt::format("n_B={} costs differ", n));
    c.expect(row.cheapest == best, fmt::format("n_B={} cheapest differs", n));
    c.expect(row.cheapest_prefunded == cheapest(b.uint_cost, b.byte_cost, b.box_prefunded),
             fmt::format("n_B={} prefunded cheapest differs", n));
    if (n > 1 && best != previous) crossings.push_back({n, previous, best});
    previous = best;
  }
  c.expect(crossings.size() == table.crossovers.size(), "crossover count");
  for (std::size_t i = 0; i < std::min(crossings.size(), table.crossovers.size()); ++i)
    c.expect(crossings[i].bytes == table.crossovers[i].bytes && crossings[i].to == table.crossovers[i].to,
             "crossover point");

  const auto byte1 = cost::min_balance_storage(StorageVariant::byte_slot, 16);
  const auto uint2 = cost::min_balance_storage(StorageVariant::uint_slot, 80);
  c.expect(byte1 == 50'000 && uint2 == 57'000 && byte1 < uint2, "Byte vs two Uints");
  c.expect(table.rows[79].cheapest == StorageVariant::byte_slot, "n_B=80 cheapest");
  const auto& at8 = table.rows[7];
  c.expect(at8.cheapest == StorageVariant::uint_slot, "n_B=8 unfunded cheapest");
  c.expect(at8.cheapest_prefunded == StorageVariant::box && at8.box_prefunded == 6'100, "n_B=8 prefunded");

  std::string points;
  for (const auto& x : table.crossovers)
    points += fmt::format("{}@{} ", to_string(x.to), x.bytes);
  return fmt::format("Byte {} < 2xUint {}; n_B=8 prefunded Box {} < Uint {}; crossovers {}matched brute force over 1..1024",
                     byte1, uint2, at8.box_prefunded, at8.uint_cost, points);
}

// Minimum balance for C instances of k bytes by direct packing.
std::uint64_t brute_curve(StorageVariant v, std::uint64_t k, std::uint64_t instances) {
  switch (v) {
  case StorageVariant::uint_slot: return instances * (100'000 + 28'500);
  case StorageVariant::byte_slot: {
    std::uint64_t slots = 0, free = 0;
    for (std::uint64_t i = 0; i < instances; ++i) {
      if (free < k) {
        ++slots;
        free = 128;
      }
      free -= k;
    }
    return 100'000 + 50'000 * slots;
  }
  case StorageVariant::box: {
    std::uint64_t bytes = 0;
    while (bytes < instances * k) bytes += 8;
    return 100'000 + 100'000 + 2'500 + 400 * (1 + bytes);
  }
  }
  return 0;
}

std::string criterion_7(Check& c) {
  const std::uint64_t max_c = 64 * 128;
  std::uint64_t checked = 0;
  for (const auto k : {1ULL, 2ULL, 3ULL, 8ULL}) {
    const auto limit = std::min<std::uint64_t>(max_c, 64 * (128 / k));
    for (const auto v : variants) {
      const auto last = v == StorageVariant::box ? std::min<std::uint64_t>(limit, 32'768 / k) : limit;
      const auto curve = cost::multi_instance_curve(v, k, 1, last);
      for (std::uint64_t i = 0; i < curve.size(); ++i, ++checked)
        c.expect(curve[i].min_balance == brute_curve(v, k, i + 1),
                 fmt::format("{} k={} C={} curve {} != {}", to_string(v), k, i + 1, curve[i].min_balance,
                             brute_curve(v, k, i + 1)));
    }
  }
  const auto u = cost::multi_instance_curve(StorageVariant::uint_slot, 1, 1, max_c);
  const auto b = cost::multi_instance_curve(StorageVariant::byte_slot, 1, 1, max_c);
  const auto x = cost::multi_instance_curve(StorageVariant::box, 1, 1, max_c);
  for (std::uint64_t i = 1; i < max_c; ++i) {
    c.expect(u[i].min_balance > b[i].min_balance, fmt::format("C={} Uint <= Byte", i + 1));
    c.expect(u[i].min_balance > x[i].min_balance, fmt::format("C={} Uint <= Box", i + 1));
  }

  // Deployed contracts: one conforming case on the last instance region.
  const auto& im = loaded()[1];
  std::uint64_t deployed = 0;
  for (const auto v : {StorageVariant::byte_slot, StorageVariant::box}) {
    for (const std::uint64_t instances : {1ULL, 2ULL, 9ULL, 128ULL, 129ULL, 1'000ULL}) {
      const auto unit = compile(im.process, v, instances);
      const auto r = conformance::replay_case(im.conforming.front(), unit, {10'000'000, 0.0, instances - 1});
      c.expect(r.verdict.accepted, fmt::format("{} C={} rejected: {}", to_string(v), instances, r.verdict.reason));
      c.expect(r.cost.min_balance == brute_curve(v, 1, instances),
               fmt::format("{} C={} ledger {} != {}", to_string(v), instances, r.cost.min_balance,
                           brute_curve(v, 1, instances)));
      ++deployed;
    }
  }
  return fmt::format("Uint > Byte and Uint > Box for C in [2, {}] at k=1; {} curve points match packing brute force; "
                     "{} deployments match the ledger (e.g. C=2: Uint {}, Byte {}, Box {})",
                     max_c, checked, deployed, u[1].min_balance, b[1].min_balance, x[1].min_balance);
}

std::string criterion_8(Check& c) {
  const auto rates = cost::default_exchange_table();
  const auto rows = cost::fiat_comparison(cost::reference_evm_gas, 11'000, 928'500, rates);
  const double evm[] = {0.020, 3.599, 35.075, 63.473};
  const double tx[] = {0.011, 0.006, 0.002, 0.002};
  const double mb[] = {0.939, 0.498, 0.150, 0.188};
  std::string got;
  for (std::size_t i = 0; i < 4; ++i) {
    c.expect(std::abs(rows[0].usd[i] - evm[i]) <= 0.01, fmt::format("EVM {} = {:.4f}", rates.labels[i], rows[0].usd[i]));
    c.expect(std::abs(rows[1].usd[i] - tx[i]) <= 0.001, fmt::format("AVM tx {} = {:.4f}", rates.labels[i], rows[1].usd[i]));
    c.expect(std::abs(rows[2].usd[i] - mb[i]) <= 0.005, fmt::format("incl. mb {} = {:.4f}", rates.labels[i], rows[2].usd[i]));
  }
  for (std::size_t r = 0; r < 3; ++r) {
    got += rows[r].label + " $";
    for (std::size_t i = 0; i < 4; ++i) got += fmt::format("{}{:.3f}", i ? "/" : "", rows[r].usd[i]);
    got += r < 2 ? "; " : "";
  }
  return got;
}

std::string criterion_9(Check& c) {
  std::string averages;
  std::size_t calls = 0;
  std::size_t worst = 0;
  for (std::size_t f = 0; f < 2; ++f) {
    averages += std::string(fixtures[f].label) + " ";
    for (const auto& row : bench_results()[f].rows) {
      c.expect(row.max_opcodes_per_call <= 700, fmt::format("{} {} max {}", fixtures[f].label, to_string(row.variant),
                                                            row.max_opcodes_per_call));
      worst = std::max(worst, row.max_opcodes_per_call);
      averages += fmt::format("{}={:.1f}(ref {:.0f}) ", to_string(row.variant), row.avg_opcodes_per_call,
                              row.reference_avg_opcodes.value_or(0));
    }
  }
  // Every accepted task call over the conforming runs of both fixtures and variants.
  for (const auto& l : loaded())
    for (const auto v : variants)
      for (const auto& r : conformance::replay_on_sim(l.conforming, compile(l.process, v)))
        for (const auto cost : r.cost.call_opcode_costs) {
          ++calls;
          c.expect(cost <= 700, fmt::format("call metered {}", cost));
        }
  return fmt::format("{} task calls, max {} opcodes; avg/tx {}", calls, worst, averages);
}

// Randomized ledger workload: payments, deployments and box contracts.
struct Workload {
  std::mt19937_64 rng;
  avm::LedgerState ledger;
  std::vector<Address> accounts;
  std::vector<std::uint64_t> apps;
  std::shared_ptr<const avm::Program> box_program, guard_program, clear_program;

  explicit Workload(std::uint64_t seed) : rng(seed) {
    for (int i = 0; i < 6; ++i) {
      accounts.push_back(Address::derive("acct" + std::to_string(seed) + "/" + std::to_string(i)));
      ledger.fund(accounts.back(), 100'000 + conformance::bounded(rng, 3'000'000));
    }
    // Creates a box of the requested size, or fails when arg 0 is "no".
    box_program = std::make_shared<const avm::Program>(avm::assemble(R"(#pragma version 8
txn ApplicationID
bz done
txna ApplicationArgs 0
byte "no"
!=
assert
txna ApplicationArgs 0
txna ApplicationArgs 1
btoi
box_create
pop
done:
int 1
)"));
    guard_program = std::make_shared<const avm::Program>(avm::assemble("#pragma version 8\nint 1\n"));
    clear_program = guard_program;
  }

  std::uint64_t pick(std::uint64_t n) { return conformance::bounded(rng, n); }
  const Address& any_account() { return accounts[pick(accounts.size())]; }

  avm::Transaction random_tx() {
    switch (apps.empty() ? pick(2) : pick(4)) {
    case 0: {
      auto& from = any_account();
      const auto balance = ledger.balance(from);
      // Amounts around the spendable margin exercise the minimum-balance rule.
      const auto amount = pick(4) == 0 ? balance : pick(std::max<std::uint64_t>(1, balance / 2));
      return avm::Transaction::payment(from, pick(5) == 0 ? Address::derive("fresh" + std::to_string(pick(50)))
                                                          : any_account(),
                                       amount);
    }
    case 1: {
      avm::StateSchema schema{pick(3), pick(3)};
      return avm::Transaction::create(any_account(), pick(2) ? box_program : guard_program, clear_program, schema);
    }
    case 2: {
      const auto app = apps[pick(apps.size())];
      return avm::Transaction::payment(any_account(), avm::application_address(app), pick(300'000));
    }
    default: {
      const auto app = apps[pick(apps.size())];
      const Bytes name = pick(6) == 0 ? "no" : "box" + std::to_string(pick(4));
      avm::References refs;
      refs.boxes.push_back({0, name});
      return avm::Transaction::call(any_account(), app, {name, encode_uint64(1 + pick(1'000))}, refs);
    }
    }
  }
};

bool meets_min_balance(const avm::LedgerState& l) {
  for (const auto& [who, account] : l.accounts) {
    if (who == l.fee_sink || (account.balance == 0 && account.inventory.empty())) continue;
    if (account.balance < avm::min_balance(account.inventory)) return false;
  }
  return true;
}

std::string criterion_10(Check& c) {
  std::size_t groups = 0, accepted = 0, rejected = 0, forced = 0, below = 0;
  for (std::uint64_t seq = 0; seq < 1'000; ++seq) {
    Workload w(seq);
    const auto steps = 3 + w.pick(6);
    for (std::uint64_t s = 0; s < steps; ++s) {
      std::vector<avm::Transaction> group;
      const auto size = 1 + w.pick(4);
      for (std::uint64_t i = 0; i < size; ++i) group.push_back(w.random_tx());
      // Every third group ends by draining an account below its requirement.
      const bool drain = s % 3 == 2;
      if (drain) {
        const auto& victim = w.any_account();
        const auto balance = w.ledger.balance(victim);
        const auto floor = w.ledger.min_balance(victim);
        if (balance >= 1'000 + 1) {
          const auto leave = floor > 1 ? w.pick(std::min(floor, balance - 1'000)) : 0;
          group.push_back(avm::Transaction::payment(victim, w.accounts.front() == victim ? w.accounts.back()
                                                                                         : w.accounts.front(),
                                                    balance - 1'000 - leave));
          if (leave == 0 && w.ledger.accounts.at(victim).inventory.empty()) group.back().amount -= 1;
        }
      }
      const auto before = w.ledger;
      const auto total = before.total_balance();
      const auto result = avm::submit_group(group, w.ledger);
      ++groups;
      c.expect(w.ledger.total_balance() == total, fmt::format("seq {} step {}: balance not conserved", seq, s));
      if (result.accepted) {
        ++accepted;
        c.expect(meets_min_balance(w.ledger), fmt::format("seq {} step {}: accepted below minimum balance", seq, s));
        std::uint64_t fees = 0;
        for (const auto& tx : group) fees += tx.fee;
        c.expect(w.ledger.balance(w.ledger.fee_sink) == before.balance(before.fee_sink) + fees, "fee sink");
        for (const auto& t : result.transactions)
          if (t.created_app) w.apps.push_back(*t.created_app);
      } else {
        ++rejected;
        below += result.reason.find("below minimum balance") != std::string::npos;
        c.expect(w.ledger == before, fmt::format("seq {} step {}: rejected group changed the ledger", seq, s));
      }
      if (drain && group.back().kind == avm::TxKind::payment) {
        ++forced;
        const auto& victim = group.back().sender;
        // Accepted only if the victim still meets its (possibly changed) requirement.
        if (result.accepted) {
          const auto& a = w.ledger.accounts.at(victim);
          c.expect(a.balance >= avm::min_balance(a.inventory) || (a.balance == 0 && a.inventory.empty()),
                   "drained account below requirement");
        }
      }
    }
  }
  c.expect(below > 0, "no group was rejected for minimum balance");
  return fmt::format("1000 sequences, {} groups ({} accepted, {} rejected, {} for minimum balance, {} draining) checked for conservation, "
                     "rollback and minimum balance",
                     groups, accepted, rejected, below, forced);
}

} // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<std::string(Check&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "Minimum-balance exactness", criterion_1},
      {2, "Fee exactness", criterion_2},
      {3, "External-account funding", criterion_3},
      {4, "Conformance (oracle and simulator, all variants)", criterion_4},
      {5, "Opcode budget boundaries", criterion_5},
      {6, "Storage crossover", criterion_6},
      {7, "Multi-instance curves", criterion_7},
      {8, "Fiat conversion", criterion_8},
      {9, "Opcode budget per task call", criterion_9},
      {10, "Simulator invariants", criterion_10},
  };
  int failed = 0;
  for (const auto& criterion : criteria) {
    Check check;
    std::string detail;
    try {
      detail = criterion.run(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    std::cout << (check.ok() ? "PASS" : "FAIL") << "  criterion " << criterion.id << ": " << criterion.title << " -- "
              << detail << " [" << check.summary() << "]\n";
    failed += !check.ok();
  }
  std::cout << (failed == 0 ? "all criteria passed" : fmt::format("{} criteria failed", failed)) << "\n";
  return failed == 0 ? 0 : 1;
}
