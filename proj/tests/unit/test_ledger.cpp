#include <doctest.h>

#include <memory>

#include "chor2teal/errors.hpp"
#include "chor2teal/ledger.hpp"

using namespace chor2teal;
using namespace chor2teal::avm;

namespace {

std::shared_ptr<const Program> program(const std::string& body) {
  return std::make_shared<const Program>(assemble("#pragma version 8\n" + body));
}

std::string repeat(const std::string& line, std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += line + "\n";
  return s;
}

const Address alice = Address::derive("alice");
const Address bob = Address::derive("bob");

LedgerState funded() {
  LedgerState l;
  l.fund(alice, 10'000'000);
  l.fund(bob, 1'000'000);
  return l;
}

// The approval body runs on calls only; creation always succeeds.
std::uint64_t deploy(LedgerState& l, const std::string& approval, StateSchema schema = {}) {
  const auto wrapped = "txn ApplicationID\nbnz main\nint 1\nreturn\nmain:\n" + approval;
  const auto r = submit_group({Transaction::create(alice, program(wrapped), program("int 1"), schema)}, l);
  REQUIRE(r.accepted);
  return *r.transactions.front().created_app;
}

} // namespace

TEST_CASE("payment moves funds and charges the flat fee") {
  auto l = funded();
  const auto total = l.total_balance();
  const auto r = submit_group({Transaction::payment(alice, bob, 500)}, l);
  REQUIRE(r.accepted);
  CHECK(r.transactions.front().fee == 1'000);
  CHECK(l.balance(alice) == 10'000'000 - 1'500);
  CHECK(l.balance(bob) == 1'000'500);
  CHECK(l.balance(l.fee_sink) == 1'000);
  CHECK(l.total_balance() == total);
}

TEST_CASE("fee must cover congestion pricing") {
  auto l = funded();
  auto tx = Transaction::payment(alice, bob, 1);
  CHECK(required_fee(tx, 0) == 1'000);
  const auto size = serialized_size(tx);
  CHECK(size > 50);
  CHECK(required_fee(tx, 100) == 100 * size);
  CHECK_FALSE(submit_group({tx}, l, 100).accepted);
  tx.fee = 100 * size;
  CHECK(submit_group({tx}, l, 100).accepted);
}

TEST_CASE("application creation charges minimum balance per schema") {
  auto l = funded();
  deploy(l, "int 1", {1, 0});
  CHECK(l.min_balance(alice) == 100'000 + 128'500);
  deploy(l, "int 1", {0, 1});
  CHECK(l.min_balance(alice) == 100'000 + 128'500 + 150'000);
}

TEST_CASE("minimum balance violations reject the whole group") {
  auto l = funded();
  const auto before = l;
  const auto r = submit_group({Transaction::payment(bob, alice, 1'000), Transaction::payment(bob, alice, 900'000)}, l);
  CHECK_FALSE(r.accepted);
  CHECK(r.failed_index == 1);
  CHECK(l == before);
  // Paying a fresh account less than the account minimum fails as well.
  CHECK_FALSE(submit_group({Transaction::payment(alice, Address::derive("new"), 99'999)}, l).accepted);
  CHECK(submit_group({Transaction::payment(alice, Address::derive("new"), 100'000)}, l).accepted);
}

TEST_CASE("rejected programs roll back earlier transactions") {
  auto l = funded();
  const auto app = deploy(l, "txna ApplicationArgs 0; btoi", {1, 0});
  const auto before = l;
  const auto r = submit_group(
      {Transaction::payment(alice, bob, 10), Transaction::call(alice, app, {encode_uint64(0)})}, l);
  CHECK_FALSE(r.accepted);
  CHECK(r.failed_index == 1);
  CHECK(l == before);
}

TEST_CASE("opcode budget pools across the group") {
  auto l = funded();
  const auto heavy = deploy(l, repeat("int 1; pop", 350) + "int 1");
  const auto light = deploy(l, "int 1");
  const auto lone = submit_group({Transaction::call(alice, heavy, {})}, l);
  CHECK_FALSE(lone.accepted);
  CHECK(lone.opcode_budget == 700);
  const auto pooled = submit_group({Transaction::call(alice, heavy, {}), Transaction::call(alice, light, {})}, l);
  CHECK(pooled.accepted);
  CHECK(pooled.opcode_budget == 1'400);
  CHECK(pooled.transactions[0].opcode_cost == 703);
  CHECK(submit_group({Transaction::call(alice, heavy, {}), Transaction::payment(alice, bob, 0)}, l).accepted);
}

TEST_CASE("group size limit") {
  auto l = funded();
  std::vector<Transaction> group(17, Transaction::payment(alice, bob, 1));
  CHECK_FALSE(submit_group(group, l).accepted);
  group.pop_back();
  CHECK(submit_group(group, l).accepted);
  CHECK_FALSE(submit_group({}, l).accepted);
}

TEST_CASE("reference lists") {
  auto l = funded();
  const auto app = deploy(l, "int 1");
  References refs;
  for (int i = 0; i < 8; ++i) refs.accounts.push_back(Address::derive("acct" + std::to_string(i)));
  CHECK(submit_group({Transaction::call(alice, app, {}, refs)}, l).accepted);
  refs.apps.push_back(app);
  CHECK_FALSE(submit_group({Transaction::call(alice, app, {}, refs)}, l).accepted);
}

TEST_CASE("boxes need references, quota and funding") {
  auto l = funded();
  const auto app = deploy(l, "byte \"b\"; txna ApplicationArgs 0; btoi; box_create");
  const auto app_account = application_address(app);
  References one;
  one.boxes.push_back({0, "b"});
  const auto size = encode_uint64(8);

  CHECK_FALSE(submit_group({Transaction::call(alice, app, {size})}, l).accepted); // unreferenced
  CHECK_FALSE(submit_group({Transaction::call(alice, app, {size}, one)}, l).accepted); // unfunded
  REQUIRE(submit_group({Transaction::payment(alice, app_account, 106'100)}, l).accepted);
  const auto r = submit_group({Transaction::call(alice, app, {size}, one)}, l);
  REQUIRE(r.accepted);
  CHECK(r.transactions.front().mb_delta == 6'100);
  CHECK(l.min_balance(app_account) == 106'100);
  CHECK(l.boxes.at({app, "b"}) == Bytes(8, '\0'));

  const auto big = deploy(l, "byte \"c\"; int 2048; box_create");
  REQUIRE(submit_group({Transaction::payment(alice, application_address(big), 1'000'000)}, l).accepted);
  References c1;
  c1.boxes.push_back({0, "c"});
  CHECK_FALSE(submit_group({Transaction::call(alice, big, {}, c1)}, l).accepted);
  c1.boxes.push_back({0, "c"});
  CHECK(submit_group({Transaction::call(alice, big, {}, c1)}, l).accepted);
}

TEST_CASE("extra pages") {
  const auto small = assemble("#pragma version 8\nint 1");
  CHECK(required_extra_pages(small, small) == 0);
  const auto page = assemble("#pragma version 8\nint 1\nreturn\n" + repeat("int 1; pop", 700) + "int 1");
  CHECK(page.assembled_size > 2048);
  CHECK(required_extra_pages(page, small) == 1);
  auto l = funded();
  CHECK_FALSE(submit_group({Transaction::create(alice, std::make_shared<const Program>(page),
                                                std::make_shared<const Program>(small), {})},
                           l)
                  .accepted);
  const auto r = submit_group(
      {Transaction::create(alice, std::make_shared<const Program>(page), std::make_shared<const Program>(small), {}, 1)},
      l);
  CHECK(r.accepted);
  CHECK(l.min_balance(alice) == 100'000 + 100'000 + 100'000);
}

TEST_CASE("telemetry json") {
  auto l = funded();
  const auto r = submit_group({Transaction::payment(alice, bob, 1)}, l);
  const auto json = telemetry_json(r);
  CHECK(json.find("\"verdict\":\"accept\"") != std::string::npos);
  CHECK(json.find("\"mb_delta\":0") != std::string::npos);
  CHECK(json.find("\"opcode_cost\":0") != std::string::npos);
}
