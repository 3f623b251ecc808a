#include "chor2teal/ledger.hpp"

#include <cmath>
#include <numeric>
#include <set>

#include <json.hpp>

#include "chor2teal/cost_model.hpp"
#include "chor2teal/errors.hpp"

namespace chor2teal::avm {

namespace {

using Schedule = cost::MinBalanceSchedule;

constexpr std::size_t max_key_bytes = 64;
constexpr std::size_t max_value_bytes = 128;
constexpr std::size_t max_box_name_bytes = 64;

std::size_t uvarint_size(std::uint64_t v) {
  std::size_t n = 1;
  while (v >= 0x80) {
    v >>= 7;
    ++n;
  }
  return n;
}

std::uint64_t total_min_balance(const LedgerState& ledger) {
  std::uint64_t total = 0;
  for (const auto& [address, account] : ledger.accounts)
    if (address != ledger.fee_sink) total += min_balance(account.inventory);
  return total;
}

struct GroupScratch {
  std::set<std::pair<std::uint64_t, Bytes>> box_refs;
  std::set<std::pair<std::uint64_t, Bytes>> boxes_accessed;
  std::size_t io_quota = 0;
  std::size_t io_used = 0;
};

class AppContext final : public ExecutionContext {
public:
  AppContext(LedgerState& ledger, const std::vector<Transaction>& group, std::size_t index, std::uint64_t app_id,
             GroupScratch& scratch, std::set<Address>& touched)
      : ledger_(ledger), group_(group), tx_(group[index]), index_(index), app_id_(app_id), scratch_(scratch),
        touched_(touched) {}

  Value txn_field(std::string_view field) const override {
    if (field == "Sender") return tx_.sender.as_bytes();
    if (field == "Fee") return tx_.fee;
    if (field == "ApplicationID") return tx_.kind == TxKind::app_create ? 0 : tx_.app_id;
    if (field == "OnCompletion") return static_cast<std::uint64_t>(tx_.on_completion);
    if (field == "NumAppArgs") return std::uint64_t{tx_.args.size()};
    if (field == "NumAccounts") return std::uint64_t{tx_.refs.accounts.size()};
    if (field == "NumApplications") return std::uint64_t{tx_.refs.apps.size()};
    if (field == "GroupIndex") return std::uint64_t{index_};
    if (field == "TypeEnum") return std::uint64_t{6};
    throw SimulationError("unsupported txn field " + std::string(field));
  }

  Value txn_array(std::string_view field, std::uint64_t i) const override {
    if (field == "ApplicationArgs") {
      if (i >= tx_.args.size()) throw SimulationError("application argument index out of range");
      return tx_.args[i];
    }
    if (field == "Accounts") {
      if (i == 0) return tx_.sender.as_bytes();
      if (i > tx_.refs.accounts.size()) throw SimulationError("account index out of range");
      return tx_.refs.accounts[i - 1].as_bytes();
    }
    if (field == "Applications") {
      if (i == 0) return app_id_;
      if (i > tx_.refs.apps.size()) throw SimulationError("application index out of range");
      return tx_.refs.apps[i - 1];
    }
    throw SimulationError("unsupported txna field " + std::string(field));
  }

  Value global_field(std::string_view field) const override {
    if (field == "CurrentApplicationID") return app_id_;
    if (field == "CurrentApplicationAddress") return application_address(app_id_).as_bytes();
    if (field == "CreatorAddress") return app().creator.as_bytes();
    if (field == "ZeroAddress") return Address{}.as_bytes();
    if (field == "GroupSize") return std::uint64_t{group_.size()};
    if (field == "MinTxnFee") return cost::base_fee;
    if (field == "MinBalance") return Schedule::account;
    throw SimulationError("unsupported global field " + std::string(field));
  }

  Value global_get(const Bytes& key) const override {
    const auto& globals = app().globals;
    const auto it = globals.find(key);
    return it == globals.end() ? Value{std::uint64_t{0}} : it->second;
  }

  void global_put(const Bytes& key, const Value& value) override {
    if (key.size() > max_key_bytes) throw SimulationError("global key exceeds 64 bytes");
    if (const auto* b = std::get_if<Bytes>(&value); b && b->size() > max_value_bytes)
      throw SimulationError("global byte value exceeds 128 bytes");
    auto& a = app();
    auto globals = a.globals;
    globals[key] = value;
    std::uint64_t uints = 0;
    for (const auto& [k, v] : globals) uints += std::holds_alternative<std::uint64_t>(v);
    if (uints > a.schema.uints) throw SimulationError("global uint schema exceeded");
    if (globals.size() - uints > a.schema.byte_slices) throw SimulationError("global byte-slice schema exceeded");
    a.globals = std::move(globals);
  }

  void global_del(const Bytes& key) override { app().globals.erase(key); }

  std::optional<Bytes> box_get(const Bytes& name) const override {
    const auto key = access(name);
    const auto it = ledger_.boxes.find(key);
    if (it == ledger_.boxes.end()) return std::nullopt;
    charge_io(key, it->second.size());
    return it->second;
  }

  void box_set(const Bytes& name, const Bytes& value, bool creating) override {
    const auto key = access(name);
    if (creating) {
      if (value.size() > Schedule::box_max_bytes) throw SimulationError("box exceeds 32768 bytes");
      auto& inventory = ledger_.accounts[application_address(app_id_)].inventory;
      ++inventory.boxes;
      inventory.box_bytes += name.size() + value.size();
      touched_.insert(application_address(app_id_));
    }
    charge_io(key, value.size());
    ledger_.boxes[key] = value;
  }

  bool box_del(const Bytes& name) override {
    const auto key = access(name);
    const auto it = ledger_.boxes.find(key);
    if (it == ledger_.boxes.end()) return false;
    auto& inventory = ledger_.accounts[application_address(app_id_)].inventory;
    --inventory.boxes;
    inventory.box_bytes -= name.size() + it->second.size();
    ledger_.boxes.erase(it);
    return true;
  }

private:
  Application& app() const { return ledger_.applications.at(app_id_); }

  std::pair<std::uint64_t, Bytes> access(const Bytes& name) const {
    if (name.empty() || name.size() > max_box_name_bytes) throw SimulationError("box name must be 1 to 64 bytes");
    auto key = std::make_pair(app_id_, name);
    if (!scratch_.box_refs.contains(key)) throw SimulationError("box 0x" + to_hex(name) + " not referenced");
    return key;
  }

  void charge_io(const std::pair<std::uint64_t, Bytes>& key, std::size_t size) const {
    if (!scratch_.boxes_accessed.insert(key).second) return;
    scratch_.io_used += size;
    if (scratch_.io_used > scratch_.io_quota) throw SimulationError("box read/write budget exceeded");
  }

  LedgerState& ledger_;
  const std::vector<Transaction>& group_;
  const Transaction& tx_;
  std::size_t index_;
  std::uint64_t app_id_;
  GroupScratch& scratch_;
  std::set<Address>& touched_;
};

std::uint64_t debit(LedgerState& ledger, const Address& who, std::uint64_t amount, const char* what) {
  auto& account = ledger.accounts[who];
  if (account.balance < amount)
    throw SimulationError(std::string("overspend: ") + what + " of " + std::to_string(amount) + " exceeds balance " +
                          std::to_string(account.balance));
  account.balance -= amount;
  return amount;
}

void check_min_balance(const LedgerState& ledger, const std::set<Address>& touched) {
  for (const auto& who : touched) {
    const auto it = ledger.accounts.find(who);
    if (it == ledger.accounts.end()) continue;
    const auto& account = it->second;
    if (account.balance == 0 && account.inventory.empty()) continue;
    const auto required = min_balance(account.inventory);
    if (account.balance < required)
      throw SimulationError("account " + who.hex().substr(0, 16) + " balance " + std::to_string(account.balance) +
                            " below minimum balance " + std::to_string(required));
  }
}

} // namespace

std::uint64_t min_balance(const AllocationInventory& inv) {
  return Schedule::account + Schedule::application * inv.apps_created + Schedule::uint_slot * inv.uint_slots +
         Schedule::byte_slot * inv.byte_slots + Schedule::extra_page * inv.extra_pages +
         Schedule::box_flat * inv.boxes + Schedule::box_per_byte * inv.box_bytes;
}

bool Application::operator==(const Application& other) const {
  auto same_program = [](const auto& a, const auto& b) { return a == b || (a && b && *a == *b); };
  return id == other.id && creator == other.creator && address == other.address && schema == other.schema &&
         extra_pages == other.extra_pages && globals == other.globals && same_program(approval, other.approval) &&
         same_program(clear, other.clear);
}

Address application_address(std::uint64_t app_id) { return Address::derive("app:" + std::to_string(app_id)); }

std::uint64_t LedgerState::balance(const Address& who) const {
  const auto it = accounts.find(who);
  return it == accounts.end() ? 0 : it->second.balance;
}

std::uint64_t LedgerState::min_balance(const Address& who) const {
  const auto it = accounts.find(who);
  return avm::min_balance(it == accounts.end() ? AllocationInventory{} : it->second.inventory);
}

std::uint64_t LedgerState::total_balance() const {
  return std::accumulate(accounts.begin(), accounts.end(), std::uint64_t{0},
                         [](std::uint64_t sum, const auto& entry) { return sum + entry.second.balance; });
}

const Application& LedgerState::application(std::uint64_t id) const {
  const auto it = applications.find(id);
  if (it == applications.end()) throw SimulationError("no application " + std::to_string(id));
  return it->second;
}

Transaction Transaction::payment(Address from, Address to, std::uint64_t amount, std::uint64_t fee) {
  Transaction tx;
  tx.kind = TxKind::payment;
  tx.sender = from;
  tx.receiver = to;
  tx.amount = amount;
  tx.fee = fee;
  return tx;
}

Transaction Transaction::create(Address from, std::shared_ptr<const Program> approval,
                                std::shared_ptr<const Program> clear, StateSchema schema, std::uint64_t extra_pages,
                                std::uint64_t fee) {
  Transaction tx;
  tx.kind = TxKind::app_create;
  tx.sender = from;
  tx.approval = std::move(approval);
  tx.clear = std::move(clear);
  tx.schema = schema;
  tx.extra_pages = extra_pages;
  tx.fee = fee;
  return tx;
}

Transaction Transaction::call(Address from, std::uint64_t app, std::vector<Bytes> args, References refs,
                              std::uint64_t fee) {
  Transaction tx;
  tx.kind = TxKind::app_call;
  tx.sender = from;
  tx.app_id = app;
  tx.args = std::move(args);
  tx.refs = std::move(refs);
  tx.fee = fee;
  return tx;
}

std::size_t serialized_size(const Transaction& tx) {
  std::size_t size = 1; // field count
  auto field = [&](std::string_view tag, std::size_t payload) { size += 1 + tag.size() + payload; };
  auto uint_field = [&](std::string_view tag, std::uint64_t v) {
    if (v != 0) field(tag, uvarint_size(v));
  };
  auto bytes_payload = [](std::size_t n) { return uvarint_size(n) + n; };

  field("type", bytes_payload(tx.kind == TxKind::payment ? 3 : 4));
  field("snd", bytes_payload(32));
  uint_field("fee", tx.fee);
  if (tx.kind == TxKind::payment) {
    field("rcv", bytes_payload(32));
    uint_field("amt", tx.amount);
    return size;
  }
  uint_field("apid", tx.app_id);
  uint_field("apan", static_cast<std::uint64_t>(tx.on_completion));
  if (!tx.args.empty()) {
    std::size_t payload = uvarint_size(tx.args.size());
    for (const auto& a : tx.args) payload += bytes_payload(a.size());
    field("apaa", payload);
  }
  if (!tx.refs.accounts.empty()) field("apat", uvarint_size(tx.refs.accounts.size()) + 33 * tx.refs.accounts.size());
  if (!tx.refs.apps.empty()) {
    std::size_t payload = uvarint_size(tx.refs.apps.size());
    for (const auto id : tx.refs.apps) payload += uvarint_size(id);
    field("apfa", payload);
  }
  if (!tx.refs.boxes.empty()) {
    std::size_t payload = uvarint_size(tx.refs.boxes.size());
    for (const auto& box : tx.refs.boxes) payload += uvarint_size(box.app_id) + bytes_payload(box.name.size());
    field("apbx", payload);
  }
  if (tx.approval) field("apap", bytes_payload(tx.approval->assembled_size));
  if (tx.clear) field("apsu", bytes_payload(tx.clear->assembled_size));
  if (tx.kind == TxKind::app_create) {
    field("apgs", uvarint_size(tx.schema.uints) + uvarint_size(tx.schema.byte_slices) + 2);
    uint_field("apep", tx.extra_pages);
  }
  return size;
}

std::uint64_t required_fee(const Transaction& tx, double congestion) {
  return cost::alg_tx_cost({congestion, serialized_size(tx)});
}

std::uint64_t required_extra_pages(const Program& approval, const Program& clear) {
  const auto total = approval.assembled_size + clear.assembled_size;
  if (total > Schedule::contract_max_bytes)
    throw SimulationError("program size " + std::to_string(total) + " exceeds 8192 bytes");
  if (total <= Schedule::contract_page_bytes) return 0;
  return (total - Schedule::contract_page_bytes + Schedule::contract_page_bytes - 1) / Schedule::contract_page_bytes;
}

GroupResult submit_group(const std::vector<Transaction>& group, LedgerState& ledger, double congestion) {
  GroupResult result;
  result.opcode_budget = budget_per_transaction * group.size();
  if (group.empty() || group.size() > max_group_size) {
    result.reason = "group size must be 1 to 16";
    return result;
  }

  LedgerState work = ledger;
  GroupScratch scratch;
  std::size_t used = 0;
  std::size_t index = 0;
  try {
    std::uint64_t predicted_app = work.next_app_id;
    for (; index < group.size(); ++index) {
      const auto& tx = group[index];
      if (tx.refs.count() > max_references)
        throw SimulationError("transaction references more than 8 accounts, applications, and boxes");
      const auto app = tx.kind == TxKind::app_create ? predicted_app++ : tx.app_id;
      for (const auto& box : tx.refs.boxes) {
        scratch.box_refs.emplace(box.app_id == 0 ? app : box.app_id, box.name);
        scratch.io_quota += box_quota_bytes;
      }
    }

    for (index = 0; index < group.size(); ++index) {
      const auto& tx = group[index];
      TxTelemetry t;
      t.tx_index = index;
      t.fee = tx.fee;
      const auto mb_before = total_min_balance(work);
      std::set<Address> touched{tx.sender};

      const auto needed = required_fee(tx, congestion);
      if (tx.fee < needed)
        throw SimulationError("fee " + std::to_string(tx.fee) + " below required " + std::to_string(needed));
      work.accounts[work.fee_sink].balance += debit(work, tx.sender, tx.fee, "fee");

      std::optional<std::uint64_t> run_app;
      switch (tx.kind) {
      case TxKind::payment:
        work.accounts[tx.receiver].balance += debit(work, tx.sender, tx.amount, "payment");
        touched.insert(tx.receiver);
        break;
      case TxKind::app_create: {
        if (!tx.approval || !tx.clear) throw SimulationError("application create without programs");
        if (tx.schema.uints + tx.schema.byte_slices > Schedule::max_global_slots)
          throw SimulationError("global schema exceeds 64 slots");
        if (tx.extra_pages > 3) throw SimulationError("at most 3 extra pages");
        if (required_extra_pages(*tx.approval, *tx.clear) > tx.extra_pages)
          throw SimulationError("programs need more extra pages than requested");
        Application created;
        created.id = work.next_app_id++;
        created.creator = tx.sender;
        created.address = application_address(created.id);
        created.approval = tx.approval;
        created.clear = tx.clear;
        created.schema = tx.schema;
        created.extra_pages = tx.extra_pages;
        auto& inventory = work.accounts[tx.sender].inventory;
        ++inventory.apps_created;
        inventory.uint_slots += tx.schema.uints;
        inventory.byte_slots += tx.schema.byte_slices;
        inventory.extra_pages += tx.extra_pages;
        t.created_app = created.id;
        run_app = created.id;
        work.applications.emplace(created.id, std::move(created));
        break;
      }
      case TxKind::app_call:
        work.application(tx.app_id);
        run_app = tx.app_id;
        break;
      }

      if (run_app) {
        const auto& app = work.application(*run_app);
        const auto program = tx.on_completion == OnCompletion::clear_state ? app.clear : app.approval;
        AppContext context(work, group, index, *run_app, scratch, touched);
        const auto outcome = execute(*program, context, result.opcode_budget - used);
        used += outcome.cost;
        t.opcode_cost = outcome.cost;
        if (!outcome.approved) {
          t.reason = outcome.reason;
          result.transactions.push_back(t);
          throw SimulationError("application " + std::to_string(*run_app) + " rejected: " + outcome.reason);
        }
        if (tx.kind == TxKind::app_call && tx.on_completion == OnCompletion::delete_application) {
          auto& inventory = work.accounts[app.creator].inventory;
          --inventory.apps_created;
          inventory.uint_slots -= app.schema.uints;
          inventory.byte_slots -= app.schema.byte_slices;
          inventory.extra_pages -= app.extra_pages;
          touched.insert(app.creator);
          work.applications.erase(*run_app);
        }
      }

      check_min_balance(work, touched);
      t.accepted = true;
      t.mb_delta = static_cast<std::int64_t>(total_min_balance(work)) - static_cast<std::int64_t>(mb_before);
      result.transactions.push_back(t);
    }
  } catch (const SimulationError& e) {
    result.accepted = false;
    result.reason = e.what();
    result.failed_index = index < group.size() ? std::optional<std::size_t>(index) : std::nullopt;
    if (index < group.size() && (result.transactions.empty() || result.transactions.back().tx_index != index)) {
      TxTelemetry t;
      t.tx_index = index;
      t.fee = group[index].fee;
      t.reason = e.what();
      result.transactions.push_back(t);
    }
    for (auto& t : result.transactions) t.accepted = false;
    return result;
  }

  ledger = std::move(work);
  result.accepted = true;
  return result;
}

std::string telemetry_json(const GroupResult& result) {
  nlohmann::json doc;
  doc["accepted"] = result.accepted;
  doc["opcode_budget"] = result.opcode_budget;
  if (!result.reason.empty()) doc["reason"] = result.reason;
  if (result.failed_index) doc["failed_index"] = *result.failed_index;
  doc["transactions"] = nlohmann::json::array();
  for (const auto& t : result.transactions) {
    nlohmann::json row{{"tx_index", t.tx_index},
                       {"verdict", t.accepted ? "accept" : "reject"},
                       {"opcode_cost", t.opcode_cost},
                       {"fee", t.fee},
                       {"mb_delta", t.mb_delta}};
    if (t.created_app) row["created_app"] = *t.created_app;
    if (!t.reason.empty()) row["reason"] = t.reason;
    doc["transactions"].push_back(std::move(row));
  }
  return doc.dump();
}

} // namespace chor2teal::avm
