#include "chor2teal/teal_backend.hpp"

#include <fstream>
#include <stdexcept>

#include "chor2teal/avm.hpp"
#include "chor2teal/cost_model.hpp"
#include "chor2teal/errors.hpp"
#include "chor2teal/ledger.hpp"
#include "chor2teal/template.hpp"

namespace chor2teal::teal {

namespace {

using nlohmann::json;
using Schedule = cost::MinBalanceSchedule;

constexpr int teal_version = 8;

constexpr std::string_view approval_template = R"TEAL(#pragma version {{version}}
// {{process}}: {{variant}} storage, {{places}} places, {{max_instances}} instance(s) of {{k}} byte(s)
txn ApplicationID
bz on_create
txn OnCompletion
int NoOp
==
assert
txn NumAppArgs
int 3
==
assert
txna ApplicationArgs 0
byte "inst"
==
dup
store 5
txna ApplicationArgs 0
byte "task"
==
||
assert
txna ApplicationArgs 1
btoi
dup
store 0
int {{max_instances}}
<
assert
txna ApplicationArgs 2
btoi
store 1
{{#uint}}
byte "m"
app_global_get
store 2
{{/uint}}
{{#byte}}
load 0
int {{per_slot}}
/
itob
extract 7 1
store 3
load 0
int {{per_slot}}
%
int {{k}}
*
store 4
load 3
app_global_get
load 4
int {{k}}
extract3
btoi
store 2
{{/byte}}
{{#box}}
load 5
bz load_region
byte "b"
int {{box_size}}
box_create
pop
load_region:
byte "b"
load 0
int {{k}}
*
int {{k}}
box_extract
btoi
store 2
{{/box}}
load 5
bz dispatch
load 2
!
assert
int {{start_marking}}
store 2
dispatch:
load 1
switch{{#tasks}} {{label}}{{/tasks}}
err
{{#tasks}}
{{label}}: // {{name}} ({{initiator}})
txn Sender
byte 0x{{address}}
==
assert
load 2
int {{consume}}
&
int {{consume}}
==
assert
load 2
int {{keep}}
&
int {{produce}}
|
store 2
b settle
{{/tasks}}
settle:
{{#silent}}
load 2
int {{consume}}
&
int {{consume}}
==
bz {{next}}
load 2
int {{keep}}
&
int {{produce}}
|
store 2
b settle
{{next}}:
{{/silent}}
load 2
int {{non_end}}
&
bnz store_region
int 0
store 2
store_region:
{{#uint}}
byte "m"
load 2
app_global_put
{{/uint}}
{{#byte}}
load 3
load 3
app_global_get
load 4
load 2
itob
extract {{shift}} {{k}}
replace3
app_global_put
{{/byte}}
{{#box}}
byte "b"
load 0
int {{k}}
*
load 2
itob
extract {{shift}} {{k}}
box_replace
{{/box}}
int 1
return
on_create:
{{#uint}}
byte "m"
int {{start_marking}}
app_global_put
{{/uint}}
{{#slots}}
byte 0x{{key}}
int {{bytes}}
bzero
app_global_put
{{/slots}}
int 1
return
)TEAL";

constexpr std::string_view clear_template = R"TEAL(#pragma version {{version}}
int 1
return
)TEAL";

json net_to_json(const net::EncodedNet& n) {
  json transitions = json::array();
  for (const auto& t : n.transitions) {
    json row{{"name", t.name}, {"consume", t.consume}, {"produce", t.produce}};
    if (t.task) row["task"] = *t.task;
    transitions.push_back(std::move(row));
  }
  return json{{"process", n.process},         {"participants", n.participants},
              {"places", n.place_names},      {"tasks", n.tasks},
              {"task_initiators", n.task_initiators}, {"transitions", std::move(transitions)},
              {"initial", n.initial.value},   {"end_places", n.end_places}};
}

net::EncodedNet net_from_json(const json& doc) {
  net::EncodedNet n;
  n.process = doc.at("process").get<std::string>();
  n.participants = doc.at("participants").get<std::vector<std::string>>();
  n.place_names = doc.at("places").get<std::vector<std::string>>();
  n.tasks = doc.at("tasks").get<std::vector<std::string>>();
  n.task_initiators = doc.at("task_initiators").get<std::vector<std::string>>();
  for (const auto& row : doc.at("transitions")) {
    net::EncodedTransition t;
    t.name = row.at("name").get<std::string>();
    t.consume = row.at("consume").get<net::Mask>();
    t.produce = row.at("produce").get<net::Mask>();
    if (row.contains("task")) t.task = row.at("task").get<std::size_t>();
    n.transitions.push_back(std::move(t));
  }
  n.initial.value = doc.at("initial").get<net::Mask>();
  n.end_places = doc.at("end_places").get<net::Mask>();
  if (n.tasks.size() != n.task_initiators.size() || n.transitions.size() < n.tasks.size())
    throw ParseError("manifest net: task tables are inconsistent");
  return n;
}

void check_capacity(StorageVariant variant, const net::InstanceLayout& layout) {
  const auto k = layout.bytes_per_instance;
  if (k == 0 || k > 8) throw EmissionError("instance size must be 1 to 8 bytes, got " + std::to_string(k));
  if (layout.max_instances == 0) throw EmissionError("layout must allow at least one instance");
  switch (variant) {
  case StorageVariant::uint_slot:
    if (layout.max_instances != 1)
      throw EmissionError("uint storage holds exactly one instance, layout asks for " +
                          std::to_string(layout.max_instances));
    break;
  case StorageVariant::byte_slot:
    if (byte_slot_count(layout) > Schedule::max_global_slots)
      throw EmissionError(std::to_string(layout.max_instances) + " instances need " +
                          std::to_string(byte_slot_count(layout)) + " byte slots, the limit is 64");
    break;
  case StorageVariant::box:
    if (box_size(layout) > Schedule::box_max_bytes)
      throw EmissionError(std::to_string(layout.max_instances) + " instances need a " +
                          std::to_string(box_size(layout)) + "-byte box, the limit is 32768");
    break;
  }
}

} // namespace

std::size_t instances_per_slot(std::size_t k) {
  if (k == 0 || k > Schedule::byte_slot_bytes) throw std::invalid_argument("instance size must be 1 to 128 bytes");
  return Schedule::byte_slot_bytes / k;
}

std::size_t byte_slot_count(const net::InstanceLayout& layout) {
  const auto per_slot = instances_per_slot(layout.bytes_per_instance);
  return (layout.max_instances + per_slot - 1) / per_slot;
}

std::size_t box_size(const net::InstanceLayout& layout) { return 8 * ((layout.total_bytes() + 7) / 8); }

InstanceAddress instance_address(const net::InstanceLayout& layout, StorageVariant variant, std::size_t i) {
  if (i >= layout.max_instances)
    throw std::out_of_range("instance " + std::to_string(i) + " outside [0, " +
                            std::to_string(layout.max_instances) + ")");
  const auto k = layout.bytes_per_instance;
  if (variant == StorageVariant::byte_slot) {
    const auto per_slot = instances_per_slot(k);
    return {i / per_slot, (i % per_slot) * k, k};
  }
  return {0, layout.offset(i), k};
}

RoleBindings derive_bindings(const net::EncodedNet& net) {
  RoleBindings bindings;
  for (const auto& role : net.participants) bindings.emplace(role, Address::derive(role));
  for (const auto& role : net.task_initiators) bindings.emplace(role, Address::derive(role));
  return bindings;
}

RoleBindings parse_bindings(const std::string& json_text) {
  RoleBindings bindings;
  try {
    const auto doc = json::parse(json_text);
    if (!doc.is_object()) throw ParseError("role bindings must be a JSON object");
    for (auto it = doc.begin(); it != doc.end(); ++it)
      bindings.emplace(it.key(), Address::from_hex(it.value().get<std::string>()));
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid role bindings: ") + e.what());
  }
  return bindings;
}

std::vector<Bytes> call_args(std::string_view tag, std::uint64_t instance, std::uint64_t task) {
  return {Bytes(tag), encode_uint64(instance), encode_uint64(task)};
}

CompilationUnit emit(const net::EncodedNet& net, StorageVariant variant, const net::InstanceLayout& layout,
                     const RoleBindings& bindings) {
  if (net.tasks.empty()) throw EmissionError("net has no tasks");
  if (net.place_count() > net::max_places_per_word)
    throw EmissionError("net has " + std::to_string(net.place_count()) + " places, at most 64 are supported");
  if (layout.places != net.place_count())
    throw EmissionError("layout is for " + std::to_string(layout.places) + " places, net has " +
                        std::to_string(net.place_count()));
  check_capacity(variant, layout);

  const auto mask = net.place_mask();
  const auto k = layout.bytes_per_instance;
  const auto start = net::start_marking(net).value;

  json tasks = json::array();
  for (std::size_t id = 0; id < net.tasks.size(); ++id) {
    const auto& role = net.task_initiators[id];
    const auto bound = bindings.find(role);
    if (bound == bindings.end())
      throw EmissionError("role '" + role + "' (initiator of '" + net.tasks[id] + "') has no bound address");
    const auto& t = net.task_transition(id);
    tasks.push_back({{"label", "task_" + std::to_string(id)},
                     {"name", net.tasks[id]},
                     {"initiator", role},
                     {"address", bound->second.hex()},
                     {"consume", t.consume},
                     {"keep", mask & ~t.consume},
                     {"produce", t.produce}});
  }
  json silent = json::array();
  for (std::size_t i = net.tasks.size(); i < net.transitions.size(); ++i) {
    const auto& t = net.transitions[i];
    silent.push_back({{"consume", t.consume},
                      {"keep", mask & ~t.consume},
                      {"produce", t.produce},
                      {"next", "skip_" + std::to_string(i - net.tasks.size())}});
  }
  json slots = json::array();
  if (variant == StorageVariant::byte_slot) {
    const auto per_slot = instances_per_slot(k);
    for (std::size_t s = 0; s < byte_slot_count(layout); ++s)
      slots.push_back({{"key", to_hex(Bytes(1, static_cast<char>(s)))}, {"bytes", per_slot * k}});
  }

  const json data{{"version", teal_version},
                  {"process", net.process},
                  {"variant", std::string(to_string(variant))},
                  {"places", net.place_count()},
                  {"max_instances", layout.max_instances},
                  {"k", k},
                  {"shift", 8 - k},
                  {"per_slot", instances_per_slot(k)},
                  {"box_size", box_size(layout)},
                  {"start_marking", start},
                  {"non_end", mask & ~net.end_places},
                  {"uint", variant == StorageVariant::uint_slot},
                  {"byte", variant == StorageVariant::byte_slot},
                  {"box", variant == StorageVariant::box},
                  {"tasks", std::move(tasks)},
                  {"silent", std::move(silent)},
                  {"slots", std::move(slots)}};

  CompilationUnit unit;
  unit.approval_source = tmpl::render(approval_template, data);
  unit.clear_source = tmpl::render(clear_template, data);
  unit.variant = variant;
  unit.role_bindings = bindings;
  unit.layout = layout;
  unit.layout.variant_hint = variant;
  unit.net = net;

  try {
    const auto approval = avm::assemble(unit.approval_source);
    const auto clear = avm::assemble(unit.clear_source);
    unit.approval_size = approval.assembled_size;
    unit.clear_size = clear.assembled_size;
    unit.schema.extra_pages = avm::required_extra_pages(approval, clear);
  } catch (const Error& e) {
    throw EmissionError(std::string("emitted program rejected: ") + e.what());
  }

  switch (variant) {
  case StorageVariant::uint_slot: unit.schema.uints = 1; break;
  case StorageVariant::byte_slot: unit.schema.byte_slots = byte_slot_count(layout); break;
  case StorageVariant::box: unit.schema.boxes.push_back({Bytes(box_name), box_size(layout)}); break;
  }
  return unit;
}

json manifest(const CompilationUnit& unit) {
  json roles = json::object();
  for (const auto& [role, address] : unit.role_bindings) roles[role] = address.hex();
  json tasks = json::array();
  for (std::size_t id = 0; id < unit.net.tasks.size(); ++id)
    tasks.push_back({{"id", id}, {"name", unit.net.tasks[id]}, {"initiator", unit.net.task_initiators[id]}});
  json boxes = json::array();
  for (const auto& box : unit.schema.boxes) boxes.push_back({{"name", to_hex(box.name)}, {"size", box.size}});
  return json{{"process", unit.net.process},
              {"variant", std::string(to_string(unit.variant))},
              {"places", unit.net.place_count()},
              {"layout",
               {{"bytes_per_instance", unit.layout.bytes_per_instance}, {"max_instances", unit.layout.max_instances}}},
              {"schema",
               {{"global_uints", unit.schema.uints},
                {"global_byte_slots", unit.schema.byte_slots},
                {"boxes", std::move(boxes)},
                {"extra_pages", unit.schema.extra_pages}}},
              {"approval_size", unit.approval_size},
              {"clear_size", unit.clear_size},
              {"roles", std::move(roles)},
              {"tasks", std::move(tasks)},
              {"net", net_to_json(unit.net)}};
}

CompilationUnit load_manifest(const json& doc) {
  try {
    const auto net = net_from_json(doc.at("net"));
    const auto variant = parse_storage_variant(doc.at("variant").get<std::string>());
    auto layout = net::layout(net.place_count(), doc.at("layout").at("max_instances").get<std::size_t>());
    RoleBindings bindings;
    for (const auto& [role, hex] : doc.at("roles").items())
      bindings.emplace(role, Address::from_hex(hex.get<std::string>()));
    return emit(net, variant, layout, bindings);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid manifest: ") + e.what());
  }
}

void write_unit(const CompilationUnit& unit, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / name).string());
    out << text;
  };
  write("approval.teal", unit.approval_source);
  write("clear.teal", unit.clear_source);
  write("manifest.json", manifest(unit).dump(2) + "\n");
}

} // namespace chor2teal::teal
