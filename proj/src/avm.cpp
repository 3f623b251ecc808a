#include "chor2teal/avm.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_map>

#include "chor2teal/errors.hpp"

namespace chor2teal::avm {

namespace {

enum class Imm { none, uint, bytes, label, labels, index, index2, field, field_index };

struct OpInfo {
  Op op;
  Imm imm;
};

const std::unordered_map<std::string_view, OpInfo>& opcode_table() {
  static const std::unordered_map<std::string_view, OpInfo> table{
      {"int", {Op::int_, Imm::uint}},           {"pushint", {Op::int_, Imm::uint}},
      {"byte", {Op::byte_, Imm::bytes}},        {"pushbytes", {Op::byte_, Imm::bytes}},
      {"err", {Op::err, Imm::none}},            {"assert", {Op::assert_, Imm::none}},
      {"return", {Op::return_, Imm::none}},     {"b", {Op::b, Imm::label}},
      {"bz", {Op::bz, Imm::label}},             {"bnz", {Op::bnz, Imm::label}},
      {"switch", {Op::switch_, Imm::labels}},   {"pop", {Op::pop, Imm::none}},
      {"dup", {Op::dup, Imm::none}},            {"dup2", {Op::dup2, Imm::none}},
      {"swap", {Op::swap, Imm::none}},          {"dig", {Op::dig, Imm::index}},
      {"load", {Op::load, Imm::index}},         {"store", {Op::store, Imm::index}},
      {"+", {Op::add, Imm::none}},              {"-", {Op::sub, Imm::none}},
      {"*", {Op::mul, Imm::none}},              {"/", {Op::div, Imm::none}},
      {"%", {Op::mod, Imm::none}},              {"<", {Op::lt, Imm::none}},
      {">", {Op::gt, Imm::none}},               {"<=", {Op::le, Imm::none}},
      {">=", {Op::ge, Imm::none}},              {"==", {Op::eq, Imm::none}},
      {"!=", {Op::ne, Imm::none}},              {"&&", {Op::land, Imm::none}},
      {"||", {Op::lor, Imm::none}},             {"!", {Op::lnot, Imm::none}},
      {"&", {Op::bitand_, Imm::none}},          {"|", {Op::bitor_, Imm::none}},
      {"^", {Op::bitxor_, Imm::none}},          {"~", {Op::bitnot, Imm::none}},
      {"shl", {Op::shl, Imm::none}},            {"shr", {Op::shr, Imm::none}},
      {"itob", {Op::itob, Imm::none}},          {"btoi", {Op::btoi, Imm::none}},
      {"len", {Op::len, Imm::none}},            {"concat", {Op::concat, Imm::none}},
      {"substring", {Op::substring, Imm::index2}}, {"substring3", {Op::substring3, Imm::none}},
      {"extract", {Op::extract, Imm::index2}},  {"extract3", {Op::extract3, Imm::none}},
      {"replace2", {Op::replace2, Imm::index}}, {"replace3", {Op::replace3, Imm::none}},
      {"bzero", {Op::bzero, Imm::none}},        {"txn", {Op::txn, Imm::field}},
      {"txna", {Op::txna, Imm::field_index}},   {"global", {Op::global, Imm::field}},
      {"app_global_get", {Op::app_global_get, Imm::none}},
      {"app_global_put", {Op::app_global_put, Imm::none}},
      {"app_global_del", {Op::app_global_del, Imm::none}},
      {"box_create", {Op::box_create, Imm::none}},
      {"box_extract", {Op::box_extract, Imm::none}},
      {"box_replace", {Op::box_replace, Imm::none}},
      {"box_len", {Op::box_len, Imm::none}},    {"box_get", {Op::box_get, Imm::none}},
      {"box_put", {Op::box_put, Imm::none}},    {"box_del", {Op::box_del, Imm::none}},
  };
  return table;
}

const std::unordered_map<std::string_view, std::uint64_t>& named_constants() {
  static const std::unordered_map<std::string_view, std::uint64_t> names{
      {"NoOp", 0}, {"OptIn", 1}, {"CloseOut", 2}, {"ClearState", 3}, {"UpdateApplication", 4},
      {"DeleteApplication", 5}, {"pay", 1}, {"appl", 6},
  };
  return names;
}

std::size_t uvarint_size(std::uint64_t v) {
  std::size_t n = 1;
  while (v >= 0x80) {
    v >>= 7;
    ++n;
  }
  return n;
}

[[noreturn]] void fail_parse(std::size_t line, const std::string& message) {
  throw ParseError("TEAL line " + std::to_string(line) + ": " + message);
}

std::optional<std::uint64_t> parse_uint(std::string_view text) {
  std::uint64_t value = 0;
  int base = 10;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    text.remove_prefix(2);
    base = 16;
  }
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value, base);
  if (ec != std::errc{} || end != text.data() + text.size()) return std::nullopt;
  return value;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

// Splits one source line into statements on ';' and strips `//` comments,
// leaving quoted strings intact.
std::vector<std::string_view> statements(std::string_view line) {
  std::vector<std::string_view> out;
  bool quoted = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '\\') ++i;
      else if (c == '"') quoted = false;
    } else if (c == '"') {
      quoted = true;
    } else if (c == ';' || (c == '/' && i + 1 < line.size() && line[i + 1] == '/')) {
      out.push_back(trim(line.substr(start, i - start)));
      if (c == '/') return out;
      start = i + 1;
    }
  }
  out.push_back(trim(line.substr(start)));
  return out;
}

std::vector<std::string> tokenize(std::string_view stmt, std::size_t line) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < stmt.size()) {
    if (stmt[i] == ' ' || stmt[i] == '\t') {
      ++i;
      continue;
    }
    std::string token;
    if (stmt[i] == '"') {
      token.push_back('"');
      ++i;
      bool closed = false;
      while (i < stmt.size()) {
        char c = stmt[i++];
        if (c == '"') {
          closed = true;
          break;
        }
        if (c == '\\' && i < stmt.size()) {
          c = stmt[i++];
          if (c == 'n') c = '\n';
          else if (c == 't') c = '\t';
        }
        token.push_back(c);
      }
      if (!closed) fail_parse(line, "unterminated string");
    } else {
      while (i < stmt.size() && stmt[i] != ' ' && stmt[i] != '\t') token.push_back(stmt[i++]);
    }
    tokens.push_back(std::move(token));
  }
  return tokens;
}

struct PendingBranch {
  std::size_t instruction;
  std::vector<std::string> labels;
  std::size_t line;
};

} // namespace

std::string describe(const Value& value) {
  if (const auto* u = std::get_if<std::uint64_t>(&value)) return std::to_string(*u);
  return "0x" + to_hex(std::get<Bytes>(value));
}

Program assemble(std::string_view source) {
  Program program;
  program.source = std::string(source);
  std::unordered_map<std::string, std::size_t> labels;
  std::vector<PendingBranch> pending;
  std::size_t size = 1;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    const auto nl = source.find('\n', pos);
    const auto raw = source.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? source.size() + 1 : nl + 1;
    ++line_no;

    const auto trimmed = trim(raw);
    if (trimmed.starts_with("#pragma")) {
      const auto tokens = tokenize(trimmed, line_no);
      if (tokens.size() != 3 || tokens[1] != "version") fail_parse(line_no, "malformed pragma");
      const auto v = parse_uint(tokens[2]);
      if (!v || *v < min_version || *v > max_version)
        fail_parse(line_no, "unsupported program version " + tokens[2]);
      if (!program.code.empty() || program.version != 0) fail_parse(line_no, "version pragma must come first");
      program.version = static_cast<int>(*v);
      continue;
    }

    for (const auto stmt : statements(raw)) {
      if (stmt.empty()) continue;
      auto tokens = tokenize(stmt, line_no);
      if (tokens.size() == 1 && tokens[0].size() > 1 && tokens[0].back() == ':') {
        auto name = tokens[0].substr(0, tokens[0].size() - 1);
        if (!labels.emplace(name, program.code.size()).second) fail_parse(line_no, "duplicate label " + name);
        continue;
      }
      const auto it = opcode_table().find(tokens[0]);
      if (it == opcode_table().end()) fail_parse(line_no, "unknown opcode " + tokens[0]);
      if (program.version == 0) fail_parse(line_no, "missing version pragma");

      Instruction ins;
      ins.op = it->second.op;
      ins.line = line_no;
      const auto args = std::vector<std::string>(tokens.begin() + 1, tokens.end());
      auto expect = [&](std::size_t n) {
        if (args.size() != n)
          fail_parse(line_no, tokens[0] + " expects " + std::to_string(n) + " immediate(s)");
      };
      auto index = [&](const std::string& text, std::uint64_t limit) {
        const auto v = parse_uint(text);
        if (!v || *v > limit) fail_parse(line_no, "bad immediate " + text + " for " + tokens[0]);
        return *v;
      };

      switch (it->second.imm) {
      case Imm::none:
        expect(0);
        size += 1;
        break;
      case Imm::uint: {
        expect(1);
        const auto named = named_constants().find(args[0]);
        if (named != named_constants().end()) ins.imm = named->second;
        else if (const auto v = parse_uint(args[0])) ins.imm = *v;
        else fail_parse(line_no, "bad integer " + args[0]);
        size += 1 + uvarint_size(ins.imm);
        break;
      }
      case Imm::bytes:
        expect(1);
        if (args[0].starts_with('"')) ins.bytes = args[0].substr(1);
        else if (args[0].starts_with("0x")) {
          try {
            ins.bytes = from_hex(args[0]);
          } catch (const ParseError&) {
            fail_parse(line_no, "bad hex constant " + args[0]);
          }
        } else fail_parse(line_no, "byte constant must be hex or quoted: " + args[0]);
        size += 1 + uvarint_size(ins.bytes.size()) + ins.bytes.size();
        break;
      case Imm::label:
        expect(1);
        pending.push_back({program.code.size(), args, line_no});
        size += 3;
        break;
      case Imm::labels:
        if (args.empty() || args.size() > 255) fail_parse(line_no, "switch needs 1 to 255 labels");
        pending.push_back({program.code.size(), args, line_no});
        size += 2 + 2 * args.size();
        break;
      case Imm::index:
        expect(1);
        ins.imm = index(args[0], 255);
        size += 2;
        break;
      case Imm::index2:
        expect(2);
        ins.imm = index(args[0], 255);
        ins.imm2 = index(args[1], 255);
        size += 3;
        break;
      case Imm::field:
        expect(1);
        ins.field = args[0];
        size += 2;
        break;
      case Imm::field_index:
        expect(2);
        ins.field = args[0];
        ins.imm = index(args[1], 255);
        size += 3;
        break;
      }
      program.code.push_back(std::move(ins));
    }
  }
  if (program.version == 0) fail_parse(1, "missing version pragma");

  for (const auto& branch : pending) {
    for (const auto& label : branch.labels) {
      const auto target = labels.find(label);
      if (target == labels.end()) fail_parse(branch.line, "unknown label " + label);
      program.code[branch.instruction].targets.push_back(target->second);
    }
  }
  program.assembled_size = size;
  return program;
}

namespace {

class Machine {
public:
  Machine(const Program& program, ExecutionContext& context) : program_(program), context_(context) {}

  ExecutionOutcome run(std::size_t budget) {
    ExecutionOutcome outcome;
    std::size_t pc = 0;
    try {
      while (pc < program_.code.size()) {
        if (outcome.cost >= budget) throw SimulationError("dynamic cost budget exceeded");
        ++outcome.cost;
        const auto& ins = program_.code[pc];
        outcome.pc = pc;
        const auto next = step(ins, pc + 1);
        if (!next) {
          const auto top = pop_uint();
          outcome.approved = top != 0;
          if (!outcome.approved) outcome.reason = "program returned 0";
          return outcome;
        }
        pc = *next;
      }
      outcome.pc = pc;
      if (stack_.size() != 1) throw SimulationError("stack must hold exactly one value at program end");
      const auto top = pop_uint();
      outcome.approved = top != 0;
      if (!outcome.approved) outcome.reason = "program ended with 0";
    } catch (const SimulationError& e) {
      outcome.approved = false;
      outcome.reason = e.what();
    }
    return outcome;
  }

private:
  [[noreturn]] void fail(const Instruction& ins, const std::string& message) const {
    throw SimulationError("line " + std::to_string(ins.line) + ": " + message);
  }

  void push(Value v) {
    if (stack_.size() >= max_stack_depth) throw SimulationError("stack overflow");
    if (const auto* b = std::get_if<Bytes>(&v); b && b->size() > max_value_bytes)
      throw SimulationError("byte value exceeds 4096 bytes");
    stack_.push_back(std::move(v));
  }

  Value pop() {
    if (stack_.empty()) throw SimulationError("stack underflow");
    auto v = std::move(stack_.back());
    stack_.pop_back();
    return v;
  }

  std::uint64_t pop_uint() {
    auto v = pop();
    if (const auto* u = std::get_if<std::uint64_t>(&v)) return *u;
    throw SimulationError("expected uint64, got bytes");
  }

  Bytes pop_bytes() {
    auto v = pop();
    if (auto* b = std::get_if<Bytes>(&v)) return std::move(*b);
    throw SimulationError("expected bytes, got uint64");
  }

  static Bytes slice(const Bytes& b, std::uint64_t start, std::uint64_t length) {
    if (start > b.size() || length > b.size() - start) throw SimulationError("byte range out of bounds");
    return b.substr(start, length);
  }

  static Bytes splice(Bytes target, std::uint64_t start, const Bytes& with) {
    if (start > target.size() || with.size() > target.size() - start)
      throw SimulationError("replacement out of bounds");
    target.replace(start, with.size(), with);
    return target;
  }

  Bytes existing_box(const Bytes& name) {
    auto box = context_.box_get(name);
    if (!box) throw SimulationError("no such box");
    return *box;
  }

  // nullopt means the program returned.
  std::optional<std::size_t> step(const Instruction& ins, std::size_t next) {
    switch (ins.op) {
    case Op::int_: push(ins.imm); break;
    case Op::byte_: push(ins.bytes); break;
    case Op::err: fail(ins, "err opcode executed");
    case Op::assert_:
      if (pop_uint() == 0) fail(ins, "assert failed");
      break;
    case Op::return_: return std::nullopt;
    case Op::b: return ins.targets[0];
    case Op::bz: return pop_uint() == 0 ? ins.targets[0] : next;
    case Op::bnz: return pop_uint() != 0 ? ins.targets[0] : next;
    case Op::switch_: {
      const auto i = pop_uint();
      return i < ins.targets.size() ? ins.targets[i] : next;
    }
    case Op::pop: pop(); break;
    case Op::dup: {
      auto v = pop();
      push(v);
      push(std::move(v));
      break;
    }
    case Op::dup2: {
      auto b = pop();
      auto a = pop();
      push(a);
      push(b);
      push(std::move(a));
      push(std::move(b));
      break;
    }
    case Op::swap: {
      auto b = pop();
      auto a = pop();
      push(std::move(b));
      push(std::move(a));
      break;
    }
    case Op::dig:
      if (ins.imm >= stack_.size()) fail(ins, "dig below stack bottom");
      push(stack_[stack_.size() - 1 - ins.imm]);
      break;
    case Op::load: push(scratch_[ins.imm]); break;
    case Op::store: scratch_[ins.imm] = pop(); break;
    case Op::add: {
      const auto b = pop_uint(), a = pop_uint();
      if (a + b < a) fail(ins, "+ overflowed");
      push(a + b);
      break;
    }
    case Op::sub: {
      const auto b = pop_uint(), a = pop_uint();
      if (b > a) fail(ins, "- would result negative");
      push(a - b);
      break;
    }
    case Op::mul: {
      const auto b = pop_uint(), a = pop_uint();
      if (a != 0 && b > UINT64_MAX / a) fail(ins, "* overflowed");
      push(a * b);
      break;
    }
    case Op::div:
    case Op::mod: {
      const auto b = pop_uint(), a = pop_uint();
      if (b == 0) fail(ins, "division by zero");
      push(ins.op == Op::div ? a / b : a % b);
      break;
    }
    case Op::lt:
    case Op::gt:
    case Op::le:
    case Op::ge: {
      const auto b = pop_uint(), a = pop_uint();
      const bool r = ins.op == Op::lt ? a < b : ins.op == Op::gt ? a > b : ins.op == Op::le ? a <= b : a >= b;
      push(std::uint64_t{r});
      break;
    }
    case Op::eq:
    case Op::ne: {
      const auto b = pop(), a = pop();
      if (a.index() != b.index()) fail(ins, "cannot compare uint64 with bytes");
      push(std::uint64_t{(a == b) == (ins.op == Op::eq)});
      break;
    }
    case Op::land:
    case Op::lor: {
      const auto b = pop_uint(), a = pop_uint();
      push(std::uint64_t{ins.op == Op::land ? (a && b) : (a || b)});
      break;
    }
    case Op::lnot: push(std::uint64_t{pop_uint() == 0}); break;
    case Op::bitand_:
    case Op::bitor_:
    case Op::bitxor_: {
      const auto b = pop_uint(), a = pop_uint();
      push(ins.op == Op::bitand_ ? (a & b) : ins.op == Op::bitor_ ? (a | b) : (a ^ b));
      break;
    }
    case Op::bitnot: push(~pop_uint()); break;
    case Op::shl:
    case Op::shr: {
      const auto b = pop_uint(), a = pop_uint();
      if (b > 63) fail(ins, "shift amount exceeds 63");
      push(ins.op == Op::shl ? a << b : a >> b);
      break;
    }
    case Op::itob: push(encode_uint64(pop_uint())); break;
    case Op::btoi: {
      const auto b = pop_bytes();
      if (b.size() > 8) fail(ins, "btoi arg too long");
      std::uint64_t v = 0;
      for (const unsigned char c : b) v = (v << 8) | c;
      push(v);
      break;
    }
    case Op::len: push(std::uint64_t{pop_bytes().size()}); break;
    case Op::concat: {
      auto b = pop_bytes();
      auto a = pop_bytes();
      push(a + b);
      break;
    }
    case Op::substring: {
      const auto a = pop_bytes();
      if (ins.imm2 < ins.imm) fail(ins, "substring end before start");
      push(slice(a, ins.imm, ins.imm2 - ins.imm));
      break;
    }
    case Op::substring3: {
      const auto end = pop_uint(), start = pop_uint();
      const auto a = pop_bytes();
      if (end < start) fail(ins, "substring end before start");
      push(slice(a, start, end - start));
      break;
    }
    case Op::extract: {
      const auto a = pop_bytes();
      if (ins.imm2 == 0) push(slice(a, ins.imm, a.size() >= ins.imm ? a.size() - ins.imm : 1));
      else push(slice(a, ins.imm, ins.imm2));
      break;
    }
    case Op::extract3: {
      const auto length = pop_uint(), start = pop_uint();
      push(slice(pop_bytes(), start, length));
      break;
    }
    case Op::replace2: {
      const auto with = pop_bytes();
      push(splice(pop_bytes(), ins.imm, with));
      break;
    }
    case Op::replace3: {
      const auto with = pop_bytes();
      const auto start = pop_uint();
      push(splice(pop_bytes(), start, with));
      break;
    }
    case Op::bzero: {
      const auto n = pop_uint();
      if (n > max_value_bytes) fail(ins, "bzero size exceeds 4096");
      push(Bytes(n, '\0'));
      break;
    }
    case Op::txn: push(context_.txn_field(ins.field)); break;
    case Op::txna: push(context_.txn_array(ins.field, ins.imm)); break;
    case Op::global: push(context_.global_field(ins.field)); break;
    case Op::app_global_get: push(context_.global_get(pop_bytes())); break;
    case Op::app_global_put: {
      auto v = pop();
      context_.global_put(pop_bytes(), v);
      break;
    }
    case Op::app_global_del: context_.global_del(pop_bytes()); break;
    case Op::box_create: {
      const auto size = pop_uint();
      const auto name = pop_bytes();
      if (const auto box = context_.box_get(name)) {
        if (box->size() != size) fail(ins, "box exists with a different size");
        push(std::uint64_t{0});
      } else {
        context_.box_set(name, Bytes(size, '\0'), true);
        push(std::uint64_t{1});
      }
      break;
    }
    case Op::box_extract: {
      const auto length = pop_uint(), start = pop_uint();
      push(slice(existing_box(pop_bytes()), start, length));
      break;
    }
    case Op::box_replace: {
      const auto with = pop_bytes();
      const auto start = pop_uint();
      const auto name = pop_bytes();
      context_.box_set(name, splice(existing_box(name), start, with), false);
      break;
    }
    case Op::box_len:
    case Op::box_get: {
      const auto box = context_.box_get(pop_bytes());
      if (ins.op == Op::box_len) push(std::uint64_t{box ? box->size() : 0});
      else push(box.value_or(Bytes{}));
      push(std::uint64_t{box.has_value()});
      break;
    }
    case Op::box_put: {
      const auto value = pop_bytes();
      const auto name = pop_bytes();
      const auto box = context_.box_get(name);
      if (box && box->size() != value.size()) fail(ins, "box_put size mismatch");
      context_.box_set(name, value, !box);
      break;
    }
    case Op::box_del: push(std::uint64_t{context_.box_del(pop_bytes())}); break;
    }
    return next;
  }

  const Program& program_;
  ExecutionContext& context_;
  std::vector<Value> stack_;
  std::vector<Value> scratch_ = std::vector<Value>(scratch_slots, Value{std::uint64_t{0}});
};

} // namespace

ExecutionOutcome execute(const Program& program, ExecutionContext& context, std::size_t budget) {
  return Machine(program, context).run(budget);
}

} // namespace chor2teal::avm
