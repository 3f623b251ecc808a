#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chor2teal/bytes.hpp"

namespace chor2teal::avm {

inline constexpr int min_version = 8;
inline constexpr int max_version = 10;
inline constexpr std::size_t max_stack_depth = 1000;
inline constexpr std::size_t max_value_bytes = 4096;
inline constexpr std::size_t scratch_slots = 256;

using Value = std::variant<std::uint64_t, Bytes>;

std::string describe(const Value& value);

enum class Op {
  int_, byte_, err, assert_, return_, b, bz, bnz, switch_, pop, dup, dup2, swap, dig, load, store,
  add, sub, mul, div, mod, lt, gt, le, ge, eq, ne, land, lor, lnot, bitand_, bitor_, bitxor_, bitnot,
  shl, shr, itob, btoi, len, concat, substring, substring3, extract, extract3, replace2, replace3, bzero,
  txn, txna, global, app_global_get, app_global_put, app_global_del,
  box_create, box_extract, box_replace, box_len, box_get, box_put, box_del,
};

struct Instruction {
  Op op = Op::err;
  std::uint64_t imm = 0;  // int value, scratch index, dig depth, extract start, array index
  std::uint64_t imm2 = 0; // extract length, substring end
  Bytes bytes;            // byte constant
  std::string field;      // txn / global field
  std::vector<std::size_t> targets; // branch destinations (instruction indices)
  std::size_t line = 0;
};

struct Program {
  int version = 0;
  std::vector<Instruction> code;
  std::size_t assembled_size = 0; // estimated bytecode length, version byte included
  std::string source;

  bool operator==(const Program& other) const { return source == other.source; }
};

// Throws ParseError with the offending line for unknown opcodes, malformed
// immediates, unknown labels, and versions outside [8, 10].
Program assemble(std::string_view source);

// Supplies transaction fields and storage to a running program. Storage
// operations throw SimulationError to fail the program.
class ExecutionContext {
public:
  virtual ~ExecutionContext() = default;

  virtual Value txn_field(std::string_view field) const = 0;
  virtual Value txn_array(std::string_view field, std::uint64_t index) const = 0;
  virtual Value global_field(std::string_view field) const = 0;

  virtual Value global_get(const Bytes& key) const = 0;
  virtual void global_put(const Bytes& key, const Value& value) = 0;
  virtual void global_del(const Bytes& key) = 0;

  // nullopt when the box does not exist.
  virtual std::optional<Bytes> box_get(const Bytes& name) const = 0;
  virtual void box_set(const Bytes& name, const Bytes& value, bool creating) = 0;
  virtual bool box_del(const Bytes& name) = 0;
};

struct ExecutionOutcome {
  bool approved = false;
  std::string reason; // empty when approved
  std::size_t cost = 0;
  std::size_t pc = 0; // instruction index where execution stopped
};

// Every instruction costs one unit; exceeding `budget` fails the program.
ExecutionOutcome execute(const Program& program, ExecutionContext& context, std::size_t budget);

} // namespace chor2teal::avm
