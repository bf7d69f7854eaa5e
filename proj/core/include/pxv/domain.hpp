#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

// Core machine model: locations, values, timestamps, messages, per-thread
// views, machine states, and the labelled-statement program representation.

namespace pxv {

using Value = std::uint32_t;      // natural numbers; CAS results are 1/0
using Timestamp = std::uint32_t;  // index into the memory history
using LocId = std::uint32_t;      // index into Declarations::locations
using ThreadId = std::uint32_t;   // dense index into Declarations::thread_ids
using RegId = std::uint32_t;      // index into Declarations::registers
using AuxId = std::uint32_t;      // index into Declarations::aux_vars
using LabelId = std::uint32_t;    // index into Program::label_names

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Declared symbols of one litmus program. States refer to symbols by dense
// ids; this table maps them back to source names. Register names are global
// (registers of distinct threads have distinct names) and each register is
// owned by exactly one thread.
struct Declarations {
  std::vector<std::string> locations;
  std::vector<unsigned> thread_ids;  // dense ThreadId -> external id (1, 2, ...)

  struct Register {
    std::string name;
    ThreadId owner = 0;
    std::uint32_t slot = 0;  // index into the owner's register file
  };
  std::vector<Register> registers;
  std::vector<std::string> aux_vars;

  std::size_t num_locations() const { return locations.size(); }
  std::size_t num_threads() const { return thread_ids.size(); }
  std::size_t regs_of(ThreadId t) const;

  std::optional<LocId> find_location(std::string_view name) const;
  std::optional<RegId> find_register_slot(ThreadId owner, std::uint32_t slot) const;
  std::optional<ThreadId> find_thread(unsigned external_id) const;
  std::optional<RegId> find_register(std::string_view name) const;
  std::optional<AuxId> find_aux(std::string_view name) const;

  const std::string& location_name(LocId l) const { return locations.at(l); }
  unsigned thread_name(ThreadId t) const { return thread_ids.at(t); }
};

struct Message {
  LocId loc = 0;
  Value val = 0;
  friend bool operator==(const Message&, const Message&) = default;
};

using Memory = std::vector<Message>;

// No write to `loc` at any timestamp in (after, upto]; out-of-range
// timestamps are ignored.
bool no_write_to(const Memory& mem, LocId loc, Timestamp after, Timestamp upto);

// Timestamp of the last write to `loc`; requires at least one such message.
Timestamp last_write_ts(const Memory& mem, LocId loc);

// ---------------------------------------------------------------------------
// Expressions

// Register expressions used by atomic statements. Arithmetic is over the
// naturals; subtraction saturates at 0.
class Expr {
 public:
  enum class Kind { Lit, Reg, Add, Sub };

  static Expr lit(Value v);
  // Register operands are slot indices into the executing thread's file.
  static Expr reg(std::uint32_t slot);
  static Expr add(Expr a, Expr b);
  static Expr sub(Expr a, Expr b);

  Value eval(std::span<const Value> regs) const;
  void collect_regs(std::vector<std::uint32_t>& out) const;
  Kind kind() const { return node_->kind; }

  std::string to_string(const Declarations& d, ThreadId owner) const;

 private:
  struct Node {
    Kind kind;
    Value lit = 0;
    std::uint32_t reg = 0;  // slot in the executing thread's register file
    std::shared_ptr<const Node> lhs, rhs;
  };
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

class BoolExpr {
 public:
  enum class Kind { Const, Cmp, And, Or, Not };
  enum class CmpOp { Eq, Ne, Lt };

  static BoolExpr constant(bool b);
  static BoolExpr cmp(CmpOp op, Expr lhs, Expr rhs);
  static BoolExpr conj(BoolExpr a, BoolExpr b);
  static BoolExpr disj(BoolExpr a, BoolExpr b);
  static BoolExpr neg(BoolExpr a);

  bool eval(std::span<const Value> regs) const;
  void collect_regs(std::vector<std::uint32_t>& out) const;

  std::string to_string(const Declarations& d, ThreadId owner) const;

 private:
  struct Node {
    Kind kind;
    bool b = false;
    CmpOp op = CmpOp::Eq;
    std::optional<Expr> lhs, rhs;
    std::shared_ptr<const Node> l, r;
  };
  explicit BoolExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// Auxiliary-variable expressions; read only the auxiliary store.
class AuxExpr {
 public:
  enum class Kind { Lit, Var, Add, Sub };

  static AuxExpr lit(Value v);
  static AuxExpr var(AuxId a);
  static AuxExpr add(AuxExpr a, AuxExpr b);
  static AuxExpr sub(AuxExpr a, AuxExpr b);

  Value eval(std::span<const Value> aux) const;
  void collect_vars(std::vector<AuxId>& out) const;

  // Substitute `replacement` for every occurrence of variable `target`.
  AuxExpr substitute(AuxId target, const AuxExpr& replacement) const;

  std::string to_string(const Declarations& d) const;

 private:
  struct Node {
    Kind kind;
    Value lit = 0;
    AuxId var = 0;
    std::shared_ptr<const Node> lhs, rhs;
  };
  explicit AuxExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Statements and programs

struct AtomicStmt {
  enum class Op { Skip, Assign, Load, Store, Cas, Sfence, Mfence, Flush, Flushopt };

  Op op = Op::Skip;
  std::uint32_t reg = 0;  // Assign/Load/Cas result slot (executing thread)
  LocId loc = 0;          // Load/Store/Cas/Flush/Flushopt location
  std::optional<Expr> e1;  // Assign rhs, Store value, Cas expected
  std::optional<Expr> e2;  // Cas replacement

  static AtomicStmt skip();
  static AtomicStmt assign(std::uint32_t slot, Expr e);
  static AtomicStmt load(std::uint32_t slot, LocId l);
  static AtomicStmt store(LocId l, Expr e);
  static AtomicStmt cas(std::uint32_t slot, LocId l, Expr expected, Expr replacement);
  static AtomicStmt sfence();
  static AtomicStmt mfence();
  static AtomicStmt flush(LocId l);
  static AtomicStmt flushopt(LocId l);

  std::string to_string(const Declarations& d, ThreadId owner) const;
};

struct AuxUpdate {
  AuxId target = 0;
  AuxExpr expr;
};

struct LabelledStmt {
  enum class Kind { Plain, IfGoto, Ghost };

  Kind kind = Kind::Plain;
  AtomicStmt stmt;                 // Plain/Ghost
  LabelId next = 0;                // Plain/Ghost
  std::optional<BoolExpr> cond;    // IfGoto
  LabelId then_label = 0;          // IfGoto
  LabelId else_label = 0;          // IfGoto
  std::optional<AuxUpdate> aux;    // Ghost

  static LabelledStmt plain(AtomicStmt s, LabelId next);
  static LabelledStmt if_goto(BoolExpr b, LabelId then_label, LabelId else_label);
  static LabelledStmt ghost(AtomicStmt s, LabelId next, AuxUpdate upd);
};

// Labelled-statement program: code maps (thread, label) to a statement.
// Labels `init` and `fin` are distinguished; `fin` has no code.
struct Program {
  static constexpr LabelId kInit = 0;
  static constexpr LabelId kFin = 1;

  std::vector<std::string> label_names;                       // shared across threads
  std::vector<std::unordered_map<LabelId, LabelledStmt>> code;  // per dense thread

  Program();

  const LabelledStmt* at(ThreadId t, LabelId l) const;
  std::vector<LabelId> labels_of(ThreadId t) const;  // code labels + fin, sorted

  // True if some thread's label graph contains a cycle.
  bool has_cycle() const;

  // Validates label targets and per-thread code presence at init.
  void validate(const Declarations& d) const;
};

// ---------------------------------------------------------------------------
// Thread and machine states

struct ThreadState {
  std::vector<Timestamp> coh;        // coherence view, per location
  Timestamp vr_new = 0;              // read view
  Timestamp vp_ready = 0;            // persist-ready view
  std::vector<Timestamp> vp_async;   // asynchronous-persist view, per location
  std::vector<Timestamp> vp_commit;  // commit-persist view, per location
  std::vector<Value> regs;           // this thread's register file

  Timestamp max_coh() const;

  friend bool operator==(const ThreadState&, const ThreadState&) = default;
};

struct MachineState {
  std::vector<LabelId> pc;
  std::vector<ThreadState> threads;
  Memory mem;
  std::vector<Value> aux;

  std::size_t num_locations() const { return threads.empty() ? 0 : threads[0].coh.size(); }

  // Join of vp_commit over all threads for one location.
  Timestamp max_per(LocId l) const;

  Value reg_value(const Declarations& d, RegId r) const;

  friend bool operator==(const MachineState&, const MachineState&) = default;
};

struct MachineStateHash {
  std::size_t operator()(const MachineState& s) const;
};

// Readable multi-line dump used in counterexample reports. Label names, when
// provided, render the program counters; otherwise raw label ids appear.
std::string dump(const MachineState& s, const Declarations& d,
                 const std::vector<std::string>* label_names = nullptr);

}  // namespace pxv
