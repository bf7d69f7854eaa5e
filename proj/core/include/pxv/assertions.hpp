#pragma once

#include "pxv/domain.hpp"
#include "pxv/views.hpp"

// Assertion AST and its evaluation over machine states, the persistent-view
// fragment used as crash invariants, and post-crash memory enumeration.

namespace pxv {

// A view expression denoting a set of values in a given state.
struct ViewExpr {
  enum class Kind { Thread, Persist, Async, Cond };
  Kind kind = Kind::Thread;
  LocId loc = 0;      // the viewed location; for Cond, the condition location
  ThreadId tid = 0;   // Thread/Async/Cond
  Value cond_val = 0; // Cond: the value read for `loc`
  LocId target = 0;   // Cond: the location viewed after the read

  static ViewExpr thread_of(LocId l, ThreadId t);
  static ViewExpr persist(LocId l);
  static ViewExpr async(LocId l, ThreadId t);
  static ViewExpr cond(LocId l, Value v, LocId y, ThreadId t);

  std::string to_string(const Declarations& d) const;
};

enum class NumCmp { Eq, Ne, Lt, Le, Gt, Ge };
bool num_cmp(NumCmp op, std::uint64_t a, std::uint64_t b);

// Closed boolean assertion over one machine state. Atoms compare view
// expressions with finite value sets, test last-view predicates and write
// counts, and compare registers/auxiliaries with values.
class Assertion {
 public:
  Assertion() : Assertion(constant(true)) {}

  static Assertion constant(bool b);
  static Assertion view_eq(ViewExpr ve, ValueSet s);
  static Assertion view_subset(ViewExpr ve, ValueSet s);
  static Assertion view_contains(ViewExpr ve, Value v, bool negated = false);
  static Assertion last_reader(LocId l, ThreadId t);
  static Assertion last_flush(LocId l, ThreadId t);
  static Assertion last_mfence(LocId l, ThreadId t);
  static Assertion last_val(LocId l, Value v);
  static Assertion count_cmp(LocId l, Value v, NumCmp op, std::uint32_t n);
  static Assertion reg_cmp(RegId r, NumCmp op, Value v);
  static Assertion reg_in(RegId r, ValueSet s, bool negated = false);
  static Assertion aux_cmp(AuxExpr lhs, NumCmp op, Value v);
  static Assertion aux_in(AuxExpr lhs, ValueSet s, bool negated = false);
  static Assertion conj(Assertion a, Assertion b);
  static Assertion disj(Assertion a, Assertion b);
  static Assertion neg(Assertion a);
  static Assertion implies(Assertion a, Assertion b);

  bool eval(const MachineState& s, const Declarations& d) const;

  // The ghost-statement substitution A[e/a] on auxiliary atoms.
  Assertion substitute_aux(AuxId target, const AuxExpr& e) const;

  // True if every atom is a persistent-view comparison (or a constant).
  bool persistent_only() const;

  std::string to_string(const Declarations& d) const;

  struct Node;
  explicit Assertion(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  const Node& node() const { return *node_; }

 private:
  std::shared_ptr<const Node> node_;

  friend class CrashInvariant;
};

// A post-crash non-volatile memory: one value per declared location.
using NvmMap = std::vector<Value>;

// Assertion restricted to persistent-view atoms; the restriction is checked
// at construction. Evaluates either over a state (set semantics) or over a
// concrete NVM, where each [l]_P atom denotes the singleton {nvm(l)}.
class CrashInvariant {
 public:
  CrashInvariant();  // trivially true
  explicit CrashInvariant(Assertion a);

  bool eval_state(const MachineState& s, const Declarations& d) const;
  bool eval_nvm(const NvmMap& nvm, const Declarations& d) const;

  const Assertion& assertion() const { return a_; }
  std::string to_string(const Declarations& d) const { return a_.to_string(d); }

 private:
  Assertion a_;
};

// All NVMs possible in `s`: the per-location product of persistent views.
std::vector<NvmMap> possible_nvms(const MachineState& s);

// Independent oracle: enumerate candidate value maps drawn from the values
// written to each location and keep those with a per-location witnessing
// timestamp that no later write to the location shadows at or below the
// commit bound.
std::vector<NvmMap> possible_nvms_bruteforce(const MachineState& s);

struct CrashCheck {
  bool ok = true;
  std::optional<NvmMap> counterexample;
};

// Does every possible NVM of `s` satisfy `inv`?
CrashCheck holds_after_crash(const CrashInvariant& inv, const MachineState& s,
                             const Declarations& d);

std::string nvm_to_string(const NvmMap& nvm, const Declarations& d);

}  // namespace pxv
