#pragma once

#include <functional>

#include "pxv/domain.hpp"
#include "pxv/views.hpp"
#include "pxv/wellformed.hpp"

// Executable catalogue of the per-statement proof rules and stability rules,
// falsification-tested against generated well-formed states.
//
// Set variables S and counts n in a rule's pre/postcondition are skolemized
// from the concrete pre-state: reading the actual view set instantiates
// exactly the binding the rule quantifies over. Free threads, locations and
// values range over a small instantiation grid; equal and distinct choices
// are both included unless a side constraint rules them out.

namespace pxv {

struct RuleParams {
  ThreadId t = 0;   // executing thread
  ThreadId t2 = 0;  // the other thread (t', may equal t unless constrained)
  LocId x = 0;
  LocId y = 0;
  Value u = 0;
  Value v = 0;
  Value w = 0;  // second value parameter (CAS replacement, count value)
};

struct RuleEnv {
  ValueSet S;
  ValueSet S2;  // second skolemized set, for disjunctive preconditions
  std::uint32_t n = 0;
  Value k = 0;
};

struct RuleSpec {
  std::string name;
  std::string display;

  bool uses_t2 = false;
  bool uses_y = false;
  bool uses_u = false;
  bool uses_v = false;
  bool uses_w = false;

  // Side constraints over the instantiation (x != y, t != t', v != e1, ...).
  std::function<bool(const RuleParams&)> constraint;

  std::function<AtomicStmt(const RuleParams&, const Declarations&)> make_stmt;

  // Evaluates the precondition on the pre-state, skolemizing set variables;
  // nullopt when the precondition does not hold for this instantiation.
  std::function<std::optional<RuleEnv>(const MachineState&, const RuleParams&,
                                       const Declarations&)>
      pre;

  // Evaluates the postcondition on one successor.
  std::function<bool(const MachineState& post, const MachineState& pre,
                     const RuleParams&, const RuleEnv&, const Declarations&)>
      post;
};

// One RuleSpec per table row: load/store/flush/flushopt/sfence proof rules,
// the stability tables, and the CAS and mfence extensions.
const std::vector<RuleSpec>& catalogue();

// Deliberately broken variants (weakened constraint or strengthened
// postcondition); the harness must falsify every one of them.
const std::vector<RuleSpec>& mutant_catalogue();

struct Falsification {
  MachineState state;
  MachineState post_state;
  std::string instantiation;
};

struct RuleVerdict {
  std::string name;
  std::uint64_t instantiations = 0;  // (state, parameters) pairs with the pre satisfied
  std::optional<Falsification> falsified;
};

// Runs `trials` generated states against every instantiation of the rule on
// the small grid; stops at the first falsification.
RuleVerdict test_rule(const RuleSpec& rule, const InitSpec& spec, const GenBounds& b,
                      std::uint32_t trials);

// Default rule-testing world: three locations, three threads, two registers
// per thread.
InitSpec default_rule_spec();

std::string render_params(const RuleParams& p, const Declarations& d);

}  // namespace pxv
