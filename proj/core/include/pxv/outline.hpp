#pragma once

#include "pxv/assertions.hpp"
#include "pxv/explore.hpp"
#include "pxv/wellformed.hpp"

// Semantic checker for proof-outline validity: the five conditions
// (Initialisation, Finalisation, Local correctness, Stability, Persistence)
// plus the direct conclusion checks they are meant to guarantee.
//
// Hoare triples and implications are quantified over a finite Universe of
// states. Over the reachable universe the verdict is sound for the given
// program and initial state; a generated universe is a testing device only.

namespace pxv {

struct ProofOutline {
  Assertion in_assert = Assertion::constant(true);
  std::vector<std::unordered_map<LabelId, Assertion>> ann;  // per dense thread
  CrashInvariant inv;
  Assertion fin_assert = Assertion::constant(true);

  // Annotations default to true where the outline leaves a label bare.
  const Assertion& annotation(ThreadId t, LabelId l) const;
};

struct Universe {
  enum class Kind { Reachable, Generated };
  Kind kind = Kind::Reachable;
  std::shared_ptr<const std::vector<MachineState>> states;
  bool truncated = false;

  static Universe reachable(std::vector<MachineState> states, bool truncated);
  static Universe generated(std::vector<MachineState> states);
};

struct HoareResult {
  bool ok = true;
  std::optional<std::pair<MachineState, MachineState>> counterexample;  // (pre, post)
};

// {P} stmt {Q} with the statement executed by `tid`, quantified over every
// universe state satisfying P. A ghost update is applied to the successor
// before Q is evaluated, which realizes the substitution Q[e/a].
HoareResult hoare_holds(const Assertion& P, ThreadId tid, const AtomicStmt& stmt,
                        const Assertion& Q, const std::optional<AuxUpdate>& aux,
                        const Universe& U, const StepOptions& opts,
                        const Declarations& d);

struct ConditionResult {
  enum class Verdict { Pass, Fail, Bounded, Skipped };
  Verdict verdict = Verdict::Pass;
  std::string detail;

  bool passed() const { return verdict == Verdict::Pass; }
};

struct ValidityReport {
  ConditionResult initialisation;
  ConditionResult finalisation;
  ConditionResult local_correctness;
  ConditionResult stability;
  ConditionResult persistence;
  std::vector<ThreadId> persistence_witnesses;

  // Direct conclusion checks over the reachable universe: every state
  // satisfies its annotation at the current pc, all-final states satisfy
  // fin, and every possible NVM satisfies the crash invariant.
  ConditionResult annotation_coverage;
  ConditionResult final_conclusion;
  ConditionResult crash_conclusion;

  bool universe_truncated = false;
  std::string note;

  bool pass() const;              // the five outline conditions
  bool conclusions_pass() const;  // the three direct checks
};

struct CheckOptions {
  Universe::Kind universe = Universe::Kind::Reachable;
  ExploreOptions explore;
  std::uint32_t gen_states = 500;
  GenBounds gen;
};

ConditionResult check_initialisation(const Program& prog, const ProofOutline& o,
                                     const Universe& U, const Declarations& d);
ConditionResult check_finalisation(const Program& prog, const ProofOutline& o,
                                   const Universe& U, const Declarations& d);
ConditionResult check_local_correctness(const Program& prog, const ProofOutline& o,
                                        const Universe& U, const StepOptions& opts,
                                        const Declarations& d);
ConditionResult check_stability(const Program& prog, const ProofOutline& o,
                                const Universe& U, const StepOptions& opts,
                                const Declarations& d);
ConditionResult check_persistence(const Program& prog, const ProofOutline& o,
                                  const Universe& U, const Declarations& d,
                                  std::vector<ThreadId>& witnesses);

ValidityReport check_outline(const Program& prog, const ProofOutline& o,
                             const InitSpec& spec, const CheckOptions& opts = {});

}  // namespace pxv
