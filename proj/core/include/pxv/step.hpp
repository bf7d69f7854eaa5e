#pragma once

#include "pxv/domain.hpp"

// Atomic and program transitions. Step functions are pure: they take a state
// and return every successor the rules permit, in a canonical order
// (deterministic successor first, then external reads by ascending timestamp).

namespace pxv {

struct StepOptions {
  // Require the external read of a failing CAS to target an unshadowed
  // (observable) timestamp, like an external load does. Off by default:
  // the fail rule is taken as written, with no such premise.
  bool strict_cas_read = false;
};

struct ThreadSuccessor {
  ThreadState ts;
  Memory mem;
};

// All successors of one atomic statement executed on (ts, mem).
//
// Loads read exactly the observable timestamps: the coherence-view read is
// only enabled when no later write to the location sits at or below the read
// view. Stores append; fences and persists only advance views.
std::vector<ThreadSuccessor> step_atomic(const ThreadState& ts, const Memory& mem,
                                         const AtomicStmt& stmt,
                                         const StepOptions& opts = {});

// All successors of one program step by thread `t`: dispatches on the
// labelled statement at (t, pc(t)), moves the program counter, and applies
// the auxiliary update atomically for ghost statements.
// Precondition: pc(t) != fin and code exists there.
std::vector<MachineState> step_program(const MachineState& s, const Program& prog,
                                       ThreadId t, const StepOptions& opts = {});

// Union of step_program over all threads not yet at fin, tagged by thread.
std::vector<std::pair<ThreadId, MachineState>> successors(const MachineState& s,
                                                          const Program& prog,
                                                          const StepOptions& opts = {});

// Replace every ghost statement by its plain counterpart.
Program strip_aux(const Program& prog);

}  // namespace pxv
