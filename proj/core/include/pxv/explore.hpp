#pragma once

#include "pxv/assertions.hpp"
#include "pxv/domain.hpp"
#include "pxv/step.hpp"

// Exhaustive interleaving exploration with structural state deduplication,
// outcome extraction, and crash-reachability analysis.

namespace pxv {

struct ExploreOptions {
  std::optional<std::uint32_t> max_steps;  // bound on transitions per path
  StepOptions step;
};

struct ReachGraph {
  std::vector<MachineState> states;  // [0] is the initial state
  struct Edge {
    std::uint32_t from = 0;
    ThreadId tid = 0;
    std::uint32_t to = 0;
  };
  std::vector<Edge> edges;
  // Discovery edge per state (-1 for the initial state), for trace replay.
  std::vector<std::int32_t> parent_edge;
  bool truncated = false;

  std::vector<std::uint32_t> trace_to(std::uint32_t state_index) const;  // state indices
};

// Breadth-first closure of `successors` from s0, deduplicating states by full
// structural equality. Cyclic programs require a step bound.
ReachGraph explore(const Program& prog, const MachineState& s0,
                   const ExploreOptions& opts = {});

// States with every program counter at fin.
std::vector<std::uint32_t> final_state_indices(const ReachGraph& g);
std::vector<MachineState> final_states(const ReachGraph& g);

// Projection of the final states onto the named registers, deduplicated.
using RegValuation = std::vector<std::pair<RegId, Value>>;
std::vector<RegValuation> outcomes(const ReachGraph& g, const Declarations& d,
                                   const std::vector<RegId>& regs);

// Union of possible NVMs over every reachable state: a crash may hit any
// program point.
std::vector<NvmMap> crash_reachable_nvms(const ReachGraph& g);

struct InvariantVerdict {
  bool ok = true;
  std::optional<std::uint32_t> state_index;
  std::optional<NvmMap> nvm;
};

// holds_after_crash at every state of the graph; first failure reported.
InvariantVerdict check_crash_invariant(const ReachGraph& g, const CrashInvariant& inv,
                                       const Declarations& d);

}  // namespace pxv
