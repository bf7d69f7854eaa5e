#include "pxv/explore.hpp"

#include <algorithm>
#include <unordered_map>

namespace pxv {

std::vector<std::uint32_t> ReachGraph::trace_to(std::uint32_t state_index) const {
  std::vector<std::uint32_t> path{state_index};
  while (parent_edge.at(path.back()) >= 0)
    path.push_back(edges[static_cast<std::uint32_t>(parent_edge[path.back()])].from);
  std::reverse(path.begin(), path.end());
  return path;
}

ReachGraph explore(const Program& prog, const MachineState& s0, const ExploreOptions& opts) {
  if (prog.has_cycle() && !opts.max_steps)
    throw ConfigError("program has a control-flow cycle; a step bound is required");

  ReachGraph g;
  std::unordered_map<MachineState, std::uint32_t, MachineStateHash> index;
  g.states.push_back(s0);
  g.parent_edge.push_back(-1);
  index.emplace(s0, 0);

  std::vector<std::uint32_t> frontier{0};
  std::uint32_t depth = 0;
  while (!frontier.empty()) {
    if (opts.max_steps && depth >= *opts.max_steps) {
      // Unexpanded frontier states remain; anything beyond them is unexplored.
      bool any_enabled = false;
      for (std::uint32_t si : frontier)
        if (!successors(g.states[si], prog, opts.step).empty()) any_enabled = true;
      g.truncated = any_enabled;
      break;
    }
    std::vector<std::uint32_t> next;
    for (std::uint32_t si : frontier) {
      // Copy: g.states may reallocate while we expand.
      const MachineState cur = g.states[si];
      for (auto& [tid, succ] : successors(cur, prog, opts.step)) {
        auto [it, inserted] = index.emplace(succ, static_cast<std::uint32_t>(g.states.size()));
        if (inserted) {
          g.states.push_back(std::move(succ));
          g.parent_edge.push_back(static_cast<std::int32_t>(g.edges.size()));
          next.push_back(it->second);
        }
        g.edges.push_back({si, tid, it->second});
      }
    }
    frontier = std::move(next);
    ++depth;
  }
  return g;
}

std::vector<std::uint32_t> final_state_indices(const ReachGraph& g) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < g.states.size(); ++i) {
    const auto& pc = g.states[i].pc;
    if (std::all_of(pc.begin(), pc.end(), [](LabelId l) { return l == Program::kFin; }))
      out.push_back(i);
  }
  return out;
}

std::vector<MachineState> final_states(const ReachGraph& g) {
  std::vector<MachineState> out;
  for (std::uint32_t i : final_state_indices(g)) out.push_back(g.states[i]);
  return out;
}

std::vector<RegValuation> outcomes(const ReachGraph& g, const Declarations& d,
                                   const std::vector<RegId>& regs) {
  std::vector<RegValuation> out;
  for (std::uint32_t i : final_state_indices(g)) {
    RegValuation v;
    v.reserve(regs.size());
    for (RegId r : regs) v.emplace_back(r, g.states[i].reg_value(d, r));
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NvmMap> crash_reachable_nvms(const ReachGraph& g) {
  std::vector<NvmMap> out;
  for (const MachineState& s : g.states)
    for (NvmMap& nvm : possible_nvms(s)) out.push_back(std::move(nvm));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

InvariantVerdict check_crash_invariant(const ReachGraph& g, const CrashInvariant& inv,
                                       const Declarations& d) {
  for (std::uint32_t i = 0; i < g.states.size(); ++i) {
    CrashCheck c = holds_after_crash(inv, g.states[i], d);
    if (!c.ok) return {false, i, std::move(c.counterexample)};
  }
  return {};
}

}  // namespace pxv
