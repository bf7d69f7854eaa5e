#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "pxv/parser.hpp"
#include "pxv/step.hpp"
#include "pxv/wellformed.hpp"

namespace pxv::testing {

inline std::string read_corpus(const std::string& name) {
  const std::string path = std::string(PXV_CORPUS_DIR) + "/" + name;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing corpus file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline LitmusFile load_corpus(const std::string& name) {
  return parse_litmus(read_corpus(name));
}

// Two locations (x, y), two threads with registers (a, b) and (c, d).
inline InitSpec tiny_spec() {
  InitSpec spec;
  spec.decls.locations = {"x", "y"};
  spec.decls.thread_ids = {1, 2};
  spec.decls.registers = {{"a", 0, 0}, {"b", 0, 1}, {"c", 1, 0}, {"d", 1, 1}};
  return spec;
}

// Runs one atomic statement on behalf of `t`, replacing thread state and
// memory in `s`.
inline std::vector<MachineState> lift_atomic(const MachineState& s, ThreadId t,
                                             const AtomicStmt& stmt,
                                             const StepOptions& opts = {}) {
  std::vector<MachineState> out;
  for (auto& succ : step_atomic(s.threads.at(t), s.mem, stmt, opts)) {
    MachineState s2 = s;
    s2.threads[t] = std::move(succ.ts);
    s2.mem = std::move(succ.mem);
    out.push_back(std::move(s2));
  }
  return out;
}

// Test-only oracle for the readable timestamps of a load: enumerated with
// explicit loops over the premises, independent of the step and view code.
inline std::vector<Timestamp> readable_ts_oracle(const Memory& mem, Timestamp coh,
                                                 Timestamp vr_new, LocId loc) {
  std::vector<Timestamp> out;
  for (Timestamp t = 0; t < mem.size(); ++t) {
    if (mem[t].loc != loc) continue;
    if (t < coh) continue;
    bool shadowed = false;
    for (Timestamp u = t + 1; u <= vr_new && u < mem.size(); ++u)
      if (mem[u].loc == loc) shadowed = true;
    if (!shadowed) out.push_back(t);
  }
  return out;
}

}  // namespace pxv::testing
