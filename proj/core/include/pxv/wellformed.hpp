#pragma once

#include <cstdint>

#include "pxv/domain.hpp"

namespace pxv {

// Declared program symbols plus per-location initial values. Registers and
// auxiliaries always start at 0.
struct InitSpec {
  Declarations decls;
  std::vector<Value> init_values;  // per LocId; empty entries default to 0

  Value init_value(LocId l) const {
    return l < init_values.size() ? init_values[l] : 0;
  }

  void validate() const;  // locations non-empty, at least one thread, no dup names
};

// Memory gets one message per location in declaration order; every view of
// every thread points at its location's init message; pcs sit at init.
MachineState initial_state(const InitSpec& spec);
MachineState initial_state(const InitSpec& spec, const Program& prog);

struct WellformedReport {
  bool ok = true;
  std::vector<std::string> violations;  // clause names + detail
};

// Runtime-checked well-formedness clauses, reported individually:
//   c1: memory starts with one init message per declared location, in order
//   c2: all view timestamps index the memory
//   c3: coh(l) and vr_new are at most max_coh
//   c4: vp_commit(l) is at most max_per(l)
//   c5: vr_new is at most vp_ready
//   c6: the message at coh(l) has location l
//   c7: observable, persistent, and asynchronous sets are non-empty
WellformedReport well_formed_report(const MachineState& s, const Declarations& d);
bool is_well_formed(const MachineState& s, const Declarations& d);

struct GenBounds {
  std::uint32_t max_extra_writes = 6;
  Value max_value = 3;
  std::uint64_t seed = 0;
};

// A random well-formed state: the initial state extended by random writes and
// monotone per-thread view advancements. Deterministic in the seed.
MachineState gen_state(const InitSpec& spec, const GenBounds& b);

}  // namespace pxv
