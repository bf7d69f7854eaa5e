#pragma once

#include <cstdint>

#include "pxv/domain.hpp"

// Timestamp-set and value-set computations behind every assertion form.
//
// The sets are computed eagerly as sorted vectors; memories at desk scale are
// a handful of messages long, so exactness beats cleverness here.

namespace pxv {

using TsSet = std::vector<Timestamp>;   // sorted, unique
using ValueSet = std::vector<Value>;    // sorted, unique

// { M[t].val | t in ts } as a sorted unique set.
ValueSet vals(const Memory& mem, const TsSet& ts);

// Timestamps of writes to `loc` that thread `t` can observe from timestamp
// `from`: at or above its coherence view and not shadowed by a later write
// to `loc` at or below `from`.
TsSet obs_ts_from(const MachineState& s, ThreadId t, LocId loc, Timestamp from);

// Observable timestamps / values for a read of `loc` by `t` (the [loc]_t view).
TsSet obs_ts(const MachineState& s, ThreadId t, LocId loc);
ValueSet thread_view(const MachineState& s, ThreadId t, LocId loc);

// Timestamps / values observable to persistent memory (the [loc]_P view).
TsSet persist_ts(const MachineState& s, LocId loc);
ValueSet pview(const MachineState& s, LocId loc);

// Timestamps / values of the asynchronous-persist view (the [loc]_t^A view).
TsSet async_ts(const MachineState& s, ThreadId t, LocId loc);
ValueSet aview(const MachineState& s, ThreadId t, LocId loc);

// Read-view timestamps thread `t` may end up with after reading value `v`
// from `loc`: the post-read view stays put for an internal read and jumps to
// the read timestamp otherwise.
TsSet cond_view_ts(const MachineState& s, ThreadId t, LocId loc, Value v);

// The conditional view <loc = v>[y]_t: values observable for `y` immediately
// after `t` reads `v` from `loc`.
ValueSet cond_obs_view(const MachineState& s, ThreadId t, LocId loc, Value v, LocId y);

// Timestamp of the last write to `loc`.
Timestamp last_ts(const Memory& mem, LocId loc);

// `t` is currently viewing the last write to `loc` and nothing else.
bool last_reader(const MachineState& s, LocId loc, ThreadId t);

// A flush of `loc` by `t` is guaranteed to persist the last write to `loc`.
bool last_flush(const MachineState& s, LocId loc, ThreadId t);

// After an mfence by `t`, `t`'s view of `loc` is the last write to `loc`.
bool last_mfence(const MachineState& s, LocId loc, ThreadId t);

// The last write to `loc` has value `v`.
bool last_val(const MachineState& s, LocId loc, Value v);

// Number of writes to `loc` carrying value `v`.
std::uint32_t write_count(const MachineState& s, LocId loc, Value v);

}  // namespace pxv
