#include "pxv/views.hpp"

#include <algorithm>

namespace pxv {

namespace {

void sort_unique(std::vector<std::uint32_t>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

ValueSet vals(const Memory& mem, const TsSet& ts) {
  ValueSet out;
  out.reserve(ts.size());
  for (Timestamp t : ts) {
    if (t >= mem.size()) throw EvalError("timestamp out of range in vals");
    out.push_back(mem[t].val);
  }
  sort_unique(out);
  return out;
}

TsSet obs_ts_from(const MachineState& s, ThreadId t, LocId loc, Timestamp from) {
  const ThreadState& ts = s.threads.at(t);
  const Timestamp floor = ts.coh.at(loc);
  TsSet out;
  for (Timestamp i = 0; i < s.mem.size(); ++i) {
    if (s.mem[i].loc != loc) continue;
    if (i < floor) continue;
    if (!no_write_to(s.mem, loc, i, from)) continue;
    out.push_back(i);
  }
  return out;
}

TsSet obs_ts(const MachineState& s, ThreadId t, LocId loc) {
  return obs_ts_from(s, t, loc, s.threads.at(t).vr_new);
}

ValueSet thread_view(const MachineState& s, ThreadId t, LocId loc) {
  return vals(s.mem, obs_ts(s, t, loc));
}

TsSet persist_ts(const MachineState& s, LocId loc) {
  const Timestamp bound = s.max_per(loc);
  TsSet out;
  for (Timestamp i = 0; i < s.mem.size(); ++i)
    if (s.mem[i].loc == loc && no_write_to(s.mem, loc, i, bound)) out.push_back(i);
  return out;
}

ValueSet pview(const MachineState& s, LocId loc) { return vals(s.mem, persist_ts(s, loc)); }

TsSet async_ts(const MachineState& s, ThreadId t, LocId loc) {
  const Timestamp bound = s.threads.at(t).vp_async.at(loc);
  TsSet out;
  for (Timestamp i = 0; i < s.mem.size(); ++i)
    if (s.mem[i].loc == loc && no_write_to(s.mem, loc, i, bound)) out.push_back(i);
  return out;
}

ValueSet aview(const MachineState& s, ThreadId t, LocId loc) {
  return vals(s.mem, async_ts(s, t, loc));
}

TsSet cond_view_ts(const MachineState& s, ThreadId t, LocId loc, Value v) {
  const ThreadState& ts = s.threads.at(t);
  TsSet out;
  for (Timestamp i : obs_ts(s, t, loc)) {
    if (s.mem[i].val != v) continue;
    const Timestamp post = (i == ts.coh.at(loc)) ? ts.vr_new : std::max(i, ts.vr_new);
    out.push_back(post);
  }
  sort_unique(out);
  return out;
}

ValueSet cond_obs_view(const MachineState& s, ThreadId t, LocId loc, Value v, LocId y) {
  TsSet union_ts;
  for (Timestamp post : cond_view_ts(s, t, loc, v)) {
    TsSet part = obs_ts_from(s, t, y, post);
    union_ts.insert(union_ts.end(), part.begin(), part.end());
  }
  sort_unique(union_ts);
  return vals(s.mem, union_ts);
}

Timestamp last_ts(const Memory& mem, LocId loc) { return last_write_ts(mem, loc); }

bool last_reader(const MachineState& s, LocId loc, ThreadId t) {
  const TsSet ots = obs_ts(s, t, loc);
  return ots.size() == 1 && ots[0] == last_ts(s.mem, loc);
}

bool last_flush(const MachineState& s, LocId loc, ThreadId t) {
  return last_ts(s.mem, loc) <= std::max(s.threads.at(t).max_coh(), s.max_per(loc));
}

bool last_mfence(const MachineState& s, LocId loc, ThreadId t) {
  return last_ts(s.mem, loc) <= s.threads.at(t).max_coh();
}

bool last_val(const MachineState& s, LocId loc, Value v) {
  return s.mem[last_ts(s.mem, loc)].val == v;
}

std::uint32_t write_count(const MachineState& s, LocId loc, Value v) {
  std::uint32_t n = 0;
  for (const Message& m : s.mem)
    if (m.loc == loc && m.val == v) ++n;
  return n;
}

}  // namespace pxv
