#include "pxv/wellformed.hpp"

#include <algorithm>
#include <random>
#include <unordered_set>

#include "pxv/views.hpp"

namespace pxv {

void InitSpec::validate() const {
  if (decls.locations.empty()) throw ConfigError("no locations declared");
  if (decls.thread_ids.empty()) throw ConfigError("no threads declared");
  std::unordered_set<std::string> seen;
  for (const auto& l : decls.locations)
    if (!seen.insert(l).second) throw ConfigError("duplicate location name: " + l);
  seen.clear();
  for (const auto& r : decls.registers)
    if (!seen.insert(r.name).second) throw ConfigError("duplicate register name: " + r.name);
  seen.clear();
  for (const auto& a : decls.aux_vars)
    if (!seen.insert(a).second) throw ConfigError("duplicate auxiliary name: " + a);
}

MachineState initial_state(const InitSpec& spec) {
  spec.validate();
  const std::size_t nloc = spec.decls.num_locations();
  const std::size_t nthr = spec.decls.num_threads();

  MachineState s;
  s.mem.reserve(nloc);
  for (LocId l = 0; l < nloc; ++l) s.mem.push_back(Message{l, spec.init_value(l)});

  s.threads.resize(nthr);
  for (ThreadId t = 0; t < nthr; ++t) {
    ThreadState& ts = s.threads[t];
    ts.coh.resize(nloc);
    ts.vp_async.resize(nloc);
    ts.vp_commit.resize(nloc);
    for (LocId l = 0; l < nloc; ++l) {
      ts.coh[l] = l;  // init message of l sits at timestamp l
      ts.vp_async[l] = l;
      ts.vp_commit[l] = l;
    }
    ts.vr_new = 0;
    ts.vp_ready = 0;
    ts.regs.assign(spec.decls.regs_of(t), 0);
  }
  s.pc.assign(nthr, Program::kInit);
  s.aux.assign(spec.decls.aux_vars.size(), 0);
  return s;
}

MachineState initial_state(const InitSpec& spec, const Program& prog) {
  prog.validate(spec.decls);
  return initial_state(spec);
}

WellformedReport well_formed_report(const MachineState& s, const Declarations& d) {
  WellformedReport rep;
  auto fail = [&](const std::string& msg) {
    rep.ok = false;
    rep.violations.push_back(msg);
  };

  const std::size_t nloc = d.num_locations();
  const auto msize = static_cast<Timestamp>(s.mem.size());

  // c1: per-location init messages in declaration order
  if (s.mem.size() < nloc) {
    fail("c1: memory shorter than the declared location count");
  } else {
    for (LocId l = 0; l < nloc; ++l)
      if (s.mem[l].loc != l)
        fail("c1: timestamp " + std::to_string(l) + " is not the init message of " +
             d.location_name(l));
  }
  if (s.threads.empty()) fail("c1: no thread states");

  for (ThreadId t = 0; t < s.threads.size(); ++t) {
    const ThreadState& ts = s.threads[t];
    const Timestamp maxcoh = ts.max_coh();
    auto tn = std::to_string(d.thread_name(t));
    if (ts.vr_new >= msize) fail("c2: vr_new out of range (thread " + tn + ")");
    if (ts.vp_ready >= msize) fail("c2: vp_ready out of range (thread " + tn + ")");
    if (ts.vr_new > maxcoh) fail("c3: vr_new above max_coh (thread " + tn + ")");
    if (ts.vr_new > ts.vp_ready) fail("c5: vr_new above vp_ready (thread " + tn + ")");
    for (LocId l = 0; l < nloc; ++l) {
      auto ln = d.location_name(l);
      if (ts.coh.at(l) >= msize) fail("c2: coh(" + ln + ") out of range (thread " + tn + ")");
      if (ts.vp_async.at(l) >= msize)
        fail("c2: vp_async(" + ln + ") out of range (thread " + tn + ")");
      if (ts.vp_commit.at(l) >= msize)
        fail("c2: vp_commit(" + ln + ") out of range (thread " + tn + ")");
      if (ts.coh.at(l) > maxcoh) fail("c3: coh above max_coh (thread " + tn + ")");
      if (ts.vp_commit.at(l) > s.max_per(l))
        fail("c4: vp_commit(" + ln + ") above max_per (thread " + tn + ")");
      if (ts.coh.at(l) < msize && s.mem[ts.coh.at(l)].loc != l)
        fail("c6: coh(" + ln + ") points at a foreign message (thread " + tn + ")");
    }
  }

  if (rep.ok) {
    // c7 only makes sense once the indexing clauses hold.
    for (ThreadId t = 0; t < s.threads.size(); ++t) {
      for (LocId l = 0; l < nloc; ++l) {
        auto where = " (thread " + std::to_string(d.thread_name(t)) + ", " +
                     d.location_name(l) + ")";
        if (obs_ts(s, t, l).empty()) fail("c7: empty observable set" + where);
        if (persist_ts(s, l).empty()) fail("c7: empty persistent set" + where);
        if (async_ts(s, t, l).empty()) fail("c7: empty asynchronous set" + where);
      }
    }
  }
  return rep;
}

bool is_well_formed(const MachineState& s, const Declarations& d) {
  return well_formed_report(s, d).ok;
}

MachineState gen_state(const InitSpec& spec, const GenBounds& b) {
  MachineState s = initial_state(spec);
  if (b.max_extra_writes == 0) return s;  // no extension, no advancement
  std::mt19937_64 rng(b.seed);
  auto rand_in = [&](std::uint32_t lo, std::uint32_t hi) {  // inclusive bounds
    return lo + static_cast<std::uint32_t>(rng() % (hi - lo + 1));
  };

  const auto nloc = static_cast<LocId>(spec.decls.num_locations());
  const std::uint32_t extra = b.max_extra_writes == 0 ? 0 : rand_in(0, b.max_extra_writes);
  for (std::uint32_t i = 0; i < extra; ++i)
    s.mem.push_back(Message{rand_in(0, nloc - 1), rand_in(0, b.max_value)});

  // Timestamps of writes per location, for coherence-view choices.
  std::vector<std::vector<Timestamp>> writes(nloc);
  for (Timestamp t = 0; t < s.mem.size(); ++t) writes[s.mem[t].loc].push_back(t);

  // Monotone advancement from the initial views keeps the state inside the
  // reachable envelope (views never run ahead of max_coh, commits never run
  // ahead of the asynchronous view).
  for (ThreadState& ts : s.threads) {
    for (LocId l = 0; l < nloc; ++l)
      ts.coh[l] = writes[l][rand_in(0, static_cast<std::uint32_t>(writes[l].size()) - 1)];
    const Timestamp maxcoh = ts.max_coh();
    ts.vr_new = rand_in(0, maxcoh);
    ts.vp_ready = rand_in(ts.vr_new, maxcoh);
    for (LocId l = 0; l < nloc; ++l) {
      ts.vp_async[l] = rand_in(l, maxcoh);  // init timestamp of l is l
      ts.vp_commit[l] = rand_in(l, ts.vp_async[l]);
    }
    for (Value& r : ts.regs) r = rand_in(0, b.max_value);
  }
  return s;
}

}  // namespace pxv
