#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "pxv/explore.hpp"
#include "pxv/step.hpp"
#include "pxv/views.hpp"

using namespace pxv;
using namespace pxv::testing;

namespace {

// memory [x=0, y=0, x=1] with all views at the init messages
MachineState three_write_state() {
  MachineState s = initial_state(tiny_spec());
  s.mem.push_back(Message{0, 1});
  return s;
}

}  // namespace

TEST_CASE("vals projects message values") {
  Memory m{{0, 0}, {0, 1}};
  CHECK(vals(m, {0, 1}) == ValueSet{0, 1});
  CHECK(vals(m, {}) == ValueSet{});
  Memory m2{{0, 0}, {1, 0}, {0, 1}};
  CHECK(vals(m2, {0, 2}) == ValueSet{0, 1});
  CHECK_THROWS_AS(vals(m2, {7}), EvalError);
}

TEST_CASE("observable-from sets on the three-write memory") {
  const MachineState s = three_write_state();
  // from timestamp 0 both x writes are visible; from 2 the new write
  // shadows the init one
  CHECK(obs_ts_from(s, 0, 0, 0) == TsSet{0, 2});
  CHECK(obs_ts_from(s, 0, 0, 2) == TsSet{2});
  // initial state: only the init write
  const MachineState init = initial_state(tiny_spec());
  CHECK(obs_ts_from(init, 0, 0, 0) == TsSet{0});
}

TEST_CASE("thread views") {
  const MachineState init = initial_state(tiny_spec());
  CHECK(thread_view(init, 0, 0) == ValueSet{0});
  CHECK(thread_view(init, 1, 1) == ValueSet{0});

  // after thread 1 stores x 42, its own view is exactly {42}
  auto succs = lift_atomic(init, 0, AtomicStmt::store(0, Expr::lit(42)));
  CHECK(thread_view(succs[0], 0, 0) == ValueSet{42});
  // the other thread still sees both writes
  auto succs2 = lift_atomic(init, 0, AtomicStmt::store(0, Expr::lit(1)));
  CHECK(thread_view(succs2[0], 1, 0) == ValueSet{0, 1});
}

TEST_CASE("persistent views") {
  const MachineState init = initial_state(tiny_spec());
  CHECK(pview(init, 0) == ValueSet{0});
  // three-write memory with commits at the init messages: both x values
  // may persist
  CHECK(pview(three_write_state(), 0) == ValueSet{0, 1});
  // after a flush by the storing thread the stale value is gone
  auto s1 = lift_atomic(init, 0, AtomicStmt::store(0, Expr::lit(1)))[0];
  auto s2 = lift_atomic(s1, 0, AtomicStmt::flush(0))[0];
  CHECK(pview(s2, 0) == ValueSet{1});
  CHECK(pview(s2, 1) == ValueSet{0});
}

TEST_CASE("asynchronous views") {
  const MachineState init = initial_state(tiny_spec());
  CHECK(aview(init, 0, 0) == ValueSet{0});
  // store without a flushopt leaves the async view behind
  auto s1 = lift_atomic(init, 0, AtomicStmt::store(0, Expr::lit(1)))[0];
  CHECK(aview(s1, 0, 0) == ValueSet{0, 1});
  // flushopt advances it to the coherence view
  auto s2 = lift_atomic(s1, 0, AtomicStmt::flushopt(0))[0];
  CHECK(aview(s2, 0, 0) == ValueSet{1});
}

TEST_CASE("conditional view timestamps") {
  const MachineState s = three_write_state();
  // no write to x carries 7
  CHECK(cond_view_ts(s, 0, 0, 7) == TsSet{});
  // the external write at 2 carries 1, beyond the read view
  CHECK(cond_view_ts(s, 0, 0, 1) == TsSet{2});
  // a coherence-view read keeps the current read view
  MachineState s2 = s;
  s2.threads[0].coh[1] = 1;
  s2.threads[0].coh[0] = 2;
  s2.threads[0].vr_new = 2;
  s2.threads[0].vp_ready = 2;
  MachineState s3 = s2;
  s3.mem.push_back(Message{1, 9});
  s3.threads[0].coh[1] = 3;
  s3.threads[0].vr_new = 3;
  s3.threads[0].vp_ready = 3;
  CHECK(cond_view_ts(s3, 0, 0, 1) == TsSet{3});  // read of coh write keeps vr_new=3
}

TEST_CASE("conditional observable views") {
  // message passing: after the writer finishes, reading 7 from y pins x to 42
  const LitmusFile mp = load_corpus("mp.lit");
  MachineState s = initial_state(mp.init, mp.program);
  s = step_program(s, mp.program, 0)[0];
  s = step_program(s, mp.program, 0)[0];
  CHECK(cond_obs_view(s, 1, 1, 7, 0) == ValueSet{42});
  // unreadable condition value: empty set
  CHECK(cond_obs_view(s, 1, 1, 9, 0) == ValueSet{});
}

TEST_CASE("conditional view on the same location") {
  // memory [x=0, y=0, y=5, y=7], coh(y)=1, vr_new=1: reading 5 jumps the
  // view to its timestamp, so only values at or after it survive
  MachineState s = initial_state(tiny_spec());
  s.mem.push_back(Message{1, 5});
  s.mem.push_back(Message{1, 7});
  s.threads[0].coh[1] = 1;
  s.threads[0].vr_new = 1;
  s.threads[0].vp_ready = 1;
  CHECK(cond_obs_view(s, 0, 1, 5, 1) == ValueSet{5, 7});
}

TEST_CASE("last-write helpers") {
  const MachineState init = initial_state(tiny_spec());
  const MachineState s = three_write_state();
  CHECK(last_ts(init.mem, 0) == 0);
  CHECK(last_ts(s.mem, 0) == 2);
  CHECK(last_ts(s.mem, 1) == 1);

  CHECK(last_reader(init, 0, 0));
  CHECK(last_reader(init, 1, 1));
  // a thread left behind sees two writes, not just the last
  CHECK_FALSE(last_reader(s, 0, 1));
  CHECK(obs_ts(s, 1, 0) == TsSet{0, 2});
  // the storing thread is the last reader of its own write
  auto s1 = lift_atomic(init, 0, AtomicStmt::store(0, Expr::lit(1)))[0];
  CHECK(last_reader(s1, 0, 0));

  CHECK(last_flush(init, 0, 0));
  CHECK(last_flush(s1, 0, 0));
  // behind thread: max_coh 1, max_per(x) 0, last write at 2
  CHECK_FALSE(last_flush(s, 0, 1));
  CHECK(last_mfence(init, 0, 0));
  CHECK(last_mfence(s1, 0, 0));
  CHECK_FALSE(last_mfence(s, 0, 1));

  CHECK(last_val(init, 0, 0));
  auto sv = lift_atomic(init, 0, AtomicStmt::store(0, Expr::lit(2)))[0];
  CHECK(last_val(sv, 0, 2));
  auto sv2 = lift_atomic(sv, 0, AtomicStmt::store(0, Expr::lit(1)))[0];
  CHECK_FALSE(last_val(sv2, 0, 2));

  CHECK(write_count(init, 0, 0) == 1);
  CHECK(write_count(sv, 0, 2) == 1);
  CHECK(write_count(sv, 0, 9) == 0);
}

TEST_CASE("view sets are never empty on well-formed states") {
  const InitSpec spec = tiny_spec();
  GenBounds b;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    b.seed = seed;
    const MachineState s = gen_state(spec, b);
    for (ThreadId t = 0; t < 2; ++t)
      for (LocId l = 0; l < 2; ++l) {
        CHECK_FALSE(obs_ts(s, t, l).empty());
        CHECK_FALSE(persist_ts(s, l).empty());
        CHECK_FALSE(async_ts(s, t, l).empty());
      }
  }
}

TEST_CASE("a last reader sees exactly the last value") {
  const InitSpec spec = tiny_spec();
  GenBounds b;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    b.seed = seed;
    const MachineState s = gen_state(spec, b);
    for (ThreadId t = 0; t < 2; ++t)
      for (LocId l = 0; l < 2; ++l)
        if (last_reader(s, l, t))
          CHECK(thread_view(s, t, l) == ValueSet{s.mem[last_ts(s.mem, l)].val});
  }
}

TEST_CASE("loads only shrink observable sets") {
  const InitSpec spec = tiny_spec();
  GenBounds b;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    b.seed = seed;
    const MachineState s = gen_state(spec, b);
    for (ThreadId t = 0; t < 2; ++t)
      for (LocId l = 0; l < 2; ++l)
        for (const auto& s2 : lift_atomic(s, t, AtomicStmt::load(0, l)))
          for (LocId y = 0; y < 2; ++y) {
            const TsSet before = obs_ts(s, t, y);
            const TsSet after = obs_ts(s2, t, y);
            CHECK(std::includes(before.begin(), before.end(), after.begin(),
                                after.end()));
          }
  }
}

TEST_CASE("product and brute-force crash memories agree on generated states") {
  const InitSpec spec = tiny_spec();
  GenBounds b;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    b.seed = seed;
    const MachineState s = gen_state(spec, b);
    CHECK(possible_nvms(s) == possible_nvms_bruteforce(s));
  }
}
