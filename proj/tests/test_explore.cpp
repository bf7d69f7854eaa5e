#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "pxv/explore.hpp"
#include "pxv/parser.hpp"

using namespace pxv;
using namespace pxv::testing;

namespace {

bool has_outcome(const std::vector<RegValuation>& outs, const Declarations& d,
                 std::initializer_list<std::pair<const char*, Value>> want) {
  for (const auto& v : outs) {
    bool all = true;
    for (const auto& [name, val] : want) {
      const RegId r = *d.find_register(name);
      bool found = false;
      for (const auto& [vr, vv] : v) found = found || (vr == r && vv == val);
      all = all && found;
    }
    if (all) return true;
  }
  return false;
}

std::vector<RegId> regs_of(const Declarations& d) {
  std::vector<RegId> out(d.registers.size());
  for (RegId r = 0; r < out.size(); ++r) out[r] = r;
  return out;
}

}  // namespace

TEST_CASE("a deterministic chain yields k+1 states") {
  const char* src = R"(
locations x
thread 1:
  init: store x 1 ; goto 2
  2: store x 2 ; goto 3
  3: sfence ; goto fin
)";
  const LitmusFile f = parse_litmus(src);
  const ReachGraph g = explore(f.program, initial_state(f.init, f.program), {});
  CHECK(g.states.size() == 4);
  CHECK_FALSE(g.truncated);
  CHECK(final_state_indices(g).size() == 1);
}

TEST_CASE("store buffering reaches a=0, b=0") {
  const LitmusFile f = load_corpus("sb.lit");
  const ReachGraph g = explore(f.program, initial_state(f.init, f.program), {});
  const auto outs = outcomes(g, f.init.decls, regs_of(f.init.decls));
  CHECK(has_outcome(outs, f.init.decls, {{"a", 0}, {"b", 0}}));
}

TEST_CASE("message passing never reaches a=7, b=0") {
  const LitmusFile f = load_corpus("mp.lit");
  const ReachGraph g = explore(f.program, initial_state(f.init, f.program), {});
  const auto outs = outcomes(g, f.init.decls, regs_of(f.init.decls));
  CHECK_FALSE(has_outcome(outs, f.init.decls, {{"a", 7}, {"b", 0}}));
  CHECK(has_outcome(outs, f.init.decls, {{"a", 0}, {"b", 0}}));
  CHECK(has_outcome(outs, f.init.decls, {{"a", 7}, {"b", 42}}));
  // every final state satisfies a = 7 => b = 42
  const Assertion q = parse_assertion("reg a = 7 => reg b = 42", f.init.decls);
  for (const MachineState& s : final_states(g)) CHECK(q.eval(s, f.init.decls));
}

TEST_CASE("projection onto no registers is a single empty valuation") {
  const LitmusFile f = load_corpus("sb.lit");
  const ReachGraph g = explore(f.program, initial_state(f.init, f.program), {});
  const auto outs = outcomes(g, f.init.decls, {});
  CHECK(outs.size() == 1);
  CHECK(outs[0].empty());
}

TEST_CASE("crash-reachable memories of the persist litmus tests") {
  auto nvms_of = [](const char* name) {
    const LitmusFile f = load_corpus(name);
    const ReachGraph g = explore(f.program, initial_state(f.init, f.program), {});
    return crash_reachable_nvms(g);
  };
  auto contains = [](const std::vector<NvmMap>& nvms, const NvmMap& m) {
    return std::find(nvms.begin(), nvms.end(), m) != nvms.end();
  };

  const auto a = nvms_of("two_stores.lit");
  CHECK(a == std::vector<NvmMap>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});

  CHECK_FALSE(contains(nvms_of("flush_order.lit"), {0, 1}));
  CHECK(contains(nvms_of("flushopt_unfenced.lit"), {0, 1}));
  CHECK_FALSE(contains(nvms_of("flushopt_sfence.lit"), {0, 1}));
}

TEST_CASE("crash invariant verdicts") {
  auto verdict_of = [](const char* name) {
    const LitmusFile f = load_corpus(name);
    const ReachGraph g = explore(f.program, initial_state(f.init, f.program), {});
    return check_crash_invariant(g, *f.invariant, f.init.decls);
  };
  CHECK(verdict_of("flush_order.lit").ok);
  CHECK(verdict_of("flushopt_sfence.lit").ok);
  CHECK(verdict_of("mp_flush.lit").ok);

  const InvariantVerdict bad = verdict_of("flushopt_unfenced.lit");
  CHECK_FALSE(bad.ok);
  REQUIRE(bad.nvm.has_value());
  CHECK((*bad.nvm) == NvmMap{0, 1});

  // trivially true invariant passes anywhere
  const LitmusFile f = load_corpus("two_stores.lit");
  const ReachGraph g = explore(f.program, initial_state(f.init, f.program), {});
  CHECK(check_crash_invariant(g, CrashInvariant{}, f.init.decls).ok);
}

TEST_CASE("exploration is deterministic and deduplicated") {
  const LitmusFile f = load_corpus("mp_flush.lit");
  const ReachGraph g1 = explore(f.program, initial_state(f.init, f.program), {});
  const ReachGraph g2 = explore(f.program, initial_state(f.init, f.program), {});
  CHECK(g1.states == g2.states);
  CHECK(g1.edges.size() == g2.edges.size());
  for (std::size_t i = 0; i < g1.states.size(); ++i)
    for (std::size_t j = i + 1; j < g1.states.size(); ++j)
      CHECK_FALSE(g1.states[i] == g1.states[j]);
}

TEST_CASE("well-formedness holds at every reachable state") {
  const char* files[] = {"two_stores.lit", "flush_order.lit",  "flushopt_unfenced.lit",
                         "flushopt_sfence.lit", "mp_flush.lit", "sb.lit",
                         "mp.lit",          "flush_buffering_proof.lit",
                         "epoch_persistency_proof.lit", "cas_lock_proof.lit",
                         "mfence_sb_proof.lit"};
  for (const char* name : files) {
    const LitmusFile f = load_corpus(name);
    ExploreOptions opts;
    opts.max_steps = 10000;
    const ReachGraph g = explore(f.program, initial_state(f.init, f.program), opts);
    CHECK_FALSE(g.truncated);
    for (const MachineState& s : g.states) {
      const WellformedReport rep = well_formed_report(s, f.init.decls);
      if (!rep.ok) {
        CAPTURE(name);
        CAPTURE(rep.violations[0]);
      }
      CHECK(rep.ok);
    }
  }
}

TEST_CASE("auxiliary stripping commutes with exploration") {
  const LitmusFile f = load_corpus("flush_buffering_proof.lit");
  const ReachGraph g = explore(f.program, initial_state(f.init, f.program), {});
  const Program stripped = strip_aux(f.program);
  InitSpec spec2 = f.init;
  const ReachGraph g2 = explore(stripped, initial_state(spec2, stripped), {});

  auto project = [](const ReachGraph& gr) {
    std::vector<MachineState> out;
    for (MachineState s : gr.states) {
      s.aux.assign(s.aux.size(), 0);
      out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end(), [](const MachineState& a, const MachineState& b) {
      return MachineStateHash{}(a) < MachineStateHash{}(b);
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  CHECK(project(g) == project(g2));
}

TEST_CASE("cyclic programs require a bound and report truncation") {
  const char* src = R"(
locations x
thread 1:
  init: cas a x 0 1 ; goto 2
  2: if (a = 1) goto fin else goto init
)";
  const LitmusFile f = parse_litmus(src);
  CHECK(f.program.has_cycle());
  CHECK_THROWS_AS(explore(f.program, initial_state(f.init, f.program), {}), ConfigError);

  ExploreOptions opts;
  opts.max_steps = 3;
  const ReachGraph g = explore(f.program, initial_state(f.init, f.program), opts);
  CHECK(g.states.size() > 1);

  // a spin loop without writes closes under deduplication: no truncation
  const char* spin = R"(
locations x
thread 1:
  init: load a x ; goto 2
  2: if (a = 1) goto fin else goto init
)";
  const LitmusFile f2 = parse_litmus(spin);
  ExploreOptions opts2;
  opts2.max_steps = 50;
  const ReachGraph g2 = explore(f2.program, initial_state(f2.init, f2.program), opts2);
  CHECK_FALSE(g2.truncated);

  // a looping store grows the memory forever: the bound must prune
  const char* grower = R"(
locations x
thread 1:
  init: store x 1 ; goto 2
  2: skip ; goto init
)";
  const LitmusFile f3 = parse_litmus(grower);
  ExploreOptions opts3;
  opts3.max_steps = 4;
  const ReachGraph g3 = explore(f3.program, initial_state(f3.init, f3.program), opts3);
  CHECK(g3.truncated);
}

TEST_CASE("graph edges connect member states and cover every non-initial state") {
  const LitmusFile f = load_corpus("mp_flush.lit");
  const ReachGraph g = explore(f.program, initial_state(f.init, f.program), {});
  std::vector<bool> has_incoming(g.states.size(), false);
  for (const auto& e : g.edges) {
    CHECK(e.from < g.states.size());
    CHECK(e.to < g.states.size());
    CHECK(e.tid < f.init.decls.num_threads());
    has_incoming[e.to] = true;
  }
  for (std::uint32_t i = 1; i < g.states.size(); ++i) CHECK(has_incoming[i]);
  CHECK(g.parent_edge[0] == -1);
}

TEST_CASE("counterexample traces replay from the initial state") {
  const LitmusFile f = load_corpus("flushopt_unfenced.lit");
  const ReachGraph g = explore(f.program, initial_state(f.init, f.program), {});
  const InvariantVerdict v = check_crash_invariant(g, *f.invariant, f.init.decls);
  REQUIRE_FALSE(v.ok);
  const auto trace = g.trace_to(*v.state_index);
  REQUIRE(!trace.empty());
  CHECK(trace.front() == 0);
  CHECK(trace.back() == *v.state_index);
}
