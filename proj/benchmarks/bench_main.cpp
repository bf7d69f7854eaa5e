#include <benchmark/benchmark.h>

#include "pxv/explore.hpp"
#include "pxv/outline.hpp"
#include "pxv/parser.hpp"
#include "pxv/rules.hpp"

namespace {

const char* kMp = R"(
locations x y
thread 1:
  init: store x 42 ; goto 2
  2: store y 7 ; goto fin
thread 2:
  init: load a y ; goto 2
  2: load b x ; goto fin
)";

void BM_ExploreMp(benchmark::State& state) {
  const pxv::LitmusFile f = pxv::parse_litmus(kMp);
  const pxv::MachineState s0 = pxv::initial_state(f.init, f.program);
  for (auto _ : state) {
    pxv::ReachGraph g = pxv::explore(f.program, s0, {});
    benchmark::DoNotOptimize(g.states.size());
  }
}
BENCHMARK(BM_ExploreMp);

void BM_CrashNvms(benchmark::State& state) {
  const pxv::LitmusFile f = pxv::parse_litmus(kMp);
  const pxv::ReachGraph g = pxv::explore(f.program, pxv::initial_state(f.init, f.program), {});
  for (auto _ : state) {
    auto nvms = pxv::crash_reachable_nvms(g);
    benchmark::DoNotOptimize(nvms.size());
  }
}
BENCHMARK(BM_CrashNvms);

const char* kMpFlushProof = R"(
locations x y z
thread 1:
  init: store x 1 ; goto 2
  2: flush x ; goto 3
  3: store y 1 ; goto fin
thread 2:
  init: load a y ; goto 2
  2: if (a = 1) goto 3 else goto fin
  3: store z 1 ; goto fin
crash-invariant [z]_P = {1} => [x]_P = {1}
outline:
  in: reg a = 0 /\ forall o in {x y z}, t in {1 2} . ([o]_t = {0} /\ [o]_P = {0})
  fin: [x]_P = {1}
  ann 1 init: [y]_2 = {0} /\ [z]_P = {0} /\ reg a = 0
  ann 1 2: [y]_2 = {0} /\ [z]_P = {0} /\ reg a = 0 /\ [x]_1 = {1}
  ann 1 3: [x]_P = {1}
  ann 1 fin: [x]_P = {1}
  ann 2 3: reg a = 1
)";

void BM_CheckOutline(benchmark::State& state) {
  const pxv::LitmusFile f = pxv::parse_litmus(kMpFlushProof);
  for (auto _ : state) {
    pxv::ValidityReport rep = pxv::check_outline(f.program, *f.outline, f.init, {});
    benchmark::DoNotOptimize(rep.pass());
  }
}
BENCHMARK(BM_CheckOutline);

void BM_GenState(benchmark::State& state) {
  const pxv::InitSpec spec = pxv::default_rule_spec();
  pxv::GenBounds b;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    b.seed = seed++;
    auto s = pxv::gen_state(spec, b);
    benchmark::DoNotOptimize(s.mem.size());
  }
}
BENCHMARK(BM_GenState);

void BM_TestRuleSp1(benchmark::State& state) {
  const pxv::InitSpec spec = pxv::default_rule_spec();
  const auto& rules = pxv::catalogue();
  const pxv::RuleSpec* sp1 = nullptr;
  for (const auto& r : rules)
    if (r.name == "SP1") sp1 = &r;
  pxv::GenBounds b;
  for (auto _ : state) {
    auto v = pxv::test_rule(*sp1, spec, b, 10);
    benchmark::DoNotOptimize(v.instantiations);
  }
}
BENCHMARK(BM_TestRuleSp1);

}  // namespace

BENCHMARK_MAIN();
