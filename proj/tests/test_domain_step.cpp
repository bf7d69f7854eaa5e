#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "pxv/step.hpp"
#include "pxv/views.hpp"
#include "pxv/wellformed.hpp"

using namespace pxv;
using namespace pxv::testing;

TEST_CASE("expression evaluation") {
  const std::vector<Value> regs{3};
  CHECK(Expr::add(Expr::reg(0), Expr::lit(1)).eval(regs) == 4);
  CHECK(Expr::lit(7).eval({}) == 7);
  CHECK(BoolExpr::cmp(BoolExpr::CmpOp::Eq, Expr::reg(0), Expr::lit(3)).eval(regs));
  CHECK_FALSE(BoolExpr::cmp(BoolExpr::CmpOp::Lt, Expr::reg(0), Expr::lit(3)).eval(regs));
  // subtraction saturates at zero
  CHECK(Expr::sub(Expr::lit(1), Expr::lit(5)).eval({}) == 0);
  CHECK_THROWS_AS(Expr::reg(4).eval(regs), EvalError);
}

TEST_CASE("store appends and moves the coherence view") {
  const InitSpec spec = tiny_spec();
  const MachineState s0 = initial_state(spec);
  REQUIRE(s0.mem.size() == 2);

  auto succs = lift_atomic(s0, 0, AtomicStmt::store(0, Expr::lit(1)));
  REQUIRE(succs.size() == 1);
  const MachineState& s1 = succs[0];
  CHECK(s1.mem.size() == 3);
  CHECK(s1.mem[2] == Message{0, 1});
  CHECK(s1.threads[0].coh[0] == 2);
  CHECK(s1.threads[0].vr_new == 0);
  // old memory is a prefix of the new one
  CHECK(std::equal(s0.mem.begin(), s0.mem.end(), s1.mem.begin()));
}

TEST_CASE("load returns exactly the observable reads") {
  // memory [x=0, y=0, x=1], coh(x)=0, vr_new=0: the stale and the new write
  // are both readable.
  const InitSpec spec = tiny_spec();
  MachineState s = initial_state(spec);
  s.mem.push_back(Message{0, 1});

  auto succs = lift_atomic(s, 1, AtomicStmt::load(0, 0));
  REQUIRE(succs.size() == 2);
  CHECK(succs[0].threads[1].regs[0] == 0);  // internal, views unchanged
  CHECK(succs[0].threads[1].coh[0] == 0);
  CHECK(succs[0].threads[1].vr_new == 0);
  CHECK(succs[1].threads[1].regs[0] == 1);  // external
  CHECK(succs[1].threads[1].coh[0] == 2);
  CHECK(succs[1].threads[1].vr_new == 2);
  CHECK(succs[1].threads[1].vp_ready == 2);

  // cross-check against the enumerated oracle
  auto oracle = readable_ts_oracle(s.mem, 0, 0, 0);
  CHECK(oracle == std::vector<Timestamp>{0, 2});
}

TEST_CASE("load skips a coherence write shadowed below the read view") {
  // memory [x=0, y=0, x=1, y=1]; after an external read of y at 3 the stale
  // x=0 is shadowed (x=1 lies at or below the read view), so only x=1 is
  // readable.
  const InitSpec spec = tiny_spec();
  MachineState s = initial_state(spec);
  s.mem.push_back(Message{0, 1});
  s.mem.push_back(Message{1, 1});
  s.threads[1].coh[1] = 3;
  s.threads[1].vr_new = 3;
  s.threads[1].vp_ready = 3;
  REQUIRE(is_well_formed(s, spec.decls));

  auto succs = lift_atomic(s, 1, AtomicStmt::load(0, 0));
  REQUIRE(succs.size() == 1);
  CHECK(succs[0].threads[1].regs[0] == 1);
  CHECK(readable_ts_oracle(s.mem, 0, 3, 0) == std::vector<Timestamp>{2});
}

TEST_CASE("cas against a stale expected value only fails") {
  InitSpec spec = tiny_spec();
  spec.decls.locations = {"x"};
  const MachineState s0 = initial_state(spec);

  auto succs = lift_atomic(s0, 0, AtomicStmt::cas(0, 0, Expr::lit(1), Expr::lit(2)));
  REQUIRE(!succs.empty());
  for (const auto& s : succs) {
    CHECK(s.threads[0].regs[0] == 0);
    CHECK(s.mem.size() == 1);  // nothing appended
  }
}

TEST_CASE("cas success reads the maximal timestamp") {
  const InitSpec spec = tiny_spec();
  const MachineState s0 = initial_state(spec);

  auto succs = lift_atomic(s0, 0, AtomicStmt::cas(0, 0, Expr::lit(0), Expr::lit(2)));
  bool found_success = false;
  for (const auto& s : succs) {
    if (s.threads[0].regs[0] != 1) continue;
    found_success = true;
    CHECK(s.mem.size() == 3);
    CHECK(s.threads[0].coh[0] == s.mem.size() - 1);
    CHECK(s.mem[s.threads[0].coh[0]] == Message{0, 2});
    CHECK(s.threads[0].vr_new == 2);
    CHECK(s.threads[0].vp_ready == 2);
  }
  CHECK(found_success);
}

TEST_CASE("non-load non-cas statements are deterministic") {
  const InitSpec spec = tiny_spec();
  GenBounds b;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    b.seed = seed;
    const MachineState s = gen_state(spec, b);
    const AtomicStmt stmts[] = {
        AtomicStmt::skip(),
        AtomicStmt::assign(0, Expr::lit(3)),
        AtomicStmt::store(0, Expr::lit(1)),
        AtomicStmt::sfence(),
        AtomicStmt::mfence(),
        AtomicStmt::flush(1),
        AtomicStmt::flushopt(0),
    };
    for (const auto& st : stmts)
      CHECK(step_atomic(s.threads[0], s.mem, st).size() == 1);
  }
}

TEST_CASE("views advance monotonically and other threads are untouched") {
  const InitSpec spec = tiny_spec();
  GenBounds b;
  const AtomicStmt stmts[] = {
      AtomicStmt::store(0, Expr::lit(2)),  AtomicStmt::load(0, 1),
      AtomicStmt::cas(0, 0, Expr::lit(0), Expr::lit(1)),
      AtomicStmt::sfence(),                AtomicStmt::mfence(),
      AtomicStmt::flush(0),                AtomicStmt::flushopt(1),
  };
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    b.seed = seed;
    const MachineState s = gen_state(spec, b);
    for (const auto& st : stmts) {
      for (const auto& s2 : lift_atomic(s, 0, st)) {
        const ThreadState& before = s.threads[0];
        const ThreadState& after = s2.threads[0];
        CHECK(after.vr_new >= before.vr_new);
        CHECK(after.vp_ready >= before.vp_ready);
        for (LocId l = 0; l < 2; ++l) {
          CHECK(after.coh[l] >= before.coh[l]);
          CHECK(after.vp_async[l] >= before.vp_async[l]);
          CHECK(after.vp_commit[l] >= before.vp_commit[l]);
        }
        CHECK(s2.threads[1] == s.threads[1]);
        CHECK(s2.mem.size() >= s.mem.size());
        CHECK(std::equal(s.mem.begin(), s.mem.end(), s2.mem.begin()));
      }
    }
  }
}

TEST_CASE("load soundness against the observable set") {
  const InitSpec spec = tiny_spec();
  GenBounds b;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    b.seed = seed;
    const MachineState s = gen_state(spec, b);
    for (ThreadId t = 0; t < 2; ++t) {
      for (LocId l = 0; l < 2; ++l) {
        const ValueSet observable = thread_view(s, t, l);
        ValueSet returned;
        for (const auto& s2 : lift_atomic(s, t, AtomicStmt::load(0, l)))
          returned.push_back(s2.threads[t].regs[0]);
        std::sort(returned.begin(), returned.end());
        returned.erase(std::unique(returned.begin(), returned.end()), returned.end());
        CHECK(returned == observable);
      }
    }
  }
}

TEST_CASE("program steps move the pc and apply ghost updates") {
  InitSpec spec = tiny_spec();
  spec.decls.aux_vars = {"ahat", "bhat"};
  Program prog;
  prog.code.resize(2);
  const LabelId l2 = 2;
  prog.label_names.push_back("2");
  prog.code[0].emplace(Program::kInit,
                       LabelledStmt::ghost(AtomicStmt::store(0, Expr::lit(1)), l2,
                                           AuxUpdate{0, AuxExpr::add(AuxExpr::var(1),
                                                                     AuxExpr::lit(1))}));
  prog.code[0].emplace(l2, LabelledStmt::plain(AtomicStmt::skip(), Program::kFin));
  prog.code[1].emplace(Program::kInit,
                       LabelledStmt::if_goto(BoolExpr::cmp(BoolExpr::CmpOp::Eq,
                                                           Expr::reg(0), Expr::lit(0)),
                                             Program::kFin, Program::kInit));

  const MachineState s0 = initial_state(spec, prog);
  auto succs = step_program(s0, prog, 0);
  REQUIRE(succs.size() == 1);
  CHECK(succs[0].pc[0] == l2);
  CHECK(succs[0].aux[0] == 1);  // ahat := bhat + 1 with bhat = 0
  CHECK(succs[0].aux[1] == 0);

  // branch on c = 0 (true)
  auto branch = step_program(s0, prog, 1);
  REQUIRE(branch.size() == 1);
  CHECK(branch[0].pc[1] == Program::kFin);
  CHECK(branch[0].mem == s0.mem);

  // a terminal thread contributes no successors
  MachineState done = s0;
  done.pc[0] = Program::kFin;
  done.pc[1] = Program::kFin;
  CHECK(successors(done, prog).empty());

  // two enabled threads: successor tags partition by thread
  auto all = successors(s0, prog);
  CHECK(all.size() == 2);
  CHECK(all[0].first == 0);
  CHECK(all[1].first == 1);
}

TEST_CASE("stepping the flush message-passing writer from init") {
  const LitmusFile f = load_corpus("mp_flush.lit");
  const MachineState s0 = initial_state(f.init, f.program);
  auto succs = step_program(s0, f.program, 0);
  REQUIRE(succs.size() == 1);
  const LabelId two = [&] {
    for (LabelId l = 0; l < f.program.label_names.size(); ++l)
      if (f.program.label_names[l] == "2") return l;
    return LabelId{0};
  }();
  CHECK(succs[0].pc[0] == two);
  CHECK(succs[0].mem.back() == Message{0, 1});  // the store to x applied
  CHECK(succs[0].pc[1] == Program::kInit);
}

TEST_CASE("strip_aux removes ghost updates and nothing else") {
  const LitmusFile fb = load_corpus("flush_buffering_proof.lit");
  const Program stripped = strip_aux(fb.program);
  bool had_ghost = false;
  for (ThreadId t = 0; t < fb.program.code.size(); ++t) {
    for (const auto& [l, ls] : fb.program.code[t]) {
      const LabelledStmt* s2 = stripped.at(t, l);
      REQUIRE(s2 != nullptr);
      if (ls.kind == LabelledStmt::Kind::Ghost) {
        had_ghost = true;
        CHECK(s2->kind == LabelledStmt::Kind::Plain);
        CHECK_FALSE(s2->aux.has_value());
        CHECK(s2->next == ls.next);
      } else {
        CHECK(s2->kind == ls.kind);
      }
    }
  }
  CHECK(had_ghost);

  const LitmusFile mp = load_corpus("mp.lit");
  const Program same = strip_aux(mp.program);
  for (ThreadId t = 0; t < mp.program.code.size(); ++t)
    CHECK(same.code[t].size() == mp.program.code[t].size());
}
