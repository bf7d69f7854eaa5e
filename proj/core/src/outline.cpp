#include "pxv/outline.hpp"

#include <algorithm>
#include <sstream>

#include "pxv/step.hpp"

namespace pxv {

namespace {

const Assertion kTrue = Assertion::constant(true);

bool all_final(const MachineState& s) {
  return std::all_of(s.pc.begin(), s.pc.end(),
                     [](LabelId l) { return l == Program::kFin; });
}

std::string describe(const MachineState& s, const Declarations& d, const Program& p) {
  return dump(s, d, &p.label_names);
}

ConditionResult downgrade(ConditionResult r, bool truncated) {
  if (truncated && r.verdict == ConditionResult::Verdict::Pass)
    r.verdict = ConditionResult::Verdict::Bounded;
  return r;
}

}  // namespace

const Assertion& ProofOutline::annotation(ThreadId t, LabelId l) const {
  if (t < ann.size()) {
    auto it = ann[t].find(l);
    if (it != ann[t].end()) return it->second;
  }
  return kTrue;
}

Universe Universe::reachable(std::vector<MachineState> states, bool truncated) {
  Universe u;
  u.kind = Kind::Reachable;
  u.states = std::make_shared<const std::vector<MachineState>>(std::move(states));
  u.truncated = truncated;
  return u;
}

Universe Universe::generated(std::vector<MachineState> states) {
  Universe u;
  u.kind = Kind::Generated;
  u.states = std::make_shared<const std::vector<MachineState>>(std::move(states));
  return u;
}

HoareResult hoare_holds(const Assertion& P, ThreadId tid, const AtomicStmt& stmt,
                        const Assertion& Q, const std::optional<AuxUpdate>& aux,
                        const Universe& U, const StepOptions& opts,
                        const Declarations& d) {
  for (const MachineState& s : *U.states) {
    if (!P.eval(s, d)) continue;
    for (auto& succ : step_atomic(s.threads.at(tid), s.mem, stmt, opts)) {
      MachineState s2 = s;
      s2.threads[tid] = std::move(succ.ts);
      s2.mem = std::move(succ.mem);
      if (aux) s2.aux.at(aux->target) = aux->expr.eval(s.aux);
      if (!Q.eval(s2, d)) return {false, std::make_pair(s, std::move(s2))};
    }
  }
  return {};
}

ConditionResult check_initialisation(const Program& prog, const ProofOutline& o,
                                     const Universe& U, const Declarations& d) {
  for (const MachineState& s : *U.states) {
    if (!o.in_assert.eval(s, d)) continue;
    for (ThreadId t = 0; t < d.num_threads(); ++t)
      if (!o.annotation(t, Program::kInit).eval(s, d)) {
        ConditionResult r;
        r.verdict = ConditionResult::Verdict::Fail;
        r.detail = "annotation of thread " + std::to_string(d.thread_name(t)) +
                   " at init fails on a state satisfying the initial assertion:\n" +
                   describe(s, d, prog);
        return r;
      }
  }
  return {};
}

ConditionResult check_finalisation(const Program& prog, const ProofOutline& o,
                                   const Universe& U, const Declarations& d) {
  for (const MachineState& s : *U.states) {
    if (!all_final(s)) continue;
    bool all_ann = true;
    for (ThreadId t = 0; t < d.num_threads() && all_ann; ++t)
      all_ann = o.annotation(t, Program::kFin).eval(s, d);
    if (all_ann && !o.fin_assert.eval(s, d)) {
      ConditionResult r;
      r.verdict = ConditionResult::Verdict::Fail;
      r.detail = "final assertion fails on an all-final state satisfying every "
                 "thread's fin annotation:\n" +
                 describe(s, d, prog);
      return r;
    }
  }
  return {};
}

ConditionResult check_local_correctness(const Program& prog, const ProofOutline& o,
                                        const Universe& U, const StepOptions& opts,
                                        const Declarations& d) {
  for (ThreadId t = 0; t < prog.code.size(); ++t) {
    for (LabelId label : prog.labels_of(t)) {
      const LabelledStmt* stmt = prog.at(t, label);
      if (stmt == nullptr) continue;  // fin
      const LabelledStmt& ls = *stmt;
      const Assertion& pre = o.annotation(t, label);
      auto where = [&] {
        return "(thread " + std::to_string(d.thread_name(t)) + ", label " +
               prog.label_names.at(label) + ")";
      };
      if (ls.kind == LabelledStmt::Kind::IfGoto) {
        for (const MachineState& s : *U.states) {
          if (!pre.eval(s, d)) continue;
          const bool b = ls.cond->eval(s.threads.at(t).regs);
          const LabelId target = b ? ls.then_label : ls.else_label;
          if (!o.annotation(t, target).eval(s, d)) {
            ConditionResult r;
            r.verdict = ConditionResult::Verdict::Fail;
            r.detail = "if-goto implication fails at " + where() + " with condition " +
                       std::string(b ? "true" : "false") + ":\n" + describe(s, d, prog);
            return r;
          }
        }
      } else {
        const Assertion& post = o.annotation(t, ls.next);
        HoareResult h = hoare_holds(pre, t, ls.stmt, post, ls.aux, U, opts, d);
        if (!h.ok) {
          ConditionResult r;
          r.verdict = ConditionResult::Verdict::Fail;
          r.detail = "triple fails at " + where() + " for statement '" +
                     ls.stmt.to_string(d, t) + "'\npre-state:\n" +
                     describe(h.counterexample->first, d, prog) + "post-state:\n" +
                     describe(h.counterexample->second, d, prog);
          return r;
        }
      }
    }
  }
  return {};
}

ConditionResult check_stability(const Program& prog, const ProofOutline& o,
                                const Universe& U, const StepOptions& opts,
                                const Declarations& d) {
  for (ThreadId t1 = 0; t1 < prog.code.size(); ++t1) {
    for (LabelId l1 : prog.labels_of(t1)) {
      const LabelledStmt* stmt = prog.at(t1, l1);
      if (stmt == nullptr) continue;  // fin
      const LabelledStmt& ls = *stmt;
      if (ls.kind == LabelledStmt::Kind::IfGoto) continue;
      for (ThreadId t2 = 0; t2 < prog.code.size(); ++t2) {
        if (t1 == t2) continue;
        for (LabelId l2 : prog.labels_of(t2)) {
          const Assertion& target = o.annotation(t2, l2);
          Assertion pre = Assertion::conj(target, o.annotation(t1, l1));
          HoareResult h = hoare_holds(pre, t1, ls.stmt, target, ls.aux, U, opts, d);
          if (!h.ok) {
            ConditionResult r;
            r.verdict = ConditionResult::Verdict::Fail;
            r.detail = "annotation of (thread " + std::to_string(d.thread_name(t2)) +
                       ", label " + prog.label_names.at(l2) +
                       ") is not stable under statement '" + ls.stmt.to_string(d, t1) +
                       "' of (thread " + std::to_string(d.thread_name(t1)) + ", label " +
                       prog.label_names.at(l1) + ")\npre-state:\n" +
                       describe(h.counterexample->first, d, prog) + "post-state:\n" +
                       describe(h.counterexample->second, d, prog);
            return r;
          }
        }
      }
    }
  }
  return {};
}

ConditionResult check_persistence(const Program& prog, const ProofOutline& o,
                                  const Universe& U, const Declarations& d,
                                  std::vector<ThreadId>& witnesses) {
  witnesses.clear();
  std::string first_failure;
  for (ThreadId t = 0; t < prog.code.size(); ++t) {
    bool ok = true;
    for (LabelId l : prog.labels_of(t)) {
      const Assertion& a = o.annotation(t, l);
      for (const MachineState& s : *U.states) {
        if (!a.eval(s, d)) continue;
        if (!o.inv.eval_state(s, d)) {
          ok = false;
          if (first_failure.empty())
            first_failure = "thread " + std::to_string(d.thread_name(t)) + ", label " +
                            prog.label_names.at(l) +
                            ": invariant fails on an annotated state:\n" +
                            describe(s, d, prog);
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) witnesses.push_back(t);
  }
  if (witnesses.empty()) {
    ConditionResult r;
    r.verdict = ConditionResult::Verdict::Fail;
    r.detail = "no thread's annotations all imply the crash invariant; e.g. " +
               first_failure;
    return r;
  }
  return {};
}

bool ValidityReport::pass() const {
  return initialisation.passed() && finalisation.passed() && local_correctness.passed() &&
         stability.passed() && persistence.passed();
}

bool ValidityReport::conclusions_pass() const {
  return annotation_coverage.passed() && final_conclusion.passed() &&
         crash_conclusion.passed();
}

ValidityReport check_outline(const Program& prog, const ProofOutline& o,
                             const InitSpec& spec, const CheckOptions& opts) {
  ValidityReport rep;
  Universe U;
  if (opts.universe == Universe::Kind::Reachable) {
    MachineState s0 = initial_state(spec, prog);
    ReachGraph g = explore(prog, s0, opts.explore);
    rep.universe_truncated = g.truncated;
    U = Universe::reachable(std::move(g.states), g.truncated);
    rep.note = "triples and implications quantified over the reachable states of the "
               "program from its initial state";
  } else {
    std::vector<MachineState> states;
    states.push_back(initial_state(spec, prog));
    GenBounds b = opts.gen;
    for (std::uint32_t i = 0; i < opts.gen_states; ++i) {
      b.seed = opts.gen.seed + i;
      states.push_back(gen_state(spec, b));
    }
    U = Universe::generated(std::move(states));
    rep.note = "triples and implications quantified over generated well-formed states; "
               "this is testing, not proof";
  }

  rep.initialisation = downgrade(check_initialisation(prog, o, U, spec.decls), U.truncated);
  rep.finalisation = downgrade(check_finalisation(prog, o, U, spec.decls), U.truncated);
  rep.local_correctness =
      downgrade(check_local_correctness(prog, o, U, opts.explore.step, spec.decls),
                U.truncated);
  rep.stability =
      downgrade(check_stability(prog, o, U, opts.explore.step, spec.decls), U.truncated);
  rep.persistence = downgrade(
      check_persistence(prog, o, U, spec.decls, rep.persistence_witnesses), U.truncated);

  if (opts.universe == Universe::Kind::Reachable) {
    // Direct conclusion checks on the same reachable states.
    rep.annotation_coverage = {};
    for (const MachineState& s : *U.states) {
      for (ThreadId t = 0; t < spec.decls.num_threads(); ++t) {
        if (!o.annotation(t, s.pc.at(t)).eval(s, spec.decls)) {
          rep.annotation_coverage.verdict = ConditionResult::Verdict::Fail;
          rep.annotation_coverage.detail =
              "reachable state violates the annotation of thread " +
              std::to_string(spec.decls.thread_name(t)) + " at its pc:\n" +
              describe(s, spec.decls, prog);
          break;
        }
      }
      if (rep.annotation_coverage.verdict == ConditionResult::Verdict::Fail) break;
    }
    rep.final_conclusion = {};
    for (const MachineState& s : *U.states) {
      if (!all_final(s)) continue;
      if (!o.fin_assert.eval(s, spec.decls)) {
        rep.final_conclusion.verdict = ConditionResult::Verdict::Fail;
        rep.final_conclusion.detail =
            "all-final reachable state violates the final assertion:\n" +
            describe(s, spec.decls, prog);
        break;
      }
    }
    rep.crash_conclusion = {};
    for (const MachineState& s : *U.states) {
      CrashCheck c = holds_after_crash(o.inv, s, spec.decls);
      if (!c.ok) {
        rep.crash_conclusion.verdict = ConditionResult::Verdict::Fail;
        rep.crash_conclusion.detail =
            "possible post-crash memory " + nvm_to_string(*c.counterexample, spec.decls) +
            " violates the crash invariant at reachable state:\n" +
            describe(s, spec.decls, prog);
        break;
      }
    }
    rep.annotation_coverage = downgrade(rep.annotation_coverage, U.truncated);
    rep.final_conclusion = downgrade(rep.final_conclusion, U.truncated);
    rep.crash_conclusion = downgrade(rep.crash_conclusion, U.truncated);
  } else {
    rep.annotation_coverage.verdict = ConditionResult::Verdict::Skipped;
    rep.final_conclusion.verdict = ConditionResult::Verdict::Skipped;
    rep.crash_conclusion.verdict = ConditionResult::Verdict::Skipped;
    rep.annotation_coverage.detail = "conclusion checks need the reachable universe";
  }

  return rep;
}

}  // namespace pxv
