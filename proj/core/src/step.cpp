#include "pxv/step.hpp"

#include <algorithm>

namespace pxv {

namespace {

inline void join(Timestamp& view, Timestamp t) { view = std::max(view, t); }

bool exists_write_after(const Memory& mem, LocId loc, Timestamp t) {
  for (std::size_t i = t + 1; i < mem.size(); ++i)
    if (mem[i].loc == loc) return true;
  return false;
}

}  // namespace

std::vector<ThreadSuccessor> step_atomic(const ThreadState& ts, const Memory& mem,
                                         const AtomicStmt& stmt, const StepOptions& opts) {
  std::vector<ThreadSuccessor> out;
  switch (stmt.op) {
    case AtomicStmt::Op::Skip: {
      out.push_back({ts, mem});
      break;
    }
    case AtomicStmt::Op::Assign: {
      ThreadState t2 = ts;
      t2.regs.at(stmt.reg) = stmt.e1->eval(ts.regs);
      out.push_back({std::move(t2), mem});
      break;
    }
    case AtomicStmt::Op::Load: {
      const LocId l = stmt.loc;
      const Timestamp coh = ts.coh.at(l);
      // Internal read of the coherence-view write, when unshadowed.
      if (no_write_to(mem, l, coh, ts.vr_new)) {
        ThreadState t2 = ts;
        t2.regs.at(stmt.reg) = mem.at(coh).val;
        out.push_back({std::move(t2), mem});
      }
      // External reads of later unshadowed writes.
      for (Timestamp t = coh + 1; t < mem.size(); ++t) {
        if (mem[t].loc != l) continue;
        if (!no_write_to(mem, l, t, ts.vr_new)) continue;
        ThreadState t2 = ts;
        t2.regs.at(stmt.reg) = mem[t].val;
        t2.coh[l] = t;
        join(t2.vr_new, t);
        join(t2.vp_ready, t);
        out.push_back({std::move(t2), mem});
      }
      break;
    }
    case AtomicStmt::Op::Store: {
      const Value v = stmt.e1->eval(ts.regs);
      Memory m2 = mem;
      m2.push_back(Message{stmt.loc, v});
      ThreadState t2 = ts;
      t2.coh.at(stmt.loc) = static_cast<Timestamp>(mem.size());
      out.push_back({std::move(t2), std::move(m2)});
      break;
    }
    case AtomicStmt::Op::Cas: {
      const LocId l = stmt.loc;
      const Value expected = stmt.e1->eval(ts.regs);
      const Value replacement = stmt.e2->eval(ts.regs);
      const Timestamp last = last_write_ts(mem, l);
      // Success: the last write to l holds the expected value.
      if (mem[last].val == expected) {
        const auto top = static_cast<Timestamp>(mem.size());
        Memory m2 = mem;
        m2.push_back(Message{l, replacement});
        ThreadState t2 = ts;
        t2.regs.at(stmt.reg) = 1;
        t2.coh[l] = top;
        join(t2.vr_new, top);
        join(t2.vp_ready, top);
        out.push_back({std::move(t2), std::move(m2)});
      }
      // Failing read of the coherence-view write.
      {
        const Timestamp t = ts.coh.at(l);
        if (exists_write_after(mem, l, t) || mem.at(t).val != expected) {
          ThreadState t2 = ts;
          t2.regs.at(stmt.reg) = 0;
          out.push_back({std::move(t2), mem});
        }
      }
      // Failing reads of later writes.
      for (Timestamp t = ts.coh.at(l) + 1; t < mem.size(); ++t) {
        if (mem[t].loc != l) continue;
        if (opts.strict_cas_read && !no_write_to(mem, l, t, ts.vr_new)) continue;
        if (!(exists_write_after(mem, l, t) || mem[t].val != expected)) continue;
        ThreadState t2 = ts;
        t2.regs.at(stmt.reg) = 0;
        t2.coh[l] = t;
        join(t2.vr_new, t);
        join(t2.vp_ready, t);
        out.push_back({std::move(t2), mem});
      }
      break;
    }
    case AtomicStmt::Op::Sfence: {
      ThreadState t2 = ts;
      join(t2.vp_ready, ts.max_coh());
      for (LocId l = 0; l < t2.vp_commit.size(); ++l) join(t2.vp_commit[l], ts.vp_async[l]);
      out.push_back({std::move(t2), mem});
      break;
    }
    case AtomicStmt::Op::Mfence: {
      ThreadState t2 = ts;
      join(t2.vr_new, ts.max_coh());
      join(t2.vp_ready, ts.max_coh());
      out.push_back({std::move(t2), mem});
      break;
    }
    case AtomicStmt::Op::Flush: {
      ThreadState t2 = ts;
      join(t2.vp_async.at(stmt.loc), ts.max_coh());
      join(t2.vp_commit.at(stmt.loc), ts.max_coh());
      out.push_back({std::move(t2), mem});
      break;
    }
    case AtomicStmt::Op::Flushopt: {
      ThreadState t2 = ts;
      join(t2.vp_async.at(stmt.loc), std::max(ts.coh.at(stmt.loc), ts.vp_ready));
      out.push_back({std::move(t2), mem});
      break;
    }
  }
  return out;
}

std::vector<MachineState> step_program(const MachineState& s, const Program& prog,
                                       ThreadId t, const StepOptions& opts) {
  const LabelId pc = s.pc.at(t);
  if (pc == Program::kFin) return {};
  const LabelledStmt* ls = prog.at(t, pc);
  if (ls == nullptr)
    throw ConfigError("no statement at (thread " + std::to_string(t) + ", label " +
                      prog.label_names.at(pc) + ")");

  std::vector<MachineState> out;
  switch (ls->kind) {
    case LabelledStmt::Kind::IfGoto: {
      MachineState s2 = s;
      s2.pc[t] = ls->cond->eval(s.threads[t].regs) ? ls->then_label : ls->else_label;
      out.push_back(std::move(s2));
      break;
    }
    case LabelledStmt::Kind::Plain:
    case LabelledStmt::Kind::Ghost: {
      for (auto& succ : step_atomic(s.threads[t], s.mem, ls->stmt, opts)) {
        MachineState s2 = s;
        s2.threads[t] = std::move(succ.ts);
        s2.mem = std::move(succ.mem);
        s2.pc[t] = ls->next;
        if (ls->kind == LabelledStmt::Kind::Ghost)
          s2.aux.at(ls->aux->target) = ls->aux->expr.eval(s.aux);
        out.push_back(std::move(s2));
      }
      break;
    }
  }
  return out;
}

std::vector<std::pair<ThreadId, MachineState>> successors(const MachineState& s,
                                                          const Program& prog,
                                                          const StepOptions& opts) {
  std::vector<std::pair<ThreadId, MachineState>> out;
  for (ThreadId t = 0; t < s.pc.size(); ++t) {
    if (s.pc[t] == Program::kFin) continue;
    for (auto& s2 : step_program(s, prog, t, opts)) out.emplace_back(t, std::move(s2));
  }
  return out;
}

Program strip_aux(const Program& prog) {
  Program out = prog;
  for (auto& thread_code : out.code)
    for (auto& [label, ls] : thread_code)
      if (ls.kind == LabelledStmt::Kind::Ghost) {
        ls.kind = LabelledStmt::Kind::Plain;
        ls.aux.reset();
      }
  return out;
}

}  // namespace pxv
