#include "pxv/domain.hpp"

#include <algorithm>
#include <sstream>

namespace pxv {

std::size_t Declarations::regs_of(ThreadId t) const {
  std::size_t n = 0;
  for (const auto& r : registers)
    if (r.owner == t) ++n;
  return n;
}

std::optional<LocId> Declarations::find_location(std::string_view name) const {
  for (LocId i = 0; i < locations.size(); ++i)
    if (locations[i] == name) return i;
  return std::nullopt;
}

std::optional<ThreadId> Declarations::find_thread(unsigned external_id) const {
  for (ThreadId i = 0; i < thread_ids.size(); ++i)
    if (thread_ids[i] == external_id) return i;
  return std::nullopt;
}

std::optional<RegId> Declarations::find_register_slot(ThreadId owner,
                                                      std::uint32_t slot) const {
  for (RegId i = 0; i < registers.size(); ++i)
    if (registers[i].owner == owner && registers[i].slot == slot) return i;
  return std::nullopt;
}

std::optional<RegId> Declarations::find_register(std::string_view name) const {
  for (RegId i = 0; i < registers.size(); ++i)
    if (registers[i].name == name) return i;
  return std::nullopt;
}

std::optional<AuxId> Declarations::find_aux(std::string_view name) const {
  for (AuxId i = 0; i < aux_vars.size(); ++i)
    if (aux_vars[i] == name) return i;
  return std::nullopt;
}

bool no_write_to(const Memory& mem, LocId loc, Timestamp after, Timestamp upto) {
  const Timestamp hi = std::min<std::size_t>(upto, mem.empty() ? 0 : mem.size() - 1);
  for (Timestamp t = after + 1; t <= hi; ++t)
    if (mem[t].loc == loc) return false;
  return true;
}

Timestamp last_write_ts(const Memory& mem, LocId loc) {
  for (std::size_t i = mem.size(); i-- > 0;)
    if (mem[i].loc == loc) return static_cast<Timestamp>(i);
  throw ConfigError("last_write_ts: no message for location");
}

// ---------------------------------------------------------------------------
// Expr

Expr Expr::lit(Value v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Lit;
  n->lit = v;
  return Expr(std::move(n));
}

Expr Expr::reg(std::uint32_t slot) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Reg;
  n->reg = slot;
  return Expr(std::move(n));
}

Expr Expr::add(Expr a, Expr b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Add;
  n->lhs = a.node_;
  n->rhs = b.node_;
  return Expr(std::move(n));
}

Expr Expr::sub(Expr a, Expr b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sub;
  n->lhs = a.node_;
  n->rhs = b.node_;
  return Expr(std::move(n));
}

Value Expr::eval(std::span<const Value> regs) const {
  const Node* n = node_.get();
  switch (n->kind) {
    case Kind::Lit:
      return n->lit;
    case Kind::Reg:
      if (n->reg >= regs.size())
        throw EvalError("unbound register slot " + std::to_string(n->reg));
      return regs[n->reg];
    case Kind::Add:
      return Expr(n->lhs).eval(regs) + Expr(n->rhs).eval(regs);
    case Kind::Sub: {
      const Value a = Expr(n->lhs).eval(regs);
      const Value b = Expr(n->rhs).eval(regs);
      return a < b ? 0 : a - b;  // saturating
    }
  }
  return 0;
}

void Expr::collect_regs(std::vector<std::uint32_t>& out) const {
  const Node* n = node_.get();
  switch (n->kind) {
    case Kind::Lit:
      return;
    case Kind::Reg:
      out.push_back(n->reg);
      return;
    case Kind::Add:
    case Kind::Sub:
      Expr(n->lhs).collect_regs(out);
      Expr(n->rhs).collect_regs(out);
      return;
  }
}

std::string Expr::to_string(const Declarations& d, ThreadId owner) const {
  const Node* n = node_.get();
  switch (n->kind) {
    case Kind::Lit:
      return std::to_string(n->lit);
    case Kind::Reg: {
      auto r = d.find_register_slot(owner, n->reg);
      return r ? d.registers[*r].name : "r" + std::to_string(n->reg);
    }
    case Kind::Add:
      return Expr(n->lhs).to_string(d, owner) + " + " + Expr(n->rhs).to_string(d, owner);
    case Kind::Sub:
      return Expr(n->lhs).to_string(d, owner) + " - " + Expr(n->rhs).to_string(d, owner);
  }
  return {};
}

// ---------------------------------------------------------------------------
// BoolExpr

BoolExpr BoolExpr::constant(bool b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Const;
  n->b = b;
  return BoolExpr(std::move(n));
}

BoolExpr BoolExpr::cmp(CmpOp op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Cmp;
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return BoolExpr(std::move(n));
}

BoolExpr BoolExpr::conj(BoolExpr a, BoolExpr b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::And;
  n->l = a.node_;
  n->r = b.node_;
  return BoolExpr(std::move(n));
}

BoolExpr BoolExpr::disj(BoolExpr a, BoolExpr b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Or;
  n->l = a.node_;
  n->r = b.node_;
  return BoolExpr(std::move(n));
}

BoolExpr BoolExpr::neg(BoolExpr a) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Not;
  n->l = a.node_;
  return BoolExpr(std::move(n));
}

bool BoolExpr::eval(std::span<const Value> regs) const {
  const Node* n = node_.get();
  switch (n->kind) {
    case Kind::Const:
      return n->b;
    case Kind::Cmp: {
      const Value a = n->lhs->eval(regs);
      const Value b = n->rhs->eval(regs);
      switch (n->op) {
        case CmpOp::Eq:
          return a == b;
        case CmpOp::Ne:
          return a != b;
        case CmpOp::Lt:
          return a < b;
      }
      return false;
    }
    case Kind::And:
      return BoolExpr(n->l).eval(regs) && BoolExpr(n->r).eval(regs);
    case Kind::Or:
      return BoolExpr(n->l).eval(regs) || BoolExpr(n->r).eval(regs);
    case Kind::Not:
      return !BoolExpr(n->l).eval(regs);
  }
  return false;
}

void BoolExpr::collect_regs(std::vector<std::uint32_t>& out) const {
  const Node* n = node_.get();
  switch (n->kind) {
    case Kind::Const:
      return;
    case Kind::Cmp:
      n->lhs->collect_regs(out);
      n->rhs->collect_regs(out);
      return;
    case Kind::And:
    case Kind::Or:
      BoolExpr(n->l).collect_regs(out);
      BoolExpr(n->r).collect_regs(out);
      return;
    case Kind::Not:
      BoolExpr(n->l).collect_regs(out);
      return;
  }
}

std::string BoolExpr::to_string(const Declarations& d, ThreadId owner) const {
  const Node* n = node_.get();
  switch (n->kind) {
    case Kind::Const:
      return n->b ? "true" : "false";
    case Kind::Cmp: {
      const char* op = n->op == CmpOp::Eq ? " = " : n->op == CmpOp::Ne ? " != " : " < ";
      return n->lhs->to_string(d, owner) + op + n->rhs->to_string(d, owner);
    }
    case Kind::And:
      return "(" + BoolExpr(n->l).to_string(d, owner) + " /\\ " +
             BoolExpr(n->r).to_string(d, owner) + ")";
    case Kind::Or:
      return "(" + BoolExpr(n->l).to_string(d, owner) + " \\/ " +
             BoolExpr(n->r).to_string(d, owner) + ")";
    case Kind::Not:
      return "~(" + BoolExpr(n->l).to_string(d, owner) + ")";
  }
  return {};
}

// ---------------------------------------------------------------------------
// AuxExpr

AuxExpr AuxExpr::lit(Value v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Lit;
  n->lit = v;
  return AuxExpr(std::move(n));
}

AuxExpr AuxExpr::var(AuxId a) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->var = a;
  return AuxExpr(std::move(n));
}

AuxExpr AuxExpr::add(AuxExpr a, AuxExpr b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Add;
  n->lhs = a.node_;
  n->rhs = b.node_;
  return AuxExpr(std::move(n));
}

AuxExpr AuxExpr::sub(AuxExpr a, AuxExpr b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sub;
  n->lhs = a.node_;
  n->rhs = b.node_;
  return AuxExpr(std::move(n));
}

Value AuxExpr::eval(std::span<const Value> aux) const {
  const Node* n = node_.get();
  switch (n->kind) {
    case Kind::Lit:
      return n->lit;
    case Kind::Var:
      if (n->var >= aux.size())
        throw EvalError("unbound auxiliary slot " + std::to_string(n->var));
      return aux[n->var];
    case Kind::Add:
      return AuxExpr(n->lhs).eval(aux) + AuxExpr(n->rhs).eval(aux);
    case Kind::Sub: {
      const Value a = AuxExpr(n->lhs).eval(aux);
      const Value b = AuxExpr(n->rhs).eval(aux);
      return a < b ? 0 : a - b;
    }
  }
  return 0;
}

void AuxExpr::collect_vars(std::vector<AuxId>& out) const {
  const Node* n = node_.get();
  switch (n->kind) {
    case Kind::Lit:
      return;
    case Kind::Var:
      out.push_back(n->var);
      return;
    case Kind::Add:
    case Kind::Sub:
      AuxExpr(n->lhs).collect_vars(out);
      AuxExpr(n->rhs).collect_vars(out);
      return;
  }
}

AuxExpr AuxExpr::substitute(AuxId target, const AuxExpr& replacement) const {
  const Node* n = node_.get();
  switch (n->kind) {
    case Kind::Lit:
      return *this;
    case Kind::Var:
      return n->var == target ? replacement : *this;
    case Kind::Add:
      return add(AuxExpr(n->lhs).substitute(target, replacement),
                 AuxExpr(n->rhs).substitute(target, replacement));
    case Kind::Sub:
      return sub(AuxExpr(n->lhs).substitute(target, replacement),
                 AuxExpr(n->rhs).substitute(target, replacement));
  }
  return *this;
}

std::string AuxExpr::to_string(const Declarations& d) const {
  const Node* n = node_.get();
  switch (n->kind) {
    case Kind::Lit:
      return std::to_string(n->lit);
    case Kind::Var:
      return d.aux_vars.at(n->var);
    case Kind::Add:
      return AuxExpr(n->lhs).to_string(d) + " + " + AuxExpr(n->rhs).to_string(d);
    case Kind::Sub:
      return AuxExpr(n->lhs).to_string(d) + " - " + AuxExpr(n->rhs).to_string(d);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Statements

AtomicStmt AtomicStmt::skip() { return AtomicStmt{}; }

AtomicStmt AtomicStmt::assign(std::uint32_t slot, Expr e) {
  AtomicStmt s;
  s.op = Op::Assign;
  s.reg = slot;
  s.e1 = std::move(e);
  return s;
}

AtomicStmt AtomicStmt::load(std::uint32_t slot, LocId l) {
  AtomicStmt s;
  s.op = Op::Load;
  s.reg = slot;
  s.loc = l;
  return s;
}

AtomicStmt AtomicStmt::store(LocId l, Expr e) {
  AtomicStmt s;
  s.op = Op::Store;
  s.loc = l;
  s.e1 = std::move(e);
  return s;
}

AtomicStmt AtomicStmt::cas(std::uint32_t slot, LocId l, Expr expected, Expr replacement) {
  AtomicStmt s;
  s.op = Op::Cas;
  s.reg = slot;
  s.loc = l;
  s.e1 = std::move(expected);
  s.e2 = std::move(replacement);
  return s;
}

AtomicStmt AtomicStmt::sfence() {
  AtomicStmt s;
  s.op = Op::Sfence;
  return s;
}

AtomicStmt AtomicStmt::mfence() {
  AtomicStmt s;
  s.op = Op::Mfence;
  return s;
}

AtomicStmt AtomicStmt::flush(LocId l) {
  AtomicStmt s;
  s.op = Op::Flush;
  s.loc = l;
  return s;
}

AtomicStmt AtomicStmt::flushopt(LocId l) {
  AtomicStmt s;
  s.op = Op::Flushopt;
  s.loc = l;
  return s;
}

std::string AtomicStmt::to_string(const Declarations& d, ThreadId owner) const {
  auto reg_name = [&] {
    auto r = d.find_register_slot(owner, reg);
    return r ? d.registers[*r].name : "r" + std::to_string(reg);
  };
  switch (op) {
    case Op::Skip:
      return "skip";
    case Op::Assign:
      return "assign " + reg_name() + " " + e1->to_string(d, owner);
    case Op::Load:
      return "load " + reg_name() + " " + d.location_name(loc);
    case Op::Store:
      return "store " + d.location_name(loc) + " " + e1->to_string(d, owner);
    case Op::Cas:
      return "cas " + reg_name() + " " + d.location_name(loc) + " " +
             e1->to_string(d, owner) + " " + e2->to_string(d, owner);
    case Op::Sfence:
      return "sfence";
    case Op::Mfence:
      return "mfence";
    case Op::Flush:
      return "flush " + d.location_name(loc);
    case Op::Flushopt:
      return "flushopt " + d.location_name(loc);
  }
  return {};
}

LabelledStmt LabelledStmt::plain(AtomicStmt s, LabelId next) {
  LabelledStmt ls;
  ls.kind = Kind::Plain;
  ls.stmt = std::move(s);
  ls.next = next;
  return ls;
}

LabelledStmt LabelledStmt::if_goto(BoolExpr b, LabelId then_label, LabelId else_label) {
  LabelledStmt ls;
  ls.kind = Kind::IfGoto;
  ls.cond = std::move(b);
  ls.then_label = then_label;
  ls.else_label = else_label;
  return ls;
}

LabelledStmt LabelledStmt::ghost(AtomicStmt s, LabelId next, AuxUpdate upd) {
  LabelledStmt ls;
  ls.kind = Kind::Ghost;
  ls.stmt = std::move(s);
  ls.next = next;
  ls.aux = std::move(upd);
  return ls;
}

// ---------------------------------------------------------------------------
// Program

Program::Program() : label_names{"init", "fin"} {}

const LabelledStmt* Program::at(ThreadId t, LabelId l) const {
  if (t >= code.size()) return nullptr;
  auto it = code[t].find(l);
  return it == code[t].end() ? nullptr : &it->second;
}

std::vector<LabelId> Program::labels_of(ThreadId t) const {
  std::vector<LabelId> out;
  if (t < code.size())
    for (const auto& [l, _] : code[t]) out.push_back(l);
  out.push_back(kFin);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool Program::has_cycle() const {
  for (const auto& thread_code : code) {
    // colors: 0 unvisited, 1 on stack, 2 done
    std::unordered_map<LabelId, int> color;
    std::function<bool(LabelId)> visit = [&](LabelId l) -> bool {
      auto it = thread_code.find(l);
      if (it == thread_code.end()) return false;  // fin or dangling
      int& c = color[l];
      if (c == 1) return true;
      if (c == 2) return false;
      c = 1;
      const LabelledStmt& ls = it->second;
      bool cyc = false;
      if (ls.kind == LabelledStmt::Kind::IfGoto)
        cyc = visit(ls.then_label) || visit(ls.else_label);
      else
        cyc = visit(ls.next);
      color[l] = 2;
      return cyc;
    };
    if (visit(kInit)) return true;
  }
  return false;
}

void Program::validate(const Declarations& d) const {
  if (code.size() != d.num_threads())
    throw ConfigError("program thread count does not match declarations");
  for (ThreadId t = 0; t < code.size(); ++t) {
    if (!code[t].contains(kInit))
      throw ConfigError("thread " + std::to_string(d.thread_name(t)) +
                        " has no statement at the initial label");
    if (code[t].contains(kFin))
      throw ConfigError("thread " + std::to_string(d.thread_name(t)) +
                        " has code at the final label");
    for (const auto& [l, ls] : code[t]) {
      auto check_target = [&](LabelId target) {
        if (target != kFin && !code[t].contains(target))
          throw ConfigError("thread " + std::to_string(d.thread_name(t)) +
                            ": goto target '" + label_names.at(target) + "' has no code");
      };
      if (ls.kind == LabelledStmt::Kind::IfGoto) {
        check_target(ls.then_label);
        check_target(ls.else_label);
      } else {
        check_target(ls.next);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// States

Timestamp ThreadState::max_coh() const {
  Timestamp m = 0;
  for (Timestamp t : coh) m = std::max(m, t);
  return m;
}

Timestamp MachineState::max_per(LocId l) const {
  Timestamp m = 0;
  for (const auto& ts : threads) m = std::max(m, ts.vp_commit.at(l));
  return m;
}

Value MachineState::reg_value(const Declarations& d, RegId r) const {
  const auto& info = d.registers.at(r);
  return threads.at(info.owner).regs.at(info.slot);
}

namespace {

inline void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2);
}

}  // namespace

std::size_t MachineStateHash::operator()(const MachineState& s) const {
  std::size_t h = 0xcbf29ce484222325ull;
  for (LabelId l : s.pc) hash_combine(h, l);
  for (const auto& m : s.mem) hash_combine(h, (std::size_t(m.loc) << 32) | m.val);
  for (const auto& t : s.threads) {
    for (Timestamp c : t.coh) hash_combine(h, c);
    hash_combine(h, t.vr_new);
    hash_combine(h, t.vp_ready);
    for (Timestamp c : t.vp_async) hash_combine(h, c);
    for (Timestamp c : t.vp_commit) hash_combine(h, c);
    for (Value v : t.regs) hash_combine(h, v);
  }
  for (Value v : s.aux) hash_combine(h, v);
  return h;
}

std::string dump(const MachineState& s, const Declarations& d,
                 const std::vector<std::string>* label_names) {
  std::ostringstream os;
  os << "memory:";
  for (std::size_t t = 0; t < s.mem.size(); ++t)
    os << " [" << t << "]" << d.location_name(s.mem[t].loc) << "=" << s.mem[t].val;
  os << "\n";
  for (ThreadId t = 0; t < s.threads.size(); ++t) {
    const ThreadState& ts = s.threads[t];
    std::string pc = "?";
    if (t < s.pc.size()) {
      pc = label_names && s.pc[t] < label_names->size() ? (*label_names)[s.pc[t]]
                                                        : std::to_string(s.pc[t]);
    }
    os << "thread " << d.thread_name(t) << ": pc=" << pc;
    os << " coh={";
    for (LocId l = 0; l < ts.coh.size(); ++l)
      os << (l ? "," : "") << d.location_name(l) << ":" << ts.coh[l];
    os << "} vr_new=" << ts.vr_new << " vp_ready=" << ts.vp_ready << " vp_async={";
    for (LocId l = 0; l < ts.vp_async.size(); ++l)
      os << (l ? "," : "") << d.location_name(l) << ":" << ts.vp_async[l];
    os << "} vp_commit={";
    for (LocId l = 0; l < ts.vp_commit.size(); ++l)
      os << (l ? "," : "") << d.location_name(l) << ":" << ts.vp_commit[l];
    os << "} regs={";
    bool first = true;
    for (const auto& r : d.registers) {
      if (r.owner != t) continue;
      os << (first ? "" : ",") << r.name << ":" << ts.regs.at(r.slot);
      first = false;
    }
    os << "}\n";
  }
  if (!s.aux.empty()) {
    os << "aux:";
    for (AuxId a = 0; a < s.aux.size(); ++a)
      os << " " << d.aux_vars.at(a) << "=" << s.aux[a];
    os << "\n";
  }
  return os.str();
}

}  // namespace pxv
