#include "pxv/assertions.hpp"

#include <algorithm>
#include <sstream>

namespace pxv {

ViewExpr ViewExpr::thread_of(LocId l, ThreadId t) { return {Kind::Thread, l, t, 0, 0}; }
ViewExpr ViewExpr::persist(LocId l) { return {Kind::Persist, l, 0, 0, 0}; }
ViewExpr ViewExpr::async(LocId l, ThreadId t) { return {Kind::Async, l, t, 0, 0}; }
ViewExpr ViewExpr::cond(LocId l, Value v, LocId y, ThreadId t) {
  return {Kind::Cond, l, t, v, y};
}

std::string ViewExpr::to_string(const Declarations& d) const {
  switch (kind) {
    case Kind::Thread:
      return "[" + d.location_name(loc) + "]_" + std::to_string(d.thread_name(tid));
    case Kind::Persist:
      return "[" + d.location_name(loc) + "]_P";
    case Kind::Async:
      return "[" + d.location_name(loc) + "]_A_" + std::to_string(d.thread_name(tid));
    case Kind::Cond:
      return "<" + d.location_name(loc) + "=" + std::to_string(cond_val) + ">[" +
             d.location_name(target) + "]_" + std::to_string(d.thread_name(tid));
  }
  return {};
}

bool num_cmp(NumCmp op, std::uint64_t a, std::uint64_t b) {
  switch (op) {
    case NumCmp::Eq: return a == b;
    case NumCmp::Ne: return a != b;
    case NumCmp::Lt: return a < b;
    case NumCmp::Le: return a <= b;
    case NumCmp::Gt: return a > b;
    case NumCmp::Ge: return a >= b;
  }
  return false;
}

namespace {

const char* cmp_str(NumCmp op) {
  switch (op) {
    case NumCmp::Eq: return "=";
    case NumCmp::Ne: return "!=";
    case NumCmp::Lt: return "<";
    case NumCmp::Le: return "<=";
    case NumCmp::Gt: return ">";
    case NumCmp::Ge: return ">=";
  }
  return "?";
}

std::string set_str(const ValueSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

ValueSet normalized(ValueSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

}  // namespace

struct Assertion::Node {
  enum class Kind {
    Const, ViewEq, ViewSubset, ViewContains, LastReader, LastFlush, LastMfence,
    LastVal, CountCmp, RegCmp, RegIn, AuxCmp, AuxIn, And, Or, Not, Implies
  };
  Kind kind = Kind::Const;
  bool b = true;
  ViewExpr view;
  ValueSet set;
  bool negated = false;
  LocId loc = 0;
  ThreadId tid = 0;
  Value val = 0;
  NumCmp cmp = NumCmp::Eq;
  std::uint32_t count = 0;
  RegId reg = 0;
  std::optional<AuxExpr> aux_lhs;
  std::shared_ptr<const Node> l, r;
};

using NK = Assertion::Node::Kind;

namespace {

std::shared_ptr<Assertion::Node> mk(NK kind) {
  auto n = std::make_shared<Assertion::Node>();
  n->kind = kind;
  return n;
}

}  // namespace

Assertion Assertion::constant(bool b) {
  auto n = mk(NK::Const);
  n->b = b;
  return Assertion(std::move(n));
}

Assertion Assertion::view_eq(ViewExpr ve, ValueSet s) {
  auto n = mk(NK::ViewEq);
  n->view = ve;
  n->set = normalized(std::move(s));
  return Assertion(std::move(n));
}

Assertion Assertion::view_subset(ViewExpr ve, ValueSet s) {
  auto n = mk(NK::ViewSubset);
  n->view = ve;
  n->set = normalized(std::move(s));
  return Assertion(std::move(n));
}

Assertion Assertion::view_contains(ViewExpr ve, Value v, bool negated) {
  auto n = mk(NK::ViewContains);
  n->view = ve;
  n->val = v;
  n->negated = negated;
  return Assertion(std::move(n));
}

Assertion Assertion::last_reader(LocId l, ThreadId t) {
  auto n = mk(NK::LastReader);
  n->loc = l;
  n->tid = t;
  return Assertion(std::move(n));
}

Assertion Assertion::last_flush(LocId l, ThreadId t) {
  auto n = mk(NK::LastFlush);
  n->loc = l;
  n->tid = t;
  return Assertion(std::move(n));
}

Assertion Assertion::last_mfence(LocId l, ThreadId t) {
  auto n = mk(NK::LastMfence);
  n->loc = l;
  n->tid = t;
  return Assertion(std::move(n));
}

Assertion Assertion::last_val(LocId l, Value v) {
  auto n = mk(NK::LastVal);
  n->loc = l;
  n->val = v;
  return Assertion(std::move(n));
}

Assertion Assertion::count_cmp(LocId l, Value v, NumCmp op, std::uint32_t c) {
  auto n = mk(NK::CountCmp);
  n->loc = l;
  n->val = v;
  n->cmp = op;
  n->count = c;
  return Assertion(std::move(n));
}

Assertion Assertion::reg_cmp(RegId r, NumCmp op, Value v) {
  auto n = mk(NK::RegCmp);
  n->reg = r;
  n->cmp = op;
  n->val = v;
  return Assertion(std::move(n));
}

Assertion Assertion::reg_in(RegId r, ValueSet s, bool negated) {
  auto n = mk(NK::RegIn);
  n->reg = r;
  n->set = normalized(std::move(s));
  n->negated = negated;
  return Assertion(std::move(n));
}

Assertion Assertion::aux_cmp(AuxExpr lhs, NumCmp op, Value v) {
  auto n = mk(NK::AuxCmp);
  n->aux_lhs = std::move(lhs);
  n->cmp = op;
  n->val = v;
  return Assertion(std::move(n));
}

Assertion Assertion::aux_in(AuxExpr lhs, ValueSet s, bool negated) {
  auto n = mk(NK::AuxIn);
  n->aux_lhs = std::move(lhs);
  n->set = normalized(std::move(s));
  n->negated = negated;
  return Assertion(std::move(n));
}

Assertion Assertion::conj(Assertion a, Assertion b) {
  auto n = mk(NK::And);
  n->l = a.node_;
  n->r = b.node_;
  return Assertion(std::move(n));
}

Assertion Assertion::disj(Assertion a, Assertion b) {
  auto n = mk(NK::Or);
  n->l = a.node_;
  n->r = b.node_;
  return Assertion(std::move(n));
}

Assertion Assertion::neg(Assertion a) {
  auto n = mk(NK::Not);
  n->l = a.node_;
  return Assertion(std::move(n));
}

Assertion Assertion::implies(Assertion a, Assertion b) {
  auto n = mk(NK::Implies);
  n->l = a.node_;
  n->r = b.node_;
  return Assertion(std::move(n));
}

namespace {

ValueSet eval_view(const ViewExpr& ve, const MachineState& s, const NvmMap* nvm) {
  if (nvm != nullptr && ve.kind == ViewExpr::Kind::Persist) return {(*nvm)[ve.loc]};
  switch (ve.kind) {
    case ViewExpr::Kind::Thread:
      return thread_view(s, ve.tid, ve.loc);
    case ViewExpr::Kind::Persist:
      return pview(s, ve.loc);
    case ViewExpr::Kind::Async:
      return aview(s, ve.tid, ve.loc);
    case ViewExpr::Kind::Cond:
      return cond_obs_view(s, ve.tid, ve.loc, ve.cond_val, ve.target);
  }
  return {};
}

bool eval_node(const Assertion::Node& n, const MachineState& s, const Declarations& d,
               const NvmMap* nvm) {
  switch (n.kind) {
    case NK::Const:
      return n.b;
    case NK::ViewEq:
      return eval_view(n.view, s, nvm) == n.set;
    case NK::ViewSubset: {
      const ValueSet v = eval_view(n.view, s, nvm);
      return std::includes(n.set.begin(), n.set.end(), v.begin(), v.end());
    }
    case NK::ViewContains: {
      const ValueSet v = eval_view(n.view, s, nvm);
      const bool in = std::binary_search(v.begin(), v.end(), n.val);
      return n.negated ? !in : in;
    }
    case NK::LastReader:
      return last_reader(s, n.loc, n.tid);
    case NK::LastFlush:
      return last_flush(s, n.loc, n.tid);
    case NK::LastMfence:
      return last_mfence(s, n.loc, n.tid);
    case NK::LastVal:
      return last_val(s, n.loc, n.val);
    case NK::CountCmp:
      return num_cmp(n.cmp, write_count(s, n.loc, n.val), n.count);
    case NK::RegCmp:
      return num_cmp(n.cmp, s.reg_value(d, n.reg), n.val);
    case NK::RegIn: {
      const Value v = s.reg_value(d, n.reg);
      const bool in = std::binary_search(n.set.begin(), n.set.end(), v);
      return n.negated ? !in : in;
    }
    case NK::AuxCmp:
      return num_cmp(n.cmp, n.aux_lhs->eval(s.aux), n.val);
    case NK::AuxIn: {
      const Value v = n.aux_lhs->eval(s.aux);
      const bool in = std::binary_search(n.set.begin(), n.set.end(), v);
      return n.negated ? !in : in;
    }
    case NK::And:
      return eval_node(*n.l, s, d, nvm) && eval_node(*n.r, s, d, nvm);
    case NK::Or:
      return eval_node(*n.l, s, d, nvm) || eval_node(*n.r, s, d, nvm);
    case NK::Not:
      return !eval_node(*n.l, s, d, nvm);
    case NK::Implies:
      return !eval_node(*n.l, s, d, nvm) || eval_node(*n.r, s, d, nvm);
  }
  return false;
}

}  // namespace

bool Assertion::eval(const MachineState& s, const Declarations& d) const {
  return eval_node(*node_, s, d, nullptr);
}

Assertion Assertion::substitute_aux(AuxId target, const AuxExpr& e) const {
  const Node& n = *node_;
  switch (n.kind) {
    case NK::AuxCmp: {
      auto n2 = std::make_shared<Node>(n);
      n2->aux_lhs = n.aux_lhs->substitute(target, e);
      return Assertion(std::move(n2));
    }
    case NK::AuxIn: {
      auto n2 = std::make_shared<Node>(n);
      n2->aux_lhs = n.aux_lhs->substitute(target, e);
      return Assertion(std::move(n2));
    }
    case NK::And:
      return conj(Assertion(n.l).substitute_aux(target, e),
                  Assertion(n.r).substitute_aux(target, e));
    case NK::Or:
      return disj(Assertion(n.l).substitute_aux(target, e),
                  Assertion(n.r).substitute_aux(target, e));
    case NK::Not:
      return neg(Assertion(n.l).substitute_aux(target, e));
    case NK::Implies:
      return implies(Assertion(n.l).substitute_aux(target, e),
                     Assertion(n.r).substitute_aux(target, e));
    default:
      return *this;
  }
}

bool Assertion::persistent_only() const {
  const Node& n = *node_;
  switch (n.kind) {
    case NK::Const:
      return true;
    case NK::ViewEq:
    case NK::ViewSubset:
    case NK::ViewContains:
      return n.view.kind == ViewExpr::Kind::Persist;
    case NK::And:
    case NK::Or:
    case NK::Implies:
      return Assertion(n.l).persistent_only() && Assertion(n.r).persistent_only();
    case NK::Not:
      return Assertion(n.l).persistent_only();
    default:
      return false;
  }
}

std::string Assertion::to_string(const Declarations& d) const {
  const Node& n = *node_;
  switch (n.kind) {
    case NK::Const:
      return n.b ? "true" : "false";
    case NK::ViewEq:
      return n.view.to_string(d) + " = " + set_str(n.set);
    case NK::ViewSubset:
      return n.view.to_string(d) + " <= " + set_str(n.set);
    case NK::ViewContains:
      return n.view.to_string(d) + (n.negated ? " !has " : " has ") + std::to_string(n.val);
    case NK::LastReader:
      return "lastr " + d.location_name(n.loc) + " " + std::to_string(d.thread_name(n.tid));
    case NK::LastFlush:
      return "lastflush " + d.location_name(n.loc) + " " +
             std::to_string(d.thread_name(n.tid));
    case NK::LastMfence:
      return "lastmfence " + d.location_name(n.loc) + " " +
             std::to_string(d.thread_name(n.tid));
    case NK::LastVal:
      return "lastval " + d.location_name(n.loc) + " " + std::to_string(n.val);
    case NK::CountCmp:
      return "count " + d.location_name(n.loc) + " " + std::to_string(n.val) + " " +
             cmp_str(n.cmp) + " " + std::to_string(n.count);
    case NK::RegCmp:
      return "reg " + d.registers.at(n.reg).name + " " + cmp_str(n.cmp) + " " +
             std::to_string(n.val);
    case NK::RegIn:
      return "reg " + d.registers.at(n.reg).name + (n.negated ? " !in " : " in ") +
             set_str(n.set);
    case NK::AuxCmp:
      return "aux " + n.aux_lhs->to_string(d) + " " + cmp_str(n.cmp) + " " +
             std::to_string(n.val);
    case NK::AuxIn:
      return "aux " + n.aux_lhs->to_string(d) + (n.negated ? " !in " : " in ") +
             set_str(n.set);
    case NK::And:
      return "(" + Assertion(n.l).to_string(d) + " /\\ " + Assertion(n.r).to_string(d) + ")";
    case NK::Or:
      return "(" + Assertion(n.l).to_string(d) + " \\/ " + Assertion(n.r).to_string(d) + ")";
    case NK::Not:
      return "~(" + Assertion(n.l).to_string(d) + ")";
    case NK::Implies:
      return "(" + Assertion(n.l).to_string(d) + " => " + Assertion(n.r).to_string(d) + ")";
  }
  return {};
}

// ---------------------------------------------------------------------------
// Crash invariants

CrashInvariant::CrashInvariant() : a_(Assertion::constant(true)) {}

CrashInvariant::CrashInvariant(Assertion a) : a_(std::move(a)) {
  if (!a_.persistent_only())
    throw ConfigError("crash invariant mentions a non-persistent-view atom");
}

bool CrashInvariant::eval_state(const MachineState& s, const Declarations& d) const {
  return a_.eval(s, d);
}

bool CrashInvariant::eval_nvm(const NvmMap& nvm, const Declarations& d) const {
  // Persistent-only assertions never read thread state, so evaluating over a
  // dummy state with the nvm override is safe.
  static const MachineState empty{};
  return eval_node(a_.node(), empty, d, &nvm);
}

// ---------------------------------------------------------------------------
// NVM enumeration

std::vector<NvmMap> possible_nvms(const MachineState& s) {
  const std::size_t nloc = s.num_locations();
  std::vector<ValueSet> views(nloc);
  for (LocId l = 0; l < nloc; ++l) views[l] = pview(s, l);

  std::vector<NvmMap> out;
  NvmMap cur(nloc, 0);
  std::function<void(LocId)> product = [&](LocId l) {
    if (l == nloc) {
      out.push_back(cur);
      return;
    }
    for (Value v : views[l]) {
      cur[l] = v;
      product(l + 1);
    }
  };
  product(0);
  return out;
}

std::vector<NvmMap> possible_nvms_bruteforce(const MachineState& s) {
  const std::size_t nloc = s.num_locations();
  std::vector<ValueSet> candidates(nloc);
  for (const Message& m : s.mem) candidates[m.loc].push_back(m.val);
  for (auto& c : candidates) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }

  // Literal reading of the definition: a map is possible when every location
  // has a witnessing message carrying its value that no later write to the
  // location shadows at or below the location's commit bound.
  auto possible = [&](const NvmMap& nvm) {
    for (LocId l = 0; l < nloc; ++l) {
      const Timestamp bound = s.max_per(l);
      bool witnessed = false;
      for (Timestamp t = 0; t < s.mem.size() && !witnessed; ++t)
        witnessed = s.mem[t] == Message{l, nvm[l]} && no_write_to(s.mem, l, t, bound);
      if (!witnessed) return false;
    }
    return true;
  };

  std::vector<NvmMap> out;
  NvmMap cur(nloc, 0);
  std::function<void(LocId)> enumerate = [&](LocId l) {
    if (l == nloc) {
      if (possible(cur)) out.push_back(cur);
      return;
    }
    for (Value v : candidates[l]) {
      cur[l] = v;
      enumerate(l + 1);
    }
  };
  enumerate(0);
  return out;
}

CrashCheck holds_after_crash(const CrashInvariant& inv, const MachineState& s,
                             const Declarations& d) {
  for (const NvmMap& nvm : possible_nvms(s))
    if (!inv.eval_nvm(nvm, d)) return {false, nvm};
  return {};
}

std::string nvm_to_string(const NvmMap& nvm, const Declarations& d) {
  std::string out = "{";
  for (LocId l = 0; l < nvm.size(); ++l)
    out += (l ? ", " : "") + d.location_name(l) + "=" + std::to_string(nvm[l]);
  return out + "}";
}

}  // namespace pxv
