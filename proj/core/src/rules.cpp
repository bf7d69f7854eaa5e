#include "pxv/rules.hpp"

#include <algorithm>
#include <sstream>

#include "pxv/step.hpp"

namespace pxv {

namespace {

bool subset(const ValueSet& a, const ValueSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool contains(const ValueSet& s, Value v) {
  return std::binary_search(s.begin(), s.end(), v);
}

ValueSet with_value(ValueSet s, Value v) {
  auto it = std::lower_bound(s.begin(), s.end(), v);
  if (it == s.end() || *it != v) s.insert(it, v);
  return s;
}

bool singleton(const ValueSet& s, Value v) { return s.size() == 1 && s[0] == v; }

RegId reg_of(const Declarations& d, ThreadId t, std::uint32_t slot) {
  for (RegId r = 0; r < d.registers.size(); ++r)
    if (d.registers[r].owner == t && d.registers[r].slot == slot) return r;
  throw ConfigError("rule harness needs a register at slot " + std::to_string(slot));
}

// The statement's result register: slot 0 of the executing thread. The
// statement AST carries the slot; assertion reads need the global id.
constexpr std::uint32_t kTargetSlot = 0;
RegId target_reg(const Declarations& d, ThreadId t) { return reg_of(d, t, kTargetSlot); }

// A register of thread t2 distinct from the statement's result register.
RegId other_reg(const Declarations& d, ThreadId t, ThreadId t2) {
  return t == t2 ? reg_of(d, t, 1) : reg_of(d, t2, 0);
}

using P = RuleParams;
using E = RuleEnv;
using S = MachineState;
using D = Declarations;

struct Builder {
  RuleSpec r;
  Builder(std::string name, std::string display) {
    r.name = std::move(name);
    r.display = std::move(display);
  }
  Builder& t2() { r.uses_t2 = true; return *this; }
  Builder& y() { r.uses_y = true; return *this; }
  Builder& u() { r.uses_u = true; return *this; }
  Builder& v() { r.uses_v = true; return *this; }
  Builder& w() { r.uses_w = true; return *this; }
  Builder& when(std::function<bool(const P&)> c) { r.constraint = std::move(c); return *this; }
  Builder& stmt(std::function<AtomicStmt(const P&, const D&)> f) {
    r.make_stmt = std::move(f);
    return *this;
  }
  Builder& pre(std::function<std::optional<E>(const S&, const P&, const D&)> f) {
    r.pre = std::move(f);
    return *this;
  }
  Builder& post(std::function<bool(const S&, const S&, const P&, const E&, const D&)> f) {
    r.post = std::move(f);
    return *this;
  }
  RuleSpec build() {
    if (!r.pre) r.pre = [](const S&, const P&, const D&) { return E{}; };
    return std::move(r);
  }
};

// Statement factories shared across rows.
AtomicStmt st_load(const P& p, const D&) { return AtomicStmt::load(kTargetSlot, p.x); }
AtomicStmt st_store(const P& p, const D&) { return AtomicStmt::store(p.x, Expr::lit(p.v)); }
AtomicStmt st_flush(const P& p, const D&) { return AtomicStmt::flush(p.x); }
AtomicStmt st_flushopt(const P& p, const D&) { return AtomicStmt::flushopt(p.x); }
AtomicStmt st_sfence(const P&, const D&) { return AtomicStmt::sfence(); }
AtomicStmt st_mfence(const P&, const D&) { return AtomicStmt::mfence(); }
AtomicStmt st_cas(const P& p, const D&) {
  return AtomicStmt::cas(kTargetSlot, p.x, Expr::lit(p.u), Expr::lit(p.w));
}

std::vector<RuleSpec> build_catalogue() {
  std::vector<RuleSpec> rules;
  auto add = [&](Builder b) { rules.push_back(b.build()); };

  // --- load proof rules -----------------------------------------------------
  add(Builder("LP1", "{[x]_t = S} load a x {reg a in S /\\ [x]_t <= S}")
          .stmt(st_load)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = thread_view(s, p.t, p.x);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D& d) {
            return contains(e.S, s2.reg_value(d, target_reg(d, p.t))) &&
                   subset(thread_view(s2, p.t, p.x), e.S);
          }));

  add(Builder("LP2", "{u in [x]_t => <x=u>[y]_t = S} load a x {reg a = u => [y]_t <= S}")
          .y().u()
          .stmt(st_load)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = cond_obs_view(s, p.t, p.x, p.u, p.y);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D& d) {
            if (s2.reg_value(d, target_reg(d, p.t)) != p.u) return true;
            return subset(thread_view(s2, p.t, p.y), e.S);
          }));

  add(Builder("LP3",
              "{count x u = 1 /\\ lastr x t' /\\ [x]_t' = {u}} load a x "
              "{reg a = u => [x]_t = {u}}")
          .t2().u()
          .stmt(st_load)
          .pre([](const S& s, const P& p, const D&) -> std::optional<E> {
            if (write_count(s, p.x, p.u) != 1) return std::nullopt;
            if (!last_reader(s, p.x, p.t2)) return std::nullopt;
            if (!singleton(thread_view(s, p.t2, p.x), p.u)) return std::nullopt;
            return E{};
          })
          .post([](const S& s2, const S&, const P& p, const E&, const D& d) {
            if (s2.reg_value(d, target_reg(d, p.t)) != p.u) return true;
            return singleton(thread_view(s2, p.t, p.x), p.u);
          }));

  // --- store proof rules ----------------------------------------------------
  add(Builder("SP1", "{true} store x v {[x]_t = {v}}")
          .v()
          .stmt(st_store)
          .post([](const S& s2, const S&, const P& p, const E&, const D&) {
            return singleton(thread_view(s2, p.t, p.x), p.v);
          }));

  add(Builder("SP2", "{[x]_t' = S} store x v {[x]_t' = S u {v}}  (t != t')")
          .t2().v()
          .when([](const P& p) { return p.t != p.t2; })
          .stmt(st_store)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = thread_view(s, p.t2, p.x);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return thread_view(s2, p.t2, p.x) == with_value(e.S, p.v);
          }));

  add(Builder("SP3", "{[x]_A_t' = S} store x v {[x]_A_t' = S u {v}}")
          .t2().v()
          .stmt(st_store)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = aview(s, p.t2, p.x);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return aview(s2, p.t2, p.x) == with_value(e.S, p.v);
          }));

  add(Builder("SP4", "{[x]_P = S} store x v {[x]_P = S u {v}}")
          .v()
          .stmt(st_store)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = pview(s, p.x);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return pview(s2, p.x) == with_value(e.S, p.v);
          }));

  add(Builder("SP5",
              "{[y]_t = S /\\ [x]_t' !has v} store x v {<x=v>[y]_t' <= S}  "
              "(t != t', x != y)")
          .t2().y().v()
          .when([](const P& p) { return p.t != p.t2 && p.x != p.y; })
          .stmt(st_store)
          .pre([](const S& s, const P& p, const D&) -> std::optional<E> {
            if (contains(thread_view(s, p.t2, p.x), p.v)) return std::nullopt;
            E e;
            e.S = thread_view(s, p.t, p.y);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return subset(cond_obs_view(s2, p.t2, p.x, p.v, p.y), e.S);
          }));

  add(Builder("SP6", "{true} store x v {lastr x t /\\ lastflush x t}")
          .v()
          .stmt(st_store)
          .post([](const S& s2, const S&, const P& p, const E&, const D&) {
            return last_reader(s2, p.x, p.t) && last_flush(s2, p.x, p.t);
          }));

  add(Builder("SP7", "{count x v = n} store x v {count x v = n + 1}")
          .v()
          .stmt(st_store)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.n = write_count(s, p.x, p.v);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return write_count(s2, p.x, p.v) == e.n + 1;
          }));

  // --- flush proof rules ----------------------------------------------------
  add(Builder("FP1", "{[x]_t = S} flush x {[x]_P <= S /\\ [x]_A_t <= S}")
          .stmt(st_flush)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = thread_view(s, p.t, p.x);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return subset(pview(s2, p.x), e.S) && subset(aview(s2, p.t, p.x), e.S);
          }));

  add(Builder("FP2", "{[x]_P = S} flush x {[x]_P <= S}")
          .stmt(st_flush)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = pview(s, p.x);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return subset(pview(s2, p.x), e.S);
          }));

  add(Builder("FP3",
              "{lastr x t' /\\ [x]_t' = {u} /\\ lastflush x t} flush x {[x]_P = {u}}")
          .t2().u()
          .stmt(st_flush)
          .pre([](const S& s, const P& p, const D&) -> std::optional<E> {
            if (!last_reader(s, p.x, p.t2)) return std::nullopt;
            if (!singleton(thread_view(s, p.t2, p.x), p.u)) return std::nullopt;
            if (!last_flush(s, p.x, p.t)) return std::nullopt;
            return E{};
          })
          .post([](const S& s2, const S&, const P& p, const E&, const D&) {
            return singleton(pview(s2, p.x), p.u);
          }));

  // --- flushopt / sfence proof rules ----------------------------------------
  // Disjunctive preconditions bind each disjunct separately; both resulting
  // triples must hold.
  add(Builder("OP", "{[x]_t = S \\/ [x]_A_t = S} flushopt x {[x]_A_t <= S}")
          .stmt(st_flushopt)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = thread_view(s, p.t, p.x);
            e.S2 = aview(s, p.t, p.x);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            const ValueSet a = aview(s2, p.t, p.x);
            return subset(a, e.S) && subset(a, e.S2);
          }));

  add(Builder("SFP", "{[x]_A_t = S \\/ [x]_P = S} sfence {[x]_P <= S}")
          .stmt(st_sfence)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = aview(s, p.t, p.x);
            e.S2 = pview(s, p.x);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            const ValueSet pv = pview(s2, p.x);
            return subset(pv, e.S) && subset(pv, e.S2);
          }));

  // --- stability under load -------------------------------------------------
  add(Builder("LS1", "[y]_t' = S stable under load a x  (t != t')")
          .t2().y()
          .when([](const P& p) { return p.t != p.t2; })
          .stmt(st_load)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = thread_view(s, p.t2, p.y);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return thread_view(s2, p.t2, p.y) == e.S;
          }));

  add(Builder("LS2", "[y]_P = S stable under load a x")
          .y()
          .stmt(st_load)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = pview(s, p.y);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return pview(s2, p.y) == e.S;
          }));

  add(Builder("LS3", "[y]_A_t' = S stable under load a x")
          .t2().y()
          .stmt(st_load)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = aview(s, p.t2, p.y);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return aview(s2, p.t2, p.y) == e.S;
          }));

  add(Builder("LS4", "reg b = k stable under load a x  (b != a)")
          .t2()
          .stmt(st_load)
          .pre([](const S& s, const P& p, const D& d) {
            E e;
            e.k = s.reg_value(d, other_reg(d, p.t, p.t2));
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D& d) {
            return s2.reg_value(d, other_reg(d, p.t, p.t2)) == e.k;
          }));

  add(Builder("LS5", "lastr y t' stable under load a x")
          .t2().y()
          .stmt(st_load)
          .pre([](const S& s, const P& p, const D&) -> std::optional<E> {
            if (!last_reader(s, p.y, p.t2)) return std::nullopt;
            return E{};
          })
          .post([](const S& s2, const S&, const P& p, const E&, const D&) {
            return last_reader(s2, p.y, p.t2);
          }));

  // --- stability under store ------------------------------------------------
  auto stable_store = [&](const char* name, const char* disp, bool needs_t2,
                          auto pre_fn, auto post_fn,
                          std::function<bool(const P&)> cstr) {
    Builder b(name, disp);
    b.y().v();
    if (needs_t2) b.t2();
    if (cstr) b.when(std::move(cstr));
    b.stmt(st_store).pre(pre_fn).post(post_fn);
    add(std::move(b));
  };

  stable_store(
      "WS1", "[y]_t' = S stable under store x v  (x != y)", true,
      [](const S& s, const P& p, const D&) -> std::optional<E> {
        E e;
        e.S = thread_view(s, p.t2, p.y);
        return e;
      },
      [](const S& s2, const S&, const P& p, const E& e, const D&) {
        return thread_view(s2, p.t2, p.y) == e.S;
      },
      [](const P& p) { return p.x != p.y; });

  stable_store(
      "WS2", "[y]_P = S stable under store x v  (x != y)", false,
      [](const S& s, const P& p, const D&) -> std::optional<E> {
        E e;
        e.S = pview(s, p.y);
        return e;
      },
      [](const S& s2, const S&, const P& p, const E& e, const D&) {
        return pview(s2, p.y) == e.S;
      },
      [](const P& p) { return p.x != p.y; });

  stable_store(
      "WS3", "[y]_A_t' = S stable under store x v  (x != y)", true,
      [](const S& s, const P& p, const D&) -> std::optional<E> {
        E e;
        e.S = aview(s, p.t2, p.y);
        return e;
      },
      [](const S& s2, const S&, const P& p, const E& e, const D&) {
        return aview(s2, p.t2, p.y) == e.S;
      },
      [](const P& p) { return p.x != p.y; });

  add(Builder("WS4", "reg b = k stable under store x v")
          .t2().v()
          .stmt(st_store)
          .pre([](const S& s, const P& p, const D& d) {
            E e;
            e.k = s.reg_value(d, other_reg(d, p.t, p.t2));
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D& d) {
            return s2.reg_value(d, other_reg(d, p.t, p.t2)) == e.k;
          }));

  stable_store(
      "WS5", "lastr y t' stable under store x v  (x != y)", true,
      [](const S& s, const P& p, const D&) -> std::optional<E> {
        if (!last_reader(s, p.y, p.t2)) return std::nullopt;
        return E{};
      },
      [](const S& s2, const S&, const P& p, const E&, const D&) {
        return last_reader(s2, p.y, p.t2);
      },
      [](const P& p) { return p.x != p.y; });

  stable_store(
      "WS6", "lastflush y t' stable under store x v  (x != y)", true,
      [](const S& s, const P& p, const D&) -> std::optional<E> {
        if (!last_flush(s, p.y, p.t2)) return std::nullopt;
        return E{};
      },
      [](const S& s2, const S&, const P& p, const E&, const D&) {
        return last_flush(s2, p.y, p.t2);
      },
      [](const P& p) { return p.x != p.y; });

  add(Builder("WS7", "count y v' = n stable under store x v  (x != y \\/ v != v')")
          .y().v().w()
          .when([](const P& p) { return p.x != p.y || p.v != p.w; })
          .stmt(st_store)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.n = write_count(s, p.y, p.w);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return write_count(s2, p.y, p.w) == e.n;
          }));

  // --- stability under flush ------------------------------------------------
  add(Builder("FS1", "[y]_t' = S stable under flush x")
          .t2().y()
          .stmt(st_flush)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = thread_view(s, p.t2, p.y);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return thread_view(s2, p.t2, p.y) == e.S;
          }));

  add(Builder("FS2", "[y]_P = S stable under flush x  (x != y)")
          .y()
          .when([](const P& p) { return p.x != p.y; })
          .stmt(st_flush)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = pview(s, p.y);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return pview(s2, p.y) == e.S;
          }));

  add(Builder("FS3", "lastr y t' stable under flush x")
          .t2().y()
          .stmt(st_flush)
          .pre([](const S& s, const P& p, const D&) -> std::optional<E> {
            if (!last_reader(s, p.y, p.t2)) return std::nullopt;
            return E{};
          })
          .post([](const S& s2, const S&, const P& p, const E&, const D&) {
            return last_reader(s2, p.y, p.t2);
          }));

  add(Builder("FS4", "lastflush y t' stable under flush x")
          .t2().y()
          .stmt(st_flush)
          .pre([](const S& s, const P& p, const D&) -> std::optional<E> {
            if (!last_flush(s, p.y, p.t2)) return std::nullopt;
            return E{};
          })
          .post([](const S& s2, const S&, const P& p, const E&, const D&) {
            return last_flush(s2, p.y, p.t2);
          }));

  add(Builder("FS5", "count y v = n stable under flush x")
          .y().v()
          .stmt(st_flush)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.n = write_count(s, p.y, p.v);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return write_count(s2, p.y, p.v) == e.n;
          }));

  // --- stability under sfence -----------------------------------------------
  add(Builder("SFS1", "[x]_t' = S stable under sfence")
          .t2()
          .stmt(st_sfence)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = thread_view(s, p.t2, p.x);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return thread_view(s2, p.t2, p.x) == e.S;
          }));

  add(Builder("SFS2", "count x v = n stable under sfence")
          .v()
          .stmt(st_sfence)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.n = write_count(s, p.x, p.v);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return write_count(s2, p.x, p.v) == e.n;
          }));

  // --- stability under flushopt ----------------------------------------------
  add(Builder("OS1", "[y]_t' = S stable under flushopt x")
          .t2().y()
          .stmt(st_flushopt)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = thread_view(s, p.t2, p.y);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return thread_view(s2, p.t2, p.y) == e.S;
          }));

  add(Builder("OS2", "[y]_P = S stable under flushopt x")
          .y()
          .stmt(st_flushopt)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = pview(s, p.y);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return pview(s2, p.y) == e.S;
          }));

  add(Builder("OS3", "count y v = n stable under flushopt x")
          .y().v()
          .stmt(st_flushopt)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.n = write_count(s, p.y, p.v);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return write_count(s2, p.y, p.v) == e.n;
          }));

  // --- CAS proof rules --------------------------------------------------------
  add(Builder("CP1", "{true} cas a x e1 e2 {(reg a = 1 /\\ lastval x e2) \\/ reg a = 0}")
          .u().w()
          .stmt(st_cas)
          .post([](const S& s2, const S&, const P& p, const E&, const D& d) {
            const Value a = s2.reg_value(d, target_reg(d, p.t));
            return (a == 1 && last_val(s2, p.x, p.w)) || a == 0;
          }));

  add(Builder("CP2", "{[y]_t' = S} cas a x e1 e2 {[y]_t' <= S}  (x != y)")
          .t2().y().u().w()
          .when([](const P& p) { return p.x != p.y; })
          .stmt(st_cas)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = thread_view(s, p.t2, p.y);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return subset(thread_view(s2, p.t2, p.y), e.S);
          }));

  add(Builder("CP3", "{lastval x v} cas a x e1 e2 {lastval x e2 \\/ lastval x v}")
          .u().w().v()
          .stmt(st_cas)
          .pre([](const S& s, const P& p, const D&) -> std::optional<E> {
            if (!last_val(s, p.x, p.v)) return std::nullopt;
            return E{};
          })
          .post([](const S& s2, const S&, const P& p, const E&, const D&) {
            return last_val(s2, p.x, p.w) || last_val(s2, p.x, p.v);
          }));

  add(Builder("CP4",
              "{lastr y t' /\\ [y]_t' = {v}} cas a x e1 e2 "
              "{(reg a = 1 /\\ [y]_t = {v}) \\/ reg a = 0}  (x != y)")
          .t2().y().u().w().v()
          .when([](const P& p) { return p.x != p.y; })
          .stmt(st_cas)
          .pre([](const S& s, const P& p, const D&) -> std::optional<E> {
            if (!last_reader(s, p.y, p.t2)) return std::nullopt;
            if (!singleton(thread_view(s, p.t2, p.y), p.v)) return std::nullopt;
            return E{};
          })
          .post([](const S& s2, const S&, const P& p, const E&, const D& d) {
            const Value a = s2.reg_value(d, target_reg(d, p.t));
            return (a == 1 && singleton(thread_view(s2, p.t, p.y), p.v)) || a == 0;
          }));

  add(Builder("CP5", "{lastval x v} cas a x e1 e2 {reg a = 0}  (v != e1)")
          .u().w().v()
          .when([](const P& p) { return p.v != p.u; })
          .stmt(st_cas)
          .pre([](const S& s, const P& p, const D&) -> std::optional<E> {
            if (!last_val(s, p.x, p.v)) return std::nullopt;
            return E{};
          })
          .post([](const S& s2, const S&, const P& p, const E&, const D& d) {
            return s2.reg_value(d, target_reg(d, p.t)) == 0;
          }));

  add(Builder("SP8", "{true} store x v {lastval x v}")
          .v()
          .stmt(st_store)
          .post([](const S& s2, const S&, const P& p, const E&, const D&) {
            return last_val(s2, p.x, p.v);
          }));

  // --- stability involving lastval --------------------------------------------
  add(Builder("LS6", "lastval y v stable under load a x")
          .y().v()
          .stmt(st_load)
          .pre([](const S& s, const P& p, const D&) -> std::optional<E> {
            if (!last_val(s, p.y, p.v)) return std::nullopt;
            return E{};
          })
          .post([](const S& s2, const S&, const P& p, const E&, const D&) {
            return last_val(s2, p.y, p.v);
          }));

  add(Builder("FS6", "lastval y v stable under flush x")
          .y().v()
          .stmt(st_flush)
          .pre([](const S& s, const P& p, const D&) -> std::optional<E> {
            if (!last_val(s, p.y, p.v)) return std::nullopt;
            return E{};
          })
          .post([](const S& s2, const S&, const P& p, const E&, const D&) {
            return last_val(s2, p.y, p.v);
          }));

  add(Builder("WS8", "lastval y v' stable under store x v  (x != y)")
          .y().v().w()
          .when([](const P& p) { return p.x != p.y; })
          .stmt(st_store)
          .pre([](const S& s, const P& p, const D&) -> std::optional<E> {
            if (!last_val(s, p.y, p.w)) return std::nullopt;
            return E{};
          })
          .post([](const S& s2, const S&, const P& p, const E&, const D&) {
            return last_val(s2, p.y, p.w);
          }));

  // --- stability under CAS ------------------------------------------------------
  add(Builder("CS1", "[y]_t' !has v stable under cas a x e1 e2  (x != y)")
          .t2().y().u().w().v()
          .when([](const P& p) { return p.x != p.y; })
          .stmt(st_cas)
          .pre([](const S& s, const P& p, const D&) -> std::optional<E> {
            if (contains(thread_view(s, p.t2, p.y), p.v)) return std::nullopt;
            return E{};
          })
          .post([](const S& s2, const S&, const P& p, const E&, const D&) {
            return !contains(thread_view(s2, p.t2, p.y), p.v);
          }));

  add(Builder("CS2", "lastval x v stable under cas a x e1 e2  (v != e1)")
          .u().w().v()
          .when([](const P& p) { return p.v != p.u; })
          .stmt(st_cas)
          .pre([](const S& s, const P& p, const D&) -> std::optional<E> {
            if (!last_val(s, p.x, p.v)) return std::nullopt;
            return E{};
          })
          .post([](const S& s2, const S&, const P& p, const E&, const D&) {
            return last_val(s2, p.x, p.v);
          }));

  add(Builder("CS3", "[y]_P = S stable under cas a x e1 e2  (x != y)")
          .y().u().w()
          .when([](const P& p) { return p.x != p.y; })
          .stmt(st_cas)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = pview(s, p.y);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return pview(s2, p.y) == e.S;
          }));

  add(Builder("CS4", "lastr y t' stable under cas a x e1 e2  (x != y)")
          .t2().y().u().w()
          .when([](const P& p) { return p.x != p.y; })
          .stmt(st_cas)
          .pre([](const S& s, const P& p, const D&) -> std::optional<E> {
            if (!last_reader(s, p.y, p.t2)) return std::nullopt;
            return E{};
          })
          .post([](const S& s2, const S&, const P& p, const E&, const D&) {
            return last_reader(s2, p.y, p.t2);
          }));

  // --- mfence proof rules --------------------------------------------------------
  add(Builder("SP9", "{true} store x v {lastmfence x t}")
          .v()
          .stmt(st_store)
          .post([](const S& s2, const S&, const P& p, const E&, const D&) {
            return last_mfence(s2, p.x, p.t);
          }));

  add(Builder("MFP1",
              "{lastr x t' /\\ lastmfence x t /\\ [x]_t' = {u}} mfence {[x]_t = {u}}")
          .t2().u()
          .stmt(st_mfence)
          .pre([](const S& s, const P& p, const D&) -> std::optional<E> {
            if (!last_reader(s, p.x, p.t2)) return std::nullopt;
            if (!last_mfence(s, p.x, p.t)) return std::nullopt;
            if (!singleton(thread_view(s, p.t2, p.x), p.u)) return std::nullopt;
            return E{};
          })
          .post([](const S& s2, const S&, const P& p, const E&, const D&) {
            return singleton(thread_view(s2, p.t, p.x), p.u);
          }));

  add(Builder("MFP2", "{[x]_t = S} mfence {[x]_t <= S}")
          .stmt(st_mfence)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = thread_view(s, p.t, p.x);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return subset(thread_view(s2, p.t, p.x), e.S);
          }));

  // --- stability involving lastmfence ----------------------------------------------
  add(Builder("LS7", "lastmfence y t' stable under load a x")
          .t2().y()
          .stmt(st_load)
          .pre([](const S& s, const P& p, const D&) -> std::optional<E> {
            if (!last_mfence(s, p.y, p.t2)) return std::nullopt;
            return E{};
          })
          .post([](const S& s2, const S&, const P& p, const E&, const D&) {
            return last_mfence(s2, p.y, p.t2);
          }));

  add(Builder("WS9", "lastmfence y t' stable under store x v  (x != y)")
          .t2().y().v()
          .when([](const P& p) { return p.x != p.y; })
          .stmt(st_store)
          .pre([](const S& s, const P& p, const D&) -> std::optional<E> {
            if (!last_mfence(s, p.y, p.t2)) return std::nullopt;
            return E{};
          })
          .post([](const S& s2, const S&, const P& p, const E&, const D&) {
            return last_mfence(s2, p.y, p.t2);
          }));

  add(Builder("MFS1", "[x]_P = S stable under mfence")
          .stmt(st_mfence)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = pview(s, p.x);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return pview(s2, p.x) == e.S;
          }));

  add(Builder("MFS2", "lastr x t' stable under mfence")
          .t2()
          .stmt(st_mfence)
          .pre([](const S& s, const P& p, const D&) -> std::optional<E> {
            if (!last_reader(s, p.x, p.t2)) return std::nullopt;
            return E{};
          })
          .post([](const S& s2, const S&, const P& p, const E&, const D&) {
            return last_reader(s2, p.x, p.t2);
          }));

  add(Builder("MFS3", "lastmfence x t' stable under mfence  (t != t')")
          .t2()
          .when([](const P& p) { return p.t != p.t2; })
          .stmt(st_mfence)
          .pre([](const S& s, const P& p, const D&) -> std::optional<E> {
            if (!last_mfence(s, p.x, p.t2)) return std::nullopt;
            return E{};
          })
          .post([](const S& s2, const S&, const P& p, const E&, const D&) {
            return last_mfence(s2, p.x, p.t2);
          }));

  add(Builder("MFS4", "count x v = n stable under mfence")
          .v()
          .stmt(st_mfence)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.n = write_count(s, p.x, p.v);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return write_count(s2, p.x, p.v) == e.n;
          }));

  return rules;
}

std::vector<RuleSpec> build_mutants() {
  std::vector<RuleSpec> rules;
  auto add = [&](Builder b) { rules.push_back(b.build()); };

  add(Builder("LP1!eq", "LP1 with the postcondition strengthened to [x]_t = S")
          .stmt(st_load)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = thread_view(s, p.t, p.x);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return thread_view(s2, p.t, p.x) == e.S;
          }));

  add(Builder("WS1!anyloc", "WS1 with the x != y constraint removed")
          .t2().y().v()
          .stmt(st_store)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = thread_view(s, p.t2, p.y);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return thread_view(s2, p.t2, p.y) == e.S;
          }));

  add(Builder("SP2!self", "SP2 with the t != t' constraint removed")
          .t2().v()
          .stmt(st_store)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = thread_view(s, p.t2, p.x);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return thread_view(s2, p.t2, p.x) == with_value(e.S, p.v);
          }));

  add(Builder("CP5!anyval", "CP5 with the v != e1 constraint removed")
          .u().w().v()
          .stmt(st_cas)
          .pre([](const S& s, const P& p, const D&) -> std::optional<E> {
            if (!last_val(s, p.x, p.v)) return std::nullopt;
            return E{};
          })
          .post([](const S& s2, const S&, const P& p, const E&, const D& d) {
            return s2.reg_value(d, target_reg(d, p.t)) == 0;
          }));

  add(Builder("FP3!nofence", "FP3 with the lastflush x t premise dropped")
          .t2().u()
          .stmt(st_flush)
          .pre([](const S& s, const P& p, const D&) -> std::optional<E> {
            if (!last_reader(s, p.x, p.t2)) return std::nullopt;
            if (!singleton(thread_view(s, p.t2, p.x), p.u)) return std::nullopt;
            return E{};
          })
          .post([](const S& s2, const S&, const P& p, const E&, const D&) {
            return singleton(pview(s2, p.x), p.u);
          }));

  add(Builder("OP!eq", "OP with the postcondition strengthened to [x]_A_t = S")
          .stmt(st_flushopt)
          .pre([](const S& s, const P& p, const D&) {
            E e;
            e.S = thread_view(s, p.t, p.x);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return aview(s2, p.t, p.x) == e.S;
          }));

  add(Builder("MFP1!nofence", "MFP1 with the lastmfence x t premise dropped")
          .t2().u()
          .stmt(st_mfence)
          .pre([](const S& s, const P& p, const D&) -> std::optional<E> {
            if (!last_reader(s, p.x, p.t2)) return std::nullopt;
            if (!singleton(thread_view(s, p.t2, p.x), p.u)) return std::nullopt;
            return E{};
          })
          .post([](const S& s2, const S&, const P& p, const E&, const D&) {
            return singleton(thread_view(s2, p.t, p.x), p.u);
          }));

  add(Builder("SP5!sameloc", "SP5 with the x != y constraint removed")
          .t2().y().v()
          .when([](const P& p) { return p.t != p.t2; })
          .stmt(st_store)
          .pre([](const S& s, const P& p, const D&) -> std::optional<E> {
            if (contains(thread_view(s, p.t2, p.x), p.v)) return std::nullopt;
            E e;
            e.S = thread_view(s, p.t, p.y);
            return e;
          })
          .post([](const S& s2, const S&, const P& p, const E& e, const D&) {
            return subset(cond_obs_view(s2, p.t2, p.x, p.v, p.y), e.S);
          }));

  return rules;
}

}  // namespace

const std::vector<RuleSpec>& catalogue() {
  static const std::vector<RuleSpec> rules = build_catalogue();
  return rules;
}

const std::vector<RuleSpec>& mutant_catalogue() {
  static const std::vector<RuleSpec> rules = build_mutants();
  return rules;
}

std::string render_params(const RuleParams& p, const Declarations& d) {
  std::ostringstream os;
  os << "t=" << d.thread_name(p.t) << " t'=" << d.thread_name(p.t2)
     << " x=" << d.location_name(p.x) << " y=" << d.location_name(p.y) << " u=" << p.u
     << " v=" << p.v << " v'=" << p.w;
  return os.str();
}

RuleVerdict test_rule(const RuleSpec& rule, const InitSpec& spec, const GenBounds& b,
                      std::uint32_t trials) {
  RuleVerdict verdict;
  verdict.name = rule.name;
  const auto& d = spec.decls;
  const auto nthr = static_cast<ThreadId>(d.num_threads());
  const auto nloc = static_cast<LocId>(d.num_locations());
  const Value vmax = b.max_value;

  for (std::uint32_t trial = 0; trial < trials; ++trial) {
    GenBounds bb = b;
    bb.seed = b.seed + trial;
    const MachineState s = gen_state(spec, bb);

    RuleParams p;
    for (p.t = 0; p.t < nthr; ++p.t)
      for (p.t2 = 0; p.t2 < (rule.uses_t2 ? nthr : 1); ++p.t2)
        for (p.x = 0; p.x < nloc; ++p.x)
          for (p.y = 0; p.y < (rule.uses_y ? nloc : 1); ++p.y)
            for (p.u = 0; p.u <= (rule.uses_u ? vmax : 0); ++p.u)
              for (p.v = 0; p.v <= (rule.uses_v ? vmax : 0); ++p.v)
                for (p.w = 0; p.w <= (rule.uses_w ? vmax : 0); ++p.w) {
                  if (rule.constraint && !rule.constraint(p)) continue;
                  auto env = rule.pre(s, p, d);
                  if (!env) continue;
                  ++verdict.instantiations;
                  const AtomicStmt stmt = rule.make_stmt(p, d);
                  for (auto& succ : step_atomic(s.threads[p.t], s.mem, stmt)) {
                    MachineState s2 = s;
                    s2.threads[p.t] = std::move(succ.ts);
                    s2.mem = std::move(succ.mem);
                    if (!rule.post(s2, s, p, *env, d)) {
                      verdict.falsified =
                          Falsification{s, std::move(s2), render_params(p, d)};
                      return verdict;
                    }
                  }
                }
  }
  return verdict;
}

InitSpec default_rule_spec() {
  InitSpec spec;
  spec.decls.locations = {"x", "y", "z"};
  spec.decls.thread_ids = {1, 2, 3};
  for (ThreadId t = 0; t < 3; ++t) {
    const std::string suffix = std::to_string(t + 1);
    spec.decls.registers.push_back({"a" + suffix, t, 0});
    spec.decls.registers.push_back({"b" + suffix, t, 1});
  }
  return spec;
}

}  // namespace pxv
