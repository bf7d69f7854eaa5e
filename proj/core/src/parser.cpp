#include "pxv/parser.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace pxv {

namespace {

// ---------------------------------------------------------------------------
// Tokenizer

struct Token {
  enum class Kind { Ident, Number, Sym, End };
  Kind kind = Kind::End;
  std::string text;
  std::size_t line = 0;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> tokenize(std::string_view text, std::size_t line) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push = [&](Token::Kind k, std::string t) { out.push_back({k, std::move(t), line}); };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '#') break;  // comment to end of line
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      push(Token::Kind::Number, std::string(text.substr(i, j - i)));
      i = j;
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      push(Token::Kind::Ident, std::string(text.substr(i, j - i)));
      i = j;
      continue;
    }
    // The Greek initial-label glyph is accepted as a synonym for "init".
    if (static_cast<unsigned char>(c) == 0xCE && i + 1 < text.size() &&
        static_cast<unsigned char>(text[i + 1]) == 0xB9) {
      push(Token::Kind::Ident, "init");
      i += 2;
      continue;
    }
    auto two = [&](const char* s) {
      return i + 1 < text.size() && text[i] == s[0] && text[i + 1] == s[1];
    };
    if (two(":=") || two("<=") || two("=>") || two("!=") || two(">=") || two("/\\") ||
        two("\\/")) {
      push(Token::Kind::Sym, std::string(text.substr(i, 2)));
      i += 2;
      continue;
    }
    if (std::string("[]{}()<>=,:;.~+-!").find(c) != std::string::npos) {
      push(Token::Kind::Sym, std::string(1, c));
      ++i;
      continue;
    }
    throw ParseError(line, std::string("unexpected character '") + c + "'");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Token stream with save/restore (forall bodies are re-parsed per binding)

class Stream {
 public:
  Stream(std::vector<Token> toks, std::size_t line) : toks_(std::move(toks)), line_(line) {}

  const Token& peek() const {
    static const Token end{};
    return pos_ < toks_.size() ? toks_[pos_] : end;
  }
  bool at_end() const { return pos_ >= toks_.size(); }
  Token next() {
    if (at_end()) throw ParseError(line_, "unexpected end of line");
    return toks_[pos_++];
  }
  bool try_sym(std::string_view s) {
    if (peek().kind == Token::Kind::Sym && peek().text == s) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool try_ident(std::string_view s) {
    if (peek().kind == Token::Kind::Ident && peek().text == s) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect_sym(std::string_view s) {
    if (!try_sym(s))
      throw ParseError(line_, "expected '" + std::string(s) + "', got '" + peek().text + "'");
  }
  std::string expect_ident() {
    if (peek().kind != Token::Kind::Ident)
      throw ParseError(line_, "expected an identifier, got '" + peek().text + "'");
    return next().text;
  }
  std::string expect_number() {
    if (peek().kind != Token::Kind::Number)
      throw ParseError(line_, "expected a number, got '" + peek().text + "'");
    return next().text;
  }
  std::size_t mark() const { return pos_; }
  void reset(std::size_t m) { pos_ = m; }
  std::size_t line() const { return line_; }
  void fail(const std::string& msg) const { throw ParseError(line_, msg); }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

// ---------------------------------------------------------------------------
// Declaration collection (registers and auxiliaries are declared by use)

struct Symbols {
  Declarations decls;
  std::vector<Value> init_values;

  LocId location(Stream& st, const std::string& name) {
    auto l = decls.find_location(name);
    if (!l) st.fail("undeclared location '" + name + "'");
    return *l;
  }
  ThreadId thread(Stream& st, unsigned ext) {
    auto t = decls.find_thread(ext);
    if (!t) st.fail("undeclared thread " + std::to_string(ext));
    return *t;
  }
  RegId reg_lookup(Stream& st, const std::string& name) {
    auto r = decls.find_register(name);
    if (!r) st.fail("undeclared register '" + name + "'");
    return *r;
  }
  RegId reg_declare(Stream& st, const std::string& name, ThreadId owner) {
    if (decls.find_location(name)) st.fail("'" + name + "' is a location, not a register");
    if (auto r = decls.find_register(name)) {
      if (decls.registers[*r].owner != owner)
        st.fail("register '" + name + "' is owned by thread " +
                std::to_string(decls.thread_name(decls.registers[*r].owner)));
      return *r;
    }
    const auto slot = static_cast<std::uint32_t>(decls.regs_of(owner));
    decls.registers.push_back({name, owner, slot});
    return static_cast<RegId>(decls.registers.size() - 1);
  }
  AuxId aux_lookup(Stream& st, const std::string& name) {
    auto a = decls.find_aux(name);
    if (!a) st.fail("undeclared auxiliary '" + name + "'");
    return *a;
  }
  AuxId aux_declare(const std::string& name) {
    if (auto a = decls.find_aux(name)) return *a;
    decls.aux_vars.push_back(name);
    return static_cast<AuxId>(decls.aux_vars.size() - 1);
  }
};

// ---------------------------------------------------------------------------
// Expression parsing (registers of the executing thread only)

Expr parse_term(Stream& st, Symbols& sy, ThreadId owner, bool declare) {
  if (st.peek().kind == Token::Kind::Number)
    return Expr::lit(static_cast<Value>(std::stoul(st.next().text)));
  const std::string name = st.expect_ident();
  const RegId r = declare ? sy.reg_declare(st, name, owner) : sy.reg_lookup(st, name);
  if (sy.decls.registers[r].owner != owner)
    st.fail("register '" + name + "' belongs to another thread");
  return Expr::reg(sy.decls.registers[r].slot);
}

Expr parse_expr(Stream& st, Symbols& sy, ThreadId owner, bool declare) {
  Expr e = parse_term(st, sy, owner, declare);
  while (true) {
    if (st.try_sym("+"))
      e = Expr::add(std::move(e), parse_term(st, sy, owner, declare));
    else if (st.try_sym("-"))
      e = Expr::sub(std::move(e), parse_term(st, sy, owner, declare));
    else
      return e;
  }
}

BoolExpr parse_bool_cmp(Stream& st, Symbols& sy, ThreadId owner, bool declare) {
  if (st.try_ident("true")) return BoolExpr::constant(true);
  if (st.try_ident("false")) return BoolExpr::constant(false);
  if (st.try_sym("~")) return BoolExpr::neg(parse_bool_cmp(st, sy, owner, declare));
  if (st.try_sym("(")) {
    // parenthesised sub-expression with connectives
    BoolExpr inner = parse_bool_cmp(st, sy, owner, declare);
    while (true) {
      if (st.try_sym("/\\"))
        inner = BoolExpr::conj(std::move(inner), parse_bool_cmp(st, sy, owner, declare));
      else if (st.try_sym("\\/"))
        inner = BoolExpr::disj(std::move(inner), parse_bool_cmp(st, sy, owner, declare));
      else
        break;
    }
    st.expect_sym(")");
    return inner;
  }
  Expr lhs = parse_expr(st, sy, owner, declare);
  BoolExpr::CmpOp op;
  if (st.try_sym("="))
    op = BoolExpr::CmpOp::Eq;
  else if (st.try_sym("!="))
    op = BoolExpr::CmpOp::Ne;
  else if (st.try_sym("<"))
    op = BoolExpr::CmpOp::Lt;
  else {
    st.fail("expected a comparison operator");
    throw std::logic_error("unreachable");
  }
  return BoolExpr::cmp(op, std::move(lhs), parse_expr(st, sy, owner, declare));
}

AuxExpr parse_aux_term(Stream& st, Symbols& sy, bool declare) {
  if (st.peek().kind == Token::Kind::Number)
    return AuxExpr::lit(static_cast<Value>(std::stoul(st.next().text)));
  const std::string name = st.expect_ident();
  return AuxExpr::var(declare ? sy.aux_declare(name) : sy.aux_lookup(st, name));
}

AuxExpr parse_aux_expr(Stream& st, Symbols& sy, bool declare) {
  AuxExpr e = parse_aux_term(st, sy, declare);
  while (true) {
    if (st.try_sym("+"))
      e = AuxExpr::add(std::move(e), parse_aux_term(st, sy, declare));
    else if (st.try_sym("-"))
      e = AuxExpr::sub(std::move(e), parse_aux_term(st, sy, declare));
    else
      return e;
  }
}

// ---------------------------------------------------------------------------
// Assertion parsing

struct AssertCtx {
  Symbols& sy;
  std::unordered_map<std::string, std::string> binding;  // forall variables

  std::string resolve(const std::string& name) const {
    auto it = binding.find(name);
    return it == binding.end() ? name : it->second;
  }
};

Assertion parse_assertion_stream(Stream& st, AssertCtx& cx);

Value parse_value(Stream& st, AssertCtx& cx) {
  if (st.peek().kind == Token::Kind::Number)
    return static_cast<Value>(std::stoul(st.next().text));
  const std::string resolved = cx.resolve(st.expect_ident());
  if (!resolved.empty() && std::isdigit(static_cast<unsigned char>(resolved[0])))
    return static_cast<Value>(std::stoul(resolved));
  st.fail("expected a value, got '" + resolved + "'");
  return 0;
}

ValueSet parse_value_set(Stream& st, AssertCtx& cx) {
  st.expect_sym("{");
  ValueSet out;
  while (!st.try_sym("}")) {
    out.push_back(parse_value(st, cx));
    st.try_sym(",");
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

LocId parse_loc(Stream& st, AssertCtx& cx) {
  return cx.sy.location(st, cx.resolve(st.expect_ident()));
}

ThreadId parse_tid_text(Stream& st, AssertCtx& cx, const std::string& text) {
  const std::string resolved = cx.resolve(text);
  if (resolved.empty() || !std::isdigit(static_cast<unsigned char>(resolved[0])))
    st.fail("expected a thread id, got '" + resolved + "'");
  return cx.sy.thread(st, static_cast<unsigned>(std::stoul(resolved)));
}

ThreadId parse_tid(Stream& st, AssertCtx& cx) {
  if (st.peek().kind == Token::Kind::Number)
    return cx.sy.thread(st, static_cast<unsigned>(std::stoul(st.next().text)));
  return parse_tid_text(st, cx, st.expect_ident());
}

// Parses the `_P` / `_A_1` / `_1` suffix after a closing bracket. The suffix
// lexes as a single identifier-like token or a number after '_'.
ViewExpr parse_view_suffix(Stream& st, AssertCtx& cx, LocId loc) {
  std::string suffix;
  if (st.peek().kind == Token::Kind::Ident && !st.peek().text.empty() &&
      st.peek().text[0] == '_') {
    suffix = st.next().text.substr(1);
  } else if (st.try_sym("_")) {
    if (st.peek().kind == Token::Kind::Number)
      suffix = st.next().text;
    else
      suffix = st.expect_ident();
  } else {
    st.fail("expected a view subscript after ']'");
  }

  if (suffix == "P") return ViewExpr::persist(loc);
  if (suffix.size() >= 2 && suffix[0] == 'A' && suffix[1] == '_')
    return ViewExpr::async(loc, parse_tid_text(st, cx, suffix.substr(2)));
  if (suffix == "A") {  // written as []_A_1 with a separate _1 token
    std::string rest;
    if (st.peek().kind == Token::Kind::Ident && st.peek().text[0] == '_')
      rest = st.next().text.substr(1);
    else {
      st.expect_sym("_");
      rest = st.peek().kind == Token::Kind::Number ? st.next().text : st.expect_ident();
    }
    return ViewExpr::async(loc, parse_tid_text(st, cx, rest));
  }
  return ViewExpr::thread_of(loc, parse_tid_text(st, cx, suffix));
}

Assertion parse_view_atom(Stream& st, AssertCtx& cx, ViewExpr ve) {
  if (st.try_sym("=")) return Assertion::view_eq(ve, parse_value_set(st, cx));
  if (st.try_sym("<=")) return Assertion::view_subset(ve, parse_value_set(st, cx));
  if (st.try_ident("has")) return Assertion::view_contains(ve, parse_value(st, cx));
  if (st.try_sym("!")) {
    if (st.try_ident("has")) return Assertion::view_contains(ve, parse_value(st, cx), true);
    st.fail("expected 'has' after '!'");
  }
  st.fail("expected '=', '<=', 'has' or '!has' after a view expression");
  throw std::logic_error("unreachable");
}

NumCmp parse_num_cmp(Stream& st) {
  if (st.try_sym("=")) return NumCmp::Eq;
  if (st.try_sym("!=")) return NumCmp::Ne;
  if (st.try_sym("<=")) return NumCmp::Le;
  if (st.try_sym("<")) return NumCmp::Lt;
  if (st.try_sym(">=")) return NumCmp::Ge;
  if (st.try_sym(">")) return NumCmp::Gt;
  st.fail("expected a comparison operator");
  throw std::logic_error("unreachable");
}

Assertion parse_unary(Stream& st, AssertCtx& cx);

Assertion parse_forall(Stream& st, AssertCtx& cx) {
  struct Binder {
    std::string var;
    std::vector<std::string> items;
  };
  std::vector<Binder> binders;
  do {
    Binder b;
    b.var = st.expect_ident();
    if (!st.try_ident("in")) st.fail("expected 'in' after a forall variable");
    st.expect_sym("{");
    while (!st.try_sym("}")) {
      if (st.peek().kind == Token::Kind::Number)
        b.items.push_back(st.next().text);
      else
        b.items.push_back(st.expect_ident());
      st.try_sym(",");
    }
    if (b.items.empty()) st.fail("empty forall range");
    binders.push_back(std::move(b));
  } while (st.try_sym(","));
  st.expect_sym(".");

  // Expand by re-parsing the body once per binding combination.
  const std::size_t body_start = st.mark();
  std::optional<Assertion> acc;
  std::vector<std::size_t> idx(binders.size(), 0);
  std::size_t body_end = body_start;
  while (true) {
    for (std::size_t i = 0; i < binders.size(); ++i)
      cx.binding[binders[i].var] = binders[i].items[idx[i]];
    st.reset(body_start);
    Assertion body = parse_unary(st, cx);
    body_end = st.mark();
    acc = acc ? Assertion::conj(std::move(*acc), std::move(body)) : std::move(body);
    std::size_t k = binders.size();
    while (k > 0 && ++idx[k - 1] == binders[k - 1].items.size()) idx[--k] = 0;
    if (k == 0) break;
  }
  for (const auto& b : binders) cx.binding.erase(b.var);
  st.reset(body_end);
  return std::move(*acc);
}

Assertion parse_primary(Stream& st, AssertCtx& cx) {
  if (st.try_ident("true")) return Assertion::constant(true);
  if (st.try_ident("false")) return Assertion::constant(false);
  if (st.try_sym("(")) {
    Assertion a = parse_assertion_stream(st, cx);
    st.expect_sym(")");
    return a;
  }
  if (st.try_ident("forall")) return parse_forall(st, cx);
  if (st.try_sym("[")) {
    const LocId loc = parse_loc(st, cx);
    st.expect_sym("]");
    return parse_view_atom(st, cx, parse_view_suffix(st, cx, loc));
  }
  if (st.try_sym("<")) {
    const LocId loc = parse_loc(st, cx);
    st.expect_sym("=");
    const Value v = parse_value(st, cx);
    st.expect_sym(">");
    st.expect_sym("[");
    const LocId target = parse_loc(st, cx);
    st.expect_sym("]");
    // reuse the subscript parser; conditional views carry a thread subscript
    ViewExpr inner = parse_view_suffix(st, cx, target);
    if (inner.kind != ViewExpr::Kind::Thread)
      st.fail("conditional views take a thread subscript");
    return parse_view_atom(st, cx, ViewExpr::cond(loc, v, target, inner.tid));
  }
  if (st.try_ident("lastr")) {
    const LocId l = parse_loc(st, cx);
    return Assertion::last_reader(l, parse_tid(st, cx));
  }
  if (st.try_ident("lastflush")) {
    const LocId l = parse_loc(st, cx);
    return Assertion::last_flush(l, parse_tid(st, cx));
  }
  if (st.try_ident("lastmfence")) {
    const LocId l = parse_loc(st, cx);
    return Assertion::last_mfence(l, parse_tid(st, cx));
  }
  if (st.try_ident("lastval")) {
    const LocId l = parse_loc(st, cx);
    return Assertion::last_val(l, parse_value(st, cx));
  }
  if (st.try_ident("count")) {
    const LocId l = parse_loc(st, cx);
    const Value v = parse_value(st, cx);
    const NumCmp op = parse_num_cmp(st);
    return Assertion::count_cmp(l, v, op,
                                static_cast<std::uint32_t>(std::stoul(st.expect_number())));
  }
  if (st.try_ident("reg")) {
    const RegId r = cx.sy.reg_lookup(st, cx.resolve(st.expect_ident()));
    if (st.try_ident("in")) return Assertion::reg_in(r, parse_value_set(st, cx));
    if (st.try_sym("!")) {
      if (st.try_ident("in")) return Assertion::reg_in(r, parse_value_set(st, cx), true);
      st.fail("expected 'in' after '!'");
    }
    const NumCmp op = parse_num_cmp(st);
    return Assertion::reg_cmp(r, op, parse_value(st, cx));
  }
  if (st.try_ident("aux")) {
    AuxExpr lhs = parse_aux_expr(st, cx.sy, /*declare=*/false);
    if (st.try_ident("in")) return Assertion::aux_in(std::move(lhs), parse_value_set(st, cx));
    if (st.try_sym("!")) {
      if (st.try_ident("in"))
        return Assertion::aux_in(std::move(lhs), parse_value_set(st, cx), true);
      st.fail("expected 'in' after '!'");
    }
    const NumCmp op = parse_num_cmp(st);
    return Assertion::aux_cmp(std::move(lhs), op, parse_value(st, cx));
  }
  st.fail("expected an assertion, got '" + st.peek().text + "'");
  throw std::logic_error("unreachable");
}

Assertion parse_unary(Stream& st, AssertCtx& cx) {
  if (st.try_sym("~")) return Assertion::neg(parse_unary(st, cx));
  return parse_primary(st, cx);
}

Assertion parse_conj(Stream& st, AssertCtx& cx) {
  Assertion a = parse_unary(st, cx);
  while (st.try_sym("/\\")) a = Assertion::conj(std::move(a), parse_unary(st, cx));
  return a;
}

Assertion parse_disj(Stream& st, AssertCtx& cx) {
  Assertion a = parse_conj(st, cx);
  while (st.try_sym("\\/")) a = Assertion::disj(std::move(a), parse_conj(st, cx));
  return a;
}

Assertion parse_assertion_stream(Stream& st, AssertCtx& cx) {
  Assertion a = parse_disj(st, cx);
  if (st.try_sym("=>"))
    return Assertion::implies(std::move(a), parse_assertion_stream(st, cx));
  return a;
}

// ---------------------------------------------------------------------------
// Statement parsing

struct RawStmt {
  std::size_t line;
  std::string label;
  std::vector<Token> body;
};

LabelId intern_label(Program& prog, const std::string& name) {
  for (LabelId i = 0; i < prog.label_names.size(); ++i)
    if (prog.label_names[i] == name) return i;
  prog.label_names.push_back(name);
  return static_cast<LabelId>(prog.label_names.size() - 1);
}

AtomicStmt parse_atomic(Stream& st, Symbols& sy, ThreadId owner) {
  const std::string kw = st.expect_ident();
  if (kw == "skip") return AtomicStmt::skip();
  if (kw == "assign") {
    const RegId r = sy.reg_declare(st, st.expect_ident(), owner);
    return AtomicStmt::assign(sy.decls.registers[r].slot, parse_expr(st, sy, owner, true));
  }
  if (kw == "load") {
    const RegId r = sy.reg_declare(st, st.expect_ident(), owner);
    return AtomicStmt::load(sy.decls.registers[r].slot, sy.location(st, st.expect_ident()));
  }
  if (kw == "store") {
    const LocId l = sy.location(st, st.expect_ident());
    return AtomicStmt::store(l, parse_expr(st, sy, owner, true));
  }
  if (kw == "cas") {
    const RegId r = sy.reg_declare(st, st.expect_ident(), owner);
    const LocId l = sy.location(st, st.expect_ident());
    Expr e1 = parse_expr(st, sy, owner, true);
    Expr e2 = parse_expr(st, sy, owner, true);
    return AtomicStmt::cas(sy.decls.registers[r].slot, l, std::move(e1), std::move(e2));
  }
  if (kw == "sfence") return AtomicStmt::sfence();
  if (kw == "mfence") return AtomicStmt::mfence();
  if (kw == "flush") return AtomicStmt::flush(sy.location(st, st.expect_ident()));
  if (kw == "flushopt") return AtomicStmt::flushopt(sy.location(st, st.expect_ident()));
  st.fail("unknown statement keyword '" + kw + "'");
  throw std::logic_error("unreachable");
}

std::string expect_label_name(Stream& st) {
  if (st.peek().kind == Token::Kind::Number) return st.next().text;
  return st.expect_ident();
}

LabelledStmt parse_labelled(Stream& st, Symbols& sy, Program& prog, ThreadId owner) {
  if (st.try_ident("if")) {
    const bool parens = st.try_sym("(");
    BoolExpr cond = parse_bool_cmp(st, sy, owner, true);
    while (true) {
      if (st.try_sym("/\\"))
        cond = BoolExpr::conj(std::move(cond), parse_bool_cmp(st, sy, owner, true));
      else if (st.try_sym("\\/"))
        cond = BoolExpr::disj(std::move(cond), parse_bool_cmp(st, sy, owner, true));
      else
        break;
    }
    if (parens) st.expect_sym(")");
    if (!st.try_ident("goto")) st.fail("expected 'goto' in if statement");
    const LabelId then_label = intern_label(prog, expect_label_name(st));
    if (!st.try_ident("else")) st.fail("expected 'else' in if statement");
    if (!st.try_ident("goto")) st.fail("expected 'goto' after 'else'");
    const LabelId else_label = intern_label(prog, expect_label_name(st));
    if (!st.at_end()) st.fail("trailing tokens after if statement");
    return LabelledStmt::if_goto(std::move(cond), then_label, else_label);
  }

  AtomicStmt stmt = parse_atomic(st, sy, owner);
  st.expect_sym(";");
  if (!st.try_ident("goto")) st.fail("expected '; goto <label>' after the statement");
  const LabelId next = intern_label(prog, expect_label_name(st));
  if (st.try_sym(";")) {
    if (!st.try_ident("aux")) st.fail("expected 'aux' in a ghost update");
    const AuxId target = sy.aux_declare(st.expect_ident());
    st.expect_sym(":=");
    AuxExpr e = parse_aux_expr(st, sy, /*declare=*/true);
    if (!st.at_end()) st.fail("trailing tokens after the ghost update");
    return LabelledStmt::ghost(std::move(stmt), next, AuxUpdate{target, std::move(e)});
  }
  if (!st.at_end()) st.fail("trailing tokens after the statement");
  return LabelledStmt::plain(std::move(stmt), next);
}

// ---------------------------------------------------------------------------
// File-level parsing

struct Line {
  std::size_t number;
  std::string text;
};

}  // namespace

LitmusFile parse_litmus(std::string_view text) {
  // Split into trimmed, comment-stripped lines.
  std::vector<Line> lines;
  {
    std::size_t number = 1;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string s(text.substr(start, end - start));
      if (auto h = s.find('#'); h != std::string::npos) s.erase(h);
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      lines.push_back({number, b == std::string::npos ? "" : s.substr(b, e - b + 1)});
      ++number;
      start = end + 1;
      if (end == text.size()) break;
    }
  }

  LitmusFile f;
  Symbols sy;
  Program& prog = f.program;

  constexpr ThreadId kNoThread = static_cast<ThreadId>(-1);
  ThreadId current_thread = kNoThread;
  bool in_outline = false;
  struct RawOutlineEntry {
    enum class Kind { In, Fin, Ann } kind;
    ThreadId tid = 0;
    std::string label;
    std::size_t line;
    std::string text;
  };
  std::vector<RawOutlineEntry> outline_entries;
  std::optional<std::pair<std::size_t, std::string>> outcome_raw, invariant_raw;

  auto starts_with = [](const std::string& s, std::string_view p) {
    return s.size() >= p.size() && s.compare(0, p.size(), p) == 0;
  };

  for (const Line& ln : lines) {
    if (ln.text.empty()) continue;
    Stream st(tokenize(ln.text, ln.number), ln.number);

    if (starts_with(ln.text, "locations")) {
      st.expect_ident();
      while (!st.at_end()) {
        const std::string name = st.expect_ident();
        if (sy.decls.find_location(name)) st.fail("duplicate location name: " + name);
        sy.decls.locations.push_back(name);
        st.try_sym(",");
      }
      sy.init_values.resize(sy.decls.locations.size(), 0);
      in_outline = false;
      current_thread = kNoThread;
      continue;
    }
    if (starts_with(ln.text, "init ")) {
      st.expect_ident();
      while (!st.at_end()) {
        const LocId l = sy.location(st, st.expect_ident());
        sy.init_values.at(l) = static_cast<Value>(std::stoul(st.expect_number()));
      }
      continue;
    }
    if (starts_with(ln.text, "thread")) {
      st.expect_ident();
      const auto ext = static_cast<unsigned>(std::stoul(st.expect_number()));
      st.expect_sym(":");
      if (sy.decls.find_thread(ext)) st.fail("duplicate thread " + std::to_string(ext));
      sy.decls.thread_ids.push_back(ext);
      prog.code.emplace_back();
      current_thread = static_cast<ThreadId>(sy.decls.thread_ids.size() - 1);
      in_outline = false;
      continue;
    }
    if (starts_with(ln.text, "outcome")) {
      outcome_raw = {ln.number, ln.text.substr(std::string("outcome").size())};
      in_outline = false;
      current_thread = kNoThread;
      continue;
    }
    if (starts_with(ln.text, "crash-invariant")) {
      invariant_raw = {ln.number, ln.text.substr(std::string("crash-invariant").size())};
      in_outline = false;
      current_thread = kNoThread;
      continue;
    }
    if (starts_with(ln.text, "outline")) {
      in_outline = true;
      current_thread = kNoThread;
      continue;
    }

    if (in_outline) {
      RawOutlineEntry entry;
      entry.line = ln.number;
      if (starts_with(ln.text, "in:")) {
        entry.kind = RawOutlineEntry::Kind::In;
        entry.text = ln.text.substr(3);
      } else if (starts_with(ln.text, "fin:")) {
        entry.kind = RawOutlineEntry::Kind::Fin;
        entry.text = ln.text.substr(4);
      } else if (starts_with(ln.text, "ann ")) {
        entry.kind = RawOutlineEntry::Kind::Ann;
        Stream hs(tokenize(ln.text, ln.number), ln.number);
        hs.expect_ident();
        entry.tid = sy.thread(hs, static_cast<unsigned>(std::stoul(hs.expect_number())));
        entry.label = expect_label_name(hs);
        hs.expect_sym(":");
        const auto colon = ln.text.find(':', ln.text.find(entry.label, 4));
        entry.text = ln.text.substr(colon + 1);
      } else {
        throw ParseError(ln.number, "expected 'in:', 'fin:' or 'ann <tid> <label>:' "
                                    "inside the outline block");
      }
      outline_entries.push_back(std::move(entry));
      continue;
    }

    if (current_thread != kNoThread) {
      // "<label>: <statement...>"
      const ThreadId tid = current_thread;
      const std::string label = expect_label_name(st);
      st.expect_sym(":");
      const LabelId lid = intern_label(prog, label);
      if (lid == Program::kFin) st.fail("the final label cannot carry a statement");
      if (prog.code[tid].contains(lid))
        st.fail("duplicate label '" + label + "' in thread " +
                std::to_string(sy.decls.thread_name(tid)));
      prog.code[tid].emplace(lid, parse_labelled(st, sy, prog, tid));
      continue;
    }

    throw ParseError(ln.number, "unexpected line outside any section: '" + ln.text + "'");
  }

  if (sy.decls.locations.empty()) throw ParseError(1, "no 'locations' section");
  if (sy.decls.thread_ids.empty()) throw ParseError(1, "no thread blocks");
  prog.validate(sy.decls);

  // Assertions are parsed after the whole program so they may reference any
  // thread's registers and all auxiliaries.
  auto parse_assert_text = [&](std::size_t line, const std::string& s) {
    Stream st(tokenize(s, line), line);
    AssertCtx cx{sy, {}};
    Assertion a = parse_assertion_stream(st, cx);
    if (!st.at_end()) st.fail("trailing tokens after the assertion");
    return a;
  };

  if (outcome_raw) f.outcome = parse_assert_text(outcome_raw->first, outcome_raw->second);
  if (invariant_raw) {
    try {
      f.invariant =
          CrashInvariant(parse_assert_text(invariant_raw->first, invariant_raw->second));
    } catch (const ConfigError& e) {
      throw ParseError(invariant_raw->first, e.what());
    }
  }

  if (!outline_entries.empty()) {
    ProofOutline o;
    o.ann.resize(sy.decls.num_threads());
    o.inv = f.invariant.value_or(CrashInvariant{});
    for (const auto& entry : outline_entries) {
      Assertion a = parse_assert_text(entry.line, entry.text);
      switch (entry.kind) {
        case RawOutlineEntry::Kind::In:
          o.in_assert = std::move(a);
          break;
        case RawOutlineEntry::Kind::Fin:
          o.fin_assert = std::move(a);
          break;
        case RawOutlineEntry::Kind::Ann: {
          std::optional<LabelId> lid;
          for (LabelId i = 0; i < prog.label_names.size(); ++i)
            if (prog.label_names[i] == entry.label ||
                (entry.label == "init" && i == Program::kInit))
              lid = i;
          if (!lid)
            throw ParseError(entry.line, "annotation label '" + entry.label +
                                             "' does not appear in the program");
          const auto labels = prog.labels_of(entry.tid);
          if (std::find(labels.begin(), labels.end(), *lid) == labels.end())
            throw ParseError(entry.line,
                             "annotation label '" + entry.label + "' is not a label of thread " +
                                 std::to_string(sy.decls.thread_name(entry.tid)));
          o.ann[entry.tid][*lid] = std::move(a);
          break;
        }
      }
    }
    f.outline = std::move(o);
  }

  f.init.decls = std::move(sy.decls);
  f.init.init_values = std::move(sy.init_values);
  f.init.validate();
  return f;
}

Assertion parse_assertion(std::string_view text, const Declarations& d) {
  Symbols sy;
  sy.decls = d;
  Stream st(tokenize(text, 1), 1);
  AssertCtx cx{sy, {}};
  Assertion a = parse_assertion_stream(st, cx);
  if (!st.at_end()) st.fail("trailing tokens after the assertion");
  return a;
}

// ---------------------------------------------------------------------------
// Pretty printing

std::string pretty_print(const LitmusFile& f) {
  const Declarations& d = f.init.decls;
  std::ostringstream os;
  os << "locations";
  for (const auto& l : d.locations) os << " " << l;
  os << "\n";
  for (LocId l = 0; l < d.locations.size(); ++l)
    if (f.init.init_value(l) != 0)
      os << "init " << d.location_name(l) << " " << f.init.init_value(l) << "\n";

  for (ThreadId t = 0; t < d.num_threads(); ++t) {
    os << "thread " << d.thread_name(t) << ":\n";
    for (LabelId l : f.program.labels_of(t)) {
      const LabelledStmt* ls = f.program.at(t, l);
      if (ls == nullptr) continue;
      os << "  " << f.program.label_names.at(l) << ": ";
      if (ls->kind == LabelledStmt::Kind::IfGoto) {
        os << "if (" << ls->cond->to_string(d, t) << ") goto "
           << f.program.label_names.at(ls->then_label) << " else goto "
           << f.program.label_names.at(ls->else_label);
      } else {
        os << ls->stmt.to_string(d, t) << " ; goto " << f.program.label_names.at(ls->next);
        if (ls->kind == LabelledStmt::Kind::Ghost)
          os << " ; aux " << d.aux_vars.at(ls->aux->target) << " := "
             << ls->aux->expr.to_string(d);
      }
      os << "\n";
    }
  }

  if (f.outcome) os << "outcome " << f.outcome->to_string(d) << "\n";
  if (f.invariant) os << "crash-invariant " << f.invariant->to_string(d) << "\n";
  if (f.outline) {
    os << "outline:\n";
    os << "  in: " << f.outline->in_assert.to_string(d) << "\n";
    os << "  fin: " << f.outline->fin_assert.to_string(d) << "\n";
    for (ThreadId t = 0; t < d.num_threads(); ++t)
      for (LabelId l : f.program.labels_of(t)) {
        auto it = f.outline->ann[t].find(l);
        if (it == f.outline->ann[t].end()) continue;
        os << "  ann " << d.thread_name(t) << " " << f.program.label_names.at(l) << ": "
           << it->second.to_string(d) << "\n";
      }
  }
  return os.str();
}

}  // namespace pxv
