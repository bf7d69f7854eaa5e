#pragma once

#include "pxv/assertions.hpp"
#include "pxv/domain.hpp"
#include "pxv/outline.hpp"
#include "pxv/wellformed.hpp"

// Line-oriented litmus/outline file format.
//
//   locations x y z
//   init x 1            (optional; locations default to 0)
//   thread 1:
//     init: store x 1 ; goto 2
//     2: flush x ; goto 3
//     3: if (a = 1) goto 4 else goto fin
//     4: store y 1 ; goto fin ; aux ahat := bhat + 1
//   outcome reg a = 0 /\ reg b = 0
//   crash-invariant [y]_P = {1} => [x]_P = {1}
//   outline:
//     in: forall o in {x y}, t in {1 2} . ([o]_t = {0} /\ [o]_P = {0})
//     fin: reg a = 7 => reg b = 42
//     ann 1 init: [y]_2 = {0}
//
// Statement keywords: skip, assign r e, load r x, store x e, cas r x e1 e2,
// sfence, mfence, flush x, flushopt x. Assertion atoms: [x]_1, [x]_P,
// [x]_A_1, <x=7>[y]_2 compared with = / <= / has / !has; lastr, lastflush,
// lastmfence, lastval; count x v = n; reg / aux comparisons; connectives
// /\ \/ ~ =>; true, false; forall expansion over finite sets.
// '#' starts a comment. Registers and auxiliaries are declared by use.

namespace pxv {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_ = 0;
};

struct LitmusFile {
  Program program;
  InitSpec init;
  std::optional<Assertion> outcome;
  std::optional<CrashInvariant> invariant;
  std::optional<ProofOutline> outline;
};

LitmusFile parse_litmus(std::string_view text);

// Canonical rendering; parse(pretty_print(f)) is structurally identical to f.
std::string pretty_print(const LitmusFile& f);

// Parses one assertion against existing declarations (used by tests/tools).
Assertion parse_assertion(std::string_view text, const Declarations& d);

}  // namespace pxv
