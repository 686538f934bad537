// Copyright 2026 The netupdate authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// LTL formulas over single-packet lasso traces: AST, concrete-syntax parser,
// printer, and evaluator. A lasso trace is a finite prefix whose last state
// repeats forever, which is exactly the shape of a complete one-packet trace
// extended past its WORLD/DROP endpoint.

#ifndef NETUPDATE_LTL_HPP_
#define NETUPDATE_LTL_HPP_

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "netupdate/model.hpp"

namespace netupdate {

enum class LtlOp {
  kAtomPort,   // port = NAME
  kAtomField,  // FIELD = VALUE
  kNot,
  kAnd,
  kOr,
  kImplies,
  kNext,
  kUntil,
  kFinally,
  kGlobally,
};

struct LtlFormula;
using LtlPtr = std::shared_ptr<const LtlFormula>;

struct LtlFormula {
  LtlOp op;
  std::string name;   // port name or field name for atoms
  std::string value;  // field value for kAtomField
  LtlPtr lhs;
  LtlPtr rhs;
};

LtlPtr atom_port(std::string port);
LtlPtr atom_field(std::string field, std::string value);
LtlPtr ltl_not(LtlPtr f);
LtlPtr ltl_and(LtlPtr a, LtlPtr b);
LtlPtr ltl_or(LtlPtr a, LtlPtr b);
LtlPtr ltl_implies(LtlPtr a, LtlPtr b);
LtlPtr ltl_next(LtlPtr f);
LtlPtr ltl_until(LtlPtr a, LtlPtr b);
LtlPtr ltl_finally(LtlPtr f);
LtlPtr ltl_globally(LtlPtr f);

bool ltl_equal(const LtlFormula& a, const LtlFormula& b);

// Grammar: atoms `port = NAME` and `FIELD = VALUE`; unary `!`, `X`, `F`, `G`;
// binary `U`, `&`, `|`, `->`; parentheses. Precedence from tightest to
// loosest: unary, U, &, |, ->. `U` and `->` associate to the right. The
// names X, U, F and G are reserved. Throws ParseError with a byte offset.
LtlPtr parse_ltl(std::string_view text);

// Prints with minimal parentheses; parse_ltl(print_ltl(f)) is structurally
// equal to f.
std::string print_ltl(const LtlFormula& f);

// Finite prefix; the last element implicitly repeats forever.
struct LassoTrace {
  std::vector<LocatedPacket> states;
};

// Whether the infinite extension of `t` satisfies `f`. Atoms look at the
// first state of the suffix under evaluation; temporal operators unfold one
// step at a time, and on the constant suffix X g = g, g1 U g2 = g2, F g = g,
// G g = g. Field atoms that do not resolve against `space` raise
// ResolutionError. O(|f| * |t|).
bool eval_lasso(const LtlFormula& f, const LassoTrace& t,
                const PacketSpace& space);

// Checks every atom against the topology and packet space; returns one
// message per unresolved name. Parsing defers these checks so that a formula
// can be read before the network it speaks about.
std::vector<std::string> resolve_names(const LtlFormula& f,
                                       const Topology& topo,
                                       const PacketSpace& space);

}  // namespace netupdate

#endif  // NETUPDATE_LTL_HPP_
