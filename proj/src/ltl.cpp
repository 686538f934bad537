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

#include "netupdate/ltl.hpp"

#include <cctype>
#include <map>
#include <sstream>

#include "netupdate/errors.hpp"

namespace netupdate {

LtlPtr atom_port(std::string port) {
  return std::make_shared<LtlFormula>(
      LtlFormula{LtlOp::kAtomPort, std::move(port), "", nullptr, nullptr});
}

LtlPtr atom_field(std::string field, std::string value) {
  return std::make_shared<LtlFormula>(LtlFormula{
      LtlOp::kAtomField, std::move(field), std::move(value), nullptr, nullptr});
}

namespace {

LtlPtr unary(LtlOp op, LtlPtr f) {
  return std::make_shared<LtlFormula>(
      LtlFormula{op, "", "", std::move(f), nullptr});
}

LtlPtr binary(LtlOp op, LtlPtr a, LtlPtr b) {
  return std::make_shared<LtlFormula>(
      LtlFormula{op, "", "", std::move(a), std::move(b)});
}

}  // namespace

LtlPtr ltl_not(LtlPtr f) { return unary(LtlOp::kNot, std::move(f)); }
LtlPtr ltl_and(LtlPtr a, LtlPtr b) { return binary(LtlOp::kAnd, std::move(a), std::move(b)); }
LtlPtr ltl_or(LtlPtr a, LtlPtr b) { return binary(LtlOp::kOr, std::move(a), std::move(b)); }
LtlPtr ltl_implies(LtlPtr a, LtlPtr b) { return binary(LtlOp::kImplies, std::move(a), std::move(b)); }
LtlPtr ltl_next(LtlPtr f) { return unary(LtlOp::kNext, std::move(f)); }
LtlPtr ltl_until(LtlPtr a, LtlPtr b) { return binary(LtlOp::kUntil, std::move(a), std::move(b)); }
LtlPtr ltl_finally(LtlPtr f) { return unary(LtlOp::kFinally, std::move(f)); }
LtlPtr ltl_globally(LtlPtr f) { return unary(LtlOp::kGlobally, std::move(f)); }

bool ltl_equal(const LtlFormula& a, const LtlFormula& b) {
  if (a.op != b.op || a.name != b.name || a.value != b.value) return false;
  if ((a.lhs == nullptr) != (b.lhs == nullptr)) return false;
  if ((a.rhs == nullptr) != (b.rhs == nullptr)) return false;
  if (a.lhs && !ltl_equal(*a.lhs, *b.lhs)) return false;
  if (a.rhs && !ltl_equal(*a.rhs, *b.rhs)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class TokKind { kIdent, kLParen, kRParen, kNot, kAnd, kOr, kImplies, kEq, kEnd };

struct Token {
  TokKind kind;
  std::string text;
  std::size_t offset;
};

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#' ||
         c == '@' || c == '.' || c == ':';
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    std::size_t start = pos_;
    if (pos_ >= text_.size()) {
      tok_ = {TokKind::kEnd, "", start};
      return;
    }
    char c = text_[pos_];
    switch (c) {
      case '(': tok_ = {TokKind::kLParen, "(", start}; ++pos_; return;
      case ')': tok_ = {TokKind::kRParen, ")", start}; ++pos_; return;
      case '!': tok_ = {TokKind::kNot, "!", start}; ++pos_; return;
      case '&': tok_ = {TokKind::kAnd, "&", start}; ++pos_; return;
      case '|': tok_ = {TokKind::kOr, "|", start}; ++pos_; return;
      case '=': tok_ = {TokKind::kEq, "=", start}; ++pos_; return;
      case '-':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
          tok_ = {TokKind::kImplies, "->", start};
          pos_ += 2;
          return;
        }
        throw ParseError("expected '->'", start);
      default: break;
    }
    if (ident_char(c)) {
      std::size_t end = pos_;
      while (end < text_.size() && ident_char(text_[end])) ++end;
      tok_ = {TokKind::kIdent, std::string(text_.substr(pos_, end - pos_)), start};
      pos_ = end;
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) {}

  LtlPtr parse() {
    LtlPtr f = parse_implies();
    if (lex_.peek().kind != TokKind::kEnd) {
      throw ParseError("trailing input after formula", lex_.peek().offset);
    }
    return f;
  }

 private:
  LtlPtr parse_implies() {
    LtlPtr lhs = parse_or();
    if (lex_.peek().kind == TokKind::kImplies) {
      lex_.take();
      return ltl_implies(std::move(lhs), parse_implies());
    }
    return lhs;
  }

  LtlPtr parse_or() {
    LtlPtr lhs = parse_and();
    while (lex_.peek().kind == TokKind::kOr) {
      lex_.take();
      lhs = ltl_or(std::move(lhs), parse_and());
    }
    return lhs;
  }

  LtlPtr parse_and() {
    LtlPtr lhs = parse_until();
    while (lex_.peek().kind == TokKind::kAnd) {
      lex_.take();
      lhs = ltl_and(std::move(lhs), parse_until());
    }
    return lhs;
  }

  LtlPtr parse_until() {
    LtlPtr lhs = parse_unary();
    if (lex_.peek().kind == TokKind::kIdent && lex_.peek().text == "U") {
      lex_.take();
      return ltl_until(std::move(lhs), parse_until());
    }
    return lhs;
  }

  LtlPtr parse_unary() {
    const Token& tok = lex_.peek();
    if (tok.kind == TokKind::kNot) {
      lex_.take();
      return ltl_not(parse_unary());
    }
    if (tok.kind == TokKind::kIdent) {
      if (tok.text == "X") { lex_.take(); return ltl_next(parse_unary()); }
      if (tok.text == "F") { lex_.take(); return ltl_finally(parse_unary()); }
      if (tok.text == "G") { lex_.take(); return ltl_globally(parse_unary()); }
    }
    return parse_primary();
  }

  LtlPtr parse_primary() {
    Token tok = lex_.take();
    if (tok.kind == TokKind::kLParen) {
      LtlPtr inner = parse_implies();
      Token close = lex_.take();
      if (close.kind != TokKind::kRParen) {
        throw ParseError("expected ')'", close.offset);
      }
      return inner;
    }
    if (tok.kind != TokKind::kIdent) {
      throw ParseError("expected an atom or '('", tok.offset);
    }
    if (tok.text == "U" || tok.text == "X" || tok.text == "F" || tok.text == "G") {
      throw ParseError("'" + tok.text + "' is a reserved operator name", tok.offset);
    }
    Token eq = lex_.take();
    if (eq.kind != TokKind::kEq) {
      throw ParseError("expected '=' after '" + tok.text + "'", eq.offset);
    }
    Token rhs = lex_.take();
    if (rhs.kind != TokKind::kIdent) {
      throw ParseError("expected a name after '='", rhs.offset);
    }
    if (tok.text == "port") return atom_port(rhs.text);
    return atom_field(tok.text, rhs.text);
  }

  Lexer lex_;
};

int precedence(LtlOp op) {
  switch (op) {
    case LtlOp::kImplies: return 1;
    case LtlOp::kOr: return 2;
    case LtlOp::kAnd: return 3;
    case LtlOp::kUntil: return 4;
    case LtlOp::kNot:
    case LtlOp::kNext:
    case LtlOp::kFinally:
    case LtlOp::kGlobally: return 5;
    case LtlOp::kAtomPort:
    case LtlOp::kAtomField: return 6;
  }
  return 6;
}

void print_into(const LtlFormula& f, int parent_prec, bool right_child,
                std::ostringstream& out) {
  int prec = precedence(f.op);
  // A right-associative parent keeps an equal-precedence right child bare.
  bool need_parens =
      prec < parent_prec || (prec == parent_prec && !right_child);
  if (f.op == LtlOp::kAtomPort || f.op == LtlOp::kAtomField) need_parens = false;
  if (need_parens) out << "(";
  switch (f.op) {
    case LtlOp::kAtomPort:
      out << "port = " << f.name;
      break;
    case LtlOp::kAtomField:
      out << f.name << " = " << f.value;
      break;
    case LtlOp::kNot:
      out << "!";
      print_into(*f.lhs, prec + 1, false, out);
      break;
    case LtlOp::kNext:
    case LtlOp::kFinally:
    case LtlOp::kGlobally:
      out << (f.op == LtlOp::kNext ? "X " : f.op == LtlOp::kFinally ? "F " : "G ");
      print_into(*f.lhs, prec, true, out);
      break;
    case LtlOp::kAnd:
    case LtlOp::kOr:
      print_into(*f.lhs, prec, true, out);
      out << (f.op == LtlOp::kAnd ? " & " : " | ");
      print_into(*f.rhs, prec + 1, false, out);
      break;
    case LtlOp::kImplies:
      print_into(*f.lhs, prec + 1, false, out);
      out << " -> ";
      print_into(*f.rhs, prec, true, out);
      break;
    case LtlOp::kUntil:
      print_into(*f.lhs, prec + 1, false, out);
      out << " U ";
      print_into(*f.rhs, prec, true, out);
      break;
  }
  if (need_parens) out << ")";
}

}  // namespace

LtlPtr parse_ltl(std::string_view text) { return Parser(text).parse(); }

std::string print_ltl(const LtlFormula& f) {
  std::ostringstream out;
  print_into(f, 0, true, out);
  return out.str();
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

// Bottom-up dynamic program: one vector of per-position truth values per
// distinct subformula node.
class LassoEvaluator {
 public:
  LassoEvaluator(const LassoTrace& t, const PacketSpace& space)
      : trace_(t), space_(space), n_(t.states.size()) {}

  const std::vector<char>& values_of(const LtlFormula& f) {
    auto it = memo_.find(&f);
    if (it != memo_.end()) return it->second;

    std::vector<char> v(n_, 0);
    switch (f.op) {
      case LtlOp::kAtomPort:
        for (std::size_t i = 0; i < n_; ++i) {
          v[i] = trace_.states[i].port == f.name;
        }
        break;
      case LtlOp::kAtomField: {
        int field = space_.field_index(f.name);
        if (field < 0) {
          throw ResolutionError("unknown packet field '" + f.name + "'");
        }
        int value = space_.value_index(field, f.value);
        if (value < 0) {
          throw ResolutionError("unknown value '" + f.value + "' for field '" +
                                f.name + "'");
        }
        for (std::size_t i = 0; i < n_; ++i) {
          v[i] = trace_.states[i].packet.values[field] == value;
        }
        break;
      }
      case LtlOp::kNot: {
        const auto& a = values_of(*f.lhs);
        for (std::size_t i = 0; i < n_; ++i) v[i] = !a[i];
        break;
      }
      case LtlOp::kAnd: {
        const auto& a = values_of(*f.lhs);
        const auto& b = values_of(*f.rhs);
        for (std::size_t i = 0; i < n_; ++i) v[i] = a[i] && b[i];
        break;
      }
      case LtlOp::kOr: {
        const auto& a = values_of(*f.lhs);
        const auto& b = values_of(*f.rhs);
        for (std::size_t i = 0; i < n_; ++i) v[i] = a[i] || b[i];
        break;
      }
      case LtlOp::kImplies: {
        const auto& a = values_of(*f.lhs);
        const auto& b = values_of(*f.rhs);
        for (std::size_t i = 0; i < n_; ++i) v[i] = !a[i] || b[i];
        break;
      }
      case LtlOp::kNext: {
        const auto& a = values_of(*f.lhs);
        v[n_ - 1] = a[n_ - 1];  // successor of the last state is itself
        for (std::size_t i = 0; i + 1 < n_; ++i) v[i] = a[i + 1];
        break;
      }
      case LtlOp::kUntil: {
        const auto& a = values_of(*f.lhs);
        const auto& b = values_of(*f.rhs);
        v[n_ - 1] = b[n_ - 1];
        for (std::size_t i = n_ - 1; i-- > 0;) {
          v[i] = b[i] || (a[i] && v[i + 1]);
        }
        break;
      }
      case LtlOp::kFinally: {
        const auto& a = values_of(*f.lhs);
        v[n_ - 1] = a[n_ - 1];
        for (std::size_t i = n_ - 1; i-- > 0;) v[i] = a[i] || v[i + 1];
        break;
      }
      case LtlOp::kGlobally: {
        const auto& a = values_of(*f.lhs);
        v[n_ - 1] = a[n_ - 1];
        for (std::size_t i = n_ - 1; i-- > 0;) v[i] = a[i] && v[i + 1];
        break;
      }
    }
    return memo_.emplace(&f, std::move(v)).first->second;
  }

 private:
  const LassoTrace& trace_;
  const PacketSpace& space_;
  std::size_t n_;
  std::map<const LtlFormula*, std::vector<char>> memo_;
};

}  // namespace

bool eval_lasso(const LtlFormula& f, const LassoTrace& t,
                const PacketSpace& space) {
  if (t.states.empty()) throw ModelError("lasso trace must be non-empty");
  LassoEvaluator eval(t, space);
  return eval.values_of(f)[0] != 0;
}

std::vector<std::string> resolve_names(const LtlFormula& f,
                                       const Topology& topo,
                                       const PacketSpace& space) {
  std::vector<std::string> problems;
  auto walk = [&](auto&& self, const LtlFormula& node) -> void {
    switch (node.op) {
      case LtlOp::kAtomPort:
        if (!topo.has_port(node.name)) {
          problems.push_back("unknown port '" + node.name + "'");
        }
        break;
      case LtlOp::kAtomField: {
        int field = space.field_index(node.name);
        if (field < 0) {
          problems.push_back("unknown packet field '" + node.name + "'");
        } else if (space.value_index(field, node.value) < 0) {
          problems.push_back("unknown value '" + node.value + "' for field '" +
                             node.name + "'");
        }
        break;
      }
      default:
        if (node.lhs) self(self, *node.lhs);
        if (node.rhs) self(self, *node.rhs);
        break;
    }
  };
  walk(walk, f);
  return problems;
}

}  // namespace netupdate
