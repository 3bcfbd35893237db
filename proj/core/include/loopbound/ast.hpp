// AST of the analyzed language and its parser.
#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "loopbound/linexpr.hpp"

namespace lb {

struct Comparison {
  enum class Op { Lt, Le, Gt, Ge, Eq, Ne };
  Op op;
  LinExpr lhs, rhs;
  int line = 0, col = 0;
};

/// Conjunction of comparisons and/or nondeterministic stars.
struct Cond {
  struct Atom {
    bool nondet = false;
    Comparison cmp;
  };
  std::vector<Atom> atoms;

  bool has_nondet() const {
    for (auto &a : atoms)
      if (a.nondet) return true;
    return false;
  }
};

/// Right-hand side of an assignment: a linear expression or one of the
/// two sanctioned non-linear forms x/c and x*c with positive literal c.
struct AssignRhs {
  enum class Kind { Linear, Div, Mul };
  Kind kind = Kind::Linear;
  LinExpr lin;
  Var src;
  long long factor = 1;
};

struct Stmt {
  enum class Kind { Assign, While, If, Skip };
  Kind kind = Kind::Skip;
  Var lhs;
  AssignRhs rhs;
  Cond cond;
  std::vector<Stmt> body;      // while body / then branch
  std::vector<Stmt> else_body; // if else branch
  int line = 0, col = 0;
};

/// A heuristic choice made by the analysis, reported to the user.
struct Assumption {
  std::string text;
  int line = 0;

  bool operator<(const Assumption &o) const {
    return std::tie(line, text) < std::tie(o.line, o.text);
  }
};

struct Ast {
  std::string name;
  std::vector<Var> params;
  std::vector<Stmt> body;
  std::vector<std::string> warnings;
};

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string &msg, int line_, int col_)
      : std::runtime_error(msg + " at " + std::to_string(line_) + ":" +
                           std::to_string(col_)),
        line(line_), col(col_) {}
};

/// Parses `.imp` source. Heuristic rewrites (the `!=` polarity choice)
/// are applied here and recorded in `assumptions`.
Ast parse(const std::string &source, std::vector<Assumption> &assumptions);

} // namespace lb
