#include "loopbound/ast.hpp"

#include <cctype>
#include <optional>
#include <set>

namespace lb {
namespace {

struct Token {
  enum class Kind { Ident, Int, Sym, End };
  Kind kind;
  std::string text;
  long long value = 0;
  int line = 1, col = 1;
};

class Lexer {
public:
  explicit Lexer(const std::string &src) : src_(src) { advance(); }

  const Token &peek() const { return cur_; }

  Token next() {
    Token t = cur_;
    advance();
    return t;
  }

private:
  void advance() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        line_++;
        col_ = 1;
        pos_++;
      } else if (std::isspace((unsigned char)c)) {
        pos_++;
        col_++;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') pos_++;
      } else {
        break;
      }
    }
    cur_.line = line_;
    cur_.col = col_;
    if (pos_ >= src_.size()) {
      cur_.kind = Token::Kind::End;
      cur_.text = "<eof>";
      return;
    }
    char c = src_[pos_];
    if (std::isalpha((unsigned char)c) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum((unsigned char)src_[pos_]) || src_[pos_] == '_'))
        pos_++;
      cur_.kind = Token::Kind::Ident;
      cur_.text = src_.substr(start, pos_ - start);
      col_ += (int)(pos_ - start);
      return;
    }
    if (std::isdigit((unsigned char)c)) {
      size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit((unsigned char)src_[pos_]))
        pos_++;
      cur_.kind = Token::Kind::Int;
      cur_.text = src_.substr(start, pos_ - start);
      cur_.value = std::stoll(cur_.text);
      col_ += (int)(pos_ - start);
      return;
    }
    static const char *two[] = {":=", "<=", ">=", "==", "!=", "&&"};
    for (auto *s : two) {
      if (src_.compare(pos_, 2, s) == 0) {
        cur_.kind = Token::Kind::Sym;
        cur_.text = s;
        pos_ += 2;
        col_ += 2;
        return;
      }
    }
    cur_.kind = Token::Kind::Sym;
    cur_.text = std::string(1, c);
    pos_++;
    col_++;
  }

  std::string src_; // owned: the lexer is copied for one-token lookahead
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token cur_;
};

class Parser {
public:
  Parser(const std::string &src, std::vector<Assumption> &assumptions)
      : lex_(src), assumptions_(assumptions) {}

  Ast run() {
    Ast ast;
    expect_ident("func");
    ast.name = expect_any_ident("function name");
    expect_sym("(");
    if (!is_sym(")")) {
      ast.params.push_back(expect_any_ident("parameter"));
      while (is_sym(",")) {
        lex_.next();
        ast.params.push_back(expect_any_ident("parameter"));
      }
    }
    expect_sym(")");
    params_.insert(ast.params.begin(), ast.params.end());
    ast.body = block();
    if (lex_.peek().kind != Token::Kind::End)
      fail("trailing input after function body");
    rewrite_neq(ast.body);
    check_definite_assignment(ast);
    return ast;
  }

private:
  [[noreturn]] void fail(const std::string &msg) {
    throw ParseError(msg, lex_.peek().line, lex_.peek().col);
  }

  bool is_sym(const std::string &s) {
    return lex_.peek().kind == Token::Kind::Sym && lex_.peek().text == s;
  }
  bool is_ident(const std::string &s) {
    return lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == s;
  }
  void expect_sym(const std::string &s) {
    if (!is_sym(s)) fail("expected '" + s + "', found '" + lex_.peek().text + "'");
    lex_.next();
  }
  void expect_ident(const std::string &s) {
    if (!is_ident(s)) fail("expected '" + s + "', found '" + lex_.peek().text + "'");
    lex_.next();
  }
  std::string expect_any_ident(const std::string &what) {
    if (lex_.peek().kind != Token::Kind::Ident)
      fail("expected " + what + ", found '" + lex_.peek().text + "'");
    return lex_.next().text;
  }

  std::vector<Stmt> block() {
    expect_sym("{");
    std::vector<Stmt> stmts;
    while (!is_sym("}")) stmts.push_back(statement());
    expect_sym("}");
    return stmts;
  }

  Stmt statement() {
    Stmt s;
    s.line = lex_.peek().line;
    s.col = lex_.peek().col;
    if (is_ident("while")) {
      lex_.next();
      s.kind = Stmt::Kind::While;
      expect_sym("(");
      s.cond = condition();
      expect_sym(")");
      s.body = block();
      return s;
    }
    if (is_ident("if")) {
      lex_.next();
      s.kind = Stmt::Kind::If;
      expect_sym("(");
      s.cond = condition();
      expect_sym(")");
      s.body = block();
      if (is_ident("else")) {
        lex_.next();
        s.else_body = block();
      }
      return s;
    }
    if (is_ident("skip")) {
      lex_.next();
      expect_sym(";");
      s.kind = Stmt::Kind::Skip;
      return s;
    }
    // assignment
    s.kind = Stmt::Kind::Assign;
    s.lhs = expect_any_ident("statement");
    if (params_.count(s.lhs))
      throw ParseError("assignment to parameter '" + s.lhs + "'", s.line, s.col);
    expect_sym(":=");
    s.rhs = assign_rhs();
    expect_sym(";");
    return s;
  }

  AssignRhs assign_rhs() {
    // Division is only sanctioned in the direct form IDENT / POSLIT.
    AssignRhs rhs;
    if (lex_.peek().kind == Token::Kind::Ident) {
      Lexer save = lex_;
      std::string v = lex_.next().text;
      if (is_sym("/")) {
        lex_.next();
        if (lex_.peek().kind != Token::Kind::Int || lex_.peek().value <= 0)
          fail("division requires a positive integer literal");
        rhs.kind = AssignRhs::Kind::Div;
        rhs.src = v;
        rhs.factor = lex_.next().value;
        return rhs;
      }
      lex_ = save;
    }
    rhs.kind = AssignRhs::Kind::Linear;
    rhs.lin = expression();
    return rhs;
  }

  LinExpr expression() {
    LinExpr e = term();
    while (is_sym("+") || is_sym("-")) {
      bool plus = lex_.next().text == "+";
      LinExpr t = term();
      if (plus)
        e += t;
      else
        e -= t;
    }
    return e;
  }

  LinExpr term() {
    LinExpr f = factor();
    while (is_sym("*")) {
      lex_.next();
      LinExpr g = factor();
      if (f.is_constant())
        f = g.scaled(f.constant);
      else if (g.is_constant())
        f = f.scaled(g.constant);
      else
        fail("non-linear expression (variable * variable)");
    }
    return f;
  }

  LinExpr factor() {
    if (is_sym("(")) {
      lex_.next();
      LinExpr e = expression();
      expect_sym(")");
      return e;
    }
    if (is_sym("-")) {
      lex_.next();
      return -factor();
    }
    if (lex_.peek().kind == Token::Kind::Int) return LinExpr(lex_.next().value);
    if (lex_.peek().kind == Token::Kind::Ident)
      return LinExpr::variable(lex_.next().text);
    fail("expected expression");
  }

  Cond condition() {
    Cond c;
    for (;;) {
      Cond::Atom a;
      if (is_sym("*") || is_sym("?")) {
        lex_.next();
        a.nondet = true;
      } else {
        a.cmp = comparison();
      }
      c.atoms.push_back(std::move(a));
      if (!is_sym("&&")) break;
      lex_.next();
    }
    return c;
  }

  Comparison comparison() {
    Comparison cmp;
    cmp.line = lex_.peek().line;
    cmp.col = lex_.peek().col;
    cmp.lhs = expression();
    if (lex_.peek().kind != Token::Kind::Sym) fail("expected comparison operator");
    std::string op = lex_.next().text;
    if (op == "<")
      cmp.op = Comparison::Op::Lt;
    else if (op == "<=")
      cmp.op = Comparison::Op::Le;
    else if (op == ">")
      cmp.op = Comparison::Op::Gt;
    else if (op == ">=")
      cmp.op = Comparison::Op::Ge;
    else if (op == "==")
      cmp.op = Comparison::Op::Eq;
    else if (op == "!=")
      cmp.op = Comparison::Op::Ne;
    else
      fail("unknown comparison operator '" + op + "'");
    cmp.rhs = expression();
    return cmp;
  }

  // --- != polarity heuristic -------------------------------------------

  // Net linear self-updates of the body, used only to guess the update
  // direction of a tested expression.
  static void body_deltas(const std::vector<Stmt> &stmts,
                          std::map<Var, long long> &delta) {
    for (auto &s : stmts) {
      switch (s.kind) {
      case Stmt::Kind::Assign:
        if (s.rhs.kind == AssignRhs::Kind::Linear &&
            s.rhs.lin.coeff(s.lhs) == 1) {
          LinExpr d = s.rhs.lin;
          d.add_term(s.lhs, -1);
          if (d.is_constant()) delta[s.lhs] += d.constant;
        }
        break;
      case Stmt::Kind::While:
        body_deltas(s.body, delta);
        break;
      case Stmt::Kind::If:
        body_deltas(s.body, delta);
        body_deltas(s.else_body, delta);
        break;
      case Stmt::Kind::Skip:
        break;
      }
    }
  }

  void rewrite_neq(std::vector<Stmt> &stmts) {
    for (auto &s : stmts) {
      if (s.kind == Stmt::Kind::While) {
        for (auto &a : s.cond.atoms) {
          if (!a.nondet && a.cmp.op == Comparison::Op::Ne) {
            std::map<Var, long long> delta;
            body_deltas(s.body, delta);
            LinExpr diff = a.cmp.lhs - a.cmp.rhs;
            long long d = 0;
            for (auto &[v, c] : diff.coeffs) {
              auto it = delta.find(v);
              if (it != delta.end()) d += c * it->second;
            }
            // Decrement of the tested expression => assume it starts
            // positive; increment => negative. Default to positive.
            a.cmp.op = d > 0 ? Comparison::Op::Lt : Comparison::Op::Gt;
            std::string rel = d > 0 ? " < " : " > ";
            assumptions_.push_back(
                {a.cmp.lhs.str() + rel + a.cmp.rhs.str() +
                     " assumed invariant (loop condition used !=)",
                 a.cmp.line});
          }
        }
      }
      rewrite_neq(s.body);
      rewrite_neq(s.else_body);
    }
  }

  // --- definite assignment (warning only) ------------------------------

  static void collect_reads(const LinExpr &e, std::set<Var> &out) {
    for (auto &[v, c] : e.coeffs) {
      (void)c;
      out.insert(v);
    }
  }

  void check_stmts(const std::vector<Stmt> &stmts, std::set<Var> &defined,
                   std::vector<std::string> &warnings) {
    for (auto &s : stmts) {
      auto check_expr = [&](const LinExpr &e, int line) {
        std::set<Var> reads;
        collect_reads(e, reads);
        for (auto &v : reads)
          if (!defined.count(v) && warned_.insert(v).second)
            warnings.push_back("variable '" + v +
                               "' may be read before assignment (line " +
                               std::to_string(line) + ")");
      };
      switch (s.kind) {
      case Stmt::Kind::Assign:
        if (s.rhs.kind == AssignRhs::Kind::Linear)
          check_expr(s.rhs.lin, s.line);
        else if (!defined.count(s.rhs.src) && warned_.insert(s.rhs.src).second)
          warnings.push_back("variable '" + s.rhs.src +
                             "' may be read before assignment (line " +
                             std::to_string(s.line) + ")");
        defined.insert(s.lhs);
        break;
      case Stmt::Kind::While: {
        for (auto &a : s.cond.atoms)
          if (!a.nondet) {
            check_expr(a.cmp.lhs, s.line);
            check_expr(a.cmp.rhs, s.line);
          }
        std::set<Var> inner = defined;
        check_stmts(s.body, inner, warnings);
        defined.insert(inner.begin(), inner.end());
        break;
      }
      case Stmt::Kind::If: {
        for (auto &a : s.cond.atoms)
          if (!a.nondet) {
            check_expr(a.cmp.lhs, s.line);
            check_expr(a.cmp.rhs, s.line);
          }
        std::set<Var> t = defined, e = defined;
        check_stmts(s.body, t, warnings);
        check_stmts(s.else_body, e, warnings);
        // assigned on some path counts as assigned
        defined.insert(t.begin(), t.end());
        defined.insert(e.begin(), e.end());
        break;
      }
      case Stmt::Kind::Skip:
        break;
      }
    }
  }

  void check_definite_assignment(Ast &ast) {
    std::set<Var> defined(ast.params.begin(), ast.params.end());
    check_stmts(ast.body, defined, ast.warnings);
  }

  Lexer lex_;
  std::vector<Assumption> &assumptions_;
  std::set<Var> params_;
  std::set<Var> warned_;
};

} // namespace

Ast parse(const std::string &source, std::vector<Assumption> &assumptions) {
  return Parser(source, assumptions).run();
}

} // namespace lb
