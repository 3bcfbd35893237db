// Linear integer expressions over program variables and parameters.
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

namespace lb {

using Var = std::string;

/// A linear expression c0 + sum(ci * xi) in canonical form: zero
/// coefficients are never stored, so structural equality is semantic
/// equality.
struct LinExpr {
  long long constant = 0;
  std::map<Var, long long> coeffs;

  LinExpr() = default;
  explicit LinExpr(long long c) : constant(c) {}

  static LinExpr variable(const Var &v) {
    LinExpr e;
    e.coeffs[v] = 1;
    return e;
  }

  bool is_constant() const { return coeffs.empty(); }
  bool is_zero() const { return constant == 0 && coeffs.empty(); }
  bool mentions(const Var &v) const { return coeffs.count(v) != 0; }

  long long coeff(const Var &v) const {
    auto it = coeffs.find(v);
    return it == coeffs.end() ? 0 : it->second;
  }

  void add_term(const Var &v, long long c) {
    if (c == 0) return;
    auto it = coeffs.find(v);
    if (it == coeffs.end()) {
      coeffs.emplace(v, c);
    } else {
      it->second += c;
      if (it->second == 0) coeffs.erase(it);
    }
  }

  LinExpr &operator+=(const LinExpr &o) {
    constant += o.constant;
    for (auto &[v, c] : o.coeffs) add_term(v, c);
    return *this;
  }
  LinExpr &operator-=(const LinExpr &o) {
    constant -= o.constant;
    for (auto &[v, c] : o.coeffs) add_term(v, -c);
    return *this;
  }
  friend LinExpr operator+(LinExpr a, const LinExpr &b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr &b) { return a -= b; }

  LinExpr scaled(long long k) const {
    LinExpr r;
    if (k == 0) return r;
    r.constant = constant * k;
    for (auto &[v, c] : coeffs) r.coeffs[v] = c * k;
    return r;
  }

  friend LinExpr operator-(const LinExpr &a) { return a.scaled(-1); }

  bool operator==(const LinExpr &o) const {
    return constant == o.constant && coeffs == o.coeffs;
  }
  bool operator!=(const LinExpr &o) const { return !(*this == o); }
  bool operator<(const LinExpr &o) const {
    if (constant != o.constant) return constant < o.constant;
    return coeffs < o.coeffs;
  }

  /// Replace every variable that has an entry in `sub` by its image.
  LinExpr substitute(const std::map<Var, LinExpr> &sub) const {
    LinExpr r;
    r.constant = constant;
    for (auto &[v, c] : coeffs) {
      auto it = sub.find(v);
      if (it == sub.end())
        r.add_term(v, c);
      else
        r += it->second.scaled(c);
    }
    return r;
  }

  long long eval(const std::map<Var, long long> &val) const {
    long long r = constant;
    for (auto &[v, c] : coeffs) {
      auto it = val.find(v);
      r += c * (it == val.end() ? 0 : it->second);
    }
    return r;
  }

  /// True when every mentioned variable is in `allowed`.
  bool only_over(const std::set<Var> &allowed) const {
    for (auto &[v, c] : coeffs) {
      (void)c;
      if (!allowed.count(v)) return false;
    }
    return true;
  }

  std::set<Var> vars() const {
    std::set<Var> r;
    for (auto &[v, c] : coeffs) {
      (void)c;
      r.insert(v);
    }
    return r;
  }

  std::string str() const;
};

/// Constraint expr >= 0; every source comparison is normalized to this
/// form over the integers (a > b becomes a-b-1 >= 0).
struct Constraint {
  LinExpr expr;

  bool operator==(const Constraint &o) const { return expr == o.expr; }
  bool operator<(const Constraint &o) const { return expr < o.expr; }
  std::string str() const { return expr.str() + ">=0"; }
};

enum class Sign { Negative, NonPositive, Zero, NonNegative, Positive, Unknown };

std::string sign_name(Sign s);

/// Sign of a parameter-only expression under the global assumption that
/// all parameters are non-negative. Purely syntactic; the analysis
/// refines it with recorded assumptions via the entailment check.
Sign syntactic_sign(const LinExpr &e);

inline bool sign_nonneg(Sign s) {
  return s == Sign::Zero || s == Sign::NonNegative || s == Sign::Positive;
}
inline bool sign_nonpos(Sign s) {
  return s == Sign::Zero || s == Sign::NonPositive || s == Sign::Negative;
}

/// Symbolic but constant delta of a parameterized VASS edge: a linear
/// expression over parameters only, optionally wrapped in max(.,0).
struct SymConst {
  LinExpr value;
  bool max0 = false;
  Sign sign = Sign::Unknown;

  static SymConst make(LinExpr v);
  static SymConst zero() { return make(LinExpr(0)); }

  /// max(value,0) wrapped; collapses to 0 for certainly non-positive
  /// values and drops the wrapper when the value is certainly >= 0.
  static SymConst wrapped(LinExpr v);

  bool is_zero() const { return value.is_zero(); }
  long long eval(const std::map<Var, long long> &val) const {
    long long r = value.eval(val);
    return max0 && r < 0 ? 0 : r;
  }
  bool operator==(const SymConst &o) const {
    return value == o.value && max0 == o.max0;
  }
  std::string str() const;
};

} // namespace lb
