#include "loopbound/linexpr.hpp"

#include <sstream>

namespace lb {

std::string LinExpr::str() const {
  if (coeffs.empty()) return std::to_string(constant);
  std::ostringstream os;
  bool first = true;
  for (auto &[v, c] : coeffs) {
    if (c < 0) {
      os << (first ? "-" : "-");
    } else if (!first) {
      os << "+";
    }
    long long a = c < 0 ? -c : c;
    if (a != 1) os << a << "*";
    os << v;
    first = false;
  }
  if (constant > 0)
    os << "+" << constant;
  else if (constant < 0)
    os << constant;
  return os.str();
}

std::string sign_name(Sign s) {
  switch (s) {
  case Sign::Negative: return "negative";
  case Sign::NonPositive: return "non-positive";
  case Sign::Zero: return "zero";
  case Sign::NonNegative: return "non-negative";
  case Sign::Positive: return "positive";
  case Sign::Unknown: return "unknown";
  }
  return "unknown";
}

Sign syntactic_sign(const LinExpr &e) {
  if (e.coeffs.empty())
    return e.constant > 0 ? Sign::Positive
           : e.constant < 0 ? Sign::Negative
                            : Sign::Zero;
  bool all_pos = true, all_neg = true;
  for (auto &[v, c] : e.coeffs) {
    (void)v;
    if (c < 0) all_pos = false;
    if (c > 0) all_neg = false;
  }
  if (all_pos && e.constant >= 0)
    return e.constant > 0 ? Sign::Positive : Sign::NonNegative;
  if (all_neg && e.constant <= 0)
    return e.constant < 0 ? Sign::Negative : Sign::NonPositive;
  return Sign::Unknown;
}

SymConst SymConst::make(LinExpr v) {
  SymConst s;
  s.sign = syntactic_sign(v);
  s.value = std::move(v);
  return s;
}

SymConst SymConst::wrapped(LinExpr v) {
  Sign sg = syntactic_sign(v);
  if (sign_nonpos(sg)) return make(LinExpr(0));
  if (sign_nonneg(sg)) return make(std::move(v));
  SymConst s;
  s.value = std::move(v);
  s.max0 = true;
  s.sign = Sign::NonNegative;
  return s;
}

std::string SymConst::str() const {
  if (max0) return "max(" + value.str() + ",0)";
  return value.str();
}

} // namespace lb
