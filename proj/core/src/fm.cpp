#include "loopbound/fm.hpp"

#include <algorithm>
#include <numeric>

namespace lb {
namespace {

using Wide = __int128;

struct Row {
  Wide constant;
  std::map<Var, Wide> coeffs;
};

Row to_row(const LinExpr &e) {
  Row r;
  r.constant = e.constant;
  for (auto &[v, c] : e.coeffs) r.coeffs[v] = c;
  return r;
}

void normalize(Row &r) {
  Wide g = r.constant < 0 ? -r.constant : r.constant;
  for (auto &[v, c] : r.coeffs) {
    (void)v;
    Wide a = c < 0 ? -c : c;
    g = g == 0 ? a : std::gcd((long long)g, (long long)a);
  }
  if (g > 1) {
    // Dividing the constant rounds toward -inf to stay sound for >= 0.
    Wide q = r.constant >= 0 ? r.constant / g
                             : -((-r.constant + g - 1) / g);
    r.constant = q;
    for (auto &[v, c] : r.coeffs) {
      (void)v;
      c /= g;
    }
  }
}

// Eliminates all variables; returns false iff a contradiction
// (negative constant row) appears.
bool eliminate_all(std::vector<Row> rows) {
  for (;;) {
    // Drop rows that are trivially true and detect contradictions.
    std::vector<Row> next;
    for (auto &r : rows) {
      bool nontrivial = false;
      for (auto &[v, c] : r.coeffs) {
        (void)v;
        if (c != 0) {
          nontrivial = true;
          break;
        }
      }
      if (!nontrivial) {
        if (r.constant < 0) return false;
        continue;
      }
      next.push_back(std::move(r));
    }
    rows = std::move(next);
    if (rows.empty()) return true;

    // Pick the variable with the fewest lower*upper combinations.
    std::map<Var, std::pair<int, int>> occ;
    for (auto &r : rows)
      for (auto &[v, c] : r.coeffs) {
        if (c > 0)
          occ[v].first++;
        else if (c < 0)
          occ[v].second++;
      }
    Var best;
    long long best_cost = -1;
    for (auto &[v, lu] : occ) {
      long long cost = (long long)lu.first * lu.second;
      if (best_cost < 0 || cost < best_cost) {
        best_cost = cost;
        best = v;
      }
    }

    std::vector<Row> lowers, uppers, rest;
    for (auto &r : rows) {
      auto it = r.coeffs.find(best);
      Wide c = it == r.coeffs.end() ? 0 : it->second;
      if (c > 0)
        lowers.push_back(std::move(r));
      else if (c < 0)
        uppers.push_back(std::move(r));
      else
        rest.push_back(std::move(r));
    }
    for (auto &lo : lowers) {
      Wide a = lo.coeffs[best];
      for (auto &up : uppers) {
        Wide b = -up.coeffs[best];
        Row comb;
        comb.constant = b * lo.constant + a * up.constant;
        for (auto &[v, c] : lo.coeffs)
          if (v != best) comb.coeffs[v] += b * c;
        for (auto &[v, c] : up.coeffs)
          if (v != best) comb.coeffs[v] += a * c;
        for (auto it2 = comb.coeffs.begin(); it2 != comb.coeffs.end();)
          it2 = it2->second == 0 ? comb.coeffs.erase(it2) : std::next(it2);
        normalize(comb);
        if (comb.coeffs.empty()) {
          if (comb.constant < 0) return false;
        } else {
          rest.push_back(std::move(comb));
        }
      }
    }
    rows = std::move(rest);
  }
}

} // namespace

bool satisfiable(const std::vector<Constraint> &cs) {
  std::vector<Row> rows;
  rows.reserve(cs.size());
  for (auto &c : cs) rows.push_back(to_row(c.expr));
  return eliminate_all(std::move(rows));
}

bool entails(const std::vector<Constraint> &cs, const Constraint &goal) {
  std::vector<Constraint> sys = cs;
  Constraint neg;
  neg.expr = -goal.expr;
  neg.expr.constant -= 1; // goal.expr <= -1
  sys.push_back(neg);
  return !satisfiable(sys);
}

Sign sign_under(const LinExpr &e, const std::vector<Constraint> &assumptions,
                const std::set<Var> &nonneg_vars) {
  Sign syn = syntactic_sign(e);
  if (syn != Sign::Unknown && assumptions.empty()) return syn;

  std::vector<Constraint> sys = assumptions;
  for (auto &v : nonneg_vars) sys.push_back({LinExpr::variable(v)});

  auto holds = [&](LinExpr x) { return entails(sys, {std::move(x)}); };

  LinExpr pos = e;
  pos.constant -= 1; // e >= 1
  if (holds(pos)) return Sign::Positive;
  if (holds(e)) return e.is_zero() ? Sign::Zero : Sign::NonNegative;
  LinExpr neg = -e;
  neg.constant -= 1; // e <= -1
  if (holds(neg)) return Sign::Negative;
  if (holds(-e)) return Sign::NonPositive;
  return Sign::Unknown;
}

} // namespace lb
