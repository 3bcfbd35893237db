#include "loopbound/invariants.hpp"

#include <queue>

#include "loopbound/fm.hpp"

namespace lb {

namespace {

// Locations lying on some d -> loc walk (d and loc included).
std::set<int> between(const Cfg &cfg, int d, int loc) {
  auto forward = [&](int from) {
    std::set<int> seen{from};
    std::queue<int> q;
    q.push(from);
    while (!q.empty()) {
      int l = q.front();
      q.pop();
      for (int s : cfg.successors(l))
        if (seen.insert(s).second) q.push(s);
    }
    return seen;
  };
  std::set<int> from_d = forward(d);
  // Backward reachability to loc.
  std::map<int, std::vector<int>> preds;
  for (auto &t : cfg.transitions) preds[t.dst].push_back(t.src);
  std::set<int> to_loc{loc};
  std::queue<int> q;
  q.push(loc);
  while (!q.empty()) {
    int l = q.front();
    q.pop();
    for (int p : preds[l])
      if (to_loc.insert(p).second) q.push(p);
  }
  std::set<int> r;
  for (int l : from_d)
    if (to_loc.count(l)) r.insert(l);
  return r;
}

bool writes_any(const Transition &t, const std::set<Var> &vars) {
  for (auto &[v, u] : t.update) {
    (void)u;
    if (vars.count(v)) return true;
  }
  return false;
}

} // namespace

InvariantEngine::InvariantEngine(InvariantContext ctx)
    : ctx_(std::move(ctx)), idom_(immediate_dominators(*ctx_.cfg)) {}

std::optional<LinExpr> InvariantEngine::upper(const LinExpr &e, int loc) {
  return bound(e, loc, /*up=*/true, ctx_.budget);
}

std::optional<LinExpr> InvariantEngine::lower(const LinExpr &e, int loc) {
  return bound(e, loc, /*up=*/false, ctx_.budget);
}

// Constraints guaranteed to hold whenever control is at loc: for each
// dominator d with a unique in-edge, the edge's guard constraints whose
// variables the edge itself does not write and that nothing between d
// and loc can write.
const std::vector<Constraint> &InvariantEngine::conditions_at(int loc) {
  auto it = cond_memo_.find(loc);
  if (it != cond_memo_.end()) return it->second;
  const Cfg &cfg = *ctx_.cfg;
  std::vector<Constraint> out;
  for (int d = loc; d >= 0; d = idom_[d]) {
    auto in = cfg.transitions_into(d);
    if (in.size() == 1) {
      const Transition &tin = cfg.transitions[in[0]];
      std::set<int> region = between(cfg, d, loc);
      for (auto &g : tin.guard) {
        std::set<Var> gv = g.expr.vars();
        if (writes_any(tin, gv)) continue;
        bool stable = true;
        for (auto &t : cfg.transitions)
          if (region.count(t.src) && region.count(t.dst) &&
              writes_any(t, gv))
            stable = false;
        if (stable) out.push_back(g);
      }
    }
    if (d == idom_[d] || idom_[d] < 0) break;
  }
  return cond_memo_.emplace(loc, std::move(out)).first->second;
}

std::optional<LinExpr> InvariantEngine::by_condition(const LinExpr &e,
                                                     int loc, bool up) {
  for (auto &g : conditions_at(loc)) {
    // g.expr >= 0, so e <= e + g.expr and e - g.expr <= e.
    LinExpr cand = up ? e + g.expr : e - g.expr;
    if (cand.only_over(ctx_.params)) return cand;
  }
  return std::nullopt;
}

std::optional<LinExpr> InvariantEngine::by_stability(const LinExpr &e,
                                                     bool up) {
  for (auto &t : ctx_.cfg->transitions) {
    auto ep = subst_linear(e, t.update);
    if (!ep) return std::nullopt;
    LinExpr diff = *ep - e;
    if (!diff.only_over(ctx_.params)) return std::nullopt;
    Sign s = sign_under(diff, {}, ctx_.params);
    if (up ? !sign_nonpos(s) : !sign_nonneg(s)) return std::nullopt;
  }
  if (!ctx_.initial) return std::nullopt;
  auto e0 = ctx_.initial(e);
  if (e0 && e0->only_over(ctx_.params)) return e0;
  return std::nullopt;
}

std::optional<LinExpr> InvariantEngine::by_decomposition(const LinExpr &e,
                                                         int loc, bool up,
                                                         int budget) {
  if (e.coeffs.empty()) return std::nullopt;
  LinExpr r(e.constant);
  for (auto &[v, c] : e.coeffs) {
    bool want_up = (c > 0) == up;
    auto b = bound(LinExpr::variable(v), loc, want_up, budget - 1);
    if (!b) return std::nullopt;
    r += b->scaled(c);
  }
  return r;
}

// Case analysis over the definitions of v that can reach loc: the base
// value is the non-increment definitions' bound; every increment
// v := v + c adds exec_bound * c.
std::optional<LinExpr> InvariantEngine::by_definitions(const Var &v, int loc,
                                                       int budget) {
  const Cfg &cfg = *ctx_.cfg;
  // Reaching definitions of v per location; -1 marks "entry value".
  std::vector<std::set<int>> in(cfg.num_locs());
  in[cfg.begin].insert(-1);
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto &t : cfg.transitions) {
      std::set<int> out = t.update.count(v) ? std::set<int>{t.id} : in[t.src];
      for (int d : out)
        if (in[t.dst].insert(d).second) changed = true;
    }
  }
  const std::set<int> &defs = in[loc];
  if (defs.count(-1)) return std::nullopt; // possibly the entry value
  if (defs.empty()) return std::nullopt;   // loc unreachable

  LinExpr increments;
  std::vector<LinExpr> bases;
  for (int d : defs) {
    const Transition &t = cfg.transitions[d];
    const Update &u = t.update.at(v);
    LinExpr rhs;
    if (u.kind == Update::Kind::Div) {
      // floor(src/f) <= src for non-negative src; recurse on the source.
      rhs = LinExpr::variable(u.src);
    } else {
      rhs = u.lin;
    }
    LinExpr step = rhs - LinExpr::variable(v);
    if (u.kind != Update::Kind::Div && step.only_over(ctx_.params)) {
      Sign s = sign_under(step, {}, ctx_.params);
      if (sign_nonpos(s)) continue; // never raises v above other defs...
      if (!sign_nonneg(s)) return std::nullopt; // sign-unknown increment
      if (!ctx_.exec_bound) return std::nullopt;
      auto cnt = ctx_.exec_bound(t.id);
      if (!cnt) return std::nullopt;
      // exec_bound * step must stay linear.
      if (step.is_constant())
        increments += cnt->scaled(step.constant);
      else if (cnt->is_constant())
        increments += step.scaled(cnt->constant);
      else
        return std::nullopt;
      continue;
    }
    auto b = bound(rhs, t.src, /*up=*/true, budget - 1);
    if (!b) return std::nullopt;
    bases.push_back(std::move(*b));
  }
  if (bases.empty()) return std::nullopt;
  // Combine alternative base values: comparable pairs keep the larger;
  // otherwise sum the certainly non-negative ones.
  LinExpr base = bases[0];
  for (size_t i = 1; i < bases.size(); ++i) {
    Sign s = sign_under(bases[i] - base, {}, ctx_.params);
    if (sign_nonpos(s)) continue;
    if (sign_nonneg(s)) {
      base = bases[i];
      continue;
    }
    if (sign_nonneg(sign_under(base, {}, ctx_.params)) &&
        sign_nonneg(sign_under(bases[i], {}, ctx_.params))) {
      base += bases[i];
      continue;
    }
    return std::nullopt;
  }
  return base + increments;
}

std::optional<LinExpr> InvariantEngine::bound(const LinExpr &e, int loc,
                                              bool up, int budget) {
  if (e.only_over(ctx_.params)) return e;
  if (budget <= 0) return std::nullopt;
  std::tuple<LinExpr, int, bool> key{e, loc, up};
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  if (!in_progress_.insert(key).second) return std::nullopt;

  std::optional<LinExpr> r = by_condition(e, loc, up);
  if (!r) r = by_stability(e, up);
  if (!r) r = by_decomposition(e, loc, up, budget);
  if (!r && up && e.constant == 0 && e.coeffs.size() == 1 &&
      e.coeffs.begin()->second == 1)
    r = by_definitions(e.coeffs.begin()->first, loc, budget);

  in_progress_.erase(key);
  memo_.emplace(std::move(key), r);
  return r;
}

} // namespace lb
