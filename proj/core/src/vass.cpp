#include "loopbound/vass.hpp"

#include <sstream>

#include "loopbound/fm.hpp"

namespace lb {

namespace {

long long ceil_log2(long long c) {
  long long r = 0;
  while ((1LL << r) < c) ++r;
  return r;
}

// Substitutes sigma into every constraint; nullopt when a constraint
// reads a division result.
std::optional<std::vector<Constraint>>
subst_guard(const std::vector<Constraint> &g, const UpdateMap &sigma) {
  std::vector<Constraint> out;
  for (auto &c : g) {
    auto e = subst_linear(c.expr, sigma);
    if (!e) return std::nullopt;
    out.push_back({std::move(*e)});
  }
  return out;
}

} // namespace

Abstractor::Abstractor(const Cfg &cfg, const LoopNest &nest,
                       const std::vector<LoopPath> &paths)
    : cfg_(cfg) {
  params_ = std::set<Var>(cfg.params.begin(), cfg.params.end());
  for (auto &p : cfg.params)
    param_nonneg_.push_back({LinExpr::variable(p)});
  for (auto &path : paths) {
    auto prefixes = contract_prefixes(cfg, nest, path);
    for (size_t i = 0; i < path.trans.size(); ++i)
      contexts_[path.trans[i]].push_back(
          {prefixes[i].guard, prefixes[i].sigma});
  }
}

bool Abstractor::justified(int trans, const LinExpr &goal_pre) const {
  const Transition &t = cfg_.transitions[trans];
  auto it = contexts_.find(trans);
  if (it == contexts_.end()) {
    // Edge on no loop path: only its own guard is available.
    std::vector<Constraint> g = t.guard;
    g.insert(g.end(), param_nonneg_.begin(), param_nonneg_.end());
    return entails(g, {goal_pre});
  }
  for (auto &ctx : it->second) {
    auto goal = subst_linear(goal_pre, ctx.sigma);
    if (!goal) return false;
    auto own = subst_guard(t.guard, ctx.sigma);
    if (!own) return false;
    std::vector<Constraint> g = ctx.guard;
    g.insert(g.end(), own->begin(), own->end());
    g.insert(g.end(), param_nonneg_.begin(), param_nonneg_.end());
    if (!entails(g, {std::move(*goal)})) return false;
  }
  return true;
}

std::optional<SymConst> Abstractor::abstract_linear(const Norm &n,
                                                    const Transition &t,
                                                    const InvariantFn *inv,
                                                    std::string &reason) {
  auto ep = subst_linear(n.base, t.update);
  if (!ep) {
    reason = "reads a division result";
    return std::nullopt;
  }
  LinExpr diff = *ep - n.base;
  if (diff.only_over(params_)) {
    if (sign_nonneg(syntactic_sign(diff))) return SymConst::make(diff);
    // Decrement: sound only if the pre-state value covers it, i.e.
    // base + diff >= 0 is entailed wherever the edge can fire.
    if (justified(t.id, n.base + diff)) return SymConst::make(diff);
    return SymConst::wrapped(diff);
  }
  if (ep->only_over(params_)) {
    // Reset to a parameter-only value, modeled as the additive delta
    // x' <= x + k (sound because x >= 0). Entry-chain edges fire once
    // from the all-zero local state, so their exact delta is the new
    // value minus the base's entry value.
    if (contexts_.find(t.id) == contexts_.end()) {
      LinExpr before(n.base.constant);
      for (auto &[v, c] : n.base.coeffs)
        if (params_.count(v)) before.add_term(v, c);
      return SymConst::make(*ep - before);
    }
    return SymConst::make(*ep);
  }
  if (inv && *inv) {
    if (auto u = (*inv)(*ep, t.src)) {
      // Same entry-value correction as for parameter-only resets.
      if (contexts_.find(t.id) == contexts_.end()) {
        LinExpr before(n.base.constant);
        for (auto &[v, c] : n.base.coeffs)
          if (params_.count(v)) before.add_term(v, c);
        return SymConst::wrapped(*u - before);
      }
      return SymConst::wrapped(*u);
    }
    reason = "no parameter bound for " + ep->str();
    return std::nullopt;
  }
  reason = "new value " + ep->str() + " is not parameter-only";
  return std::nullopt;
}

std::optional<SymConst> Abstractor::abstract_log(const Norm &n,
                                                 const Transition &t,
                                                 std::string &reason) {
  auto it = t.update.find(n.log_var);
  if (it == t.update.end()) return SymConst::zero();
  // Edges on no loop path (the entry chain) never contribute to a
  // summed path delta; the initial-value table covers their effect.
  bool off_path = contexts_.find(t.id) == contexts_.end();
  const Update &u = it->second;
  if (u.kind == Update::Kind::Div) {
    if (u.src != n.log_var) {
      if (off_path) return SymConst::zero();
      reason = "log counter reassigned from " + u.src;
      return std::nullopt;
    }
    if (u.factor < 2) return SymConst::zero();
    // floor(log2 v) drops by one only when v >= 2 going in; otherwise
    // the division still never increases it.
    LinExpr ge2 = LinExpr::variable(n.log_var);
    ge2.constant -= 2;
    if (justified(t.id, ge2)) return SymConst::make(LinExpr(-1));
    return SymConst::zero();
  }
  if (u.lin == LinExpr::variable(n.log_var)) return SymConst::zero();
  if (u.lin.constant == 0 && u.lin.coeffs.size() == 1 &&
      u.lin.coeff(n.log_var) >= 1)
    return SymConst::make(LinExpr(ceil_log2(u.lin.coeff(n.log_var))));
  if (off_path) return SymConst::zero();
  reason = "log counter updated non-multiplicatively";
  return std::nullopt;
}

std::optional<std::vector<SymConst>>
Abstractor::abstract_norm(const Norm &n, const InvariantFn *inv,
                          AbstractionDiag &why) {
  std::vector<SymConst> out;
  for (auto &t : cfg_.transitions) {
    std::string reason;
    auto d = n.kind == Norm::Kind::Log ? abstract_log(n, t, reason)
                                       : abstract_linear(n, t, inv, reason);
    if (!d) {
      why = {n.str(), t.id, reason};
      return std::nullopt;
    }
    out.push_back(std::move(*d));
  }
  return out;
}

LossyVass abstract_program(const Cfg &cfg, const LoopNest &nest,
                           const std::vector<LoopPath> &paths,
                           const std::vector<Norm> &norms,
                           const InvariantFn *inv) {
  Abstractor ab(cfg, nest, paths);
  LossyVass v;
  v.edges.resize(cfg.transitions.size());
  for (auto &n : norms) {
    AbstractionDiag why;
    auto deltas = ab.abstract_norm(n, inv, why);
    if (!deltas) {
      v.dropped.push_back(std::move(why));
      continue;
    }
    Norm kept = n;
    kept.id = (int)v.norms.size();
    for (size_t t = 0; t < deltas->size(); ++t)
      v.edges[t].emplace(kept.id, std::move((*deltas)[t]));
    v.norms.push_back(std::move(kept));
  }
  return v;
}

std::string LossyVass::dump(const Cfg &cfg) const {
  std::ostringstream os;
  os << "vars:";
  for (auto &n : norms) os << " " << n.str();
  os << "\n";
  for (auto &t : cfg.transitions) {
    os << cfg.loc_name(t.src) << " -> " << cfg.loc_name(t.dst) << " : ";
    bool first = true;
    for (auto &n : norms) {
      const SymConst &d = edges[t.id].at(n.id);
      if (!first) os << "; ";
      first = false;
      std::string x = n.str();
      if (d.is_zero()) {
        os << x << "' <= " << x;
      } else if (!d.max0 && d.value.is_constant() && d.value.constant < 0) {
        os << x << "' <= " << x << " - " << -d.value.constant;
      } else {
        os << x << "' <= " << x << " + " << d.str();
      }
    }
    os << "\n";
  }
  return os.str();
}

} // namespace lb
