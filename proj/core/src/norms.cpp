#include "loopbound/norms.hpp"

#include "loopbound/fm.hpp"

namespace lb {

std::string Norm::str() const {
  if (kind == Kind::Log) return "log(" + log_var + ")";
  return base.str();
}

std::vector<std::pair<LinExpr, LinExpr>>
find_local_rfs(const ContractedPath &rel, const Cfg &cfg) {
  std::vector<std::pair<LinExpr, LinExpr>> out;
  std::set<Var> params(cfg.params.begin(), cfg.params.end());
  for (auto &c : rel.guard) {
    const LinExpr &r = c.expr;
    bool tainted = false;
    for (auto &v : r.vars())
      if (is_havoc_var(v)) tainted = true;
    if (tainted) continue;

    auto rp = subst_linear(r, rel.update);
    if (!rp) continue; // r reads a division result
    LinExpr delta = r - *rp;
    if (!delta.only_over(params)) continue;
    if (syntactic_sign(delta) != Sign::Positive) continue;
    out.emplace_back(r, delta);
  }
  return out;
}

std::vector<Norm> guess_norms(const Cfg &cfg, const LoopNest &nest,
                              const std::vector<LoopPath> &paths,
                              std::vector<Assumption> &assumptions) {
  std::vector<Norm> norms;
  auto add = [&](Norm n) {
    for (auto &o : norms)
      if (o == n) return;
    n.id = (int)norms.size();
    norms.push_back(std::move(n));
  };

  for (auto &p : paths) {
    ContractedPath rel = contract(cfg, nest, p, /*havoc_inner=*/false);
    for (auto &[r, delta] : find_local_rfs(rel, cfg)) {
      Norm n;
      n.base = r + delta;
      add(std::move(n));
    }
    // Halving update v := v/c with the guard forcing v >= 2 supports
    // the logarithmic norm log(v).
    for (auto &[v, u] : rel.update) {
      if (u.kind != Update::Kind::Div || u.factor < 2) continue;
      if (u.src != v || is_havoc_var(v)) continue;
      LinExpr ge2 = LinExpr::variable(v);
      ge2.constant -= 2;
      if (!entails(rel.guard, {ge2})) continue;
      Norm n;
      n.kind = Norm::Kind::Log;
      n.log_var = v;
      bool fresh = true;
      for (auto &o : norms)
        if (o == n) fresh = false;
      if (fresh)
        assumptions.push_back(
            {v + " > 0 assumed (counter divided by a constant)", 0});
      add(std::move(n));
    }
  }
  return norms;
}

} // namespace lb
