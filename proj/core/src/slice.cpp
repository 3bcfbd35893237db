#include "loopbound/slice.hpp"

namespace lb {

std::set<Var> guard_relevant_vars(const Cfg &cfg) {
  std::set<Var> rel;
  for (auto &t : cfg.transitions)
    for (auto &c : t.guard)
      for (auto &v : c.expr.vars()) rel.insert(v);

  bool changed = true;
  while (changed) {
    changed = false;
    for (auto &t : cfg.transitions)
      for (auto &[v, u] : t.update) {
        if (!rel.count(v)) continue;
        if (u.kind == Update::Kind::Linear) {
          for (auto &w : u.lin.vars())
            if (rel.insert(w).second) changed = true;
        } else if (rel.insert(u.src).second) {
          changed = true;
        }
      }
  }
  return rel;
}

Cfg slice(const Cfg &cfg) {
  auto rel = guard_relevant_vars(cfg);
  Cfg out = cfg;
  for (auto &t : out.transitions)
    for (auto it = t.update.begin(); it != t.update.end();)
      it = rel.count(it->first) ? std::next(it) : t.update.erase(it);
  return out;
}

} // namespace lb
