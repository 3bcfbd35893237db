#include "loopbound/paths.hpp"

#include <functional>

namespace lb {

std::set<Var> modified_in_loop(const Cfg &cfg, const LoopNest &nest, int loop) {
  std::set<Var> mod;
  const Loop &l = nest.loops[loop];
  for (auto &t : cfg.transitions)
    if (l.body.count(t.src) && l.body.count(t.dst))
      for (auto &[v, u] : t.update) {
        (void)u;
        mod.insert(v);
      }
  return mod;
}

std::vector<LoopPath> enumerate_paths(const Cfg &cfg, const LoopNest &nest,
                                      size_t cap) {
  std::vector<LoopPath> out;
  for (size_t li = 0; li < nest.loops.size(); ++li) {
    const Loop &l = nest.loops[li];

    // Back edges of strictly nested loops are off limits: nested loops
    // are crossed, not unwound.
    std::set<int> forbidden;
    for (size_t lj = 0; lj < nest.loops.size(); ++lj) {
      if (lj == li) continue;
      if (!l.body.count(nest.loops[lj].header)) continue;
      if (nest.loops[lj].body.size() >= l.body.size()) continue;
      for (int b : nest.loops[lj].back_edges) forbidden.insert(b);
    }
    std::set<int> own_back(l.back_edges.begin(), l.back_edges.end());

    std::vector<int> cur;
    std::set<int> visited; // locations on the current path
    std::function<void(int)> dfs = [&](int loc) {
      for (int tid : cfg.transitions_from(loc)) {
        const Transition &t = cfg.transitions[tid];
        if (forbidden.count(tid)) continue;
        if (!l.body.count(t.dst)) continue;
        if (own_back.count(tid)) {
          if (t.dst != l.header) continue;
          cur.push_back(tid);
          LoopPath p;
          p.loop = (int)li;
          p.trans = cur;
          out.push_back(std::move(p));
          if (out.size() > cap)
            throw PathError("loop path explosion: more than " +
                            std::to_string(cap) + " paths");
          cur.pop_back();
          continue;
        }
        if (t.dst == l.header || visited.count(t.dst)) continue;
        cur.push_back(tid);
        visited.insert(t.dst);
        dfs(t.dst);
        visited.erase(t.dst);
        cur.pop_back();
      }
    };
    dfs(l.header);
  }
  return out;
}

namespace {

class Contractor {
public:
  Contractor(const Cfg &cfg, const LoopNest &nest, const LoopPath &path,
             bool havoc_inner)
      : cfg_(cfg), nest_(nest), path_(path), havoc_inner_(havoc_inner) {}

  ContractedPath run() {
    for (size_t i = 0; i < path_.trans.size(); ++i) step(i);
    out_.update = std::move(sigma_);
    return std::move(out_);
  }

  std::vector<PrefixState> run_prefixes() {
    std::vector<PrefixState> states;
    for (size_t i = 0; i < path_.trans.size(); ++i) {
      before_step(i);
      states.push_back({out_.guard, sigma_});
      const Transition &t = cfg_.transitions[path_.trans[i]];
      for (auto &c : t.guard) out_.guard.push_back({subst(c.expr)});
      compose(t.update);
    }
    return states;
  }

private:
  // Arriving back at an inner header means that loop may have run.
  void before_step(size_t i) {
    if (!havoc_inner_ || i == 0) return;
    const Transition &t = cfg_.transitions[path_.trans[i]];
    const Loop &l = nest_.loops[path_.loop];
    auto it = nest_.header_to_loop.find(t.src);
    if (it != nest_.header_to_loop.end() && it->second != path_.loop &&
        l.body.count(t.src))
      havoc_loop(it->second);
  }

  void step(size_t i) {
    before_step(i);
    const Transition &t = cfg_.transitions[path_.trans[i]];
    for (auto &c : t.guard) out_.guard.push_back({subst(c.expr)});
    compose(t.update);
  }

  Var fresh() {
    Var v = "%h" + std::to_string(fresh_id_++);
    out_.havoc.insert(v);
    return v;
  }

  void havoc_loop(int inner) {
    for (auto &v : modified_in_loop(cfg_, nest_, inner))
      sigma_[v] = Update::linear(LinExpr::variable(fresh()));
  }

  // Substitute sigma into e; variables currently bound to a division
  // result get havocked first (weakening, but keeps guards linear).
  LinExpr subst(const LinExpr &e) {
    for (auto &[v, c] : e.coeffs) {
      (void)c;
      auto it = sigma_.find(v);
      if (it != sigma_.end() && it->second.kind == Update::Kind::Div)
        it->second = Update::linear(LinExpr::variable(fresh()));
    }
    auto r = subst_linear(e, sigma_);
    return *r;
  }

  void compose(const UpdateMap &u) {
    UpdateMap next = sigma_;
    for (auto &[v, upd] : u) {
      if (upd.kind == Update::Kind::Linear) {
        next[v] = Update::linear(subst(upd.lin));
        continue;
      }
      auto it = sigma_.find(upd.src);
      if (it == sigma_.end()) {
        next[v] = upd;
      } else if (it->second.kind == Update::Kind::Div) {
        next[v] = Update::div(it->second.src, it->second.factor * upd.factor);
      } else if (it->second.lin.constant == 0 &&
                 it->second.lin.coeffs.size() == 1 &&
                 it->second.lin.coeffs.begin()->second == 1) {
        next[v] =
            Update::div(it->second.lin.coeffs.begin()->first, upd.factor);
      } else {
        next[v] = Update::linear(LinExpr::variable(fresh()));
      }
    }
    sigma_ = std::move(next);
  }

  const Cfg &cfg_;
  const LoopNest &nest_;
  const LoopPath &path_;
  bool havoc_inner_;
  UpdateMap sigma_;
  ContractedPath out_;
  int fresh_id_ = 0;
};

} // namespace

ContractedPath contract(const Cfg &cfg, const LoopNest &nest,
                        const LoopPath &path, bool havoc_inner) {
  return Contractor(cfg, nest, path, havoc_inner).run();
}

std::vector<PrefixState> contract_prefixes(const Cfg &cfg, const LoopNest &nest,
                                           const LoopPath &path) {
  return Contractor(cfg, nest, path, true).run_prefixes();
}

} // namespace lb
