#include "loopbound/bounds.hpp"

#include <algorithm>

#include "loopbound/fm.hpp"

namespace lb {

namespace {

const Var kWrapVar = "$w";

std::set<Var> transition_reads(const Transition &t) {
  std::set<Var> r;
  for (auto &g : t.guard)
    for (auto &v : g.expr.vars()) r.insert(v);
  for (auto &[v, u] : t.update) {
    (void)v;
    if (u.kind == Update::Kind::Div)
      r.insert(u.src);
    else
      for (auto &w : u.lin.vars()) r.insert(w);
  }
  return r;
}

} // namespace

bool needs_wrapping(const Cfg &cfg, const LoopNest &nest) {
  if (nest.top.size() != 1) return true;
  int header = nest.loops[nest.top[0]].header;
  std::set<int> visited;
  int loc = cfg.begin;
  while (loc != header) {
    if (!visited.insert(loc).second) return true;
    auto outs = cfg.transitions_from(loc);
    if (outs.size() != 1) return true;
    loc = cfg.transitions[outs[0]].dst;
  }
  return false;
}

Cfg wrap_in_dummy_loop(const Cfg &cfg) {
  Cfg w = cfg;
  w.loc_names[w.begin] = "pre";
  w.loc_names[w.end] = "post";
  int nb = (int)w.loc_names.size();
  w.loc_names.push_back("begin");
  int dh = nb + 1;
  w.loc_names.push_back("lw");
  int ne = dh + 1;
  w.loc_names.push_back("end");

  Transition seed;
  seed.src = nb;
  seed.dst = dh;
  seed.update[kWrapVar] = Update::linear(LinExpr(1));
  Transition enter;
  enter.src = dh;
  enter.dst = w.begin;
  LinExpr wpos = LinExpr::variable(kWrapVar);
  wpos.constant -= 1;
  enter.guard.push_back({wpos});
  Transition back;
  back.src = w.end;
  back.dst = dh;
  back.update[kWrapVar] = Update::linear(wpos); // $w - 1
  Transition leave;
  leave.src = dh;
  leave.dst = ne;
  leave.guard.push_back({-LinExpr::variable(kWrapVar)});

  w.transitions.push_back(std::move(seed));
  w.transitions.push_back(std::move(enter));
  w.transitions.push_back(std::move(back));
  w.transitions.push_back(std::move(leave));
  w.begin = nb;
  w.end = ne;
  for (size_t i = 0; i < w.transitions.size(); ++i)
    w.transitions[i].id = (int)i;
  return w;
}

std::vector<int> entry_chain(const Cfg &cfg, const LoopNest &nest) {
  std::vector<int> chain;
  int header = nest.loops[nest.top[0]].header;
  int loc = cfg.begin;
  while (loc != header) {
    auto outs = cfg.transitions_from(loc);
    chain.push_back(outs[0]);
    loc = cfg.transitions[outs[0]].dst;
  }
  return chain;
}

std::set<Var> maybe_uninit_reads(const Cfg &cfg) {
  std::set<Var> all = cfg.variables();
  std::set<Var> params(cfg.params.begin(), cfg.params.end());
  // Must-assigned variables per location (greatest fixpoint).
  std::vector<std::set<Var>> in(cfg.num_locs(), all);
  in[cfg.begin].clear();
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto &t : cfg.transitions) {
      std::set<Var> out = in[t.src];
      for (auto &[v, u] : t.update) {
        (void)u;
        out.insert(v);
      }
      std::set<Var> meet;
      std::set_intersection(in[t.dst].begin(), in[t.dst].end(), out.begin(),
                            out.end(), std::inserter(meet, meet.begin()));
      if (meet != in[t.dst]) {
        in[t.dst] = std::move(meet);
        changed = true;
      }
    }
  }
  std::set<Var> bad;
  for (auto &t : cfg.transitions)
    for (auto &v : transition_reads(t))
      if (!params.count(v) && !in[t.src].count(v)) bad.insert(v);
  return bad;
}

std::optional<LinExpr> initial_linear(const Cfg &cfg, const LoopNest &nest,
                                      const LinExpr &e,
                                      const std::set<Var> &uninit) {
  LinExpr cur = e;
  auto chain = entry_chain(cfg, nest);
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    auto next = subst_linear(cur, cfg.transitions[*it].update);
    if (!next) return std::nullopt;
    cur = std::move(*next);
  }
  LinExpr r(cur.constant);
  for (auto &[v, c] : cur.coeffs) {
    if (cfg.is_param(v)) {
      r.add_term(v, c);
      continue;
    }
    // Unread-before-assignment variables are unobservable at entry and
    // default to 0; anything else makes the initial value unknown.
    if (uninit.count(v)) return std::nullopt;
  }
  return r;
}

std::map<int, BoundExpr> initial_values(const Cfg &cfg, const LoopNest &nest,
                                        const std::vector<Norm> &norms,
                                        const std::set<Var> &uninit) {
  std::map<int, BoundExpr> iv;
  for (auto &n : norms) {
    LinExpr base = n.kind == Norm::Kind::Log ? LinExpr::variable(n.log_var)
                                             : n.base;
    auto e0 = initial_linear(cfg, nest, base, uninit);
    if (!e0) continue;
    BoundExpr b = BoundExpr::sym(std::move(*e0));
    iv.emplace(n.id, n.kind == Norm::Kind::Log ? BoundExpr::log2ceil(b)
                                               : BoundExpr::max0(b));
  }
  return iv;
}

BoundExpr pos_part(const Delta &d) {
  std::vector<BoundExpr> parts;
  // The bare linear part is paid in as-is: where it is negative the
  // system can only lose, so the raw value still over-approximates.
  if (!d.lin.is_zero() && !sign_nonpos(syntactic_sign(d.lin)))
    parts.push_back(BoundExpr::sym(d.lin));
  for (auto &m : d.max_terms)
    parts.push_back(BoundExpr::max0(BoundExpr::sym(m)));
  if (parts.empty()) return BoundExpr::constant(0);
  return BoundExpr::sum(std::move(parts));
}

namespace {

bool multiset_subset(const std::vector<LinExpr> &a,
                     const std::vector<LinExpr> &b) {
  std::vector<LinExpr> rest = b;
  for (auto &x : a) {
    auto it = std::find(rest.begin(), rest.end(), x);
    if (it == rest.end()) return false;
    rest.erase(it);
  }
  return true;
}

// d1 <= d2 in every state (parameters non-negative).
bool delta_leq(const Delta &d1, const Delta &d2, const std::set<Var> &params) {
  if (!multiset_subset(d1.max_terms, d2.max_terms)) return false;
  return sign_nonneg(sign_under(d2.lin - d1.lin, {}, params));
}

} // namespace

void merge_transitions(TransitionSystem &ts, LexRanking &lex,
                       const Cfg &cfg) {
  std::set<Var> params(cfg.params.begin(), cfg.params.end());
  auto find_trans = [&](int id) -> AbstractTransition & {
    for (auto &t : ts.transitions)
      if (t.id == id) return t;
    throw std::logic_error("transition lookup");
  };

  bool again = true;
  while (again) {
    again = false;
    for (size_t i = 0; i < lex.comps.size() && !again; ++i) {
      for (size_t j = i + 1; j < lex.comps.size() && !again; ++j) {
        if (lex.comps[i].norm != lex.comps[j].norm) continue;
        if (!(lex.comps[i].delta == lex.comps[j].delta)) continue;
        AbstractTransition &t1 = find_trans(lex.comps[i].trans);
        AbstractTransition &t2 = find_trans(lex.comps[j].trans);
        std::map<int, Delta> merged;
        bool ok = true;
        for (auto &[nid, d1] : t1.deltas) {
          const Delta &d2 = t2.deltas.at(nid);
          if (delta_leq(d1, d2, params))
            merged.emplace(nid, d2);
          else if (delta_leq(d2, d1, params))
            merged.emplace(nid, d1);
          else {
            ok = false; // incomparable on this norm; keep separate
            break;
          }
        }
        if (!ok) continue;
        t1.deltas = std::move(merged);
        t1.name += "+" + t2.name;
        t1.paths.insert(t1.paths.end(), t2.paths.begin(), t2.paths.end());
        std::sort(t1.paths.begin(), t1.paths.end());
        int gone = t2.id;
        ts.transitions.erase(
            std::find_if(ts.transitions.begin(), ts.transitions.end(),
                         [&](const AbstractTransition &t) {
                           return t.id == gone;
                         }));
        lex.comps.erase(lex.comps.begin() + (long)j);
        again = true;
      }
    }
  }
}

std::map<int, std::optional<BoundExpr>>
compute_bounds(const TransitionSystem &ts, const LexRanking &lex,
               const std::map<int, BoundExpr> &iv) {
  std::map<int, std::optional<BoundExpr>> memo;
  std::set<int> in_progress;

  std::function<std::optional<BoundExpr>(int)> bd = [&](int tid)
      -> std::optional<BoundExpr> {
    if (auto it = memo.find(tid); it != memo.end()) return it->second;
    if (!in_progress.insert(tid).second) return std::nullopt;
    const LexComponent *comp = nullptr;
    for (auto &c : lex.comps)
      if (c.trans == tid) comp = &c;
    std::optional<BoundExpr> result;
    if (comp) {
      auto it = iv.find(comp->norm);
      if (it != iv.end()) {
        std::vector<BoundExpr> parts{it->second};
        bool ok = true;
        for (auto &t : ts.transitions) {
          if (t.id == tid) continue;
          BoundExpr p = pos_part(t.deltas.at(comp->norm));
          if (p.is_constant() && p.constant_value() == 0) continue;
          auto b = bd(t.id);
          if (!b) {
            ok = false;
            break;
          }
          parts.push_back(BoundExpr::product({*b, p}));
        }
        if (ok)
          result = BoundExpr::floordiv(BoundExpr::sum(std::move(parts)),
                                       comp->delta.dec_magnitude());
      }
    }
    in_progress.erase(tid);
    memo[tid] = result;
    return result;
  };

  for (auto &t : ts.transitions) bd(t.id);
  return memo;
}

std::optional<BoundExpr> standalone_bound(const TransitionSystem &ts,
                                          const std::map<int, BoundExpr> &iv,
                                          int trans) {
  std::map<int, BoundExpr> memo;
  std::set<int> stack;

  std::function<std::optional<BoundExpr>(int)> sb = [&](int tid)
      -> std::optional<BoundExpr> {
    if (auto it = memo.find(tid); it != memo.end()) return it->second;
    if (!stack.insert(tid).second) return std::nullopt;
    const AbstractTransition *tr = nullptr;
    for (auto &t : ts.transitions)
      if (t.id == tid) tr = &t;
    std::optional<BoundExpr> result;
    for (auto &n : ts.norms) {
      const Delta &d = tr->deltas.at(n.id);
      if (!d.cert_negative()) continue;
      auto it = iv.find(n.id);
      if (it == iv.end()) continue;
      std::vector<BoundExpr> parts{it->second};
      bool ok = true;
      for (auto &t : ts.transitions) {
        if (t.id == tid) continue;
        BoundExpr p = pos_part(t.deltas.at(n.id));
        if (p.is_constant() && p.constant_value() == 0) continue;
        auto b = sb(t.id);
        if (!b) {
          ok = false;
          break;
        }
        parts.push_back(BoundExpr::product({*b, p}));
      }
      if (!ok) continue;
      result = BoundExpr::floordiv(BoundExpr::sum(std::move(parts)),
                                   d.dec_magnitude());
      break;
    }
    stack.erase(tid);
    if (result) memo.emplace(tid, *result); // failures may be stack-induced
    return result;
  };

  return sb(trans);
}

std::map<int, std::optional<BoundExpr>>
loop_bounds(const TransitionSystem &ts, const LoopNest &nest,
            const std::map<int, std::optional<BoundExpr>> &per_trans) {
  std::map<int, std::optional<BoundExpr>> out;
  for (auto &l : nest.loops) out[l.header] = BoundExpr::constant(0);
  for (auto &[header, acc] : out) {
    std::vector<BoundExpr> parts;
    bool ok = true;
    for (auto &t : ts.transitions) {
      bool touches = false;
      for (int p : t.paths)
        if (nest.loops[ts.paths[p].loop].header == header) touches = true;
      if (!touches) continue;
      auto it = per_trans.find(t.id);
      if (it == per_trans.end() || !it->second) {
        ok = false;
        break;
      }
      parts.push_back(*it->second);
    }
    if (ok)
      acc = BoundExpr::sum(std::move(parts));
    else
      acc = std::nullopt;
  }
  return out;
}

std::optional<BoundExpr>
total_bound(const std::map<int, std::optional<BoundExpr>> &per_trans) {
  std::vector<BoundExpr> parts;
  for (auto &[id, b] : per_trans) {
    (void)id;
    if (!b) return std::nullopt;
    parts.push_back(*b);
  }
  return BoundExpr::sum(std::move(parts));
}

} // namespace lb
