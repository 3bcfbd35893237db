#include "loopbound/cfa.hpp"

#include <algorithm>
#include <sstream>

namespace lb {

Delta Delta::from(const SymConst &c) {
  Delta d;
  if (c.max0)
    d.max_terms.push_back(c.value);
  else
    d.lin = c.value;
  return d;
}

long long Delta::eval(const std::map<Var, long long> &val) const {
  long long r = lin.eval(val);
  for (auto &m : max_terms) r += std::max(m.eval(val), 0LL);
  return r;
}

Delta &Delta::operator+=(const Delta &o) {
  lin += o.lin;
  max_terms.insert(max_terms.end(), o.max_terms.begin(), o.max_terms.end());
  std::sort(max_terms.begin(), max_terms.end());
  return *this;
}

std::string Delta::str() const {
  std::string s;
  if (!lin.is_zero() || max_terms.empty()) s = lin.str();
  for (auto &m : max_terms) {
    if (!s.empty()) s += "+";
    s += "max(" + m.str() + ",0)";
  }
  return s;
}

std::vector<LoopPath> order_paths(const Cfg &cfg, const LoopNest &nest,
                                  std::vector<LoopPath> paths) {
  auto guard_count = [&](const LoopPath &p) {
    size_t n = 0;
    for (int t : p.trans) n += cfg.transitions[t].guard.size();
    return n;
  };
  std::stable_sort(paths.begin(), paths.end(),
                   [&](const LoopPath &a, const LoopPath &b) {
                     int ha = nest.loops[a.loop].header;
                     int hb = nest.loops[b.loop].header;
                     if (ha != hb) return ha < hb;
                     size_t ga = guard_count(a), gb = guard_count(b);
                     if (ga != gb) return ga < gb;
                     return a.trans < b.trans;
                   });
  return paths;
}

TransitionSystem build_ts(const LossyVass &vass, const Cfg &cfg,
                          const LoopNest &nest, std::vector<LoopPath> paths,
                          size_t merge_threshold) {
  TransitionSystem ts;
  ts.norms = vass.norms;
  ts.paths = order_paths(cfg, nest, std::move(paths));

  auto path_deltas = [&](const LoopPath &p) {
    std::map<int, Delta> ds;
    for (auto &n : vass.norms) ds[n.id] = Delta{};
    for (int t : p.trans)
      for (auto &[nid, sc] : vass.edges[t]) ds[nid] += Delta::from(sc);
    return ds;
  };

  // Count paths per loop to decide threshold merging per loop.
  std::map<int, size_t> per_loop;
  for (auto &p : ts.paths) ++per_loop[p.loop];

  std::map<std::pair<int, std::vector<Delta>>, int> seen; // (loop, deltas)
  for (size_t i = 0; i < ts.paths.size(); ++i) {
    const LoopPath &p = ts.paths[i];
    auto ds = path_deltas(p);
    if (per_loop[p.loop] > merge_threshold) {
      std::vector<Delta> key;
      for (auto &[nid, d] : ds) key.push_back(d);
      auto it = seen.find({p.loop, key});
      if (it != seen.end()) {
        ts.transitions[it->second].paths.push_back((int)i);
        ts.merged_by_threshold = true;
        continue;
      }
      seen.emplace(std::make_pair(p.loop, std::move(key)),
                   (int)ts.transitions.size());
    }
    AbstractTransition t;
    t.id = (int)ts.transitions.size();
    t.name = "\xcf\x81" + std::to_string(t.id + 1); // ρN
    t.header = nest.loops[p.loop].header;
    t.deltas = std::move(ds);
    t.paths.push_back((int)i);
    ts.transitions.push_back(std::move(t));
  }
  return ts;
}

void prune_norms(LossyVass &vass, TransitionSystem &ts) {
  std::map<int, int> keep; // old id -> new id
  for (auto &n : vass.norms) {
    for (auto &t : ts.transitions) {
      if (t.deltas.at(n.id).cert_negative()) {
        int nid = (int)keep.size();
        keep.emplace(n.id, nid);
        break;
      }
    }
  }
  auto rebuild_norms = [&](std::vector<Norm> &ns) {
    std::vector<Norm> out;
    for (auto &n : ns) {
      auto it = keep.find(n.id);
      if (it == keep.end()) continue;
      Norm k = n;
      k.id = it->second;
      out.push_back(std::move(k));
    }
    ns = std::move(out);
  };
  rebuild_norms(vass.norms);
  rebuild_norms(ts.norms);
  for (auto &e : vass.edges) {
    std::map<int, SymConst> out;
    for (auto &[nid, sc] : e)
      if (auto it = keep.find(nid); it != keep.end())
        out.emplace(it->second, sc);
    e = std::move(out);
  }
  for (auto &t : ts.transitions) {
    std::map<int, Delta> out;
    for (auto &[nid, d] : t.deltas)
      if (auto it = keep.find(nid); it != keep.end())
        out.emplace(it->second, d);
    t.deltas = std::move(out);
  }
}

std::string TransitionSystem::dump(const Cfg &cfg) const {
  std::ostringstream os;
  for (auto &t : transitions) {
    os << "t" << (t.id + 1) << ":";
    bool first = true;
    for (auto &n : norms) {
      const Delta &d = t.deltas.at(n.id);
      os << (first ? " " : "; ");
      first = false;
      std::string x = n.str();
      if (d.is_zero()) {
        os << x << "' <= " << x;
      } else if (d.max_terms.empty() && d.lin.is_constant() &&
                 d.lin.constant < 0) {
        os << x << "' <= " << x << " - " << -d.lin.constant;
      } else {
        os << x << "' <= " << x << " + " << d.str();
      }
    }
    os << "  (header " << cfg.loc_name(t.header) << ", path:";
    for (size_t k = 0; k < t.paths.size(); ++k) {
      if (k) os << " |";
      for (int e : paths[t.paths[k]].trans) {
        const Transition &tr = cfg.transitions[e];
        os << " " << cfg.loc_name(tr.src) << "->" << cfg.loc_name(tr.dst);
      }
    }
    os << ")\n";
  }
  return os.str();
}

} // namespace lb
