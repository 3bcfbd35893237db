#include "loopbound/cfg.hpp"

#include <sstream>

namespace lb {

std::string Update::str() const {
  if (kind == Kind::Linear) return lin.str();
  return src + "/" + std::to_string(factor);
}

std::vector<int> Cfg::successors(int loc) const {
  std::vector<int> r;
  for (auto &t : transitions)
    if (t.src == loc) r.push_back(t.dst);
  return r;
}

std::vector<int> Cfg::transitions_from(int loc) const {
  std::vector<int> r;
  for (auto &t : transitions)
    if (t.src == loc) r.push_back(t.id);
  return r;
}

std::vector<int> Cfg::transitions_into(int loc) const {
  std::vector<int> r;
  for (auto &t : transitions)
    if (t.dst == loc) r.push_back(t.id);
  return r;
}

std::set<Var> Cfg::variables() const {
  std::set<Var> vs(params.begin(), params.end());
  for (auto &t : transitions) {
    for (auto &c : t.guard)
      for (auto &v : c.expr.vars()) vs.insert(v);
    for (auto &[v, u] : t.update) {
      vs.insert(v);
      if (u.kind == Update::Kind::Linear)
        for (auto &w : u.lin.vars()) vs.insert(w);
      else
        vs.insert(u.src);
    }
  }
  return vs;
}

std::string Cfg::dump() const {
  std::ostringstream os;
  for (auto &t : transitions) {
    os << loc_name(t.src) << " -> " << loc_name(t.dst);
    os << " [guard:";
    if (t.guard.empty()) os << " -";
    for (size_t i = 0; i < t.guard.size(); ++i)
      os << (i ? ", " : " ") << t.guard[i].str();
    os << "] [update:";
    if (t.update.empty()) os << " -";
    bool first = true;
    for (auto &[v, u] : t.update) {
      os << (first ? " " : ", ") << v << " := " << u.str();
      first = false;
    }
    os << "]\n";
  }
  return os.str();
}

std::vector<Constraint> normalize_comparison(const Comparison &cmp) {
  std::vector<Constraint> r;
  switch (cmp.op) {
  case Comparison::Op::Lt: { // lhs < rhs  =>  rhs-lhs-1 >= 0
    LinExpr e = cmp.rhs - cmp.lhs;
    e.constant -= 1;
    r.push_back({e});
    break;
  }
  case Comparison::Op::Le:
    r.push_back({cmp.rhs - cmp.lhs});
    break;
  case Comparison::Op::Gt: {
    LinExpr e = cmp.lhs - cmp.rhs;
    e.constant -= 1;
    r.push_back({e});
    break;
  }
  case Comparison::Op::Ge:
    r.push_back({cmp.lhs - cmp.rhs});
    break;
  case Comparison::Op::Eq:
    r.push_back({cmp.lhs - cmp.rhs});
    r.push_back({cmp.rhs - cmp.lhs});
    break;
  case Comparison::Op::Ne:
    throw CfgError("'!=' is only supported in loop conditions");
  }
  return r;
}

std::optional<LinExpr> subst_linear(const LinExpr &e, const UpdateMap &u) {
  LinExpr r;
  r.constant = e.constant;
  for (auto &[v, c] : e.coeffs) {
    auto it = u.find(v);
    if (it == u.end()) {
      r.add_term(v, c);
    } else if (it->second.kind == Update::Kind::Linear) {
      r += it->second.lin.scaled(c);
    } else {
      return std::nullopt;
    }
  }
  return r;
}

namespace {

// Negation of one comparison as a disjunction of single constraints.
std::vector<Constraint> negate_comparison(const Comparison &cmp) {
  auto strict = [](LinExpr e) {
    e.constant -= 1;
    return Constraint{e};
  };
  switch (cmp.op) {
  case Comparison::Op::Lt:
    return {{cmp.lhs - cmp.rhs}}; // lhs >= rhs
  case Comparison::Op::Le:
    return {strict(cmp.lhs - cmp.rhs)}; // lhs > rhs
  case Comparison::Op::Gt:
    return {{cmp.rhs - cmp.lhs}};
  case Comparison::Op::Ge:
    return {strict(cmp.rhs - cmp.lhs)};
  case Comparison::Op::Eq:
    return {strict(cmp.lhs - cmp.rhs), strict(cmp.rhs - cmp.lhs)};
  case Comparison::Op::Ne:
    throw CfgError("'!=' is only supported in loop conditions");
  }
  return {};
}

class Builder {
public:
  explicit Builder(const Ast &ast) : ast_(ast) {
    cfg_.name = ast.name;
    cfg_.params = ast.params;
    begin_ = new_loc();
    end_ = new_loc();
    cur_ = begin_;
  }

  Cfg run() {
    lower(ast_.body);
    flush_to(end_);
    cfg_.begin = begin_;
    cfg_.end = end_;
    name_locations();
    int id = 0;
    for (auto &t : cfg_.transitions) t.id = id++;
    return std::move(cfg_);
  }

private:
  struct Pending {
    std::vector<Constraint> guard;
    UpdateMap update;
  };

  int new_loc() {
    cfg_.loc_names.push_back("");
    return (int)cfg_.loc_names.size() - 1;
  }

  void emit(int src, int dst, Pending p) {
    Transition t;
    t.src = src;
    t.dst = dst;
    t.guard = std::move(p.guard);
    t.update = std::move(p.update);
    cfg_.transitions.push_back(std::move(t));
  }

  void flush_to(int target) {
    emit(cur_, target, std::move(pending_));
    pending_ = Pending{};
    cur_ = target;
  }

  // Composes one assignment into the pending update map.
  void apply_assign(const Stmt &s) {
    if (s.rhs.kind == AssignRhs::Kind::Linear) {
      auto lin = subst_linear(s.rhs.lin, pending_.update);
      if (!lin) {
        // Reads a division result: materialize a location first.
        int l = new_loc();
        flush_to(l);
        lin = s.rhs.lin;
      }
      pending_.update[s.lhs] = Update::linear(*lin);
      return;
    }
    // x := v / c
    auto it = pending_.update.find(s.rhs.src);
    if (it == pending_.update.end()) {
      pending_.update[s.lhs] = Update::div(s.rhs.src, s.rhs.factor);
      return;
    }
    const Update &prev = it->second;
    if (prev.kind == Update::Kind::Div) {
      pending_.update[s.lhs] = Update::div(prev.src, prev.factor * s.rhs.factor);
      return;
    }
    if (prev.lin.coeffs.size() == 1 && prev.lin.constant == 0 &&
        prev.lin.coeffs.begin()->second == 1) {
      pending_.update[s.lhs] =
          Update::div(prev.lin.coeffs.begin()->first, s.rhs.factor);
      return;
    }
    int l = new_loc();
    flush_to(l);
    pending_.update[s.lhs] = Update::div(s.rhs.src, s.rhs.factor);
  }

  // Condition constraints evaluated after the pending updates,
  // re-expressed in the state at the source location.
  std::vector<Constraint> cond_constraints(const Cond &cond) {
    std::vector<Constraint> r;
    for (auto &a : cond.atoms) {
      if (a.nondet) continue;
      for (auto &c : normalize_comparison(a.cmp)) {
        auto e = subst_linear(c.expr, pending_.update);
        if (!e) {
          int l = new_loc();
          flush_to(l);
          e = c.expr;
        }
        r.push_back({*e});
      }
    }
    return r;
  }

  // Negation of a conjunction: one disjunct per negated atom; a nondet
  // atom makes the negation unconditional (empty disjunct list means
  // "one guard-free edge" for the caller).
  std::vector<std::vector<Constraint>> negation_disjuncts(const Cond &cond) {
    if (cond.has_nondet()) return {};
    std::vector<std::vector<Constraint>> r;
    for (auto &a : cond.atoms)
      for (auto &c : negate_comparison(a.cmp)) {
        auto e = subst_linear(c.expr, pending_.update);
        if (!e) {
          int l = new_loc();
          flush_to(l);
          e = c.expr;
        }
        r.push_back({Constraint{*e}});
      }
    return r;
  }

  void lower(const std::vector<Stmt> &stmts) {
    for (auto &s : stmts) lower_stmt(s);
  }

  void lower_stmt(const Stmt &s) {
    switch (s.kind) {
    case Stmt::Kind::Skip:
      return;
    case Stmt::Kind::Assign:
      apply_assign(s);
      return;
    case Stmt::Kind::While:
      lower_while(s);
      return;
    case Stmt::Kind::If:
      lower_if(s);
      return;
    }
  }

  void lower_while(const Stmt &s) {
    int header = new_loc();
    flush_to(header);
    headers_in_order_.push_back(header);

    // Body entry: guard from the positive condition.
    pending_.guard = cond_constraints(s.cond);
    lower(s.body);
    flush_to(header); // back edge
    // Exit: continue accumulating from the header.
    auto disjuncts = negation_disjuncts(s.cond);
    if (disjuncts.size() <= 1) {
      pending_ = Pending{};
      if (!disjuncts.empty()) pending_.guard = disjuncts[0];
      cur_ = header;
    } else {
      int exit = new_loc();
      for (auto &d : disjuncts) {
        Pending p;
        p.guard = d;
        emit(header, exit, std::move(p));
      }
      pending_ = Pending{};
      cur_ = exit;
    }
  }

  void lower_if(const Stmt &s) {
    int fork_loc = cur_;
    Pending base = pending_;
    auto then_guard = cond_constraints(s.cond);
    // cond_constraints may have flushed; refresh the base.
    if (cur_ != fork_loc) {
      fork_loc = cur_;
      base = pending_;
    }
    int join = new_loc();

    // then branch
    pending_ = base;
    for (auto &c : then_guard) pending_.guard.push_back(c);
    lower(s.body);
    flush_to(join);

    // else branch(es)
    cur_ = fork_loc;
    pending_ = base;
    auto disjuncts = negation_disjuncts(s.cond);
    if (disjuncts.empty()) disjuncts.push_back({});
    if (disjuncts.size() == 1 || s.else_body.empty()) {
      for (auto &d : disjuncts) {
        cur_ = fork_loc;
        pending_ = base;
        for (auto &c : d) pending_.guard.push_back(c);
        lower(s.else_body);
        flush_to(join);
      }
    } else {
      int else_entry = new_loc();
      for (auto &d : disjuncts) {
        Pending p = base;
        for (auto &c : d) p.guard.push_back(c);
        emit(fork_loc, else_entry, std::move(p));
      }
      cur_ = else_entry;
      pending_ = Pending{};
      lower(s.else_body);
      flush_to(join);
    }
    cur_ = join;
    pending_ = Pending{};
  }

  void name_locations() {
    cfg_.loc_names[begin_] = "begin";
    cfg_.loc_names[end_] = "end";
    int n = 1;
    for (size_t i = 0; i < cfg_.loc_names.size(); ++i)
      if (cfg_.loc_names[i].empty())
        cfg_.loc_names[i] = "l" + std::to_string(n++);
  }

  const Ast &ast_;
  Cfg cfg_;
  int begin_, end_, cur_;
  Pending pending_;
  std::vector<int> headers_in_order_;
};

} // namespace

Cfg build_cfg(const Ast &ast) { return Builder(ast).run(); }

} // namespace lb
