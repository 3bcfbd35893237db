// Control flow graph with contracted straight-line code: locations
// exist only at loop headers, branch/join points, begin and end.
#pragma once

#include <optional>
#include <vector>

#include "loopbound/ast.hpp"

namespace lb {

/// Effect of a transition on one variable.
struct Update {
  enum class Kind { Linear, Div };
  Kind kind = Kind::Linear;
  LinExpr lin;          // Linear
  Var src;              // Div: floor(src / factor)
  long long factor = 1; // Div

  static Update linear(LinExpr e) {
    Update u;
    u.lin = std::move(e);
    return u;
  }
  static Update div(Var v, long long f) {
    Update u;
    u.kind = Kind::Div;
    u.src = std::move(v);
    u.factor = f;
    return u;
  }
  bool operator==(const Update &o) const {
    if (kind != o.kind) return false;
    if (kind == Kind::Linear) return lin == o.lin;
    return src == o.src && factor == o.factor;
  }
  std::string str() const;
};

using UpdateMap = std::map<Var, Update>;

struct Transition {
  int id = -1;
  int src = -1, dst = -1;
  std::vector<Constraint> guard; // conjunction; empty = unconditional
  UpdateMap update;
};

struct Cfg {
  std::string name;
  std::vector<Var> params;
  std::vector<std::string> loc_names;
  int begin = -1, end = -1;
  std::vector<Transition> transitions;

  const std::string &loc_name(int l) const { return loc_names[l]; }
  size_t num_locs() const { return loc_names.size(); }

  std::vector<int> successors(int loc) const;
  std::vector<int> transitions_from(int loc) const; // transition ids
  std::vector<int> transitions_into(int loc) const;

  std::set<Var> variables() const;
  bool is_param(const Var &v) const {
    for (auto &p : params)
      if (p == v) return true;
    return false;
  }

  std::string dump() const;
};

struct CfgError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Cfg build_cfg(const Ast &ast);

/// Normalizes a comparison to constraints e >= 0 (two for ==).
std::vector<Constraint> normalize_comparison(const Comparison &cmp);

/// Substitutes an update map into a linear expression; nullopt when the
/// expression reads the result of a non-linear (division) update.
std::optional<LinExpr> subst_linear(const LinExpr &e, const UpdateMap &u);

} // namespace lb
