#include "loopbound/boundexpr.hpp"

#include <algorithm>
#include <functional>

namespace lb {

struct BoundExpr::Node {
  Kind kind = Kind::Sym;
  LinExpr sym;        // Sym
  long long divisor = 1; // FloorDiv
  std::vector<BoundExpr> args;
};

BoundExpr BoundExpr::constant(long long c) { return sym(LinExpr(c)); }

BoundExpr BoundExpr::sym(LinExpr e) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sym;
  n->sym = std::move(e);
  return BoundExpr(std::move(n));
}

BoundExpr::Kind BoundExpr::kind() const { return node_->kind; }

bool BoundExpr::is_constant() const {
  return node_->kind == Kind::Sym && node_->sym.is_constant();
}

long long BoundExpr::constant_value() const { return node_->sym.constant; }

std::optional<LinExpr> BoundExpr::as_linear() const {
  if (node_->kind != Kind::Sym) return std::nullopt;
  return node_->sym;
}

BoundExpr BoundExpr::max0(BoundExpr e) {
  if (e.is_constant())
    return constant(std::max(e.constant_value(), 0LL));
  if (e.node_->kind == Kind::Sym &&
      sign_nonneg(syntactic_sign(e.node_->sym)))
    return e;
  if (e.node_->kind == Kind::Max0) return e;
  auto n = std::make_shared<Node>();
  n->kind = Kind::Max0;
  n->args.push_back(std::move(e));
  return BoundExpr(std::move(n));
}

BoundExpr BoundExpr::floordiv(BoundExpr e, long long k) {
  if (k <= 1) return e;
  if (e.is_constant()) {
    long long v = e.constant_value();
    return constant(v >= 0 ? v / k : -((-v + k - 1) / k));
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::FloorDiv;
  n->divisor = k;
  n->args.push_back(std::move(e));
  return BoundExpr(std::move(n));
}

BoundExpr BoundExpr::log2ceil(BoundExpr e) {
  if (e.is_constant()) {
    long long v = std::max(e.constant_value(), 1LL);
    long long r = 0;
    while ((1LL << r) < v) ++r;
    return constant(r);
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Log2Ceil;
  n->args.push_back(std::move(e));
  return BoundExpr(std::move(n));
}

BoundExpr BoundExpr::sum(std::vector<BoundExpr> parts) {
  LinExpr lin;
  std::vector<BoundExpr> rest;
  std::function<void(BoundExpr &)> take = [&](BoundExpr &p) {
    if (p.node_->kind == Kind::Sum) {
      for (auto a : p.node_->args) take(a);
    } else if (p.node_->kind == Kind::Sym) {
      lin += p.node_->sym;
    } else {
      rest.push_back(std::move(p));
    }
  };
  for (auto &p : parts) take(p);
  if (!lin.is_zero() || rest.empty())
    rest.insert(rest.begin(), sym(lin));
  if (rest.size() == 1) return rest[0];
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sum;
  n->args = std::move(rest);
  return BoundExpr(std::move(n));
}

BoundExpr BoundExpr::product(std::vector<BoundExpr> parts) {
  long long c = 1;
  std::vector<BoundExpr> rest;
  std::function<void(BoundExpr &)> take = [&](BoundExpr &p) {
    if (p.node_->kind == Kind::Product) {
      for (auto a : p.node_->args) take(a);
    } else if (p.is_constant()) {
      c *= p.constant_value();
    } else {
      rest.push_back(std::move(p));
    }
  };
  for (auto &p : parts) take(p);
  if (c == 0) return constant(0);
  if (rest.empty()) return constant(c);
  // Fold a constant factor into a single linear factor.
  if (c != 1 && rest.size() == 1 && rest[0].node_->kind == Kind::Sym)
    return sym(rest[0].node_->sym.scaled(c));
  if (c != 1) rest.insert(rest.begin(), constant(c));
  if (rest.size() == 1) return rest[0];
  auto n = std::make_shared<Node>();
  n->kind = Kind::Product;
  n->args = std::move(rest);
  return BoundExpr(std::move(n));
}

long long BoundExpr::eval(const std::map<Var, long long> &params) const {
  switch (node_->kind) {
  case Kind::Sym:
    return node_->sym.eval(params);
  case Kind::Max0:
    return std::max(node_->args[0].eval(params), 0LL);
  case Kind::FloorDiv: {
    long long v = node_->args[0].eval(params), k = node_->divisor;
    return v >= 0 ? v / k : -((-v + k - 1) / k);
  }
  case Kind::Log2Ceil: {
    long long v = std::max(node_->args[0].eval(params), 1LL);
    long long r = 0;
    while ((1LL << r) < v) ++r;
    return r;
  }
  case Kind::Sum: {
    long long s = 0;
    for (auto &a : node_->args) s += a.eval(params);
    return s;
  }
  case Kind::Product: {
    long long s = 1;
    for (auto &a : node_->args) s *= a.eval(params);
    return s;
  }
  }
  return 0;
}

std::string BoundExpr::str() const {
  auto paren = [](const BoundExpr &e, bool need) {
    return need ? "(" + e.str() + ")" : e.str();
  };
  switch (node_->kind) {
  case Kind::Sym:
    return node_->sym.str();
  case Kind::Max0:
    return "max(" + node_->args[0].str() + ",0)";
  case Kind::FloorDiv:
    return "floor(" + node_->args[0].str() + "/" +
           std::to_string(node_->divisor) + ")";
  case Kind::Log2Ceil:
    return "log2ceil(" + node_->args[0].str() + ")";
  case Kind::Sum: {
    std::string s;
    for (size_t i = 0; i < node_->args.size(); ++i)
      s += (i ? "+" : "") + node_->args[i].str();
    return s;
  }
  case Kind::Product: {
    std::string s;
    for (size_t i = 0; i < node_->args.size(); ++i) {
      const BoundExpr &a = node_->args[i];
      bool need = a.node_->kind == Kind::Sum ||
                  (a.node_->kind == Kind::Sym &&
                   (a.node_->sym.coeffs.size() > 1 ||
                    (a.node_->sym.constant != 0 && !a.node_->sym.is_constant())));
      s += (i ? "*" : "") + paren(a, need);
    }
    return s;
  }
  }
  return "";
}

std::pair<int, int> BoundExpr::degree() const {
  switch (node_->kind) {
  case Kind::Sym:
    return {node_->sym.coeffs.empty() ? 0 : 1, 0};
  case Kind::Max0:
  case Kind::FloorDiv:
    return node_->args[0].degree();
  case Kind::Log2Ceil: {
    auto d = node_->args[0].degree();
    return {0, (d.first > 0 || d.second > 0) ? 1 : 0};
  }
  case Kind::Sum: {
    std::pair<int, int> best{0, 0};
    for (auto &a : node_->args) best = std::max(best, a.degree());
    return best;
  }
  case Kind::Product: {
    std::pair<int, int> acc{0, 0};
    for (auto &a : node_->args) {
      auto d = a.degree();
      acc.first += d.first;
      acc.second += d.second;
    }
    return acc;
  }
  }
  return {0, 0};
}

bool BoundExpr::operator==(const BoundExpr &o) const {
  if (node_ == o.node_) return true;
  if (node_->kind != o.node_->kind) return false;
  if (node_->kind == Kind::Sym) return node_->sym == o.node_->sym;
  if (node_->divisor != o.node_->divisor) return false;
  if (node_->args.size() != o.node_->args.size()) return false;
  for (size_t i = 0; i < node_->args.size(); ++i)
    if (!(node_->args[i] == o.node_->args[i])) return false;
  return true;
}

std::string asymptotic_class(const BoundExpr &b) {
  auto [d, l] = b.degree();
  if (d == 0) return l > 0 ? "log n" : "1";
  if (d == 1) return l > 0 ? "n log n" : "n";
  if (d == 2) return "n^2";
  if (d == 3) return "n^3";
  return "n^{>3}";
}

} // namespace lb
