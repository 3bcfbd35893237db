// Symbolic bound expressions over program parameters.
#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "loopbound/linexpr.hpp"

namespace lb {

/// Immutable expression tree; smart constructors canonicalize (constant
/// folding, sum/product flattening, linear-term merging, max0 and
/// floordiv simplification). Evaluation clamps at >= 0 only where the
/// operators themselves demand it; callers clamp final results.
class BoundExpr {
public:
  enum class Kind { Sym, Max0, FloorDiv, Log2Ceil, Sum, Product };

  BoundExpr() : BoundExpr(constant(0)) {}

  static BoundExpr constant(long long c);
  static BoundExpr sym(LinExpr e); // parameter-only linear expression
  static BoundExpr max0(BoundExpr e);
  static BoundExpr floordiv(BoundExpr e, long long k); // k >= 1
  static BoundExpr log2ceil(BoundExpr e);
  static BoundExpr sum(std::vector<BoundExpr> parts);
  static BoundExpr product(std::vector<BoundExpr> parts);

  Kind kind() const;
  bool is_constant() const;          // Sym with no variables
  long long constant_value() const;  // requires is_constant()
  std::optional<LinExpr> as_linear() const; // Sym payload

  long long eval(const std::map<Var, long long> &params) const;
  std::string str() const;

  /// (polynomial degree, log-factor count) of the dominant term after
  /// every parameter is identified with one symbol.
  std::pair<int, int> degree() const;

  bool operator==(const BoundExpr &o) const;

private:
  struct Node;
  explicit BoundExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Column of the complexity table: 1, log n, n, n log n, n^2, n^3,
/// n^{>3}. (EXP cannot arise from this algebra; kept for report
/// compatibility.)
std::string asymptotic_class(const BoundExpr &b);

} // namespace lb
