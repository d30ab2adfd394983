#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "liftdl/featexpr/feature.hpp"

namespace liftdl::featexpr {

/// Immutable propositional formula over features. Subtrees are shared, so
/// copies are cheap.
class FeatureExpr {
 public:
  enum class Kind { Var, Not, And, Or, True, False };

  FeatureExpr() : FeatureExpr(Kind::True) {}

  static FeatureExpr constant(bool value) { return FeatureExpr(value ? Kind::True : Kind::False); }
  static FeatureExpr var(FeatureId id);
  static FeatureExpr negate(FeatureExpr operand);
  static FeatureExpr conj(FeatureExpr lhs, FeatureExpr rhs);
  static FeatureExpr disj(FeatureExpr lhs, FeatureExpr rhs);

  Kind kind() const noexcept { return kind_; }
  FeatureId feature() const noexcept { return feature_; }
  /// Operand of Not, left operand of And/Or.
  const FeatureExpr& lhs() const { return *lhs_; }
  const FeatureExpr& rhs() const { return *rhs_; }

  friend bool operator==(const FeatureExpr& a, const FeatureExpr& b);

 private:
  explicit FeatureExpr(Kind kind) : kind_(kind) {}

  Kind kind_;
  FeatureId feature_ = 0;
  std::shared_ptr<const FeatureExpr> lhs_;
  std::shared_ptr<const FeatureExpr> rhs_;
};

/// Parses the concrete syntax
///
///     expr   := term ('|' term)*
///     term   := factor ('&' factor)*
///     factor := '!' factor | '(' expr ')' | ident | 'true' | 'false'
///
/// `||` and `&&` are accepted as synonyms of `|` and `&`. Unknown identifiers
/// are registered when `registry` is open and rejected when it is closed.
///
/// Throws SyntaxError or UnknownFeatureError, both carrying a byte offset.
FeatureExpr parse_feature_expr(std::string_view text, FeatureRegistry& registry);

/// Renders with minimal parentheses; the output re-parses to an equal tree
/// modulo associativity.
std::string to_string(const FeatureExpr& expr, const FeatureRegistry& registry);

bool evaluate(const FeatureExpr& expr, const Configuration& rho);

}  // namespace liftdl::featexpr
