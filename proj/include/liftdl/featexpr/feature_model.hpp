#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "liftdl/featexpr/feature_expr.hpp"
#include "liftdl/featexpr/pc_store.hpp"

namespace liftdl::featexpr {

/// Constraints over features describing the valid products.
class FeatureModel {
 public:
  /// The unconstrained model (every configuration is a product).
  FeatureModel() = default;

  /// Conjoins `constraints`; throws Error when the conjunction is
  /// unsatisfiable.
  FeatureModel(std::vector<FeatureExpr> constraints, PcStore& store);

  /// One constraint per line in the feature-expression grammar, `#` starts a
  /// comment, blank lines are skipped. Syntax errors are reported as
  /// SourceError with the line and 1-based column.
  static FeatureModel parse(std::string_view text, PcStore& store, const std::string& origin = {});
  static FeatureModel load(const std::filesystem::path& path, PcStore& store);

  const std::vector<FeatureExpr>& constraints() const noexcept { return constraints_; }
  PresenceCondition compiled() const noexcept { return compiled_; }

 private:
  std::vector<FeatureExpr> constraints_;
  PresenceCondition compiled_ = PresenceCondition::True();
};

enum class CompareOp { Lt, Le, Gt, Ge, Eq, Ne };

/// Tag used in abstracted feature names: LT, LE, GT, GE, EQ, NE.
std::string_view op_tag(CompareOp op);
/// `op` with its operands swapped (`a < b` is `b > a`).
CompareOp mirror(CompareOp op);

/// The propositional stand-in for `lhs op rhs`, named `<lhs>_<TAG>_<rhs>`.
/// Registers it on first use; later calls return the same feature.
FeatureId abstract_comparison(std::string_view lhs, CompareOp op, std::string_view rhs,
                              FeatureRegistry& registry);

/// Pairwise exclusions ¬(Fi ∧ Fj) for i < j, followed by F0 ∨ … ∨ Fn-1 when
/// `mandatory`. Requires at least two members.
std::vector<FeatureExpr> enum_group_constraints(std::span<const FeatureId> members, bool mandatory);

}  // namespace liftdl::featexpr
