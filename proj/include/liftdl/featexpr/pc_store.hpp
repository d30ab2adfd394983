#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "liftdl/featexpr/feature.hpp"
#include "liftdl/featexpr/feature_expr.hpp"

namespace liftdl::featexpr {

/// Handle of a canonical presence condition inside a PcStore. Two handles
/// from the same store are equal iff their boolean functions are equal.
class PresenceCondition {
 public:
  constexpr PresenceCondition() = default;
  constexpr explicit PresenceCondition(std::uint32_t node) : node_(node) {}

  static constexpr PresenceCondition False() { return PresenceCondition(0); }
  static constexpr PresenceCondition True() { return PresenceCondition(1); }

  constexpr std::uint32_t node() const noexcept { return node_; }
  constexpr bool is_false() const noexcept { return node_ == 0; }
  constexpr bool is_true() const noexcept { return node_ == 1; }

  friend constexpr auto operator<=>(PresenceCondition, PresenceCondition) = default;

 private:
  std::uint32_t node_ = 1;
};

/// One conjunction of literals, sorted by feature.
struct Literal {
  FeatureId feature;
  bool positive;
  friend bool operator==(const Literal&, const Literal&) = default;
};
using Cube = std::vector<Literal>;

/// Reduced ordered binary decision diagrams over the features of a registry.
///
/// Variable order is feature registration order and never changes. Nodes are
/// hash-consed, so equal functions share one node and the node index is the
/// canonical handle. Binary operations go through a direct-mapped computed
/// table.
///
/// Construction (`pc_and`, `to_pc`, ...) mutates the store and must be
/// single-threaded. Queries marked const do not allocate and are safe for
/// concurrent readers once construction is over.
class PcStore {
 public:
  PcStore();

  FeatureRegistry& features() noexcept { return features_; }
  const FeatureRegistry& features() const noexcept { return features_; }

  PresenceCondition var(FeatureId id);
  PresenceCondition var(std::string_view name);

  PresenceCondition pc_and(PresenceCondition a, PresenceCondition b);
  PresenceCondition pc_or(PresenceCondition a, PresenceCondition b);
  PresenceCondition pc_not(PresenceCondition a);
  /// a ∧ ¬b without materialising ¬b.
  PresenceCondition pc_and_not(PresenceCondition a, PresenceCondition b);

  PresenceCondition to_pc(const FeatureExpr& expr);
  /// Parses `text` against this store's registry and interns it.
  PresenceCondition parse(std::string_view text);
  PresenceCondition cube(const Cube& literals);

  static bool is_sat(PresenceCondition p) noexcept { return !p.is_false(); }
  bool implies(PresenceCondition a, PresenceCondition b) const;
  bool evaluate(PresenceCondition p, const Configuration& rho) const;

  /// Disjunction of cubes equivalent to `p`: path cubes of the diagram with
  /// literals dropped while the cube stays inside `p`, then deduplicated and
  /// absorbed. Deterministic for a given store.
  std::vector<Cube> cover(PresenceCondition p) const;
  FeatureExpr to_expr(PresenceCondition p) const;
  /// `true`, `false`, or a rendering of `cover(p)` in the feature-expression
  /// grammar. Re-parses to the same handle.
  std::string render(PresenceCondition p) const;

  /// Features that `p` depends on, in order.
  std::vector<FeatureId> support(PresenceCondition p) const;
  /// Number of satisfying assignments over the first `feature_count` features.
  double sat_count(PresenceCondition p, std::size_t feature_count) const;

  std::size_t node_count() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    std::uint32_t level;
    std::uint32_t low;
    std::uint32_t high;
  };
  struct NodeKey {
    std::uint32_t level, low, high;
    friend bool operator==(const NodeKey&, const NodeKey&) = default;
  };
  struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const noexcept;
  };
  enum class Op : std::uint32_t { And = 1, Or = 2, Not = 3, AndNot = 4 };
  struct CacheEntry {
    std::uint32_t op = 0;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    std::uint32_t result = 0;
  };

  static constexpr std::uint32_t kTerminalLevel = UINT32_MAX;

  std::uint32_t make(std::uint32_t level, std::uint32_t low, std::uint32_t high);
  std::uint32_t level(std::uint32_t n) const { return nodes_[n].level; }
  std::uint32_t apply(Op op, std::uint32_t a, std::uint32_t b);
  std::uint32_t negate(std::uint32_t a);
  bool cached(Op op, std::uint32_t a, std::uint32_t b, std::uint32_t& result) const;
  void remember(Op op, std::uint32_t a, std::uint32_t b, std::uint32_t result);
  bool cube_inside(std::uint32_t f, const Cube& cube) const;

  FeatureRegistry features_;
  std::vector<Node> nodes_;
  std::unordered_map<NodeKey, std::uint32_t, NodeKeyHash> unique_;
  std::vector<CacheEntry> cache_;
};

/// Number of distinct handles in `pcs`, not counting the constant-true PC.
std::size_t count_unique_pcs(std::span<const PresenceCondition> pcs);

}  // namespace liftdl::featexpr

template <>
struct std::hash<liftdl::featexpr::PresenceCondition> {
  std::size_t operator()(liftdl::featexpr::PresenceCondition p) const noexcept {
    return std::hash<std::uint32_t>{}(p.node());
  }
};
