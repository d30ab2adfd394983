#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace liftdl::extract {

/// Node types produced by the extractor.
namespace node_kind {
inline constexpr std::string_view kComponent = "COMPONENT";
inline constexpr std::string_view kFile = "FILE";
inline constexpr std::string_view kClass = "CLASS";
inline constexpr std::string_view kFunction = "FUNCTION";
inline constexpr std::string_view kVariable = "VARIABLE";
}  // namespace node_kind

/// Edge types produced by the extractor.
namespace edge_kind {
inline constexpr std::string_view kContain = "contain";
inline constexpr std::string_view kWrite = "write";
inline constexpr std::string_view kVarWrite = "varWrite";
inline constexpr std::string_view kCall = "call";
inline constexpr std::string_view kVarInfFunc = "varInfFunc";
inline constexpr std::string_view kCFunction = "cFunction";
inline constexpr std::string_view kAll[] = {kCFunction, kCall, kContain, kVarInfFunc, kVarWrite, kWrite};
}  // namespace edge_kind

/// Attribute key holding a presence condition in feature-expression syntax.
inline constexpr std::string_view kPcAttribute = "PC";

struct Edge {
  std::string type;
  std::string source;
  std::string target;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

using Attributes = std::map<std::string, std::string, std::less<>>;

/// Typed nodes, typed edges and string attributes on both. Iteration order
/// is sorted (nodes by id, edges by type/source/target), which makes every
/// serialisation deterministic.
class FactGraph {
 public:
  /// Adds a node; re-adding with the same type is a no-op, with a different
  /// type an Error.
  void add_node(std::string_view id, std::string_view type);
  /// Both endpoints must already be nodes.
  void add_edge(const Edge& edge);

  void set_attribute(std::string_view node, std::string_view key, std::string_view value);
  void set_attribute(const Edge& edge, std::string_view key, std::string_view value);

  bool has_node(std::string_view id) const { return nodes_.find(id) != nodes_.end(); }
  bool has_edge(const Edge& edge) const { return edges_.count(edge) != 0; }
  std::optional<std::string> node_type(std::string_view id) const;
  std::optional<std::string> attribute(std::string_view node, std::string_view key) const;
  std::optional<std::string> attribute(const Edge& edge, std::string_view key) const;

  const std::map<std::string, std::string, std::less<>>& nodes() const noexcept { return nodes_; }
  const std::set<Edge>& edges() const noexcept { return edges_; }
  const std::map<std::string, Attributes, std::less<>>& node_attributes() const noexcept { return node_attrs_; }
  const std::map<Edge, Attributes>& edge_attributes() const noexcept { return edge_attrs_; }

  std::size_t edge_count(std::string_view type) const;

  friend bool operator==(const FactGraph&, const FactGraph&) = default;

 private:
  std::map<std::string, std::string, std::less<>> nodes_;
  std::set<Edge> edges_;
  std::map<std::string, Attributes, std::less<>> node_attrs_;
  std::map<Edge, Attributes> edge_attrs_;
};

}  // namespace liftdl::extract
