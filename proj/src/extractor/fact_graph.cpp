#include "liftdl/extractor/fact_graph.hpp"

#include "liftdl/common/error.hpp"

namespace liftdl::extract {

void FactGraph::add_node(std::string_view id, std::string_view type) {
  if (auto it = nodes_.find(id); it != nodes_.end()) {
    if (it->second != type)
      throw Error("node '" + std::string(id) + "' redeclared as " + std::string(type) + " (was " + it->second + ")");
    return;
  }
  nodes_.emplace(std::string(id), std::string(type));
}

void FactGraph::add_edge(const Edge& edge) {
  if (!has_node(edge.source)) throw Error("edge source '" + edge.source + "' is not a node");
  if (!has_node(edge.target)) throw Error("edge target '" + edge.target + "' is not a node");
  edges_.insert(edge);
}

void FactGraph::set_attribute(std::string_view node, std::string_view key, std::string_view value) {
  if (!has_node(node)) throw Error("attribute on unknown node '" + std::string(node) + "'");
  node_attrs_[std::string(node)].insert_or_assign(std::string(key), std::string(value));
}

void FactGraph::set_attribute(const Edge& edge, std::string_view key, std::string_view value) {
  if (!has_edge(edge)) throw Error("attribute on unknown edge (" + edge.type + " " + edge.source + " " + edge.target + ")");
  edge_attrs_[edge].insert_or_assign(std::string(key), std::string(value));
}

std::optional<std::string> FactGraph::node_type(std::string_view id) const {
  if (auto it = nodes_.find(id); it != nodes_.end()) return it->second;
  return std::nullopt;
}

std::optional<std::string> FactGraph::attribute(std::string_view node, std::string_view key) const {
  auto it = node_attrs_.find(node);
  if (it == node_attrs_.end()) return std::nullopt;
  auto kv = it->second.find(key);
  if (kv == it->second.end()) return std::nullopt;
  return kv->second;
}

std::optional<std::string> FactGraph::attribute(const Edge& edge, std::string_view key) const {
  auto it = edge_attrs_.find(edge);
  if (it == edge_attrs_.end()) return std::nullopt;
  auto kv = it->second.find(key);
  if (kv == it->second.end()) return std::nullopt;
  return kv->second;
}

std::size_t FactGraph::edge_count(std::string_view type) const {
  std::size_t n = 0;
  for (const Edge& e : edges_)
    if (e.type == type) ++n;
  return n;
}

}  // namespace liftdl::extract
