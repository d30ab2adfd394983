#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "liftdl/extractor/fact_graph.hpp"

namespace liftdl::ta {

using extract::Edge;
using extract::FactGraph;

struct Instance {
  std::string id;
  std::string type;
  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Attribute record: a node id or an edge triple, and its key/value pairs in
/// written order.
struct AttributeRecord {
  std::variant<std::string, Edge> subject;
  std::vector<std::pair<std::string, std::string>> values;
  friend bool operator==(const AttributeRecord&, const AttributeRecord&) = default;
};

/// A Tuple-Attribute model: instances, then edges, then attributes.
struct TaDocument {
  std::vector<Instance> instances;
  std::vector<Edge> edges;
  std::vector<AttributeRecord> attributes;
  friend bool operator==(const TaDocument&, const TaDocument&) = default;
};

/// Instances sorted by id, edges by (type, source, target), node attributes
/// then edge attributes in the same orders. Throws Error for ids or types
/// that cannot be written as a single TA token.
TaDocument from_graph(const FactGraph& graph);
FactGraph to_graph(const TaDocument& doc);

std::string emit_ta(const TaDocument& doc);
inline std::string emit_ta(const FactGraph& graph) { return emit_ta(from_graph(graph)); }

/// Throws SourceError (with `name` as the file) on malformed lines, on
/// declarations out of order, and on references to undeclared identifiers.
TaDocument parse_ta(std::string_view text, const std::string& name = "<ta>");
TaDocument load_ta(const std::filesystem::path& path);

/// Fact files of `doc`, keyed by file name: `<etype>.facts` (src, dst, pc) for
/// each extractor edge type and every other type present, and
/// `instance.facts` (id, type, pc). Tab-separated, `\n`-terminated rows in
/// document order; the pc column is empty when the PC is true or absent.
/// Throws Error for dangling attribute records and duplicate PC attributes.
std::map<std::string, std::string> ta2tsv(const TaDocument& doc);
/// Writes the files of ta2tsv(doc) into `outdir`, creating it if needed.
void write_ta2tsv(const TaDocument& doc, const std::filesystem::path& outdir);

}  // namespace liftdl::ta
