#include "liftdl/tamodel/ta.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "liftdl/common/error.hpp"

namespace liftdl::ta {

namespace {

constexpr std::string_view kInstanceKeyword = "$INSTANCE";

bool token_char(char c) {
  return !(c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f' || c == '"' || c == '{' ||
           c == '}' || c == '(' || c == ')');
}

void check_token(std::string_view s, std::string_view what) {
  bool ok = !s.empty() && s.front() != '$' && !s.starts_with("//");
  for (char c : s) ok = ok && token_char(c);
  if (!ok) throw Error("cannot write " + std::string(what) + " '" + std::string(s) + "' as a TA token");
}

std::string quote(std::string_view value) {
  std::string out = "\"";
  for (char c : value) {
    if (c == '\n' || c == '\r' || c == '\t') throw Error("attribute value contains a control character");
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

TaDocument from_graph(const FactGraph& graph) {
  TaDocument doc;
  for (const auto& [id, type] : graph.nodes()) {
    check_token(id, "node id");
    check_token(type, "node type");
    doc.instances.push_back({id, type});
  }
  for (const Edge& e : graph.edges()) {
    check_token(e.type, "edge type");
    doc.edges.push_back(e);
  }
  for (const auto& [id, attrs] : graph.node_attributes())
    doc.attributes.push_back({id, {attrs.begin(), attrs.end()}});
  for (const auto& [e, attrs] : graph.edge_attributes()) doc.attributes.push_back({e, {attrs.begin(), attrs.end()}});
  return doc;
}

FactGraph to_graph(const TaDocument& doc) {
  FactGraph g;
  for (const Instance& i : doc.instances) g.add_node(i.id, i.type);
  for (const Edge& e : doc.edges) g.add_edge(e);
  for (const AttributeRecord& a : doc.attributes)
    for (const auto& [key, value] : a.values) {
      if (const auto* id = std::get_if<std::string>(&a.subject))
        g.set_attribute(*id, key, value);
      else
        g.set_attribute(std::get<Edge>(a.subject), key, value);
    }
  return g;
}

std::string emit_ta(const TaDocument& doc) {
  std::string out;
  for (const Instance& i : doc.instances) out += std::string(kInstanceKeyword) + " " + i.id + " " + i.type + "\n";
  for (const Edge& e : doc.edges) out += e.type + " " + e.source + " " + e.target + "\n";
  for (const AttributeRecord& a : doc.attributes) {
    if (const auto* id = std::get_if<std::string>(&a.subject)) {
      out += *id;
    } else {
      const Edge& e = std::get<Edge>(a.subject);
      out += "(" + e.type + " " + e.source + " " + e.target + ")";
    }
    out += " {";
    for (const auto& [key, value] : a.values) {
      check_token(key, "attribute key");
      out += " " + key + " = " + quote(value);
    }
    out += " }\n";
  }
  return out;
}

// --- parsing -----------------------------------------------------------------

namespace {

class LineParser {
 public:
  LineParser(std::string_view line, const std::string& name, std::uint32_t number)
      : line_(line), name_(name), number_(number) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw SourceError(name_, number_, static_cast<std::uint32_t>(pos_ + 1), what);
  }

  void skip_space() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t' || line_[pos_] == '\r')) ++pos_;
  }
  bool at_end() {
    skip_space();
    return pos_ >= line_.size();
  }
  char peek() {
    skip_space();
    return pos_ < line_.size() ? line_[pos_] : '\0';
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string token(const char* what) {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < line_.size() && token_char(line_[pos_])) ++pos_;
    if (start == pos_) fail(std::string("expected ") + what);
    return std::string(line_.substr(start, pos_ - start));
  }
  std::string quoted() {
    expect('"');
    std::string out;
    while (true) {
      if (pos_ >= line_.size()) fail("unterminated string");
      char c = line_[pos_++];
      if (c == '"') return out;
      if (c == '\\') {
        if (pos_ >= line_.size()) fail("unterminated string");
        c = line_[pos_++];
      }
      out += c;
    }
  }
  std::size_t pos() const { return pos_; }
  void rewind(std::size_t p) { pos_ = p; }

 private:
  std::string_view line_;
  const std::string& name_;
  std::uint32_t number_;
  std::size_t pos_ = 0;
};

}  // namespace

TaDocument parse_ta(std::string_view text, const std::string& name) {
  enum class Section { Instances, Edges, Attributes } section = Section::Instances;
  TaDocument doc;
  std::set<std::string, std::less<>> instances;
  std::set<Edge> edges;

  std::uint32_t number = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++number;

    LineParser p(line, name, number);
    if (p.at_end() || line.substr(p.pos(), 2) == "//") continue;

    if (p.peek() == '$') {
      const std::size_t at = p.pos();
      const std::string keyword = [&] {
        std::string k;
        std::size_t i = at;
        while (i < line.size() && token_char(line[i])) k += line[i++];
        return k;
      }();
      if (keyword != kInstanceKeyword) p.fail("unknown directive '" + keyword + "'");
      p.rewind(at + kInstanceKeyword.size());
      if (section != Section::Instances) p.fail("instance declared after edges or attributes");
      Instance inst{p.token("node id"), p.token("node type")};
      if (!p.at_end()) p.fail("trailing text after instance");
      if (!instances.insert(inst.id).second) p.fail("duplicate instance '" + inst.id + "'");
      doc.instances.push_back(std::move(inst));
      continue;
    }

    auto declared = [&](const std::string& id, std::size_t at) {
      if (!instances.count(id)) {
        p.rewind(at);
        p.fail("undeclared identifier '" + id + "'");
      }
    };

    AttributeRecord record;
    if (p.peek() == '(') {
      p.expect('(');
      Edge e;
      e.type = p.token("edge type");
      e.source = p.token("edge source");
      e.target = p.token("edge target");
      p.expect(')');
      if (!edges.count(e)) p.fail("undeclared edge (" + e.type + " " + e.source + " " + e.target + ")");
      record.subject = std::move(e);
    } else {
      const std::size_t at = p.pos();
      std::string first = p.token("identifier");
      if (p.peek() != '{') {
        // Edge line.
        if (section == Section::Attributes) p.fail("edge declared after attributes");
        section = Section::Edges;
        const std::size_t src_at = (p.skip_space(), p.pos());
        std::string src = p.token("edge source");
        const std::size_t dst_at = (p.skip_space(), p.pos());
        std::string dst = p.token("edge target");
        if (!p.at_end()) p.fail("trailing text after edge");
        declared(src, src_at);
        declared(dst, dst_at);
        Edge e{std::move(first), std::move(src), std::move(dst)};
        if (!edges.insert(e).second) p.fail("duplicate edge");
        doc.edges.push_back(std::move(e));
        continue;
      }
      declared(first, at);
      record.subject = std::move(first);
    }

    section = Section::Attributes;
    p.expect('{');
    while (p.peek() != '}') {
      if (p.at_end()) p.fail("unterminated attribute list");
      std::string key = p.token("attribute key");
      p.expect('=');
      record.values.emplace_back(std::move(key), p.quoted());
    }
    p.expect('}');
    if (!p.at_end()) p.fail("trailing text after attributes");
    doc.attributes.push_back(std::move(record));
  }
  return doc;
}

TaDocument load_ta(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_ta(buf.str(), path.string());
}

// --- ta2tsv --------------------------------------------------------------------

std::map<std::string, std::string> ta2tsv(const TaDocument& doc) {
  // Subject → PC column; an entry exists once a PC attribute has been seen.
  std::map<std::string, std::string, std::less<>> node_pc;
  std::map<Edge, std::string> edge_pc;
  std::set<std::string, std::less<>> instances;
  for (const Instance& i : doc.instances) instances.insert(i.id);
  const std::set<Edge> edges(doc.edges.begin(), doc.edges.end());

  for (const AttributeRecord& a : doc.attributes) {
    std::string label;
    if (const auto* id = std::get_if<std::string>(&a.subject)) {
      if (!instances.count(*id)) throw Error("dangling attribute on undeclared instance '" + *id + "'");
      label = *id;
    } else {
      const Edge& e = std::get<Edge>(a.subject);
      label = "(" + e.type + " " + e.source + " " + e.target + ")";
      if (!edges.count(e)) throw Error("dangling attribute on undeclared edge " + label);
    }
    for (const auto& [key, value] : a.values) {
      if (key != extract::kPcAttribute) continue;
      if (value.find_first_of("\t\n\r") != std::string::npos)
        throw Error("PC of " + label + " contains a control character");
      const std::string column = value == "true" ? std::string() : value;
      const bool fresh = std::holds_alternative<std::string>(a.subject)
                             ? node_pc.emplace(label, column).second
                             : edge_pc.emplace(std::get<Edge>(a.subject), column).second;
      if (!fresh) throw Error("duplicate PC attribute on " + label);
    }
  }
  auto column = [](const auto& map, const auto& key) {
    auto it = map.find(key);
    return it == map.end() ? std::string() : it->second;
  };

  std::map<std::string, std::string> files;
  for (std::string_view type : extract::edge_kind::kAll) files[std::string(type) + ".facts"];
  std::string& inst = files["instance.facts"];
  for (const Instance& i : doc.instances) {
    inst += i.id + "\t" + i.type + "\t" + column(node_pc, i.id) + "\n";
  }
  for (const Edge& e : doc.edges) {
    files[e.type + ".facts"] += e.source + "\t" + e.target + "\t" + column(edge_pc, e) + "\n";
  }
  return files;
}

void write_ta2tsv(const TaDocument& doc, const std::filesystem::path& outdir) {
  const auto files = ta2tsv(doc);
  std::filesystem::create_directories(outdir);
  for (const auto& [name, content] : files) {
    std::ofstream out(outdir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + (outdir / name).string());
    out << content;
  }
}

}  // namespace liftdl::ta
