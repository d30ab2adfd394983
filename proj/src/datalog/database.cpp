#include "liftdl/datalog/database.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "liftdl/common/error.hpp"

namespace liftdl::datalog {

Symbol SymbolTable::intern(std::string_view text) {
  if (auto it = ids_.find(text); it != ids_.end()) return it->second;
  const auto id = static_cast<Symbol>(texts_.size());
  texts_.emplace_back(text);
  ids_.emplace(texts_.back(), id);
  return id;
}

std::optional<Symbol> SymbolTable::find(std::string_view text) const {
  if (auto it = ids_.find(text); it != ids_.end()) return it->second;
  return std::nullopt;
}

// --- Relation --------------------------------------------------------------------

namespace {

std::uint64_t mix(std::uint64_t h) {
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ULL;
  h ^= h >> 33;
  return h;
}

constexpr Relation::Columns kAllColumns = ~Relation::Columns{0};

}  // namespace

std::uint64_t Relation::key_hash(Columns columns, Row key) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (std::size_t c = 0; c < arity_; ++c)
    if (columns & (Columns{1} << c)) h = mix(h ^ (key[c] + (std::uint64_t{c} << 32)));
  return h;
}

std::optional<std::size_t> Relation::find(Row tuple) const {
  auto [it, end] = rows_.equal_range(key_hash(kAllColumns, tuple));
  for (; it != end; ++it)
    if (std::equal(tuple.begin(), tuple.end(), row(it->second).begin())) return it->second;
  return std::nullopt;
}

std::size_t Relation::append(Row tuple, PresenceCondition pc) {
  const auto i = static_cast<std::uint32_t>(pcs_.size());
  data_.insert(data_.end(), tuple.begin(), tuple.end());
  pcs_.push_back(pc);
  rows_.emplace(key_hash(kAllColumns, tuple), i);
  for (auto& [columns, index] : indexes_) index[key_hash(columns, tuple)].push_back(i);
  return i;
}

std::size_t Relation::merge(Row tuple, PresenceCondition pc, featexpr::PcStore* store) {
  if (auto i = find(tuple)) {
    pcs_[*i] = store ? store->pc_or(pcs_[*i], pc) : PresenceCondition::True();
    return *i;
  }
  return append(tuple, pc);
}

const std::vector<std::uint32_t>& Relation::lookup(Columns columns, Row key) const {
  auto [it, fresh] = indexes_.try_emplace(columns);
  Index& index = it->second;
  if (fresh)
    for (std::uint32_t i = 0; i < pcs_.size(); ++i) index[key_hash(columns, row(i))].push_back(i);
  static const std::vector<std::uint32_t> kNone;
  auto hit = index.find(key_hash(columns, key));
  return hit == index.end() ? kNone : hit->second;
}

void Relation::clear() {
  data_.clear();
  pcs_.clear();
  rows_.clear();
  indexes_.clear();
}

// --- Database --------------------------------------------------------------------

Relation& Database::relation(const std::string& name, std::size_t arity) {
  auto [it, inserted] = relations_.try_emplace(name, arity);
  if (it->second.arity() != arity)
    throw Error("relation '" + name + "' has arity " + std::to_string(it->second.arity()) + ", not " +
                std::to_string(arity));
  return it->second;
}

const Relation* Database::find(std::string_view name) const {
  auto it = relations_.find(name);
  return it == relations_.end() ? nullptr : &it->second;
}

Relation* Database::find(std::string_view name) {
  auto it = relations_.find(name);
  return it == relations_.end() ? nullptr : &it->second;
}

void Database::add(const std::string& name, const std::vector<std::string>& tuple, PresenceCondition pc,
                   featexpr::PcStore* store) {
  std::vector<Symbol> row;
  for (const auto& s : tuple) row.push_back(symbols_->intern(s));
  relation(name, tuple.size()).merge(row, pc, store);
}

std::vector<std::vector<std::string>> Database::tuples(std::string_view name) const {
  std::vector<std::vector<std::string>> out;
  if (const Relation* r = find(name))
    for (std::size_t i = 0; i < r->size(); ++i) {
      std::vector<std::string> t;
      for (Symbol s : r->row(i)) t.push_back(symbols_->text(s));
      out.push_back(std::move(t));
    }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<PresenceCondition> Database::pc_of(std::string_view name, const std::vector<std::string>& tuple) const {
  const Relation* r = find(name);
  if (!r) return std::nullopt;
  std::vector<Symbol> row;
  for (const auto& s : tuple) {
    auto id = symbols_->find(s);
    if (!id) return std::nullopt;
    row.push_back(*id);
  }
  if (auto i = r->find(row)) return r->pc(*i);
  return std::nullopt;
}

// --- fact files ------------------------------------------------------------------

std::size_t parse_facts(std::string_view text, const std::string& file, const RelationDecl& decl, Database& db,
                        featexpr::PcStore& store, std::size_t& unsat_dropped) {
  Relation& rel = db.relation(decl.name, decl.arity());
  std::vector<Symbol> row(decl.arity());
  std::vector<std::string_view> cols;
  std::size_t rows = 0;
  std::uint32_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    cols.clear();
    for (std::size_t b = 0;;) {
      const std::size_t tab = line.find('\t', b);
      cols.push_back(line.substr(b, tab == std::string_view::npos ? std::string_view::npos : tab - b));
      if (tab == std::string_view::npos) break;
      b = tab + 1;
    }
    if (cols.size() != decl.arity() && cols.size() != decl.arity() + 1)
      throw SourceError(file, line_no, 1,
                        "expected " + std::to_string(decl.arity()) + " columns (plus optional pc), got " +
                            std::to_string(cols.size()));
    PresenceCondition pc = PresenceCondition::True();
    if (cols.size() > decl.arity() && !cols.back().empty()) {
      try {
        pc = store.parse(cols.back());
      } catch (const SyntaxError& e) {
        const std::size_t column = static_cast<std::size_t>(cols.back().data() - line.data()) + e.offset() + 1;
        throw SourceError(file, line_no, static_cast<std::uint32_t>(column), e.what());
      } catch (const UnknownFeatureError& e) {
        const std::size_t column = static_cast<std::size_t>(cols.back().data() - line.data()) + e.offset() + 1;
        throw SourceError(file, line_no, static_cast<std::uint32_t>(column), e.what());
      }
    }
    ++rows;
    if (pc.is_false()) {
      ++unsat_dropped;
      continue;
    }
    for (std::size_t c = 0; c < decl.arity(); ++c) row[c] = db.symbols().intern(cols[c]);
    rel.merge(row, pc, &store);
  }
  return rows;
}

LoadResult load_facts(const std::filesystem::path& dir, const Program& program, featexpr::PcStore& store) {
  LoadResult result{Database(std::make_shared<SymbolTable>(), &store), 0, 0};
  for (const auto& decl : program.decls) {
    if (!decl.input) continue;
    const auto path = dir / (decl.name + ".facts");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("missing fact file " + path.string() + " for input relation '" + decl.name + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    result.rows += parse_facts(buf.str(), path.string(), decl, result.db, store, result.unsat_dropped);
  }
  return result;
}

std::string format_facts(const Database& db, std::string_view name, const featexpr::PcStore* store) {
  const Relation* rel = db.find(name);
  if (!rel) return {};
  std::vector<std::string> lines;
  lines.reserve(rel->size());
  for (std::size_t i = 0; i < rel->size(); ++i) {
    std::string line;
    for (std::size_t c = 0; c < rel->arity(); ++c) {
      if (c) line += '\t';
      line += db.symbols().text(rel->row(i)[c]);
    }
    if (store) {
      line += '\t';
      if (!rel->pc(i).is_true()) line += store->render(rel->pc(i));
    }
    lines.push_back(std::move(line));
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

void write_facts(const Database& db, std::string_view name, const featexpr::PcStore* store,
                 const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + file.string());
  out << format_facts(db, name, store);
}

}  // namespace liftdl::datalog
