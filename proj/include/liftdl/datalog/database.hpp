#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "liftdl/datalog/program.hpp"
#include "liftdl/featexpr/pc_store.hpp"

namespace liftdl::datalog {

using Symbol = std::uint32_t;
using featexpr::PresenceCondition;

class SymbolTable {
 public:
  Symbol intern(std::string_view text);
  std::optional<Symbol> find(std::string_view text) const;
  const std::string& text(Symbol s) const { return texts_.at(s); }
  std::size_t size() const noexcept { return texts_.size(); }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
  };
  std::vector<std::string> texts_;
  std::unordered_map<std::string, Symbol, Hash, std::equal_to<>> ids_;
};

/// Tuples of one relation, each with a presence condition. Rows are stored
/// flat and never removed; `find` and per-column-set indexes are hashed.
class Relation {
 public:
  using Row = std::span<const Symbol>;
  using Columns = std::uint32_t;  // bit set of bound columns

  explicit Relation(std::size_t arity) : arity_(arity) {}

  std::size_t arity() const noexcept { return arity_; }
  std::size_t size() const noexcept { return pcs_.size(); }
  bool empty() const noexcept { return pcs_.empty(); }

  Row row(std::size_t i) const { return {data_.data() + i * arity_, arity_}; }
  PresenceCondition pc(std::size_t i) const { return pcs_[i]; }
  void set_pc(std::size_t i, PresenceCondition pc) { pcs_[i] = pc; }

  std::optional<std::size_t> find(Row tuple) const;
  /// Appends `tuple`, which must not be present; returns its index.
  std::size_t append(Row tuple, PresenceCondition pc);
  /// Appends, or ORs `pc` into the existing entry via `store`.
  std::size_t merge(Row tuple, PresenceCondition pc, featexpr::PcStore* store);

  /// Candidate row indexes for `key` (a full-arity tuple of which only the
  /// `columns` are read): every row agreeing on those columns, plus possibly
  /// hash collisions the caller must filter. Indexes are built on first use
  /// and maintained by append.
  const std::vector<std::uint32_t>& lookup(Columns columns, Row key) const;

  void clear();

 private:
  using Index = std::unordered_map<std::uint64_t, std::vector<std::uint32_t>>;

  std::uint64_t key_hash(Columns columns, Row key) const noexcept;

  std::size_t arity_;
  std::vector<Symbol> data_;
  std::vector<PresenceCondition> pcs_;
  std::unordered_multimap<std::uint64_t, std::uint32_t> rows_;  // full-row hash → index
  mutable std::map<Columns, Index> indexes_;
};

/// Relations by name over a shared symbol table. A database built for lifted
/// evaluation is tied to the PcStore its PCs were interned in; a plain
/// database has no store and all PCs true.
class Database {
 public:
  Database() : symbols_(std::make_shared<SymbolTable>()) {}
  explicit Database(std::shared_ptr<SymbolTable> symbols, const featexpr::PcStore* store = nullptr)
      : symbols_(std::move(symbols)), store_(store) {}

  SymbolTable& symbols() { return *symbols_; }
  const SymbolTable& symbols() const { return *symbols_; }
  const std::shared_ptr<SymbolTable>& shared_symbols() const { return symbols_; }
  const featexpr::PcStore* store() const noexcept { return store_; }

  /// Creates the relation if absent; throws on arity mismatch.
  Relation& relation(const std::string& name, std::size_t arity);
  const Relation* find(std::string_view name) const;
  Relation* find(std::string_view name);
  const std::map<std::string, Relation, std::less<>>& relations() const noexcept { return relations_; }

  /// Convenience for tests and tools: insert by strings, OR-merging PCs.
  void add(const std::string& name, const std::vector<std::string>& tuple,
           PresenceCondition pc = PresenceCondition::True(), featexpr::PcStore* store = nullptr);
  /// Tuples of `name` as strings, sorted.
  std::vector<std::vector<std::string>> tuples(std::string_view name) const;
  std::optional<PresenceCondition> pc_of(std::string_view name, const std::vector<std::string>& tuple) const;

 private:
  std::shared_ptr<SymbolTable> symbols_;
  const featexpr::PcStore* store_ = nullptr;
  std::map<std::string, Relation, std::less<>> relations_;
};

struct LoadResult {
  Database db;
  std::size_t rows = 0;
  /// Rows whose PC was unsatisfiable (dropped).
  std::size_t unsat_dropped = 0;
};

/// Reads `<dir>/<relation>.facts` for every input relation of `program`:
/// tab-separated, one column per attribute plus an optional PC column
/// (empty or absent means true). Duplicate rows OR-merge. Features named in
/// PCs are registered when `store`'s registry is open. Throws SourceError
/// with file and line for bad rows and unparsable PCs, Error for a missing file.
LoadResult load_facts(const std::filesystem::path& dir, const Program& program, featexpr::PcStore& store);

/// Parses one relation's fact text into `db`; used by load_facts.
std::size_t parse_facts(std::string_view text, const std::string& file, const RelationDecl& decl, Database& db,
                        featexpr::PcStore& store, std::size_t& unsat_dropped);

/// Rows of `name` sorted by symbol text, with the PC column rendered by
/// `store` (empty for true). Without a store the PC column is omitted.
std::string format_facts(const Database& db, std::string_view name, const featexpr::PcStore* store);
void write_facts(const Database& db, std::string_view name, const featexpr::PcStore* store,
                 const std::filesystem::path& file);

}  // namespace liftdl::datalog
