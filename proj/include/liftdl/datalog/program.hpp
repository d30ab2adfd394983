#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace liftdl::datalog {

struct RelationDecl {
  std::string name;
  std::vector<std::string> attributes;  // all symbol-typed
  bool input = false;
  bool output = false;

  std::size_t arity() const noexcept { return attributes.size(); }
};

struct Term {
  enum class Kind { Variable, Constant, Wildcard };
  Kind kind = Kind::Variable;
  std::string text;  // variable name or constant value (unquoted)

  friend bool operator==(const Term&, const Term&) = default;
};

struct Atom {
  std::string relation;
  std::vector<Term> args;
};

struct Constraint {
  Term lhs;
  bool equal = true;  // `=` or `!=`
  Term rhs;
};

struct Rule {
  Atom head;
  std::vector<Atom> body;  // positive atoms, evaluated in written order
  std::vector<Constraint> constraints;
  std::uint32_t line = 0;
};

/// A group of mutually recursive derived relations.
struct Stratum {
  std::vector<std::string> relations;
  std::vector<std::size_t> rules;  // indexes into Program::rules with heads in this stratum
  bool recursive = false;
};

struct Program {
  std::vector<RelationDecl> decls;
  std::vector<Rule> rules;
  /// Derived relations grouped and ordered so that every stratum only reads
  /// relations of earlier strata, inputs, or itself.
  std::vector<Stratum> strata;

  const RelationDecl* find(std::string_view name) const;
  const RelationDecl& at(std::string_view name) const;
  std::vector<std::string> inputs() const;
  std::vector<std::string> outputs() const;
  /// Relations that are the head of some rule.
  std::vector<std::string> derived() const;
};

/// Parses `.decl name(a: symbol, ...)`, `.input name`, `.output name`, and
/// rules `head(...) :- atom, ..., x != y.` with `//` and `/* */` comments.
/// Throws SourceError for syntax errors, undeclared relations, arity
/// mismatches, non-symbol attribute types and range-restriction violations.
Program parse_program(std::string_view text, const std::string& name = "<program>");
Program load_program(const std::filesystem::path& path);

}  // namespace liftdl::datalog
