#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Syntax tree of the mini-C subset accepted by the extractor: enums, globals
// (optionally extern/const), class-like containers, functions, and the usual
// structured statements. Nodes are plain values so trees can be copied and
// rewritten.

namespace liftdl::extract::ast {

struct Pos {
  std::uint32_t line = 0;
  std::uint32_t column = 0;
  friend bool operator==(const Pos&, const Pos&) = default;
};

struct Type {
  enum class Base { Int, Bool, Void, Enum };
  Base base = Base::Int;
  std::string enum_name;  // Base::Enum only
};

/// What an identifier refers to, filled in by name resolution.
struct Binding {
  enum class Kind {
    Unresolved,
    Global,       // file-scope variable, linked across units by `name`
    Member,       // class data member
    Param,
    Local,
    EnumLiteral,
    Function,     // free function, linked across units by `name`
    Method,       // function of the enclosing class
  };
  Kind kind = Kind::Unresolved;
  std::string name;
  /// Unit-local qualified id (`Class#name`, `func#param`, `func#local@l:c`);
  /// empty for Global/Function/EnumLiteral.
  std::string qualified;
};

struct Expr {
  enum class Kind { Ident, IntLit, BoolLit, Unary, Binary, Assign, PreIncDec, PostIncDec, Call };
  Kind kind = Kind::IntLit;
  Pos pos;
  /// Identifier or callee name, literal spelling, or operator spelling
  /// (`!`, `+`, `==`, `+=`, `++`, ...).
  std::string text;
  /// Operands (Unary: 1, Binary/Assign: lhs rhs, IncDec: target) or call arguments.
  std::vector<Expr> args;
  Binding binding;  // Ident and Call
};

struct VarDecl {
  Type type;
  std::string name;
  Pos pos;
  bool is_extern = false;
  bool is_const = false;
  std::optional<Expr> init;
  Binding binding;  // how uses of this declaration are bound
};

struct SwitchCase;

struct Stmt {
  enum class Kind { Block, Decl, Expr, If, While, For, Switch, Return, Break, Continue, Empty };
  Kind kind = Kind::Empty;
  Pos pos;
  /// Block: statements. If: then-branch and optional else-branch.
  /// While/For: the body.
  std::vector<Stmt> children;
  std::vector<VarDecl> decls;  // Decl
  /// Expression statement, return value, or If/While/For/Switch condition.
  std::optional<Expr> expr;
  std::vector<Stmt> init;      // For: zero or one init statement
  std::optional<Expr> step;    // For
  std::vector<SwitchCase> cases;
};

struct SwitchCase {
  Pos pos;
  std::vector<Expr> labels;  // empty with is_default for `default:`
  bool is_default = false;
  std::vector<Stmt> body;
};

struct Param {
  Type type;
  std::string name;
  Pos pos;
};

struct Function {
  Type result;
  std::string name;
  std::string container;  // enclosing class, empty for free functions
  Pos pos;
  std::vector<Param> params;
  std::optional<Stmt> body;  // absent for prototypes
};

struct Class {
  std::string name;
  Pos pos;
  std::vector<VarDecl> members;
  std::vector<Function> methods;
};

struct Enum {
  std::string name;
  Pos pos;
  std::vector<std::string> literals;
};

struct Unit {
  std::string path;
  std::vector<Enum> enums;
  std::vector<VarDecl> globals;
  std::vector<Class> classes;
  std::vector<Function> functions;  // definitions and prototypes

  const Enum* find_enum(const std::string& name) const {
    for (const auto& e : enums)
      if (e.name == name) return &e;
    return nullptr;
  }
};

}  // namespace liftdl::extract::ast
