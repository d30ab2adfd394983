#include "liftdl/datalog/program.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "liftdl/common/error.hpp"

namespace liftdl::datalog {

const RelationDecl* Program::find(std::string_view name) const {
  for (const auto& d : decls)
    if (d.name == name) return &d;
  return nullptr;
}

const RelationDecl& Program::at(std::string_view name) const {
  if (const auto* d = find(name)) return *d;
  throw Error("undeclared relation '" + std::string(name) + "'");
}

std::vector<std::string> Program::inputs() const {
  std::vector<std::string> out;
  for (const auto& d : decls)
    if (d.input) out.push_back(d.name);
  return out;
}

std::vector<std::string> Program::outputs() const {
  std::vector<std::string> out;
  for (const auto& d : decls)
    if (d.output) out.push_back(d.name);
  return out;
}

std::vector<std::string> Program::derived() const {
  std::vector<std::string> out;
  for (const auto& s : strata) out.insert(out.end(), s.relations.begin(), s.relations.end());
  return out;
}

namespace {

struct Token {
  enum class Kind { Ident, String, Directive, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  std::uint32_t line = 1, column = 1;
};

class Lexer {
 public:
  Lexer(std::string_view text, const std::string& name) : text_(text), name_(name) {}

  [[noreturn]] void fail(std::uint32_t line, std::uint32_t column, const std::string& what) const {
    throw SourceError(name_, line, column, what);
  }

  Token next() {
    skip();
    Token t;
    t.line = line_;
    t.column = column_;
    if (pos_ >= text_.size()) return t;
    const char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = Token::Kind::Ident;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        t.text += advance();
      return t;
    }
    if (c == '.' && pos_ + 1 < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_ + 1]))) {
      t.kind = Token::Kind::Directive;
      advance();
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) t.text += advance();
      return t;
    }
    if (c == '"') {
      t.kind = Token::Kind::String;
      advance();
      while (true) {
        if (pos_ >= text_.size() || text_[pos_] == '\n') fail(t.line, t.column, "unterminated string");
        char d = advance();
        if (d == '"') break;
        if (d == '\\') {
          if (pos_ >= text_.size()) fail(t.line, t.column, "unterminated string");
          d = advance();
        }
        t.text += d;
      }
      return t;
    }
    t.kind = Token::Kind::Punct;
    if (text_.substr(pos_, 2) == ":-" || text_.substr(pos_, 2) == "!=") {
      t.text = std::string(text_.substr(pos_, 2));
      advance();
      advance();
      return t;
    }
    if (std::string_view("(),.:=").find(c) == std::string_view::npos)
      fail(t.line, t.column, std::string("unexpected character '") + c + "'");
    t.text = std::string(1, advance());
    return t;
  }

 private:
  char advance() {
    const char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  void skip() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        advance();
      } else if (text_.substr(pos_, 2) == "//") {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (text_.substr(pos_, 2) == "/*") {
        const std::uint32_t l = line_, c = column_;
        advance();
        advance();
        while (pos_ < text_.size() && text_.substr(pos_, 2) != "*/") advance();
        if (pos_ >= text_.size()) fail(l, c, "unterminated comment");
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  std::string_view text_;
  const std::string& name_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1, column_ = 1;
};

class Parser {
 public:
  Parser(std::string_view text, const std::string& name) : lex_(text, name), name_(name) { tok_ = lex_.next(); }

  Program parse() {
    std::vector<std::pair<Token, bool>> io;  // relation name, is input
    std::vector<std::pair<Rule, std::vector<Token>>> rules;  // rule + atom positions (head first)

    while (tok_.kind != Token::Kind::End) {
      if (tok_.kind == Token::Kind::Directive) {
        const Token d = take();
        if (d.text == "decl") {
          declaration();
        } else if (d.text == "input" || d.text == "output") {
          do io.emplace_back(expect_ident("relation name"), d.text == "input");
          while (accept(","));
        } else {
          fail(d, "unsupported directive '." + d.text + "'");
        }
      } else {
        rules.push_back(rule());
      }
    }

    for (const auto& [name, input] : io) {
      auto* decl = find(name.text);
      if (!decl) fail(name, "undeclared relation '" + name.text + "'");
      (input ? decl->input : decl->output) = true;
    }
    for (auto& [r, positions] : rules) {
      check_atom(r.head, positions[0]);
      for (std::size_t i = 0; i < r.body.size(); ++i) check_atom(r.body[i], positions[i + 1]);
      check_range(r, positions[0]);
      program_.rules.push_back(std::move(r));
    }
    stratify();
    return std::move(program_);
  }

 private:
  [[noreturn]] void fail(const Token& at, const std::string& what) const {
    throw SourceError(name_, at.line, at.column, what);
  }

  Token take() {
    Token t = tok_;
    tok_ = lex_.next();
    return t;
  }
  bool accept(std::string_view punct) {
    if (tok_.kind != Token::Kind::Punct || tok_.text != punct) return false;
    take();
    return true;
  }
  void expect(std::string_view punct) {
    if (!accept(punct)) fail(tok_, "expected '" + std::string(punct) + "'" + found());
  }
  Token expect_ident(const std::string& what) {
    if (tok_.kind != Token::Kind::Ident) fail(tok_, "expected " + what + found());
    return take();
  }
  std::string found() const {
    if (tok_.kind == Token::Kind::End) return " before end of input";
    return " near '" + tok_.text + "'";
  }

  RelationDecl* find(const std::string& name) {
    for (auto& d : program_.decls)
      if (d.name == name) return &d;
    return nullptr;
  }

  void declaration() {
    const Token n = expect_ident("relation name");
    if (find(n.text)) fail(n, "relation '" + n.text + "' declared twice");
    RelationDecl d{n.text, {}, false, false};
    expect("(");
    do {
      const Token a = expect_ident("attribute name");
      expect(":");
      const Token type = expect_ident("attribute type");
      if (type.text != "symbol") fail(type, "unsupported attribute type '" + type.text + "' (only symbol)");
      d.attributes.push_back(a.text);
    } while (accept(","));
    expect(")");
    program_.decls.push_back(std::move(d));
  }

  Term term() {
    if (tok_.kind == Token::Kind::String) return Term{Term::Kind::Constant, take().text};
    const Token t = expect_ident("variable, \"constant\" or _");
    if (t.text == "_") return Term{Term::Kind::Wildcard, "_"};
    return Term{Term::Kind::Variable, t.text};
  }

  Atom atom(Token& at) {
    at = expect_ident("relation name");
    Atom a{at.text, {}};
    expect("(");
    do a.args.push_back(term());
    while (accept(","));
    expect(")");
    return a;
  }

  std::pair<Rule, std::vector<Token>> rule() {
    Rule r;
    std::vector<Token> positions(1);
    r.head = atom(positions[0]);
    r.line = positions[0].line;
    if (accept(":-")) {
      do {
        // An atom starts with `name (`; anything else is a constraint.
        if (tok_.kind == Token::Kind::Ident && tok_.text != "_") {
          Token name = take();
          if (tok_.kind == Token::Kind::Punct && tok_.text == "(") {
            Atom a{name.text, {}};
            take();
            do a.args.push_back(term());
            while (accept(","));
            expect(")");
            r.body.push_back(std::move(a));
            positions.push_back(name);
            continue;
          }
          r.constraints.push_back(constraint(Term{Term::Kind::Variable, name.text}));
        } else {
          r.constraints.push_back(constraint(term()));
        }
      } while (accept(","));
    }
    expect(".");
    return {std::move(r), std::move(positions)};
  }

  Constraint constraint(Term lhs) {
    Constraint c;
    c.lhs = std::move(lhs);
    if (accept("=")) c.equal = true;
    else if (accept("!=")) c.equal = false;
    else fail(tok_, "expected '=', '!=' or an atom" + found());
    c.rhs = term();
    if (c.lhs.kind == Term::Kind::Wildcard || c.rhs.kind == Term::Kind::Wildcard)
      fail(tok_, "wildcard in constraint");
    return c;
  }

  void check_atom(const Atom& a, const Token& at) {
    const auto* d = find(a.relation);
    if (!d) fail(at, "undeclared relation '" + a.relation + "'");
    if (d->arity() != a.args.size())
      fail(at, "arity mismatch for '" + a.relation + "': expected " + std::to_string(d->arity()) + ", got " +
                   std::to_string(a.args.size()));
  }

  void check_range(const Rule& r, const Token& at) {
    std::set<std::string> bound;
    for (const Atom& a : r.body)
      for (const Term& t : a.args)
        if (t.kind == Term::Kind::Variable) bound.insert(t.text);
    for (const Term& t : r.head.args) {
      if (t.kind == Term::Kind::Wildcard) fail(at, "wildcard in rule head");
      if (t.kind == Term::Kind::Variable && !bound.count(t.text))
        fail(at, "head variable '" + t.text + "' does not occur in the rule body");
    }
    for (const Constraint& c : r.constraints)
      for (const Term* t : {&c.lhs, &c.rhs})
        if (t->kind == Term::Kind::Variable && !bound.count(t->text))
          fail(at, "constraint variable '" + t->text + "' does not occur in a body atom");
  }

  // Tarjan's SCC over derived relations; SCCs come out in reverse topological
  // order of the "head depends on body" graph, i.e. dependencies first.
  void stratify() {
    std::map<std::string, std::set<std::string>> deps;
    for (const Rule& r : program_.rules) {
      auto& d = deps[r.head.relation];
      for (const Atom& a : r.body) d.insert(a.relation);
    }
    // Visit in declaration order for deterministic output.
    std::vector<std::string> order;
    for (const auto& decl : program_.decls)
      if (deps.count(decl.name)) order.push_back(decl.name);

    std::map<std::string, int> index, low;
    std::set<std::string> on_stack;
    std::vector<std::string> stack;
    int counter = 0;
    std::function<void(const std::string&)> visit = [&](const std::string& v) {
      index[v] = low[v] = counter++;
      stack.push_back(v);
      on_stack.insert(v);
      for (const std::string& w : deps[v]) {
        if (!deps.count(w)) continue;  // pure input
        if (!index.count(w)) {
          visit(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack.count(w)) {
          low[v] = std::min(low[v], index[w]);
        }
      }
      if (low[v] != index[v]) return;
      Stratum s;
      std::string w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        s.relations.push_back(w);
      } while (w != v);
      std::set<std::string> members(s.relations.begin(), s.relations.end());
      std::sort(s.relations.begin(), s.relations.end(), [&](const std::string& a, const std::string& b) {
        return std::find(order.begin(), order.end(), a) < std::find(order.begin(), order.end(), b);
      });
      for (std::size_t i = 0; i < program_.rules.size(); ++i) {
        const Rule& r = program_.rules[i];
        if (!members.count(r.head.relation)) continue;
        s.rules.push_back(i);
        for (const Atom& a : r.body) s.recursive = s.recursive || members.count(a.relation);
      }
      program_.strata.push_back(std::move(s));
    };
    for (const std::string& v : order)
      if (!index.count(v)) visit(v);
  }

  Lexer lex_;
  const std::string& name_;
  Token tok_;
  Program program_;
};

}  // namespace

Program parse_program(std::string_view text, const std::string& name) { return Parser(text, name).parse(); }

Program load_program(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_program(buf.str(), path.string());
}

}  // namespace liftdl::datalog
