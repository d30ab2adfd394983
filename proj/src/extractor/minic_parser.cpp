#include "liftdl/extractor/minic_parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "liftdl/common/error.hpp"

namespace liftdl::extract {

namespace {

using namespace ast;

struct Token {
  enum class Kind { Ident, Number, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  Pos pos;
};

const char* const kPuncts[] = {"<<=", ">>=", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "==",
                               "!=",  "<=",  ">=", "&&", "||", "<<", ">>", "::", "{",  "}",  "(",  ")",  "[",
                               "]",   ";",   ",",  ":",  "=",  "+",  "-",  "*",  "/",  "%",  "<",  ">",  "!",
                               "&",   "|",   "^",  "~",  "?",  "."};

class Lexer {
 public:
  Lexer(std::string_view text, const std::string& path) : text_(text), path_(path) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    bool line_start = true;
    while (i_ < text_.size()) {
      const char c = text_[i_];
      if (c == '\n') {
        advance();
        line_start = true;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        continue;
      }
      if (c == '/' && peek(1) == '/') {
        while (i_ < text_.size() && text_[i_] != '\n') advance();
        continue;
      }
      if (c == '/' && peek(1) == '*') {
        const Pos start = pos();
        advance();
        advance();
        while (i_ < text_.size() && !(text_[i_] == '*' && peek(1) == '/')) advance();
        if (i_ >= text_.size()) throw SourceError(path_, start.line, start.column, "unterminated comment");
        advance();
        advance();
        continue;
      }
      if (c == '#' && line_start) {
        directive();
        continue;
      }
      line_start = false;
      Token t;
      t.pos = pos();
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Token::Kind::Ident;
        while (i_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[i_])) || text_[i_] == '_'))
          t.text += advance();
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        t.kind = Token::Kind::Number;
        while (i_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[i_])))) t.text += advance();
      } else {
        t.kind = Token::Kind::Punct;
        for (const char* p : kPuncts) {
          const std::string_view punct(p);
          if (text_.substr(i_, punct.size()) == punct) {
            t.text = punct;
            break;
          }
        }
        if (t.text.empty()) throw SourceError(path_, line_, col_, std::string("unexpected character '") + c + "'");
        for (std::size_t k = 0; k < t.text.size(); ++k) advance();
      }
      out.push_back(std::move(t));
    }
    Token end;
    end.pos = pos();
    out.push_back(end);
    return out;
  }

 private:
  char peek(std::size_t ahead) const { return i_ + ahead < text_.size() ? text_[i_ + ahead] : '\0'; }
  Pos pos() const { return Pos{line_, col_}; }
  char advance() {
    const char c = text_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  // #include and #pragma lines are skipped; any other directive would change
  // which code exists and is rejected.
  void directive() {
    const Pos start = pos();
    std::string line;
    while (i_ < text_.size() && text_[i_] != '\n') line += advance();
    std::string word;
    for (std::size_t k = 1; k < line.size(); ++k) {
      if (std::isspace(static_cast<unsigned char>(line[k])) && word.empty()) continue;
      if (!std::isalpha(static_cast<unsigned char>(line[k]))) break;
      word += line[k];
    }
    if (word != "include" && word != "pragma")
      throw SourceError(path_, start.line, start.column, "preprocessor directive '#" + word + "' is not supported");
  }

  std::string_view text_;
  const std::string& path_;
  std::size_t i_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
};

const std::set<std::string, std::less<>> kIntLike = {"int", "unsigned", "signed", "long", "short", "char", "float", "double"};

const std::map<std::string, int, std::less<>> kBinaryPrecedence = {
    {"||", 1}, {"&&", 2}, {"|", 3},  {"^", 4},  {"&", 5},  {"==", 6}, {"!=", 6}, {"<", 7},  {"<=", 7},
    {">", 7},  {">=", 7}, {"<<", 8}, {">>", 8}, {"+", 9},  {"-", 9},  {"*", 10}, {"/", 10}, {"%", 10}};

const std::set<std::string, std::less<>> kAssignOps = {"=",  "+=", "-=", "*=", "/=", "%=",
                                                       "&=", "|=", "^=", "<<=", ">>="};

class Parser {
 public:
  Parser(std::vector<Token> tokens, const std::string& path) : toks_(std::move(tokens)), path_(path) {}

  Unit parse_unit() {
    Unit unit;
    unit.path = path_;
    unit_ = &unit;
    while (!at_end()) external_decl(nullptr);
    return unit;
  }

 private:
  // --- token helpers ------------------------------------------------------

  const Token& cur() const { return toks_[idx_]; }
  const Token& ahead(std::size_t n) const { return toks_[std::min(idx_ + n, toks_.size() - 1)]; }
  bool at_end() const { return cur().kind == Token::Kind::End; }
  bool is(std::string_view text) const { return cur().kind != Token::Kind::End && cur().text == text; }
  bool accept(std::string_view text) {
    if (!is(text)) return false;
    ++idx_;
    return true;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw SourceError(path_, cur().pos.line, cur().pos.column,
                      what + (at_end() ? " at end of input" : " near '" + cur().text + "'"));
  }
  const Token& expect(std::string_view text) {
    if (!is(text)) fail("expected '" + std::string(text) + "'");
    return toks_[idx_++];
  }
  std::string expect_ident() {
    if (cur().kind != Token::Kind::Ident || is_keyword(cur().text)) fail("expected identifier");
    return toks_[idx_++].text;
  }
  static bool is_keyword(std::string_view w) {
    static const std::set<std::string, std::less<>> kw = {
        "int",  "bool",   "void",     "enum",  "class",   "struct", "extern", "const",  "static",
        "if",   "else",   "while",    "for",   "switch",  "case",   "default", "return", "break",
        "continue", "true", "false", "unsigned", "signed", "long", "short",  "char",   "float",
        "double", "inline", "public", "private", "protected"};
    return kw.count(w) != 0;
  }

  // --- declarations -------------------------------------------------------

  bool starts_type() const {
    const Token& t = cur();
    if (t.kind != Token::Kind::Ident) return false;
    if (t.text == "bool" || t.text == "void" || t.text == "enum" || t.text == "const" || t.text == "static" ||
        t.text == "extern" || t.text == "inline" || kIntLike.count(t.text))
      return true;
    return enum_names_.count(t.text) && ahead(1).kind == Token::Kind::Ident;
  }

  Type type() {
    Type t;
    if (accept("bool")) {
      t.base = Type::Base::Bool;
    } else if (accept("void")) {
      t.base = Type::Base::Void;
    } else if (accept("enum")) {
      t.base = Type::Base::Enum;
      t.enum_name = expect_ident();
    } else if (cur().kind == Token::Kind::Ident && kIntLike.count(cur().text)) {
      while (cur().kind == Token::Kind::Ident && kIntLike.count(cur().text)) ++idx_;
      t.base = Type::Base::Int;
    } else if (cur().kind == Token::Kind::Ident && enum_names_.count(cur().text)) {
      t.base = Type::Base::Enum;
      t.enum_name = toks_[idx_++].text;
    } else {
      fail("expected a type");
    }
    return t;
  }

  void enum_decl() {
    Enum e;
    e.pos = cur().pos;
    expect("enum");
    e.name = expect_ident();
    expect("{");
    while (!is("}")) {
      e.literals.push_back(expect_ident());
      if (accept("=")) expr();  // explicit values do not matter to the abstraction
      if (!accept(",")) break;
    }
    expect("}");
    expect(";");
    enum_names_.insert(e.name);
    unit_->enums.push_back(std::move(e));
  }

  void class_decl() {
    Class c;
    c.pos = cur().pos;
    ++idx_;  // class / struct
    c.name = expect_ident();
    expect("{");
    while (!is("}")) {
      if (at_end()) fail("unterminated class");
      external_decl(&c);
    }
    expect("}");
    accept(";");
    unit_->classes.push_back(std::move(c));
  }

  void external_decl(Class* cls) {
    if (accept(";")) return;
    if (is("enum") && ahead(2).text == "{") return enum_decl();
    if (!cls && (is("class") || is("struct")) && ahead(2).text == "{") return class_decl();
    if (cls && (is("public") || is("private") || is("protected"))) {
      ++idx_;
      expect(":");
      return;
    }
    if (!starts_type()) fail("expected a declaration");

    bool is_extern = false, is_const = false;
    for (;;) {
      if (accept("extern")) is_extern = true;
      else if (accept("const")) is_const = true;
      else if (accept("static") || accept("inline")) continue;
      else break;
    }
    Type t = type();
    if (accept("const")) is_const = true;
    Pos name_pos = cur().pos;
    std::string name = expect_ident();

    if (is("(")) {
      Function f;
      f.result = t;
      f.name = std::move(name);
      f.pos = name_pos;
      f.container = cls ? cls->name : std::string();
      f.params = params();
      accept("const");
      if (is("{"))
        f.body = block();
      else
        expect(";");
      (cls ? cls->methods : unit_->functions).push_back(std::move(f));
      return;
    }

    auto& out = cls ? cls->members : unit_->globals;
    for (;;) {
      VarDecl v;
      v.type = t;
      v.name = std::move(name);
      v.pos = name_pos;
      v.is_extern = is_extern;
      v.is_const = is_const;
      if (accept("=")) v.init = assignment();
      out.push_back(std::move(v));
      if (!accept(",")) break;
      name_pos = cur().pos;
      name = expect_ident();
    }
    expect(";");
  }

  std::vector<Param> params() {
    std::vector<Param> out;
    expect("(");
    if (is("void") && ahead(1).text == ")") ++idx_;
    while (!is(")")) {
      accept("const");
      Param p;
      p.type = type();
      accept("const");
      p.pos = cur().pos;
      p.name = expect_ident();
      out.push_back(std::move(p));
      if (!accept(",")) break;
    }
    expect(")");
    return out;
  }

  // --- statements ---------------------------------------------------------

  Stmt block() {
    Stmt s;
    s.kind = Stmt::Kind::Block;
    s.pos = cur().pos;
    expect("{");
    while (!is("}")) {
      if (at_end()) fail("unterminated block");
      s.children.push_back(statement());
    }
    expect("}");
    return s;
  }

  Stmt local_decl() {
    Stmt s;
    s.kind = Stmt::Kind::Decl;
    s.pos = cur().pos;
    bool is_const = false;
    for (;;) {
      if (accept("const")) is_const = true;
      else if (accept("static")) continue;
      else break;
    }
    if (is("extern")) fail("extern declarations are only allowed at file scope");
    Type t = type();
    if (accept("const")) is_const = true;
    for (;;) {
      VarDecl v;
      v.type = t;
      v.is_const = is_const;
      v.pos = cur().pos;
      v.name = expect_ident();
      if (accept("=")) v.init = assignment();
      s.decls.push_back(std::move(v));
      if (!accept(",")) break;
    }
    expect(";");
    return s;
  }

  Stmt condition_stmt(Stmt::Kind kind) {
    Stmt s;
    s.kind = kind;
    s.pos = cur().pos;
    ++idx_;
    expect("(");
    s.expr = expr();
    expect(")");
    return s;
  }

  Stmt statement() {
    if (is("{")) return block();
    if (is("if")) {
      Stmt s = condition_stmt(Stmt::Kind::If);
      s.children.push_back(statement());
      if (accept("else")) s.children.push_back(statement());
      return s;
    }
    if (is("while")) {
      Stmt s = condition_stmt(Stmt::Kind::While);
      s.children.push_back(statement());
      return s;
    }
    if (is("for")) {
      Stmt s;
      s.kind = Stmt::Kind::For;
      s.pos = cur().pos;
      ++idx_;
      expect("(");
      if (!accept(";")) {
        if (starts_type()) {
          s.init.push_back(local_decl());
        } else {
          Stmt init;
          init.kind = Stmt::Kind::Expr;
          init.pos = cur().pos;
          init.expr = expr();
          expect(";");
          s.init.push_back(std::move(init));
        }
      }
      if (!is(";")) s.expr = expr();
      expect(";");
      if (!is(")")) s.step = expr();
      expect(")");
      s.children.push_back(statement());
      return s;
    }
    if (is("switch")) {
      Stmt s = condition_stmt(Stmt::Kind::Switch);
      expect("{");
      while (!is("}")) {
        if (!is("case") && !is("default")) fail("expected 'case' or 'default'");
        SwitchCase c;
        c.pos = cur().pos;
        while (is("case") || is("default")) {
          if (accept("default")) {
            c.is_default = true;
          } else {
            ++idx_;
            c.labels.push_back(expr());
          }
          expect(":");
        }
        while (!is("case") && !is("default") && !is("}")) {
          if (at_end()) fail("unterminated switch");
          c.body.push_back(statement());
        }
        s.cases.push_back(std::move(c));
      }
      expect("}");
      return s;
    }
    Stmt s;
    s.pos = cur().pos;
    if (accept("return")) {
      s.kind = Stmt::Kind::Return;
      if (!is(";")) s.expr = expr();
      expect(";");
      return s;
    }
    if (accept("break")) {
      s.kind = Stmt::Kind::Break;
      expect(";");
      return s;
    }
    if (accept("continue")) {
      s.kind = Stmt::Kind::Continue;
      expect(";");
      return s;
    }
    if (accept(";")) return s;
    if (starts_type()) return local_decl();
    s.kind = Stmt::Kind::Expr;
    s.expr = expr();
    expect(";");
    return s;
  }

  // --- expressions --------------------------------------------------------

  Expr expr() { return assignment(); }

  Expr assignment() {
    Expr lhs = binary(1);
    if (cur().kind == Token::Kind::Punct && kAssignOps.count(cur().text)) {
      Expr e;
      e.kind = Expr::Kind::Assign;
      e.pos = cur().pos;
      e.text = toks_[idx_++].text;
      if (lhs.kind != Expr::Kind::Ident)
        throw SourceError(path_, e.pos.line, e.pos.column, "assignment target must be a variable");
      e.args.push_back(std::move(lhs));
      e.args.push_back(assignment());
      return e;
    }
    return lhs;
  }

  Expr binary(int min_prec) {
    Expr lhs = unary();
    for (;;) {
      if (cur().kind != Token::Kind::Punct) return lhs;
      auto it = kBinaryPrecedence.find(cur().text);
      if (it == kBinaryPrecedence.end() || it->second < min_prec) return lhs;
      Expr e;
      e.kind = Expr::Kind::Binary;
      e.pos = cur().pos;
      e.text = toks_[idx_++].text;
      e.args.push_back(std::move(lhs));
      e.args.push_back(binary(it->second + 1));
      lhs = std::move(e);
    }
  }

  Expr unary() {
    if (is("!") || is("-") || is("+") || is("~")) {
      Expr e;
      e.kind = Expr::Kind::Unary;
      e.pos = cur().pos;
      e.text = toks_[idx_++].text;
      e.args.push_back(unary());
      return e;
    }
    if (is("++") || is("--")) {
      Expr e;
      e.kind = Expr::Kind::PreIncDec;
      e.pos = cur().pos;
      e.text = toks_[idx_++].text;
      Expr target = unary();
      if (target.kind != Expr::Kind::Ident)
        throw SourceError(path_, e.pos.line, e.pos.column, "increment target must be a variable");
      e.args.push_back(std::move(target));
      return e;
    }
    Expr e = primary();
    while (is("++") || is("--")) {
      Expr post;
      post.kind = Expr::Kind::PostIncDec;
      post.pos = cur().pos;
      post.text = toks_[idx_++].text;
      if (e.kind != Expr::Kind::Ident)
        throw SourceError(path_, post.pos.line, post.pos.column, "increment target must be a variable");
      post.args.push_back(std::move(e));
      e = std::move(post);
    }
    return e;
  }

  Expr primary() {
    Expr e;
    e.pos = cur().pos;
    if (accept("(")) {
      e = expr();
      expect(")");
      return e;
    }
    if (cur().kind == Token::Kind::Number) {
      e.kind = Expr::Kind::IntLit;
      e.text = toks_[idx_++].text;
      return e;
    }
    if (is("true") || is("false")) {
      e.kind = Expr::Kind::BoolLit;
      e.text = toks_[idx_++].text;
      return e;
    }
    e.text = expect_ident();
    if (accept("(")) {
      e.kind = Expr::Kind::Call;
      while (!is(")")) {
        e.args.push_back(assignment());
        if (!accept(",")) break;
      }
      expect(")");
      return e;
    }
    e.kind = Expr::Kind::Ident;
    return e;
  }

  std::vector<Token> toks_;
  std::size_t idx_ = 0;
  const std::string& path_;
  Unit* unit_ = nullptr;
  std::set<std::string, std::less<>> enum_names_;
};

// Binds every identifier of a unit. File-scope names are visible throughout
// the unit regardless of declaration order.
class Resolver {
 public:
  explicit Resolver(Unit& unit) : unit_(unit) {}

  void run() {
    for (const Enum& e : unit_.enums)
      for (const auto& lit : e.literals) declare_file(lit, Binding::Kind::EnumLiteral, e.pos);
    for (VarDecl& g : unit_.globals) {
      g.binding = Binding{Binding::Kind::Global, g.name, {}};
      declare_file(g.name, Binding::Kind::Global, g.pos);
    }
    for (const Function& f : unit_.functions) declare_file(f.name, Binding::Kind::Function, f.pos);

    for (VarDecl& g : unit_.globals)
      if (g.init) resolve(*g.init);
    for (Class& c : unit_.classes) {
      class_ = &c;
      for (VarDecl& m : c.members) m.binding = Binding{Binding::Kind::Member, m.name, c.name + "#" + m.name};
      for (VarDecl& m : c.members)
        if (m.init) resolve(*m.init);
      for (Function& f : c.methods) function(f);
      class_ = nullptr;
    }
    for (Function& f : unit_.functions) function(f);
  }

 private:
  void declare_file(const std::string& name, Binding::Kind kind, Pos pos) {
    auto [it, inserted] = file_scope_.emplace(name, kind);
    if (!inserted && it->second != kind)
      throw SourceError(unit_.path, pos.line, pos.column, "'" + name + "' redeclared as a different kind of entity");
  }

  void function(Function& f) {
    if (!f.body) return;
    qualifier_ = (class_ ? class_->name + "#" : std::string()) + f.name;
    params_.clear();
    for (const Param& p : f.params) {
      if (!params_.emplace(p.name, Binding{Binding::Kind::Param, p.name, qualifier_ + "#" + p.name}).second)
        throw SourceError(unit_.path, p.pos.line, p.pos.column, "duplicate parameter '" + p.name + "'");
    }
    locals_seen_.clear();
    blocks_.clear();
    statement(*f.body);
  }

  void statement(Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Block:
        blocks_.emplace_back();
        for (Stmt& c : s.children) statement(c);
        blocks_.pop_back();
        return;
      case Stmt::Kind::Decl:
        if (blocks_.empty()) blocks_.emplace_back();
        for (VarDecl& v : s.decls) {
          if (v.init) resolve(*v.init);
          std::string qualified = qualifier_ + "#" + v.name;
          if (!locals_seen_.insert(v.name).second)
            qualified += "@" + std::to_string(v.pos.line) + ":" + std::to_string(v.pos.column);
          v.binding = Binding{Binding::Kind::Local, v.name, qualified};
          blocks_.back()[v.name] = v.binding;
        }
        return;
      case Stmt::Kind::For:
        blocks_.emplace_back();
        for (Stmt& i : s.init) statement(i);
        if (s.expr) resolve(*s.expr);
        if (s.step) resolve(*s.step);
        for (Stmt& c : s.children) scoped(c);
        blocks_.pop_back();
        return;
      case Stmt::Kind::Switch:
        resolve(*s.expr);
        blocks_.emplace_back();
        for (SwitchCase& c : s.cases) {
          for (Expr& l : c.labels) resolve(l);
          for (Stmt& b : c.body) statement(b);
        }
        blocks_.pop_back();
        return;
      default:
        if (s.expr) resolve(*s.expr);
        for (Stmt& c : s.children) scoped(c);
        return;
    }
  }

  // A non-block branch body still gets its own scope.
  void scoped(Stmt& s) {
    blocks_.emplace_back();
    statement(s);
    blocks_.pop_back();
  }

  void resolve(Expr& e) {
    if (e.kind == Expr::Kind::Ident) {
      e.binding = lookup_variable(e.text, e.pos);
    } else if (e.kind == Expr::Kind::Call) {
      e.binding = lookup_function(e.text, e.pos);
    }
    for (Expr& a : e.args) resolve(a);
  }

  Binding lookup_variable(const std::string& name, Pos pos) const {
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it)
      if (auto b = it->find(name); b != it->end()) return b->second;
    if (auto p = params_.find(name); p != params_.end()) return p->second;
    if (class_)
      for (const VarDecl& m : class_->members)
        if (m.name == name) return m.binding;
    if (auto f = file_scope_.find(name); f != file_scope_.end()) {
      if (f->second == Binding::Kind::Global || f->second == Binding::Kind::EnumLiteral)
        return Binding{f->second, name, {}};
    }
    throw SourceError(unit_.path, pos.line, pos.column, "unresolved identifier '" + name + "'");
  }

  Binding lookup_function(const std::string& name, Pos pos) const {
    if (class_)
      for (const Function& m : class_->methods)
        if (m.name == name) return Binding{Binding::Kind::Method, name, class_->name + "#" + name};
    if (auto f = file_scope_.find(name); f != file_scope_.end() && f->second == Binding::Kind::Function)
      return Binding{Binding::Kind::Function, name, {}};
    throw SourceError(unit_.path, pos.line, pos.column, "call to undeclared function '" + name + "'");
  }

  Unit& unit_;
  std::map<std::string, Binding::Kind> file_scope_;
  const Class* class_ = nullptr;
  std::string qualifier_;
  std::map<std::string, Binding> params_;
  std::vector<std::map<std::string, Binding>> blocks_;
  std::set<std::string> locals_seen_;
};

}  // namespace

ast::Unit parse_mini_c(std::string_view text, const std::string& path) {
  Parser parser(Lexer(text, path).run(), path);
  ast::Unit unit = parser.parse_unit();
  Resolver(unit).run();
  return unit;
}

std::vector<ast::Unit> parse_source_tree(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw Error("source directory " + root.string() + " does not exist");
  static const std::set<std::string> exts = {".c", ".cc", ".cpp", ".h", ".hpp"};
  std::vector<std::pair<std::string, fs::path>> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file() || !exts.count(entry.path().extension().string())) continue;
    files.emplace_back(fs::relative(entry.path(), root).generic_string(), entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ast::Unit> units;
  for (const auto& [rel, path] : files) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    units.push_back(parse_mini_c(buf.str(), rel));
  }
  return units;
}

}  // namespace liftdl::extract
