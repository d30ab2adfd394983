#include "liftdl/featexpr/feature_expr.hpp"

#include <cctype>

#include "liftdl/common/error.hpp"

namespace liftdl::featexpr {

FeatureExpr FeatureExpr::var(FeatureId id) {
  FeatureExpr e(Kind::Var);
  e.feature_ = id;
  return e;
}

FeatureExpr FeatureExpr::negate(FeatureExpr operand) {
  FeatureExpr e(Kind::Not);
  e.lhs_ = std::make_shared<const FeatureExpr>(std::move(operand));
  return e;
}

FeatureExpr FeatureExpr::conj(FeatureExpr lhs, FeatureExpr rhs) {
  FeatureExpr e(Kind::And);
  e.lhs_ = std::make_shared<const FeatureExpr>(std::move(lhs));
  e.rhs_ = std::make_shared<const FeatureExpr>(std::move(rhs));
  return e;
}

FeatureExpr FeatureExpr::disj(FeatureExpr lhs, FeatureExpr rhs) {
  FeatureExpr e(Kind::Or);
  e.lhs_ = std::make_shared<const FeatureExpr>(std::move(lhs));
  e.rhs_ = std::make_shared<const FeatureExpr>(std::move(rhs));
  return e;
}

bool operator==(const FeatureExpr& a, const FeatureExpr& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case FeatureExpr::Kind::True:
    case FeatureExpr::Kind::False:
      return true;
    case FeatureExpr::Kind::Var:
      return a.feature_ == b.feature_;
    case FeatureExpr::Kind::Not:
      return *a.lhs_ == *b.lhs_;
    case FeatureExpr::Kind::And:
    case FeatureExpr::Kind::Or:
      return *a.lhs_ == *b.lhs_ && *a.rhs_ == *b.rhs_;
  }
  return false;
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, FeatureRegistry& registry) : text_(text), registry_(registry) {}

  FeatureExpr parse() {
    FeatureExpr e = expr();
    skip_space();
    if (pos_ != text_.size()) throw SyntaxError("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  // Consumes `op` or its doubled synonym.
  bool accept_binary(char op) {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != op) return false;
    ++pos_;
    if (pos_ < text_.size() && text_[pos_] == op) ++pos_;
    return true;
  }

  FeatureExpr expr() {
    FeatureExpr e = term();
    while (accept_binary('|')) e = FeatureExpr::disj(std::move(e), term());
    return e;
  }

  FeatureExpr term() {
    FeatureExpr e = factor();
    while (accept_binary('&')) e = FeatureExpr::conj(std::move(e), factor());
    return e;
  }

  FeatureExpr factor() {
    skip_space();
    if (pos_ >= text_.size()) throw SyntaxError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (c == '!') {
      ++pos_;
      return FeatureExpr::negate(factor());
    }
    if (c == '(') {
      ++pos_;
      FeatureExpr e = expr();
      skip_space();
      if (pos_ >= text_.size() || text_[pos_] != ')') throw SyntaxError("expected ')'", pos_);
      ++pos_;
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string_view ident = text_.substr(start, pos_ - start);
      if (ident == "true") return FeatureExpr::constant(true);
      if (ident == "false") return FeatureExpr::constant(false);
      if (auto id = registry_.find(ident)) return FeatureExpr::var(*id);
      if (registry_.closed()) throw UnknownFeatureError(std::string(ident), start);
      return FeatureExpr::var(registry_.intern(ident));
    }
    throw SyntaxError("unexpected '" + std::string(1, c) + "'", pos_);
  }

  std::string_view text_;
  FeatureRegistry& registry_;
  std::size_t pos_ = 0;
};

int precedence(FeatureExpr::Kind kind) {
  switch (kind) {
    case FeatureExpr::Kind::Or:
      return 1;
    case FeatureExpr::Kind::And:
      return 2;
    default:
      return 3;
  }
}

void render(const FeatureExpr& e, const FeatureRegistry& registry, int context, std::string& out) {
  const int prec = precedence(e.kind());
  const bool parens = prec < context;
  if (parens) out += '(';
  switch (e.kind()) {
    case FeatureExpr::Kind::True:
      out += "true";
      break;
    case FeatureExpr::Kind::False:
      out += "false";
      break;
    case FeatureExpr::Kind::Var:
      out += registry.name(e.feature());
      break;
    case FeatureExpr::Kind::Not:
      out += '!';
      render(e.lhs(), registry, 3, out);
      break;
    case FeatureExpr::Kind::And:
      render(e.lhs(), registry, 2, out);
      out += " & ";
      render(e.rhs(), registry, 3, out);
      break;
    case FeatureExpr::Kind::Or:
      render(e.lhs(), registry, 1, out);
      out += " | ";
      render(e.rhs(), registry, 2, out);
      break;
  }
  if (parens) out += ')';
}

}  // namespace

FeatureExpr parse_feature_expr(std::string_view text, FeatureRegistry& registry) {
  return Parser(text, registry).parse();
}

std::string to_string(const FeatureExpr& expr, const FeatureRegistry& registry) {
  std::string out;
  render(expr, registry, 0, out);
  return out;
}

bool evaluate(const FeatureExpr& expr, const Configuration& rho) {
  switch (expr.kind()) {
    case FeatureExpr::Kind::True:
      return true;
    case FeatureExpr::Kind::False:
      return false;
    case FeatureExpr::Kind::Var:
      return rho.present(expr.feature());
    case FeatureExpr::Kind::Not:
      return !evaluate(expr.lhs(), rho);
    case FeatureExpr::Kind::And:
      return evaluate(expr.lhs(), rho) && evaluate(expr.rhs(), rho);
    case FeatureExpr::Kind::Or:
      return evaluate(expr.lhs(), rho) || evaluate(expr.rhs(), rho);
  }
  return false;
}

}  // namespace liftdl::featexpr
