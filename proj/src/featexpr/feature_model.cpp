#include "liftdl/featexpr/feature_model.hpp"

#include <fstream>
#include <sstream>

#include "liftdl/common/error.hpp"

namespace liftdl::featexpr {

FeatureModel::FeatureModel(std::vector<FeatureExpr> constraints, PcStore& store)
    : constraints_(std::move(constraints)) {
  for (const FeatureExpr& c : constraints_) compiled_ = store.pc_and(compiled_, store.to_pc(c));
  if (compiled_.is_false()) throw Error("feature model is unsatisfiable");
}

FeatureModel FeatureModel::parse(std::string_view text, PcStore& store, const std::string& origin) {
  std::vector<FeatureExpr> constraints;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      try {
        constraints.push_back(parse_feature_expr(line, store.features()));
      } catch (const SyntaxError& e) {
        throw SourceError(origin, line_no, e.offset() + 1, e.what());
      } catch (const UnknownFeatureError& e) {
        throw SourceError(origin, line_no, e.offset() + 1, e.what());
      }
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return FeatureModel(std::move(constraints), store);
}

FeatureModel FeatureModel::load(const std::filesystem::path& path, PcStore& store) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open feature model " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), store, path.string());
}

std::string_view op_tag(CompareOp op) {
  switch (op) {
    case CompareOp::Lt:
      return "LT";
    case CompareOp::Le:
      return "LE";
    case CompareOp::Gt:
      return "GT";
    case CompareOp::Ge:
      return "GE";
    case CompareOp::Eq:
      return "EQ";
    case CompareOp::Ne:
      return "NE";
  }
  return "";
}

CompareOp mirror(CompareOp op) {
  switch (op) {
    case CompareOp::Lt:
      return CompareOp::Gt;
    case CompareOp::Le:
      return CompareOp::Ge;
    case CompareOp::Gt:
      return CompareOp::Lt;
    case CompareOp::Ge:
      return CompareOp::Le;
    default:
      return op;
  }
}

FeatureId abstract_comparison(std::string_view lhs, CompareOp op, std::string_view rhs,
                              FeatureRegistry& registry) {
  std::string name;
  name.reserve(lhs.size() + rhs.size() + 4);
  name.append(lhs).append("_").append(op_tag(op)).append("_").append(rhs);
  return registry.intern(name, FeatureOrigin::AbstractedComparison);
}

std::vector<FeatureExpr> enum_group_constraints(std::span<const FeatureId> members, bool mandatory) {
  if (members.size() < 2) throw Error("an enum group needs at least two members");
  std::vector<FeatureExpr> out;
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j)
      out.push_back(FeatureExpr::negate(
          FeatureExpr::conj(FeatureExpr::var(members[i]), FeatureExpr::var(members[j]))));
  if (mandatory) {
    FeatureExpr any = FeatureExpr::var(members[0]);
    for (std::size_t i = 1; i < members.size(); ++i)
      any = FeatureExpr::disj(std::move(any), FeatureExpr::var(members[i]));
    out.push_back(std::move(any));
  }
  return out;
}

}  // namespace liftdl::featexpr
