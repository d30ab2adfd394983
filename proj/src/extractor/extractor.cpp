#include "liftdl/extractor/extractor.hpp"

#include <fnmatch.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "liftdl/common/error.hpp"
#include "liftdl/featexpr/feature_model.hpp"

namespace liftdl::extract {

using featexpr::PcStore;
using featexpr::PresenceCondition;
using namespace ast;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ExtractionConfig ExtractionConfig::parse(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error("extraction config: " + std::string(e.what()));
  }
  ExtractionConfig cfg;
  if (auto features = tree.get_child_optional("features")) {
    for (const auto& [key, value] : *features) {
      const std::string v = trim(value.data());
      if (key == "regex") {
        cfg.feature_regex = v;
      } else if (key == "types") {
        cfg.const_bool_globals = false;
        cfg.enum_globals = false;
        std::istringstream list(v);
        std::string item;
        while (std::getline(list, item, ',')) {
          item = trim(item);
          if (item == "const-bool-global")
            cfg.const_bool_globals = true;
          else if (item == "enum-global")
            cfg.enum_globals = true;
          else if (!item.empty())
            throw Error("extraction config: unknown feature type '" + item + "'");
        }
      } else {
        throw Error("extraction config: unknown key '" + key + "' in [features]");
      }
    }
  }
  if (auto components = tree.get_child_optional("components"))
    for (const auto& [glob, name] : *components) cfg.components.emplace_back(trim(glob), trim(name.data()));
  try {
    std::regex check(cfg.feature_regex);
  } catch (const std::regex_error& e) {
    throw Error("extraction config: bad feature regex '" + cfg.feature_regex + "': " + e.what());
  }
  return cfg;
}

ExtractionConfig ExtractionConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open extraction config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<std::string> ExtractionConfig::component_for(const std::string& unit_path) const {
  for (const auto& [glob, name] : components)
    if (::fnmatch(glob.c_str(), unit_path.c_str(), 0) == 0) return name;
  return std::nullopt;
}

FeatureVariables recognize_features(std::span<const Unit> units, const ExtractionConfig& cfg,
                                    featexpr::FeatureRegistry& registry) {
  const std::regex pattern(cfg.feature_regex);
  FeatureVariables out;
  for (const Unit& unit : units) {
    for (const VarDecl& g : unit.globals) {
      if (!(g.is_const || g.is_extern) || !std::regex_search(g.name, pattern)) continue;
      if (g.type.base == Type::Base::Bool && cfg.const_bool_globals) {
        if (!out.booleans.count(g.name)) out.booleans.emplace(g.name, registry.intern(g.name));
      } else if (g.type.base == Type::Base::Enum && cfg.enum_globals && !out.enums.count(g.name)) {
        const Enum* e = unit.find_enum(g.type.enum_name);
        if (!e) continue;
        for (const auto& lit : e->literals) registry.intern(lit, featexpr::FeatureOrigin::EnumLiteral);
        out.enums.emplace(g.name, e->literals);
      }
    }
  }
  return out;
}

std::optional<PresenceCondition> Extraction::line_pc(const std::string& file, std::uint32_t line) const {
  for (const LineContext& c : lines)
    if (c.file == file && c.line == line) return c.pc;
  return std::nullopt;
}

namespace {

struct FunctionInfo {
  std::string id;
  std::string file;
  std::vector<std::string> params;  // parameter node ids, empty when unknown
};

class Extractor {
 public:
  Extractor(std::span<const Unit> units, const ExtractionConfig& cfg, PcStore& store)
      : units_(units), cfg_(cfg), store_(store) {}

  Extraction run() {
    Extraction result;
    result.features = recognize_features(units_, cfg_, store_.features());
    features_ = &result.features;
    link();
    for (const Unit& u : units_) unit(u);
    result.graph = finish();
    for (const auto& [key, pc] : lines_) result.lines.push_back(LineContext{key.first, key.second, pc});
    return result;
  }

 private:
  // --- cross-unit linking ---------------------------------------------------

  void link() {
    for (const Unit& u : units_) {
      for (const VarDecl& g : u.globals) {
        if (g.is_extern || features_->contains(g.name)) continue;
        auto [it, inserted] = globals_.emplace(g.name, u.path + "#" + g.name);
        if (!inserted) throw SourceError(u.path, g.pos.line, g.pos.column, "global '" + g.name + "' defined twice");
        owned_globals_.insert(it->second);
      }
      for (const Function& f : u.functions) {
        if (!f.body) continue;
        FunctionInfo info{u.path + "#" + f.name, u.path, {}};
        for (const Param& p : f.params) info.params.push_back(info.id + "#" + p.name);
        if (!functions_.emplace(f.name, info).second)
          throw SourceError(u.path, f.pos.line, f.pos.column, "function '" + f.name + "' defined twice");
      }
    }
    // Declarations without a definition anywhere belong to their first declaring unit.
    for (const Unit& u : units_) {
      for (const VarDecl& g : u.globals)
        if (g.is_extern && !features_->contains(g.name) && !globals_.count(g.name)) {
          globals_.emplace(g.name, u.path + "#" + g.name);
          external_globals_.emplace(u.path, g.name);
        }
      for (const Function& f : u.functions)
        if (!f.body && !functions_.count(f.name)) {
          functions_.emplace(f.name, FunctionInfo{u.path + "#" + f.name, u.path, {}});
          external_functions_.emplace(u.path, f.name);
        }
    }
  }

  // --- emission -------------------------------------------------------------

  void node(const std::string& id, std::string_view type, PresenceCondition pc) {
    if (pc.is_false()) return;
    auto [it, inserted] = nodes_.try_emplace(id, std::string(type), pc);
    if (!inserted) {
      if (it->second.first != type) throw Error("node id collision on '" + id + "'");
      it->second.second = store_.pc_or(it->second.second, pc);
    }
  }

  void edge(std::string_view type, const std::string& src, const std::string& dst, PresenceCondition pc) {
    if (pc.is_false()) return;
    Edge e{std::string(type), src, dst};
    auto [it, inserted] = edges_.try_emplace(std::move(e), pc);
    if (!inserted) it->second = store_.pc_or(it->second, pc);
  }

  FactGraph finish() {
    FactGraph g;
    for (const auto& [id, info] : nodes_) {
      g.add_node(id, info.first);
      if (!info.second.is_true()) g.set_attribute(id, kPcAttribute, store_.render(info.second));
    }
    for (const auto& [e, pc] : edges_) {
      g.add_edge(e);
      if (!pc.is_true()) g.set_attribute(e, kPcAttribute, store_.render(pc));
    }
    return g;
  }

  void record_line(Pos pos) {
    if (pos.line == 0) return;
    auto key = std::make_pair(unit_->path, pos.line);
    auto [it, inserted] = lines_.try_emplace(key, ctx_);
    if (!inserted) it->second = store_.pc_or(it->second, ctx_);
  }

  // --- units ----------------------------------------------------------------

  void unit(const Unit& u) {
    unit_ = &u;
    ctx_ = PresenceCondition::True();
    const std::string file = u.path;
    node(file, node_kind::kFile, ctx_);
    component_ = cfg_.component_for(u.path);
    if (component_) {
      node(*component_, node_kind::kComponent, ctx_);
      edge(edge_kind::kContain, *component_, file, ctx_);
    }

    for (const VarDecl& g : u.globals) {
      record_line(g.pos);
      if (g.is_extern || features_->contains(g.name)) continue;
      const std::string& id = globals_.at(g.name);
      node(id, node_kind::kVariable, ctx_);
      edge(edge_kind::kContain, file, id, ctx_);
      if (g.init) flow_into(id, *g.init);
    }
    for (auto [it, end] = external_globals_.equal_range(u.path); it != end; ++it) {
      const std::string& id = globals_.at(it->second);
      node(id, node_kind::kVariable, ctx_);
      edge(edge_kind::kContain, file, id, ctx_);
    }
    for (auto [it, end] = external_functions_.equal_range(u.path); it != end; ++it) {
      const FunctionInfo& f = functions_.at(it->second);
      declare_function(f.id, file);
    }

    for (const Class& c : u.classes) {
      class_ = &c;
      const std::string cid = file + "#" + c.name;
      node(cid, node_kind::kClass, ctx_);
      edge(edge_kind::kContain, file, cid, ctx_);
      for (const VarDecl& m : c.members) {
        record_line(m.pos);
        const std::string mid = file + "#" + m.binding.qualified;
        node(mid, node_kind::kVariable, ctx_);
        edge(edge_kind::kContain, cid, mid, ctx_);
        if (m.init) flow_into(mid, *m.init);
      }
      for (const Function& f : c.methods) {
        const std::string fid = cid + "#" + f.name;
        if (f.body) function(f, fid, cid);
      }
      class_ = nullptr;
    }
    for (const Function& f : u.functions)
      if (f.body) function(f, functions_.at(f.name).id, file);
  }

  void declare_function(const std::string& id, const std::string& parent) {
    node(id, node_kind::kFunction, PresenceCondition::True());
    edge(edge_kind::kContain, parent, id, PresenceCondition::True());
    if (component_) edge(edge_kind::kCFunction, id, *component_, PresenceCondition::True());
  }

  void function(const Function& f, const std::string& id, const std::string& parent) {
    record_line(f.pos);
    declare_function(id, parent);
    function_ = id;
    for (const Param& p : f.params) {
      const std::string pid = id + "#" + p.name;
      node(pid, node_kind::kVariable, ctx_);
      edge(edge_kind::kContain, id, pid, ctx_);
    }
    statement(*f.body);
    function_.clear();
  }

  // --- statements -------------------------------------------------------------

  struct ContextGuard {
    Extractor& self;
    PresenceCondition saved;
    ContextGuard(Extractor& s, std::optional<PresenceCondition> push) : self(s), saved(s.ctx_) {
      if (push) self.ctx_ = self.store_.pc_and(self.ctx_, *push);
    }
    ~ContextGuard() { self.ctx_ = saved; }
  };

  struct GuardScope {
    Extractor& self;
    GuardScope(Extractor& s, std::set<std::string> vars) : self(s) { self.guards_.push_back(std::move(vars)); }
    ~GuardScope() { self.guards_.pop_back(); }
  };

  void statement(const Stmt& s) {
    if (s.kind != Stmt::Kind::Block) record_line(s.pos);
    switch (s.kind) {
      case Stmt::Kind::Block:
        for (const Stmt& c : s.children) statement(c);
        break;
      case Stmt::Kind::Decl:
        for (const VarDecl& v : s.decls) {
          const std::string id = unit_->path + "#" + v.binding.qualified;
          node(id, node_kind::kVariable, ctx_);
          edge(edge_kind::kContain, function_, id, ctx_);
          if (v.init) {
            assign(id, *v.init, false);
            effects(*v.init);
          }
        }
        break;
      case Stmt::Kind::Expr:
      case Stmt::Kind::Return:
        if (s.expr) effects(*s.expr);
        break;
      case Stmt::Kind::If: {
        effects(*s.expr);
        const auto cond = feature_condition(*s.expr);
        GuardScope guard(*this, variables(*s.expr));
        {
          ContextGuard then(*this, cond);
          statement(s.children[0]);
        }
        if (s.children.size() > 1) {
          ContextGuard otherwise(*this, cond ? std::optional(store_.pc_not(*cond)) : std::nullopt);
          statement(s.children[1]);
        }
        break;
      }
      case Stmt::Kind::While: {
        effects(*s.expr);
        const auto cond = feature_condition(*s.expr);
        GuardScope guard(*this, variables(*s.expr));
        ContextGuard body(*this, cond);
        statement(s.children[0]);
        break;
      }
      case Stmt::Kind::For: {
        for (const Stmt& i : s.init) statement(i);
        std::optional<PresenceCondition> cond;
        std::set<std::string> vars;
        if (s.expr) {
          effects(*s.expr);
          cond = feature_condition(*s.expr);
          vars = variables(*s.expr);
        }
        GuardScope guard(*this, std::move(vars));
        ContextGuard body(*this, cond);
        statement(s.children[0]);
        if (s.step) effects(*s.step);
        break;
      }
      case Stmt::Kind::Switch:
        switch_statement(s);
        break;
      case Stmt::Kind::Break:
      case Stmt::Kind::Continue:
      case Stmt::Kind::Empty:
        break;
    }
  }

  static bool ends_case(const std::vector<Stmt>& body) {
    if (body.empty()) return false;
    const Stmt& last = body.back();
    return last.kind == Stmt::Kind::Break || last.kind == Stmt::Kind::Return || last.kind == Stmt::Kind::Continue;
  }

  void switch_statement(const Stmt& s) {
    effects(*s.expr);
    const Expr& subject = *s.expr;
    const bool over_feature = subject.kind == Expr::Kind::Ident && subject.binding.kind == Binding::Kind::Global &&
                              features_->enums.count(subject.text);
    GuardScope guard(*this, variables(subject));
    if (!over_feature) {
      for (const SwitchCase& c : s.cases)
        for (const Stmt& b : c.body) statement(b);
      return;
    }

    // Each case runs under the disjunction of its labels' abstracted
    // equalities, plus whatever falls through from the previous case.
    std::vector<PresenceCondition> own;
    PresenceCondition any_label = PresenceCondition::False();
    for (const SwitchCase& c : s.cases) {
      PresenceCondition pc = PresenceCondition::False();
      for (const Expr& l : c.labels) {
        const PresenceCondition eq = comparison(subject, featexpr::CompareOp::Eq, l)
                                         .value_or(PresenceCondition::True());
        pc = store_.pc_or(pc, eq);
      }
      own.push_back(pc);
      any_label = store_.pc_or(any_label, pc);
    }
    PresenceCondition carried = PresenceCondition::False();
    for (std::size_t i = 0; i < s.cases.size(); ++i) {
      const SwitchCase& c = s.cases[i];
      PresenceCondition entry = store_.pc_or(carried, own[i]);
      if (c.is_default) entry = store_.pc_or(entry, store_.pc_not(any_label));
      {
        ContextGuard body(*this, entry);
        for (const Stmt& b : c.body) statement(b);
      }
      carried = ends_case(c.body) ? PresenceCondition::False() : entry;
    }
  }

  // --- expressions -------------------------------------------------------------

  bool is_feature(const Expr& e) const {
    return e.kind == Expr::Kind::Ident && e.binding.kind == Binding::Kind::Global && features_->contains(e.text);
  }

  /// Node id of a variable reference, or nothing for features and literals.
  std::optional<std::string> variable_id(const Binding& b) const {
    switch (b.kind) {
      case Binding::Kind::Global:
        if (features_->contains(b.name)) return std::nullopt;
        return globals_.at(b.name);
      case Binding::Kind::Member:
      case Binding::Kind::Param:
      case Binding::Kind::Local:
        return unit_->path + "#" + b.qualified;
      default:
        return std::nullopt;
    }
  }

  std::set<std::string> variables(const Expr& e) const {
    std::set<std::string> out;
    collect(e, out);
    return out;
  }

  void collect(const Expr& e, std::set<std::string>& out) const {
    if (e.kind == Expr::Kind::Ident)
      if (auto id = variable_id(e.binding)) out.insert(*id);
    for (const Expr& a : e.args) collect(a, out);
  }

  std::optional<FunctionInfo> callee(const Expr& call) const {
    if (call.binding.kind == Binding::Kind::Method) {
      const std::string id = unit_->path + "#" + call.binding.qualified;
      FunctionInfo info{id, unit_->path, {}};
      for (const Function& m : class_->methods)
        if (m.name == call.binding.name)
          for (const Param& p : m.params) info.params.push_back(id + "#" + p.name);
      return info;
    }
    if (auto it = functions_.find(call.binding.name); it != functions_.end()) return it->second;
    return std::nullopt;
  }

  void assign(const std::string& target, const Expr& rhs, bool compound) {
    if (!function_.empty()) edge(edge_kind::kWrite, function_, target, ctx_);
    flow_into(target, rhs);
    if (compound) edge(edge_kind::kVarWrite, target, target, ctx_);
  }

  void flow_into(const std::string& target, const Expr& rhs) {
    for (const std::string& src : variables(rhs)) edge(edge_kind::kVarWrite, src, target, ctx_);
  }

  void effects(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Assign:
        if (auto target = variable_id(e.args[0].binding)) assign(*target, e.args[1], e.text != "=");
        effects(e.args[1]);
        return;
      case Expr::Kind::PreIncDec:
      case Expr::Kind::PostIncDec:
        if (auto target = variable_id(e.args[0].binding)) {
          if (!function_.empty()) edge(edge_kind::kWrite, function_, *target, ctx_);
          edge(edge_kind::kVarWrite, *target, *target, ctx_);
        }
        return;
      case Expr::Kind::Call:
        if (auto g = callee(e)) {
          if (!function_.empty()) edge(edge_kind::kCall, function_, g->id, ctx_);
          for (const auto& vars : guards_)
            for (const std::string& v : vars) edge(edge_kind::kVarInfFunc, v, g->id, ctx_);
          for (std::size_t i = 0; i < e.args.size() && i < g->params.size(); ++i)
            flow_into(g->params[i], e.args[i]);
        }
        for (const Expr& a : e.args) effects(a);
        return;
      default:
        for (const Expr& a : e.args) effects(a);
        return;
    }
  }

  /// PC of a condition built only from feature variables and literals that
  /// mentions at least one feature; nothing otherwise.
  std::optional<PresenceCondition> feature_condition(const Expr& e) {
    bool mentions = false;
    auto pc = pure(e, mentions);
    if (!pc || !mentions) return std::nullopt;
    return pc;
  }

  static std::optional<bool> literal_truth(const Expr& e) {
    if (e.kind == Expr::Kind::BoolLit) return e.text == "true";
    if (e.kind == Expr::Kind::IntLit) {
      try {
        return std::stoll(e.text, nullptr, 0) != 0;
      } catch (const std::exception&) {
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  std::optional<PresenceCondition> pure(const Expr& e, bool& mentions) {
    switch (e.kind) {
      case Expr::Kind::BoolLit:
      case Expr::Kind::IntLit:
        if (auto v = literal_truth(e)) return *v ? PresenceCondition::True() : PresenceCondition::False();
        return std::nullopt;
      case Expr::Kind::Ident:
        if (is_feature(e) && features_->booleans.count(e.text)) {
          mentions = true;
          return store_.var(features_->booleans.at(e.text));
        }
        return std::nullopt;
      case Expr::Kind::Unary:
        if (e.text != "!") return std::nullopt;
        if (auto inner = pure(e.args[0], mentions)) return store_.pc_not(*inner);
        return std::nullopt;
      case Expr::Kind::Binary: {
        if (e.text == "&&" || e.text == "||") {
          auto lhs = pure(e.args[0], mentions);
          if (!lhs) return std::nullopt;
          auto rhs = pure(e.args[1], mentions);
          if (!rhs) return std::nullopt;
          return e.text == "&&" ? store_.pc_and(*lhs, *rhs) : store_.pc_or(*lhs, *rhs);
        }
        auto op = compare_op(e.text);
        if (!op) return std::nullopt;
        const Expr& lhs = e.args[0];
        const Expr& rhs = e.args[1];
        if (is_feature(lhs) && features_->enums.count(lhs.text)) {
          mentions = true;
          return comparison(lhs, *op, rhs);
        }
        if (is_feature(rhs) && features_->enums.count(rhs.text)) {
          mentions = true;
          return comparison(rhs, featexpr::mirror(*op), lhs);
        }
        // Boolean feature compared against a literal.
        const Expr* feat = is_feature(lhs) ? &lhs : is_feature(rhs) ? &rhs : nullptr;
        const Expr& other = feat == &lhs ? rhs : lhs;
        auto lit = literal_truth(other);
        if (!feat || !lit || (*op != featexpr::CompareOp::Eq && *op != featexpr::CompareOp::Ne)) return std::nullopt;
        mentions = true;
        PresenceCondition v = store_.var(features_->booleans.at(feat->text));
        const bool positive = (*op == featexpr::CompareOp::Eq) == *lit;
        return positive ? v : store_.pc_not(v);
      }
      default:
        return std::nullopt;
    }
  }

  static std::optional<featexpr::CompareOp> compare_op(const std::string& text) {
    using featexpr::CompareOp;
    if (text == "<") return CompareOp::Lt;
    if (text == "<=") return CompareOp::Le;
    if (text == ">") return CompareOp::Gt;
    if (text == ">=") return CompareOp::Ge;
    if (text == "==") return CompareOp::Eq;
    if (text == "!=") return CompareOp::Ne;
    return std::nullopt;
  }

  /// `var op operand` for an enum feature variable, when the operand is an
  /// enum literal or an integer constant.
  std::optional<PresenceCondition> comparison(const Expr& var, featexpr::CompareOp op, const Expr& operand) {
    const bool literal = (operand.kind == Expr::Kind::Ident && operand.binding.kind == Binding::Kind::EnumLiteral) ||
                         operand.kind == Expr::Kind::IntLit;
    if (!literal) return std::nullopt;
    return store_.var(featexpr::abstract_comparison(var.text, op, operand.text, store_.features()));
  }

  std::span<const Unit> units_;
  const ExtractionConfig& cfg_;
  PcStore& store_;
  const FeatureVariables* features_ = nullptr;

  std::map<std::string, std::string> globals_;  // name → node id
  std::set<std::string> owned_globals_;
  std::multimap<std::string, std::string> external_globals_;    // unit path → name
  std::multimap<std::string, std::string> external_functions_;  // unit path → name
  std::map<std::string, FunctionInfo> functions_;               // free functions by name

  std::map<std::string, std::pair<std::string, PresenceCondition>> nodes_;
  std::map<Edge, PresenceCondition> edges_;
  std::map<std::pair<std::string, std::uint32_t>, PresenceCondition> lines_;

  const Unit* unit_ = nullptr;
  const Class* class_ = nullptr;
  std::optional<std::string> component_;
  std::string function_;
  PresenceCondition ctx_ = PresenceCondition::True();
  std::vector<std::set<std::string>> guards_;
};

}  // namespace

Extraction extract(std::span<const Unit> units, const ExtractionConfig& cfg, PcStore& store) {
  return Extractor(units, cfg, store).run();
}

}  // namespace liftdl::extract
