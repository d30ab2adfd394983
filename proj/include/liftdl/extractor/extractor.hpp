#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "liftdl/extractor/fact_graph.hpp"
#include "liftdl/extractor/minic_ast.hpp"
#include "liftdl/featexpr/pc_store.hpp"

namespace liftdl::extract {

/// Which globals are feature variables, and which files form which component.
struct ExtractionConfig {
  /// ECMAScript pattern searched in global variable names.
  std::string feature_regex = "^F[A-Z0-9_]*$";
  /// `bool` globals declared `const` or `extern` (calibration constants).
  bool const_bool_globals = true;
  /// `enum`-typed globals declared `const` or `extern`.
  bool enum_globals = true;
  /// (glob over unit paths, component name); the first matching glob wins.
  std::vector<std::pair<std::string, std::string>> components;

  /// INI text:
  ///
  ///     [features]
  ///     regex = ^F[A-Z]$
  ///     types = const-bool-global, enum-global
  ///     [components]
  ///     c1/* = C1
  static ExtractionConfig parse(const std::string& text);
  static ExtractionConfig load(const std::filesystem::path& path);

  std::optional<std::string> component_for(const std::string& unit_path) const;
};

/// Feature variables found in a set of units.
struct FeatureVariables {
  /// Boolean feature variable name → feature.
  std::map<std::string, featexpr::FeatureId> booleans;
  /// Enum feature variable name → its enum's literals.
  std::map<std::string, std::vector<std::string>> enums;

  bool empty() const { return booleans.empty() && enums.empty(); }
  bool contains(const std::string& name) const { return booleans.count(name) || enums.count(name); }
};

/// Registers the feature variables of `units` in `registry`, in declaration
/// order. Boolean variables become features under their own name; for enum
/// variables every literal of the enum is registered, and comparisons are
/// abstracted to `<var>_<OP>_<literal>` features when met during extraction.
FeatureVariables recognize_features(std::span<const ast::Unit> units, const ExtractionConfig& cfg,
                                    featexpr::FeatureRegistry& registry);

/// Presence condition in force on one source line (OR over the statements
/// starting on it).
struct LineContext {
  std::string file;
  std::uint32_t line;
  featexpr::PresenceCondition pc;
};

struct Extraction {
  FactGraph graph;
  FeatureVariables features;
  std::vector<LineContext> lines;

  std::optional<featexpr::PresenceCondition> line_pc(const std::string& file, std::uint32_t line) const;
};

/// Builds the variability-annotated fact graph of `units`.
///
/// Node ids are `<file>#<container>…#<name>`; externs link to a definition of
/// the same name in another unit, or become a node of the first declaring
/// unit. Facts created under feature-guarded control flow carry a `PC`
/// attribute holding the conjunction of the guards; facts whose guards are
/// contradictory are not emitted, and equal facts from several places get
/// the disjunction of their conditions.
Extraction extract(std::span<const ast::Unit> units, const ExtractionConfig& cfg, featexpr::PcStore& store);

}  // namespace liftdl::extract
