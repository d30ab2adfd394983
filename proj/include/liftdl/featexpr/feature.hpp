#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace liftdl::featexpr {

/// Index of a feature in its registry. Doubles as the decision-diagram
/// variable level: features are ordered by first registration.
using FeatureId = std::uint32_t;

enum class FeatureOrigin { DeclaredBoolean, EnumLiteral, AbstractedComparison };

struct Feature {
  std::string name;
  FeatureOrigin origin = FeatureOrigin::DeclaredBoolean;
};

/// Names of the features of one analysis run, in registration order.
///
/// An open registry auto-registers unknown names met while parsing; a closed
/// one rejects them.
class FeatureRegistry {
 public:
  FeatureId intern(std::string_view name, FeatureOrigin origin = FeatureOrigin::DeclaredBoolean);
  std::optional<FeatureId> find(std::string_view name) const;

  const Feature& at(FeatureId id) const { return features_.at(id); }
  const std::string& name(FeatureId id) const { return features_.at(id).name; }
  std::size_t size() const noexcept { return features_.size(); }
  const std::vector<Feature>& all() const noexcept { return features_; }

  bool closed() const noexcept { return closed_; }
  void close() noexcept { closed_ = true; }
  void open() noexcept { closed_ = false; }

 private:
  std::vector<Feature> features_;
  std::unordered_map<std::string, FeatureId> by_name_;
  bool closed_ = false;
};

/// A total present/absent assignment over the features of a registry.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::size_t feature_count) : present_(feature_count, false) {}

  /// Configuration over `registry` in which exactly `present` are selected.
  static Configuration of(const FeatureRegistry& registry,
                          std::initializer_list<std::string_view> present);
  /// The `index`-th configuration in binary enumeration order: bit i of
  /// `index` selects feature i.
  static Configuration from_bits(std::size_t feature_count, std::uint64_t index);

  bool present(FeatureId id) const { return present_.at(id); }
  void set(FeatureId id, bool value) { present_.at(id) = value; }
  std::size_t size() const noexcept { return present_.size(); }

  std::string describe(const FeatureRegistry& registry) const;

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<bool> present_;
};

}  // namespace liftdl::featexpr
