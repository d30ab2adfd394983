#include "liftdl/featexpr/feature.hpp"

#include "liftdl/common/error.hpp"

namespace liftdl::featexpr {

FeatureId FeatureRegistry::intern(std::string_view name, FeatureOrigin origin) {
  if (auto it = by_name_.find(std::string(name)); it != by_name_.end()) return it->second;
  if (name.empty()) throw Error("feature names must be non-empty");
  const auto id = static_cast<FeatureId>(features_.size());
  features_.push_back(Feature{std::string(name), origin});
  by_name_.emplace(std::string(name), id);
  return id;
}

std::optional<FeatureId> FeatureRegistry::find(std::string_view name) const {
  if (auto it = by_name_.find(std::string(name)); it != by_name_.end()) return it->second;
  return std::nullopt;
}

Configuration Configuration::of(const FeatureRegistry& registry,
                                std::initializer_list<std::string_view> present) {
  Configuration rho(registry.size());
  for (auto name : present) {
    auto id = registry.find(name);
    if (!id) throw Error("configuration names unknown feature '" + std::string(name) + "'");
    rho.set(*id, true);
  }
  return rho;
}

Configuration Configuration::from_bits(std::size_t feature_count, std::uint64_t index) {
  Configuration rho(feature_count);
  for (std::size_t i = 0; i < feature_count && i < 64; ++i) rho.present_[i] = (index >> i) & 1U;
  return rho;
}

std::string Configuration::describe(const FeatureRegistry& registry) const {
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < present_.size(); ++i) {
    if (!present_[i]) continue;
    if (!first) out += ", ";
    out += registry.name(static_cast<FeatureId>(i));
    first = false;
  }
  return out + "}";
}

}  // namespace liftdl::featexpr
