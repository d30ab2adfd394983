#include "liftdl/featexpr/pc_store.hpp"

#include <algorithm>
#include <unordered_set>

#include "liftdl/common/error.hpp"

namespace liftdl::featexpr {

namespace {

constexpr std::uint32_t kFalse = 0;
constexpr std::uint32_t kTrue = 1;
constexpr std::size_t kCacheBits = 16;

std::uint64_t mix(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

struct PairHash {
  std::size_t operator()(std::uint64_t v) const noexcept { return mix(v); }
};

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

std::size_t PcStore::NodeKeyHash::operator()(const NodeKey& k) const noexcept {
  return mix((static_cast<std::uint64_t>(k.level) << 40) ^ (static_cast<std::uint64_t>(k.low) << 20) ^
             k.high ^ (static_cast<std::uint64_t>(k.high) << 52));
}

PcStore::PcStore() : cache_(std::size_t{1} << kCacheBits) {
  nodes_.push_back(Node{kTerminalLevel, kFalse, kFalse});
  nodes_.push_back(Node{kTerminalLevel, kTrue, kTrue});
}

std::uint32_t PcStore::make(std::uint32_t lvl, std::uint32_t low, std::uint32_t high) {
  if (low == high) return low;
  const NodeKey key{lvl, low, high};
  if (auto it = unique_.find(key); it != unique_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(Node{lvl, low, high});
  unique_.emplace(key, id);
  return id;
}

bool PcStore::cached(Op op, std::uint32_t a, std::uint32_t b, std::uint32_t& result) const {
  const auto slot = mix((static_cast<std::uint64_t>(op) << 60) ^ pair_key(a, b)) & (cache_.size() - 1);
  const CacheEntry& e = cache_[slot];
  if (e.op == static_cast<std::uint32_t>(op) && e.a == a && e.b == b) {
    result = e.result;
    return true;
  }
  return false;
}

void PcStore::remember(Op op, std::uint32_t a, std::uint32_t b, std::uint32_t result) {
  const auto slot = mix((static_cast<std::uint64_t>(op) << 60) ^ pair_key(a, b)) & (cache_.size() - 1);
  cache_[slot] = CacheEntry{static_cast<std::uint32_t>(op), a, b, result};
}

std::uint32_t PcStore::negate(std::uint32_t a) {
  if (a == kFalse) return kTrue;
  if (a == kTrue) return kFalse;
  std::uint32_t r;
  if (cached(Op::Not, a, 0, r)) return r;
  const Node n = nodes_[a];
  const std::uint32_t low = negate(n.low);
  const std::uint32_t high = negate(n.high);
  r = make(n.level, low, high);
  remember(Op::Not, a, 0, r);
  return r;
}

std::uint32_t PcStore::apply(Op op, std::uint32_t a, std::uint32_t b) {
  switch (op) {
    case Op::And:
      if (a == kFalse || b == kFalse) return kFalse;
      if (a == kTrue || a == b) return b;
      if (b == kTrue) return a;
      if (a > b) std::swap(a, b);
      break;
    case Op::Or:
      if (a == kTrue || b == kTrue) return kTrue;
      if (a == kFalse || a == b) return b;
      if (b == kFalse) return a;
      if (a > b) std::swap(a, b);
      break;
    case Op::AndNot:
      if (a == kFalse || b == kTrue || a == b) return kFalse;
      if (b == kFalse) return a;
      if (a == kTrue) return negate(b);
      break;
    case Op::Not:
      return negate(a);
  }

  std::uint32_t r;
  if (cached(op, a, b, r)) return r;

  const std::uint32_t la = level(a);
  const std::uint32_t lb = level(b);
  const std::uint32_t top = std::min(la, lb);
  const std::uint32_t a0 = la == top ? nodes_[a].low : a;
  const std::uint32_t a1 = la == top ? nodes_[a].high : a;
  const std::uint32_t b0 = lb == top ? nodes_[b].low : b;
  const std::uint32_t b1 = lb == top ? nodes_[b].high : b;
  const std::uint32_t low = apply(op, a0, b0);
  const std::uint32_t high = apply(op, a1, b1);
  r = make(top, low, high);
  remember(op, a, b, r);
  return r;
}

PresenceCondition PcStore::var(FeatureId id) {
  if (id >= features_.size()) throw Error("feature id " + std::to_string(id) + " is not registered");
  return PresenceCondition(make(id, kFalse, kTrue));
}

PresenceCondition PcStore::var(std::string_view name) {
  auto id = features_.find(name);
  if (!id) {
    if (features_.closed()) throw UnknownFeatureError(std::string(name), 0);
    id = features_.intern(name);
  }
  return var(*id);
}

PresenceCondition PcStore::pc_and(PresenceCondition a, PresenceCondition b) {
  return PresenceCondition(apply(Op::And, a.node(), b.node()));
}

PresenceCondition PcStore::pc_or(PresenceCondition a, PresenceCondition b) {
  return PresenceCondition(apply(Op::Or, a.node(), b.node()));
}

PresenceCondition PcStore::pc_not(PresenceCondition a) { return PresenceCondition(negate(a.node())); }

PresenceCondition PcStore::pc_and_not(PresenceCondition a, PresenceCondition b) {
  return PresenceCondition(apply(Op::AndNot, a.node(), b.node()));
}

PresenceCondition PcStore::to_pc(const FeatureExpr& expr) {
  switch (expr.kind()) {
    case FeatureExpr::Kind::True:
      return PresenceCondition::True();
    case FeatureExpr::Kind::False:
      return PresenceCondition::False();
    case FeatureExpr::Kind::Var:
      return var(expr.feature());
    case FeatureExpr::Kind::Not:
      return pc_not(to_pc(expr.lhs()));
    case FeatureExpr::Kind::And: {
      const PresenceCondition lhs = to_pc(expr.lhs());
      if (lhs.is_false()) return lhs;
      return pc_and(lhs, to_pc(expr.rhs()));
    }
    case FeatureExpr::Kind::Or: {
      const PresenceCondition lhs = to_pc(expr.lhs());
      if (lhs.is_true()) return lhs;
      return pc_or(lhs, to_pc(expr.rhs()));
    }
  }
  return PresenceCondition::False();
}

PresenceCondition PcStore::parse(std::string_view text) { return to_pc(parse_feature_expr(text, features_)); }

PresenceCondition PcStore::cube(const Cube& literals) {
  // Built bottom-up so every step is a single make().
  Cube sorted = literals;
  std::sort(sorted.begin(), sorted.end(),
            [](const Literal& a, const Literal& b) { return a.feature > b.feature; });
  std::uint32_t f = kTrue;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const Literal& lit = sorted[i];
    if (i > 0 && sorted[i - 1].feature == lit.feature) {
      if (sorted[i - 1].positive != lit.positive) return PresenceCondition::False();
      continue;
    }
    if (lit.feature >= features_.size()) throw Error("cube mentions an unregistered feature");
    f = lit.positive ? make(lit.feature, kFalse, f) : make(lit.feature, f, kFalse);
  }
  return PresenceCondition(f);
}

bool PcStore::implies(PresenceCondition a, PresenceCondition b) const {
  std::unordered_set<std::uint64_t, PairHash> proven;
  auto go = [&](auto&& self, std::uint32_t x, std::uint32_t y) -> bool {
    if (x == kFalse || y == kTrue || x == y) return true;
    if (x == kTrue || y == kFalse) return false;
    const auto key = pair_key(x, y);
    if (proven.count(key)) return true;
    const std::uint32_t lx = level(x);
    const std::uint32_t ly = level(y);
    const std::uint32_t top = std::min(lx, ly);
    const std::uint32_t x0 = lx == top ? nodes_[x].low : x;
    const std::uint32_t x1 = lx == top ? nodes_[x].high : x;
    const std::uint32_t y0 = ly == top ? nodes_[y].low : y;
    const std::uint32_t y1 = ly == top ? nodes_[y].high : y;
    // A failing pair aborts the whole query, so only successes need memoising.
    if (!self(self, x0, y0) || !self(self, x1, y1)) return false;
    proven.insert(key);
    return true;
  };
  return go(go, a.node(), b.node());
}

bool PcStore::evaluate(PresenceCondition p, const Configuration& rho) const {
  std::uint32_t n = p.node();
  while (n > kTrue) {
    const Node& node = nodes_[n];
    if (node.level >= rho.size())
      throw Error("configuration does not cover feature " + features_.name(node.level));
    n = rho.present(node.level) ? node.high : node.low;
  }
  return n == kTrue;
}

bool PcStore::cube_inside(std::uint32_t f, const Cube& cube) const {
  std::unordered_map<std::uint32_t, bool> memo;
  auto go = [&](auto&& self, std::uint32_t n) -> bool {
    if (n <= kTrue) return n == kTrue;
    if (auto it = memo.find(n); it != memo.end()) return it->second;
    const Node& node = nodes_[n];
    auto lit = std::lower_bound(cube.begin(), cube.end(), node.level,
                                [](const Literal& l, std::uint32_t v) { return l.feature < v; });
    bool result;
    if (lit != cube.end() && lit->feature == node.level)
      result = self(self, lit->positive ? node.high : node.low);
    else
      result = self(self, node.low) && self(self, node.high);
    memo.emplace(n, result);
    return result;
  };
  return go(go, f);
}

std::vector<Cube> PcStore::cover(PresenceCondition p) const {
  std::vector<Cube> cubes;
  if (p.is_false()) return cubes;
  Cube path;
  auto walk = [&](auto&& self, std::uint32_t n) -> void {
    if (n == kFalse) return;
    if (n == kTrue) {
      cubes.push_back(path);
      return;
    }
    const Node& node = nodes_[n];
    path.push_back(Literal{node.level, true});
    self(self, node.high);
    path.back().positive = false;
    self(self, node.low);
    path.pop_back();
  };
  walk(walk, p.node());

  for (Cube& c : cubes) {
    for (std::size_t i = 0; i < c.size();) {
      Cube shorter = c;
      shorter.erase(shorter.begin() + static_cast<std::ptrdiff_t>(i));
      if (cube_inside(p.node(), shorter))
        c = std::move(shorter);
      else
        ++i;
    }
  }

  auto literal_less = [](const Literal& a, const Literal& b) {
    if (a.feature != b.feature) return a.feature < b.feature;
    return a.positive && !b.positive;
  };
  std::sort(cubes.begin(), cubes.end(), [&](const Cube& a, const Cube& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), literal_less);
  });
  cubes.erase(std::unique(cubes.begin(), cubes.end()), cubes.end());

  // Drop cubes absorbed by a more general one.
  auto subsumes = [&](const Cube& general, const Cube& specific) {
    return std::includes(specific.begin(), specific.end(), general.begin(), general.end(),
                         [](const Literal& a, const Literal& b) {
                           if (a.feature != b.feature) return a.feature < b.feature;
                           return a.positive && !b.positive;
                         });
  };
  std::vector<Cube> kept;
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    bool absorbed = false;
    for (std::size_t j = 0; j < cubes.size() && !absorbed; ++j)
      absorbed = j != i && cubes[j].size() < cubes[i].size() && subsumes(cubes[j], cubes[i]);
    if (!absorbed) kept.push_back(cubes[i]);
  }
  return kept;
}

FeatureExpr PcStore::to_expr(PresenceCondition p) const {
  if (p.is_false()) return FeatureExpr::constant(false);
  if (p.is_true()) return FeatureExpr::constant(true);
  std::optional<FeatureExpr> sum;
  for (const Cube& c : cover(p)) {
    std::optional<FeatureExpr> product;
    for (const Literal& lit : c) {
      FeatureExpr l = lit.positive ? FeatureExpr::var(lit.feature)
                                   : FeatureExpr::negate(FeatureExpr::var(lit.feature));
      product = product ? FeatureExpr::conj(std::move(*product), std::move(l)) : std::move(l);
    }
    FeatureExpr term = product ? std::move(*product) : FeatureExpr::constant(true);
    sum = sum ? FeatureExpr::disj(std::move(*sum), std::move(term)) : std::move(term);
  }
  return *sum;
}

std::string PcStore::render(PresenceCondition p) const { return to_string(to_expr(p), features_); }

std::vector<FeatureId> PcStore::support(PresenceCondition p) const {
  std::unordered_set<std::uint32_t> seen;
  std::vector<FeatureId> levels;
  auto walk = [&](auto&& self, std::uint32_t n) -> void {
    if (n <= kTrue || !seen.insert(n).second) return;
    levels.push_back(nodes_[n].level);
    self(self, nodes_[n].low);
    self(self, nodes_[n].high);
  };
  walk(walk, p.node());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

double PcStore::sat_count(PresenceCondition p, std::size_t feature_count) const {
  std::unordered_map<std::uint32_t, double> memo;
  auto fraction = [&](auto&& self, std::uint32_t n) -> double {
    if (n <= kTrue) return n == kTrue ? 1.0 : 0.0;
    if (auto it = memo.find(n); it != memo.end()) return it->second;
    const double f = 0.5 * (self(self, nodes_[n].low) + self(self, nodes_[n].high));
    memo.emplace(n, f);
    return f;
  };
  double total = fraction(fraction, p.node());
  for (std::size_t i = 0; i < feature_count; ++i) total *= 2.0;
  return total;
}

std::size_t count_unique_pcs(std::span<const PresenceCondition> pcs) {
  std::unordered_set<PresenceCondition> distinct;
  for (PresenceCondition p : pcs)
    if (!p.is_true()) distinct.insert(p);
  return distinct.size();
}

}  // namespace liftdl::featexpr
