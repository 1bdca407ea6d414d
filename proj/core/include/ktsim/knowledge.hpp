#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

namespace ktsim {

struct VariableId {
  std::uint32_t index = 0;

  friend constexpr auto operator<=>(VariableId, VariableId) = default;
};

// Unordered variable pair, stored canonically with u < v.
class Pair {
 public:
  // Throws ConfigError when a == b.
  Pair(VariableId a, VariableId b);

  VariableId u() const noexcept { return u_; }
  VariableId v() const noexcept { return v_; }
  bool contains(VariableId x) const noexcept { return x == u_ || x == v_; }

  friend constexpr auto operator<=>(const Pair&, const Pair&) = default;

 private:
  VariableId u_;
  VariableId v_;
};

// Number of unordered pairs over m variables.
constexpr std::size_t pair_count(std::size_t m) noexcept { return m < 2 ? 0 : m * (m - 1) / 2; }

// Enumerates all pairs over [0, m) in lexicographic order.
std::vector<Pair> all_pairs(std::size_t m);

enum class Polarity : std::uint8_t { Dependent, Independent };

constexpr Polarity opposite(Polarity p) noexcept {
  return p == Polarity::Dependent ? Polarity::Independent : Polarity::Dependent;
}

std::string_view to_string(Polarity p) noexcept;
std::optional<Polarity> parse_polarity(std::string_view s) noexcept;

// Atomic unit of knowledge: "u and v are (in)dependent".
struct Claim {
  Pair pair;
  Polarity polarity;

  friend constexpr auto operator<=>(const Claim&, const Claim&) = default;
};

// Same pair, opposite polarity. Involutive.
inline Claim negate(const Claim& c) noexcept { return Claim{c.pair, opposite(c.polarity)}; }

struct WeightedClaim {
  Claim claim;
  double confidence = 1.0;  // in (0, 1]

  friend bool operator==(const WeightedClaim&, const WeightedClaim&) = default;
};

// At most one claim per pair, so a base can never hold both polarities.
class KnowledgeBase {
 public:
  using Map = std::map<Pair, WeightedClaim>;
  using const_iterator = Map::const_iterator;

  KnowledgeBase() = default;

  // Inserts a claim on a pair not yet present. Returns false (and leaves the
  // base untouched) when the pair is already asserted. Throws ConfigError
  // for a confidence outside (0, 1].
  bool insert(const WeightedClaim& wc);

  // Inserts or replaces the claim on wc's pair.
  void assign(const WeightedClaim& wc);

  bool erase(const Pair& p) { return claims_.erase(p) > 0; }

  const WeightedClaim* find(const Pair& p) const;
  bool contains(const Pair& p) const { return claims_.count(p) > 0; }
  bool contains(const Claim& c) const;

  std::size_t size() const noexcept { return claims_.size(); }
  bool empty() const noexcept { return claims_.empty(); }
  const_iterator begin() const noexcept { return claims_.begin(); }
  const_iterator end() const noexcept { return claims_.end(); }

  std::vector<Claim> claims() const;

  friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;

 private:
  Map claims_;
};

}  // namespace ktsim
