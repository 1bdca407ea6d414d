#include "ktsim/knowledge.hpp"

#include <string>
#include <utility>

#include "ktsim/error.hpp"

namespace ktsim {

Pair::Pair(VariableId a, VariableId b) : u_(a < b ? a : b), v_(a < b ? b : a) {
  if (a == b) {
    throw ConfigError("pair needs two distinct variables, got " + std::to_string(a.index) + " twice");
  }
}

std::vector<Pair> all_pairs(std::size_t m) {
  std::vector<Pair> out;
  out.reserve(pair_count(m));
  for (std::uint32_t u = 0; u < m; ++u) {
    for (std::uint32_t v = u + 1; v < m; ++v) {
      out.emplace_back(VariableId{u}, VariableId{v});
    }
  }
  return out;
}

std::string_view to_string(Polarity p) noexcept {
  return p == Polarity::Dependent ? "dep" : "indep";
}

std::optional<Polarity> parse_polarity(std::string_view s) noexcept {
  if (s == "dep") return Polarity::Dependent;
  if (s == "indep") return Polarity::Independent;
  return std::nullopt;
}

namespace {

void check_confidence(double c) {
  if (!(c > 0.0 && c <= 1.0)) {
    throw ConfigError("claim confidence must lie in (0, 1], got " + std::to_string(c));
  }
}

}  // namespace

bool KnowledgeBase::insert(const WeightedClaim& wc) {
  check_confidence(wc.confidence);
  return claims_.emplace(wc.claim.pair, wc).second;
}

void KnowledgeBase::assign(const WeightedClaim& wc) {
  check_confidence(wc.confidence);
  claims_.insert_or_assign(wc.claim.pair, wc);
}

const WeightedClaim* KnowledgeBase::find(const Pair& p) const {
  auto it = claims_.find(p);
  return it == claims_.end() ? nullptr : &it->second;
}

bool KnowledgeBase::contains(const Claim& c) const {
  const WeightedClaim* wc = find(c.pair);
  return wc != nullptr && wc->claim.polarity == c.polarity;
}

std::vector<Claim> KnowledgeBase::claims() const {
  std::vector<Claim> out;
  out.reserve(claims_.size());
  for (const auto& [pair, wc] : claims_) out.push_back(wc.claim);
  return out;
}

}  // namespace ktsim
