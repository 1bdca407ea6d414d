#include "ktsim/metrics.hpp"

#include <algorithm>
#include <set>

namespace ktsim {

namespace {

template <typename Range>
void count_into(const Range& claims, const GroundTruth& gt, std::size_t& true_count, std::size_t& false_count) {
  for (const Claim& c : claims) {
    if (membership(c, gt) == Membership::InK) {
      ++true_count;
    } else {
      ++false_count;
    }
  }
}

void finish(OpennessReport& r) {
  r.union_size = r.true_count + r.false_count;
  r.openness = static_cast<std::int64_t>(r.true_count) - static_cast<std::int64_t>(r.false_count);
  r.normalized = r.union_size == 0 ? 0.0 : static_cast<double>(r.openness) / static_cast<double>(r.union_size);
}

}  // namespace

OpennessReport openness_of_claims(std::span<const Claim> claims, const GroundTruth& gt) {
  const std::set<Claim> unique(claims.begin(), claims.end());
  OpennessReport r;
  count_into(unique, gt, r.true_count, r.false_count);
  finish(r);
  return r;
}

OpennessReport openness(std::span<const LabeledKnowledge> labelings, const GroundTruth& gt) {
  std::set<Claim> unique;
  std::set<TeamTriple> seen;
  OpennessReport r;
  for (const LabeledKnowledge& lk : labelings) {
    const auto claims = lk.claim_list();
    unique.insert(claims.begin(), claims.end());
    if (!seen.insert(lk.triple).second) continue;
    TripleCounts tc{lk.triple, claims.size(), 0, 0};
    count_into(claims, gt, tc.true_count, tc.false_count);
    r.per_triple.push_back(tc);
  }
  std::sort(r.per_triple.begin(), r.per_triple.end(),
            [](const TripleCounts& a, const TripleCounts& b) { return a.triple < b.triple; });
  count_into(unique, gt, r.true_count, r.false_count);
  finish(r);
  return r;
}

}  // namespace ktsim
