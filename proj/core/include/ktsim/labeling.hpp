#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ktsim/agents.hpp"
#include "ktsim/experimenting.hpp"
#include "ktsim/knowledge.hpp"
#include "ktsim/mining.hpp"

namespace ktsim {

struct LabelingParams {
  PolarityThresholds thresholds;
  double veto_confidence = 0.8;
  double trust_confidence = 0.9;

  // Negative control for the monotonicity validator: prior claims above the
  // trust level clear their pair without being emitted.
  bool break_passthrough = false;

  void validate() const;

  friend bool operator==(const LabelingParams&, const LabelingParams&) = default;
};

// The labeler's view of all knowledge it can reach, one claim per pair.
struct EffectivePrior {
  KnowledgeBase claims;
};

enum class ClaimOrigin : std::uint8_t { Pattern, PriorPassthrough };

std::string_view to_string(ClaimOrigin o) noexcept;

struct LabeledClaim {
  Claim claim;
  ClaimOrigin origin;

  friend bool operator==(const LabeledClaim&, const LabeledClaim&) = default;
};

struct TeamTriple {
  std::uint32_t experimenting = 0;
  std::uint32_t mining = 0;
  std::uint32_t labeling = 0;

  friend constexpr auto operator<=>(const TeamTriple&, const TeamTriple&) = default;
};

struct LabeledKnowledge {
  TeamTriple triple;
  std::map<Pair, LabeledClaim> claims;

  std::vector<Claim> claim_list() const;

  friend bool operator==(const LabeledKnowledge&, const LabeledKnowledge&) = default;
};

// Union of the reachable bases. On conflicting pairs the first source wins in
// the order own, miner, experimenter, then peers in list order.
EffectivePrior build_effective_prior(const KnowledgeBase& own, const std::optional<KnowledgeBase>& delivered_miner,
                                     const std::optional<KnowledgeBase>& delivered_exp,
                                     std::span<const KnowledgeBase> peers);

// Reinterprets mined information under the labeler's prior:
//  - corrects for noise when a datasheet is reachable (directly, or embedded in
//    the info sheet) and the miner has not already done so;
//  - tags patterns as selection-conditioned when the datasheet reveals a
//    selection the miner did not know about;
//  - drops undisputed patterns whose implied polarity contradicts a prior
//    claim at or above the veto confidence.
Information reinterpret(const Information& info, const EffectivePrior& prior,
                        const std::optional<Datasheet>& delivered_exp_datasheet, const LabelingParams& params);

// Turns reinterpreted patterns into claims, then passes trusted prior claims
// through, overwriting pattern labels on the same pair.
LabeledKnowledge label(const Information& info, const EffectivePrior& prior, const LabelingParams& params,
                       TeamTriple triple = {});

}  // namespace ktsim
