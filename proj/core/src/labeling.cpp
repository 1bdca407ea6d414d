#include "ktsim/labeling.hpp"

#include <algorithm>

#include "ktsim/error.hpp"

namespace ktsim {

void LabelingParams::validate() const {
  thresholds.validate();
  if (!(veto_confidence > 0.0 && veto_confidence <= 1.0)) {
    throw ConfigError("veto confidence must lie in (0, 1]", "labeling.veto_confidence");
  }
  if (!(trust_confidence > 0.0 && trust_confidence <= 1.0)) {
    throw ConfigError("trust confidence must lie in (0, 1]", "labeling.trust_confidence");
  }
}

std::string_view to_string(ClaimOrigin o) noexcept {
  return o == ClaimOrigin::Pattern ? "pattern" : "prior_passthrough";
}

std::vector<Claim> LabeledKnowledge::claim_list() const {
  std::vector<Claim> out;
  out.reserve(claims.size());
  for (const auto& [pair, lc] : claims) out.push_back(lc.claim);
  return out;
}

EffectivePrior build_effective_prior(const KnowledgeBase& own, const std::optional<KnowledgeBase>& delivered_miner,
                                     const std::optional<KnowledgeBase>& delivered_exp,
                                     std::span<const KnowledgeBase> peers) {
  EffectivePrior prior{own};
  // insert() never replaces, so earlier sources win conflicts.
  auto absorb = [&prior](const KnowledgeBase& kb) {
    for (const auto& [pair, wc] : kb) prior.claims.insert(wc);
  };
  if (delivered_miner) absorb(*delivered_miner);
  if (delivered_exp) absorb(*delivered_exp);
  for (const KnowledgeBase& kb : peers) absorb(kb);
  return prior;
}

Information reinterpret(const Information& info, const EffectivePrior& prior,
                        const std::optional<Datasheet>& delivered_exp_datasheet, const LabelingParams& params) {
  params.validate();
  Information out = info;
  const std::optional<Datasheet>& sheet =
      delivered_exp_datasheet ? delivered_exp_datasheet : info.info_sheet.upstream_datasheet;

  if (sheet && sheet->noise_rate > 0.0) {
    for (Pattern& p : out.patterns) {
      if (p.tags.has(PatternTag::Degenerate) || p.tags.has(PatternTag::NoiseCorrected)) continue;
      p.phi = correct_for_noise(p.phi, sheet->noise_rate);
      p.tags.add(PatternTag::NoiseCorrected);
    }
    out.info_sheet.corrections_applied.noise_corrected = true;
  }

  if (sheet && sheet->selection) {
    for (Pattern& p : out.patterns) {
      if (!p.pair.contains(sheet->selection->variable)) p.tags.add(PatternTag::SelectionConditioned);
    }
    out.info_sheet.corrections_applied.selection_flagged = true;
  }

  // Disputed patterns stay: the labeler abstains on them anyway.
  std::erase_if(out.patterns, [&](const Pattern& p) {
    if (p.tags.has(PatternTag::Disputed)) return false;
    const auto implied = p.implied(params.thresholds);
    if (!implied) return false;
    const WeightedClaim* wc = prior.claims.find(p.pair);
    return wc != nullptr && wc->claim.polarity != *implied && wc->confidence >= params.veto_confidence;
  });
  return out;
}

LabeledKnowledge label(const Information& info, const EffectivePrior& prior, const LabelingParams& params,
                       TeamTriple triple) {
  params.validate();
  LabeledKnowledge out;
  out.triple = triple;
  for (const Pattern& p : info.patterns) {
    if (p.tags.has(PatternTag::Degenerate) || p.tags.has(PatternTag::Disputed)) continue;
    const auto implied = params.thresholds.implied(p.phi);
    if (!implied) continue;
    // A weak association after conditioning on a selected variable may be masking.
    if (*implied == Polarity::Independent && p.tags.has(PatternTag::SelectionConditioned)) continue;
    out.claims.insert_or_assign(p.pair, LabeledClaim{Claim{p.pair, *implied}, ClaimOrigin::Pattern});
  }
  for (const auto& [pair, wc] : prior.claims) {
    if (wc.confidence < params.trust_confidence) continue;
    if (params.break_passthrough) {
      out.claims.erase(pair);
    } else {
      out.claims.insert_or_assign(pair, LabeledClaim{wc.claim, ClaimOrigin::PriorPassthrough});
    }
  }
  return out;
}

}  // namespace ktsim
