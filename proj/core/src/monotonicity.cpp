#include "ktsim/monotonicity.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "ktsim/error.hpp"
#include "ktsim/orchestrator.hpp"

namespace ktsim {

namespace {

std::size_t count_side(const LabeledKnowledge& lk, const GroundTruth& gt, Membership side) {
  std::size_t n = 0;
  for (const auto& [pair, lc] : lk.claims) {
    if (membership(lc.claim, gt) == side) ++n;
  }
  return n;
}

MonotonicityTrial run_trial(std::size_t index, const ScenarioConfig& base, std::uint64_t seed) {
  MonotonicityTrial trial;
  trial.index = index;
  trial.seed = derive_seed(seed, {index});
  SeedStream rng(trial.seed);

  ScenarioConfig cfg = base;
  trial.combo_mask = static_cast<unsigned>(uniform_index(rng, ChannelPolicy::kComboCount));
  cfg.channels = ChannelPolicy::from_mask(trial.combo_mask);
  const UpstreamState up = build_upstream(cfg, derive_seed(trial.seed, {1}));
  const auto mined = mine_all(cfg, up);
  const MinedInformation& product = mined[uniform_index(rng, mined.size())];

  std::vector<std::uint32_t> labelers;
  for (std::uint32_t l = 0; l < up.labeling.size(); ++l) {
    const auto miners = cfg.miners_for_labeler(l);
    if (std::find(miners.begin(), miners.end(), product.miner) != miners.end()) labelers.push_back(l);
  }
  if (labelers.empty()) labelers.push_back(0);
  const std::uint32_t labeler = labelers[uniform_index(rng, labelers.size())];
  LabelerDelivery d = deliver_to_labeler(cfg, up, product, labeler);

  // The added claim must land on a pair the prior does not mention. Favour
  // mined pairs half the time so pattern/prior interactions get exercised.
  const GroundTruth& gt = up.ground_truth;
  std::vector<Pair> free_mined;
  for (const Pattern& p : product.info.patterns) {
    if (!d.prior.claims.contains(p.pair)) free_mined.push_back(p.pair);
  }
  std::vector<Pair> free_any;
  for (const Pair& p : all_pairs(gt.variable_count())) {
    if (!d.prior.claims.contains(p)) free_any.push_back(p);
  }
  if (free_any.empty()) {
    auto it = d.prior.claims.begin();
    std::advance(it, static_cast<std::ptrdiff_t>(uniform_index(rng, d.prior.claims.size())));
    const Pair freed = it->first;
    d.prior.claims.erase(freed);
    free_any.push_back(freed);
  }
  const bool prefer_mined = bernoulli(rng, 0.5) && !free_mined.empty();
  const auto& candidates = prefer_mined ? free_mined : free_any;
  const Pair pair = candidates[uniform_index(rng, candidates.size())];

  trial.added_in_k = bernoulli(rng, 0.5);
  const Claim truth = true_claim(pair, gt);
  trial.added = trial.added_in_k ? truth : negate(truth);
  const LabelingParams& params = cfg.labeling_params;
  const double floor = std::max(params.veto_confidence, params.trust_confidence);
  const double confidence = floor >= 1.0 ? 1.0 : uniform_real(rng, floor, 1.0);

  const Membership side = trial.added_in_k ? Membership::InK : Membership::InKc;
  const LabeledKnowledge before = label(reinterpret(d.info, d.prior, d.exp_datasheet, params), d.prior, params);
  EffectivePrior grown = d.prior;
  grown.claims.insert(WeightedClaim{trial.added, confidence});
  const LabeledKnowledge after = label(reinterpret(d.info, grown, d.exp_datasheet, params), grown, params);
  trial.before = count_side(before, gt, side);
  trial.after = count_side(after, gt, side);
  return trial;
}

}  // namespace

MonotonicityReport validate_monotonicity(std::size_t trials, const ScenarioConfig& scenario, std::uint64_t seed,
                                         std::size_t jobs) {
  if (trials == 0) throw ConfigError("must be at least 1", "trials");
  scenario.validate();

  std::vector<MonotonicityTrial> results(trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t t = next++; t < trials; t = next++) {
      try {
        results[t] = run_trial(t, scenario, seed);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, trials);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  MonotonicityReport report;
  report.trials = trials;
  for (const MonotonicityTrial& t : results) {
    if (t.violated()) report.violating.push_back(t);
  }
  report.violations = report.violating.size();
  return report;
}

}  // namespace ktsim
