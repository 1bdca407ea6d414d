#include "ktsim/agents.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

#include "ktsim/error.hpp"

namespace ktsim {

std::string_view to_string(Role r) noexcept {
  switch (r) {
    case Role::Experimenting:
      return "experimenting";
    case Role::Mining:
      return "mining";
    case Role::Labeling:
      return "labeling";
  }
  return "unknown";
}

std::string to_string(const TeamId& id) {
  return std::string(to_string(id.role)) + ":" + std::to_string(id.index);
}

KnowledgeBase sample_agent_prior(const GroundTruth& gt, double coverage, double accuracy, SeedStream& rng) {
  if (!(coverage >= 0.0 && coverage <= 1.0)) throw ConfigError("coverage must lie in [0, 1]", "agents.coverage");
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) throw ConfigError("accuracy must lie in [0, 1]", "agents.accuracy");

  KnowledgeBase kb;
  for (const Pair& p : all_pairs(gt.variable_count())) {
    if (!bernoulli(rng, coverage)) continue;
    const Claim truth = true_claim(p, gt);
    const Claim held = bernoulli(rng, accuracy) ? truth : negate(truth);
    kb.insert(WeightedClaim{held, uniform_real(rng, 0.5, 1.0)});
  }
  return kb;
}

AgentPool sample_agent_pool(const GroundTruth& gt, std::size_t agent_count, double coverage, double accuracy,
                            SeedStream& rng) {
  if (agent_count < 1) throw ConfigError("agent pool needs at least one agent", "agents.count");
  AgentPool pool;
  pool.priors.reserve(agent_count);
  for (std::size_t a = 0; a < agent_count; ++a) {
    pool.priors.push_back(sample_agent_prior(gt, coverage, accuracy, rng));
  }
  return pool;
}

KnowledgeBase rectify(std::span<const KnowledgeBase> member_priors) {
  if (member_priors.empty()) throw ConfigError("rectify needs at least one member prior");

  // Confidences are summed in sorted order so the result does not depend on
  // the order of the members.
  struct Tally {
    std::vector<double> dep;
    std::vector<double> indep;
  };
  std::map<Pair, Tally> tallies;
  for (const KnowledgeBase& kb : member_priors) {
    for (const auto& [pair, wc] : kb) {
      Tally& t = tallies[pair];
      (wc.claim.polarity == Polarity::Dependent ? t.dep : t.indep).push_back(wc.confidence);
    }
  }

  KnowledgeBase out;
  for (auto& [pair, t] : tallies) {
    if (t.dep.size() == t.indep.size()) continue;
    const bool dep = t.dep.size() > t.indep.size();
    std::vector<double>& winners = dep ? t.dep : t.indep;
    std::sort(winners.begin(), winners.end());
    const double mean = std::accumulate(winners.begin(), winners.end(), 0.0) / static_cast<double>(winners.size());
    out.insert(WeightedClaim{Claim{pair, dep ? Polarity::Dependent : Polarity::Independent}, mean});
  }
  return out;
}

Team form_team(TeamId id, const AgentPool& pool, std::vector<AgentId> members) {
  if (members.empty()) throw ConfigError("team " + to_string(id) + " has no members");
  std::sort(members.begin(), members.end());
  if (std::adjacent_find(members.begin(), members.end()) != members.end()) {
    throw ConfigError("team " + to_string(id) + " lists a member twice");
  }
  std::vector<KnowledgeBase> priors;
  priors.reserve(members.size());
  for (AgentId a : members) {
    if (a >= pool.size()) {
      throw ConfigError("team " + to_string(id) + " references agent " + std::to_string(a) + " outside the pool");
    }
    priors.push_back(pool.priors[a]);
  }
  KnowledgeBase knowledge = rectify(priors);
  return Team{id, std::move(members), std::move(knowledge)};
}

Team form_team(TeamId id, const AgentPool& pool, std::size_t size, SeedStream& rng) {
  if (size < 1 || size > pool.size()) {
    throw ConfigError("team size must lie in [1, " + std::to_string(pool.size()) + "]");
  }
  std::vector<AgentId> all(pool.size());
  std::iota(all.begin(), all.end(), AgentId{0});
  std::vector<AgentId> members;
  std::sample(all.begin(), all.end(), std::back_inserter(members), static_cast<std::ptrdiff_t>(size), rng);
  return form_team(id, pool, std::move(members));
}

}  // namespace ktsim
