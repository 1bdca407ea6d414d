#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ktsim/ground_truth.hpp"
#include "ktsim/knowledge.hpp"
#include "ktsim/random.hpp"

namespace ktsim {

using AgentId = std::uint32_t;

enum class Role : std::uint8_t { Experimenting, Mining, Labeling };

std::string_view to_string(Role r) noexcept;

// Team indices are role-scoped: (Mining, 0) and (Labeling, 0) are different
// teams even when they share members.
struct TeamId {
  Role role = Role::Experimenting;
  std::uint32_t index = 0;

  friend constexpr auto operator<=>(const TeamId&, const TeamId&) = default;
};

std::string to_string(const TeamId& id);

struct AgentPool {
  std::vector<KnowledgeBase> priors;  // indexed by AgentId

  std::size_t size() const noexcept { return priors.size(); }
};

struct Team {
  TeamId id;
  std::vector<AgentId> members;  // sorted, non-empty
  KnowledgeBase knowledge;       // rectified member priors
};

// Each pair enters with probability `coverage`; an included claim is the true
// polarity with probability `accuracy`, else its negation. Confidence ~ U[0.5, 1].
KnowledgeBase sample_agent_prior(const GroundTruth& gt, double coverage, double accuracy, SeedStream& rng);

AgentPool sample_agent_pool(const GroundTruth& gt, std::size_t agent_count, double coverage, double accuracy,
                            SeedStream& rng);

// Merges member priors by strict-majority vote per pair. The winning claim
// carries the mean confidence of its supporters; ties drop the pair.
// Result is independent of argument order. Throws ConfigError on an empty list.
KnowledgeBase rectify(std::span<const KnowledgeBase> member_priors);

// Draws `size` distinct members uniformly from the pool and rectifies their priors.
Team form_team(TeamId id, const AgentPool& pool, std::size_t size, SeedStream& rng);

// Builds a team from an explicit roster.
Team form_team(TeamId id, const AgentPool& pool, std::vector<AgentId> members);

}  // namespace ktsim
