#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ktsim/knowledge.hpp"
#include "ktsim/scenario.hpp"

namespace ktsim {

// One randomized check: add a conflict-free, trusted claim `added` to a
// labeler's effective prior and compare how many labeled claims land on the
// same side of the truth (K for a true claim, K^c for a false one).
struct MonotonicityTrial {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  unsigned combo_mask = 0;
  Claim added{Pair(VariableId{0}, VariableId{1}), Polarity::Dependent};
  bool added_in_k = true;
  std::size_t before = 0;
  std::size_t after = 0;

  bool violated() const noexcept { return after < before; }
};

struct MonotonicityReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::vector<MonotonicityTrial> violating;  // transcripts of failed trials
};

// Each trial derives its own seed from `seed`, builds a fresh random run state
// from `scenario`, and draws the claim to add. Throws ConfigError when
// trials == 0. Set scenario.labeling_params.break_passthrough for the
// negative control.
MonotonicityReport validate_monotonicity(std::size_t trials, const ScenarioConfig& scenario, std::uint64_t seed,
                                         std::size_t jobs = 1);

}  // namespace ktsim
