#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ktsim/ground_truth.hpp"
#include "ktsim/labeling.hpp"

namespace ktsim {

struct TripleCounts {
  TeamTriple triple;
  std::size_t claims = 0;
  std::size_t true_count = 0;
  std::size_t false_count = 0;

  friend bool operator==(const TripleCounts&, const TripleCounts&) = default;
};

// Openness over the union of all labelings. Opposite claims on one pair from
// different triples are both kept and each counts on its own side.
struct OpennessReport {
  std::size_t union_size = 0;
  std::size_t true_count = 0;
  std::size_t false_count = 0;
  std::int64_t openness = 0;  // true_count - false_count
  double normalized = 0.0;    // openness / union_size, 0 for an empty union
  std::vector<TripleCounts> per_triple;

  friend bool operator==(const OpennessReport&, const OpennessReport&) = default;
};

OpennessReport openness(std::span<const LabeledKnowledge> labelings, const GroundTruth& gt);

// Counts over a bare claim set. Throws ConfigError if a claim is outside gt's variables.
OpennessReport openness_of_claims(std::span<const Claim> claims, const GroundTruth& gt);

}  // namespace ktsim
