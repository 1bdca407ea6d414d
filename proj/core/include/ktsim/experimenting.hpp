#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ktsim/agents.hpp"
#include "ktsim/ground_truth.hpp"
#include "ktsim/knowledge.hpp"
#include "ktsim/random.hpp"

namespace ktsim {

struct SelectionCondition {
  VariableId variable;
  std::uint8_t value = 1;

  friend bool operator==(const SelectionCondition&, const SelectionCondition&) = default;
};

struct ExperimentDesign {
  std::vector<VariableId> measured;  // sorted, distinct, at least two
  std::optional<SelectionCondition> selection;
  double noise_rate = 0.0;  // delta in [0, 0.5)
  std::size_t samples = 0;

  // Throws ConfigError if the design is inconsistent or exceeds `m` variables.
  void validate(std::size_t m) const;

  friend bool operator==(const ExperimentDesign&, const ExperimentDesign&) = default;
};

// Rectangular 0/1 table, row-major. Columns are the measured variable ids.
class Dataset {
 public:
  Dataset(std::vector<VariableId> columns, std::size_t rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return columns_.size(); }
  const std::vector<VariableId>& columns() const noexcept { return columns_; }

  std::uint8_t at(std::size_t row, std::size_t col) const { return cells_[row * cols() + col]; }
  void set(std::size_t row, std::size_t col, std::uint8_t bit) { cells_[row * cols() + col] = bit; }
  std::span<const std::uint8_t> row(std::size_t r) const { return {cells_.data() + r * cols(), cols()}; }

  std::optional<std::size_t> column_of(VariableId v) const;

  // FNV-1a over the column ids and every cell.
  std::uint64_t content_hash() const noexcept;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<VariableId> columns_;
  std::size_t rows_;
  std::vector<std::uint8_t> cells_;
};

// Provenance record for one executed experiment.
struct Datasheet {
  TeamId team_id;
  std::vector<VariableId> measured;
  std::optional<SelectionCondition> selection;
  double noise_rate = 0.0;
  std::size_t samples = 0;
  std::string seed_fingerprint;
  std::optional<KnowledgeBase> knowledge_snapshot;

  friend bool operator==(const Datasheet&, const Datasheet&) = default;
};

struct SampledDataset {
  Dataset dataset;
  Datasheet datasheet;
};

// Measures the variables the team believes to be dependent, ordered by claim
// confidence, truncated or padded with random variables to `target_width`.
// A selection condition (random measured variable, value 1) is attached with
// probability `selection_prob`.
ExperimentDesign design_experiment(const KnowledgeBase& team_kb, std::size_t m, std::size_t target_width,
                                   double selection_prob, double noise_rate, std::size_t samples,
                                   SeedStream& rng);

// Draws rows from the forest model, rejection-resampling until the selection
// holds, then flips each recorded bit with probability noise_rate. The
// stream is seeded from `seed`, whose fingerprint lands in the datasheet.
SampledDataset sample_dataset(const GroundTruth& gt, const ExperimentDesign& design, TeamId team,
                              std::uint64_t seed);

// Short hex digest identifying a seed without exposing it.
std::string seed_fingerprint(std::uint64_t seed);

}  // namespace ktsim
