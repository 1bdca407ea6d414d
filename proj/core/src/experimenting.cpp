#include "ktsim/experimenting.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <string>

#include "ktsim/error.hpp"

namespace ktsim {

void ExperimentDesign::validate(std::size_t m) const {
  if (measured.size() < 2) throw ConfigError("design must measure at least two variables", "measured");
  for (std::size_t i = 0; i < measured.size(); ++i) {
    if (measured[i].index >= m) {
      throw ConfigError("measured variable " + std::to_string(measured[i].index) + " out of range", "measured");
    }
    if (i > 0 && !(measured[i - 1] < measured[i])) {
      throw ConfigError("measured variables must be sorted and distinct", "measured");
    }
  }
  if (selection) {
    if (!std::binary_search(measured.begin(), measured.end(), selection->variable)) {
      throw ConfigError("selection variable must be measured", "selection");
    }
    if (selection->value > 1) throw ConfigError("selection value must be 0 or 1", "selection");
  }
  if (!(noise_rate >= 0.0 && noise_rate < 0.5)) {
    throw ConfigError("noise rate must lie in [0, 0.5), got " + std::to_string(noise_rate), "noise_rate");
  }
  if (samples < 1) throw ConfigError("sample count must be positive", "samples");
}

Dataset::Dataset(std::vector<VariableId> columns, std::size_t rows)
    : columns_(std::move(columns)), rows_(rows), cells_(rows_ * columns_.size(), 0) {}

std::optional<std::size_t> Dataset::column_of(VariableId v) const {
  auto it = std::find(columns_.begin(), columns_.end(), v);
  if (it == columns_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - columns_.begin());
}

std::uint64_t Dataset::content_hash() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint64_t byte) {
    h ^= byte & 0xffU;
    h *= 0x100000001b3ULL;
  };
  for (VariableId c : columns_) {
    for (int shift = 0; shift < 32; shift += 8) feed(c.index >> shift);
  }
  for (int shift = 0; shift < 64; shift += 8) feed(static_cast<std::uint64_t>(rows_) >> shift);
  for (std::uint8_t cell : cells_) feed(cell);
  return h;
}

std::string seed_fingerprint(std::uint64_t seed) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(mix64(seed ^ 0x5eedf00dULL)));
  return buf;
}

ExperimentDesign design_experiment(const KnowledgeBase& team_kb, std::size_t m, std::size_t target_width,
                                   double selection_prob, double noise_rate, std::size_t samples,
                                   SeedStream& rng) {
  if (target_width < 2 || target_width > m) {
    throw ConfigError("target width must lie in [2, " + std::to_string(m) + "]", "experiment.target_width");
  }
  if (!(selection_prob >= 0.0 && selection_prob <= 1.0)) {
    throw ConfigError("selection probability must lie in [0, 1]", "experiment.selection_prob");
  }

  std::vector<WeightedClaim> deps;
  for (const auto& [pair, wc] : team_kb) {
    if (wc.claim.polarity == Polarity::Dependent) deps.push_back(wc);
  }
  std::stable_sort(deps.begin(), deps.end(),
                   [](const WeightedClaim& a, const WeightedClaim& b) { return a.confidence > b.confidence; });

  std::vector<bool> chosen(m, false);
  std::vector<VariableId> measured;
  auto take = [&](VariableId v) {
    if (measured.size() < target_width && !chosen[v.index]) {
      chosen[v.index] = true;
      measured.push_back(v);
    }
  };
  for (const WeightedClaim& wc : deps) {
    take(wc.claim.pair.u());
    take(wc.claim.pair.v());
  }
  if (measured.size() < target_width) {
    std::vector<VariableId> pool;
    for (std::uint32_t v = 0; v < m; ++v) {
      if (!chosen[v]) pool.push_back(VariableId{v});
    }
    std::vector<VariableId> extra;
    std::sample(pool.begin(), pool.end(), std::back_inserter(extra),
                static_cast<std::ptrdiff_t>(target_width - measured.size()), rng);
    for (VariableId v : extra) take(v);
  }
  std::sort(measured.begin(), measured.end());

  ExperimentDesign design;
  design.measured = std::move(measured);
  design.noise_rate = noise_rate;
  design.samples = samples;
  if (bernoulli(rng, selection_prob)) {
    design.selection = SelectionCondition{design.measured[uniform_index(rng, design.measured.size())], 1};
  }
  design.validate(m);
  return design;
}

SampledDataset sample_dataset(const GroundTruth& gt, const ExperimentDesign& design, TeamId team,
                              std::uint64_t seed) {
  const std::size_t m = gt.variable_count();
  design.validate(m);

  // Separate streams keep the clean rows identical across noise rates.
  SeedStream rows_rng = make_stream(seed, {1});
  SeedStream noise_rng = make_stream(seed, {2});
  std::bernoulli_distribution fair(0.5);
  std::bernoulli_distribution stay(gt.p_stay());
  std::bernoulli_distribution flip(design.noise_rate);

  Dataset ds(design.measured, design.samples);
  std::vector<std::uint8_t> bits(m);
  const auto& order = gt.topological_order();
  for (std::size_t r = 0; r < design.samples; ++r) {
    do {
      for (VariableId v : order) {
        const auto parent = gt.parent(v);
        bits[v.index] = parent ? static_cast<std::uint8_t>(bits[parent->index] ^ (stay(rows_rng) ? 0U : 1U))
                               : static_cast<std::uint8_t>(fair(rows_rng) ? 1U : 0U);
      }
    } while (design.selection && bits[design.selection->variable.index] != design.selection->value);

    for (std::size_t c = 0; c < design.measured.size(); ++c) {
      std::uint8_t bit = bits[design.measured[c].index];
      if (design.noise_rate > 0.0 && flip(noise_rng)) bit ^= 1U;
      ds.set(r, c, bit);
    }
  }

  Datasheet sheet;
  sheet.team_id = team;
  sheet.measured = design.measured;
  sheet.selection = design.selection;
  sheet.noise_rate = design.noise_rate;
  sheet.samples = design.samples;
  sheet.seed_fingerprint = seed_fingerprint(seed);
  return SampledDataset{std::move(ds), std::move(sheet)};
}

}  // namespace ktsim
