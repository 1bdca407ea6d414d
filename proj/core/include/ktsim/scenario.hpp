#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ktsim/labeling.hpp"
#include "ktsim/mining.hpp"

namespace ktsim {

// Channel 1: experimenter -> miner (datasheet).
// Channel 2: miner -> labeler (miner knowledge and info sheet).
// Channel 3: experimenter -> labeler (datasheet and experimenter knowledge).
// "Channel 4" is all three open at once and has no field of its own.
struct ChannelPolicy {
  bool ch1 = false;
  bool ch2 = false;
  bool ch3 = false;

  static constexpr int kComboCount = 8;

  static ChannelPolicy from_mask(unsigned mask) noexcept {
    return ChannelPolicy{(mask & 1U) != 0, (mask & 2U) != 0, (mask & 4U) != 0};
  }
  unsigned mask() const noexcept { return (ch1 ? 1U : 0U) | (ch2 ? 2U : 0U) | (ch3 ? 4U : 0U); }
  bool all_open() const noexcept { return ch1 && ch2 && ch3; }

  friend bool operator==(const ChannelPolicy&, const ChannelPolicy&) = default;
};

// "none", "ch1", "ch12", ..., "ch123".
std::string combo_name(unsigned mask);

struct TeamSpec {
  std::size_t count = 2;
  std::size_t size = 3;

  friend bool operator==(const TeamSpec&, const TeamSpec&) = default;
};

struct ScenarioConfig {
  static constexpr int kSchemaVersion = 1;

  std::string scenario = "default";

  // ground truth
  std::size_t variables = 30;
  std::size_t trees = 3;
  double p_stay = 0.9;

  // agent pool
  std::size_t agents = 12;
  double coverage = 0.2;
  double accuracy = 0.85;

  TeamSpec experimenting;
  TeamSpec mining;
  TeamSpec labeling;
  // Mining and labeling team k reuse experimenting team k's roster.
  bool shared_members = false;

  // experiment
  std::size_t target_width = 8;
  double selection_prob = 0.5;
  double noise_rate = 0.1;
  std::size_t samples = 5000;

  MiningParams mining_params;
  LabelingParams labeling_params;

  // peer_mining[j]: mining teams whose knowledge miner j may read.
  // peer_labeling[l]: mining teams whose knowledge labeler l may read.
  std::vector<std::vector<std::uint32_t>> peer_mining;
  std::vector<std::vector<std::uint32_t>> peer_labeling;

  // wiring_mining[j]: datasets miner j mines. wiring_labeling[l]: miners whose
  // information labeler l labels. Empty means complete wiring.
  std::vector<std::vector<std::uint32_t>> wiring_mining;
  std::vector<std::vector<std::uint32_t>> wiring_labeling;

  ChannelPolicy channels;
  std::size_t replicates = 50;
  std::optional<std::uint64_t> seed;

  // Throws ConfigError naming the offending field.
  void validate() const;

  std::vector<std::uint32_t> datasets_for_miner(std::uint32_t j) const;
  std::vector<std::uint32_t> miners_for_labeler(std::uint32_t l) const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// Parses a config document ("schema": 1 required). Missing fields keep the
// defaults above. Throws ConfigError with a field path on any problem.
ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig parse_scenario_text(const std::string& text);

// Reads and parses a file. Throws IoError when unreadable.
ScenarioConfig load_scenario(const std::string& path);

nlohmann::json to_json(const ScenarioConfig& cfg);

}  // namespace ktsim
