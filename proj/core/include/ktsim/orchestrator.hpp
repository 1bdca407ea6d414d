#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ktsim/agents.hpp"
#include "ktsim/experimenting.hpp"
#include "ktsim/ground_truth.hpp"
#include "ktsim/labeling.hpp"
#include "ktsim/metrics.hpp"
#include "ktsim/mining.hpp"
#include "ktsim/scenario.hpp"

namespace ktsim {

// Everything drawn before any channel decision. Channel policy never touches
// these draws, so every combo of one replicate sees identical data.
struct UpstreamState {
  GroundTruth ground_truth;
  AgentPool pool;
  std::vector<Team> experimenting;
  std::vector<Team> mining;
  std::vector<Team> labeling;
  std::vector<SampledDataset> datasets;  // indexed by experimenting team
};

UpstreamState build_upstream(const ScenarioConfig& cfg, std::uint64_t seed);

// The information product of miner j on dataset i.
struct MinedInformation {
  std::uint32_t dataset = 0;
  std::uint32_t miner = 0;
  Information info;
};

// Runs every wired miner over every wired dataset under the config's channels.
std::vector<MinedInformation> mine_all(const ScenarioConfig& cfg, const UpstreamState& up);

// What labeler l can see of one information product under the channel policy.
struct LabelerDelivery {
  Information info;
  EffectivePrior prior;
  std::optional<Datasheet> exp_datasheet;
};

LabelerDelivery deliver_to_labeler(const ScenarioConfig& cfg, const UpstreamState& up, const MinedInformation& mined,
                                   std::uint32_t labeler);

struct RunResult {
  ScenarioConfig config;
  std::uint64_t seed = 0;
  UpstreamState upstream;
  std::vector<MinedInformation> information;
  std::vector<LabeledKnowledge> labelings;  // sorted by triple
  OpennessReport report;
};

RunResult run(const ScenarioConfig& cfg, std::uint64_t seed);

// Result JSON: config echo, seed, provenance trail, labelings and report.
// Deterministic byte-for-byte for a given (config, seed).
std::string run_result_json(const RunResult& result);

struct SweepRow {
  std::string scenario;
  unsigned combo_mask = 0;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;     // data seed, shared by every combo of a replicate
  std::uint64_t run_key = 0;  // unique per (combo, replicate)
  std::size_t union_size = 0;
  std::size_t true_count = 0;
  std::size_t false_count = 0;
  std::int64_t openness = 0;
  double normalized = 0.0;
  std::uint64_t dataset_digest = 0;  // combined hash of the replicate's datasets
};

struct ComboSummary {
  unsigned combo_mask = 0;
  std::size_t runs = 0;
  double mean_openness = 0.0;
  double stddev_openness = 0.0;
  double mean_normalized = 0.0;
  double stddev_normalized = 0.0;
};

// Two-sided exact sign test on paired differences; ties are dropped.
struct SignTest {
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t ties = 0;
  double p_value = 1.0;
};

SignTest sign_test(const std::vector<double>& differences);

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by (combo, replicate)
  std::vector<ComboSummary> summaries;
  SignTest all_vs_none;
};

std::uint64_t sweep_data_seed(std::uint64_t master, std::size_t replicate);
std::uint64_t sweep_run_key(std::uint64_t master, unsigned combo, std::size_t replicate);

struct SweepOptions {
  std::size_t replicates = 1;
  std::size_t jobs = 1;
  // Called once per finished run, possibly from several threads at once.
  std::function<void(const RunResult&, unsigned combo, std::size_t replicate)> on_run;
};

// All 8 channel combos x replicates with paired data seeds.
SweepResult sweep(const ScenarioConfig& cfg, const SweepOptions& opts);

std::string sweep_csv(const SweepResult& result);
std::string sweep_summary_json(const SweepResult& result);

}  // namespace ktsim
