// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "ktsim/experimenting.hpp"
#include "ktsim/ground_truth.hpp"
#include "ktsim/labeling.hpp"
#include "ktsim/metrics.hpp"
#include "ktsim/mining.hpp"
#include "ktsim/monotonicity.hpp"
#include "ktsim/orchestrator.hpp"

namespace fs = std::filesystem;
using namespace ktsim;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

ExperimentDesign chain_design(std::size_t m, double delta, std::size_t n, std::optional<std::uint32_t> select = {}) {
  ExperimentDesign d;
  for (std::uint32_t v = 0; v < m; ++v) d.measured.push_back(VariableId{v});
  d.noise_rate = delta;
  d.samples = n;
  if (select) d.selection = SelectionCondition{VariableId{*select}, 1};
  return d;
}

double phi(const Dataset& ds, std::uint32_t a, std::uint32_t b) {
  return phi_coefficient(ds, VariableId{a}, VariableId{b}).value_or(0.0);
}

const TeamId kExp{Role::Experimenting, 0};
const TeamId kMiner{Role::Mining, 0};

// Sampled phi on chain endpoints against (2p - 1)^d (1 - 2 delta)^2.
Verdict analytic_oracle() {
  Verdict v;
  double worst = 0.0;
  std::uint64_t seed = 100;
  for (double p : {0.8, 0.9}) {
    for (double delta : {0.0, 0.1}) {
      const GroundTruth gt = make_chain(4, p);
      const auto s = sample_dataset(gt, chain_design(4, delta, 100000), kExp, seed++);
      for (std::uint32_t d = 1; d <= 3; ++d) {
        const double expected = std::pow(2 * p - 1, d) * std::pow(1 - 2 * delta, 2);
        const double diff = std::abs(phi(s.dataset, 0, d) - expected);
        worst = std::max(worst, diff);
        v.require(diff <= 0.015, fmt("p=%.1f d=%.0f delta=%.1f off by ", p, d, delta) + fmt("%.4f", diff));
      }
    }
  }
  v.detail = "max |diff| " + fmt("%.4f", worst) + " (tol 0.015)" + (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

// The noise stream is separate from the row stream, so a delta = 0 draw with
// the same seed holds the exact clean rows the noisy draw started from.
Verdict correction_round_trip() {
  Verdict v;
  const GroundTruth gt = make_chain(4, 0.9);
  const auto clean = sample_dataset(gt, chain_design(4, 0.0, 100000), kExp, 7);
  const auto noisy = sample_dataset(gt, chain_design(4, 0.1, 100000), kExp, 7);

  const Information ch1 = mine(noisy.dataset, kExp, kMiner, {}, noisy.datasheet, {}, MiningParams{});
  double worst = 0.0;
  for (const Pattern& p : ch1.patterns) {
    const double target = phi(clean.dataset, p.pair.u().index, p.pair.v().index);
    worst = std::max(worst, std::abs(p.phi - target));
  }
  v.require(worst <= 0.015, "channel-1 correction misses clean phi by " + fmt("%.4f", worst));

  const Information blind = mine(noisy.dataset, kExp, kMiner, {}, std::nullopt, {}, MiningParams{});
  const Information ch3 = reinterpret(blind, EffectivePrior{}, noisy.datasheet, LabelingParams{});
  const Information ch1_labeled = reinterpret(ch1, EffectivePrior{}, std::nullopt, LabelingParams{});
  double gap = 0.0;
  v.require(ch3.patterns.size() == ch1_labeled.patterns.size(), "pattern counts differ");
  for (std::size_t i = 0; i < std::min(ch3.patterns.size(), ch1_labeled.patterns.size()); ++i) {
    gap = std::max(gap, std::abs(ch3.patterns[i].phi - ch1_labeled.patterns[i].phi));
  }
  v.require(gap <= 1e-12, "channel-3 path differs by " + fmt("%.3g", gap));
  v.detail = "clean-phi error " + fmt("%.4f", worst) + " (tol 0.015), ch3 vs ch1 " + fmt("%.1e", gap) +
             " (tol 1e-12)" + (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

// Chain 0 - 1 - 2 selected on 1: the endpoints look independent.
Verdict selection_masking() {
  Verdict v;
  const GroundTruth gt = make_chain(3, 0.9);
  const auto s = sample_dataset(gt, chain_design(3, 0.0, 100000, 1), kExp, 11);
  const double masked = phi(s.dataset, 0, 2);
  v.require(std::abs(masked) < 0.03, "masked |phi| " + fmt("%.4f", std::abs(masked)));

  const Pair target(VariableId{0}, VariableId{2});
  const Information raw = mine(s.dataset, kExp, kMiner, {}, std::nullopt, {}, MiningParams{});
  const LabelingParams params;

  const auto blind = label(reinterpret(raw, EffectivePrior{}, std::nullopt, params), EffectivePrior{}, params);
  const auto it = blind.claims.find(target);
  const bool false_indep = it != blind.claims.end() && it->second.claim.polarity == Polarity::Independent &&
                           membership(it->second.claim, gt) == Membership::InKc;
  v.require(false_indep, "without provenance the labeler did not emit the false Independent claim");

  // Provenance via channel 3 (direct datasheet) and via channel 1 + 2 (embedded).
  const auto via_ch3 = label(reinterpret(raw, EffectivePrior{}, s.datasheet, params), EffectivePrior{}, params);
  v.require(!via_ch3.claims.count(target), "labeler with channel-3 provenance did not abstain");
  const Information embedded = mine(s.dataset, kExp, kMiner, {}, s.datasheet, {}, MiningParams{});
  const auto via_ch12 = label(reinterpret(embedded, EffectivePrior{}, std::nullopt, params), EffectivePrior{}, params);
  v.require(!via_ch12.claims.count(target), "labeler with channel-1+2 provenance did not abstain");

  v.detail = "|phi(0,2)| " + fmt("%.4f", std::abs(masked)) + " (tol 0.03), blind labeler emits false Indep: " +
             (false_indep ? "yes" : "no") + (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

Verdict monotonicity() {
  Verdict v;
  const ScenarioConfig cfg;
  const auto sound = validate_monotonicity(1000, cfg, 2024);
  v.require(sound.violations == 0, std::to_string(sound.violations) + " violations on the sound labeler");
  ScenarioConfig broken = cfg;
  broken.labeling_params.break_passthrough = true;
  const auto control = validate_monotonicity(1000, broken, 2024);
  v.require(control.violations > 0, "negative control produced no violations");
  v.detail = std::to_string(sound.violations) + "/1000 violations; negative control " +
             std::to_string(control.violations) + "/1000" + (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

Verdict openness_ordering() {
  Verdict v;
  ScenarioConfig cfg;
  cfg.seed = 2024;
  const SweepResult r = sweep(cfg, SweepOptions{50, 1, {}});
  std::map<unsigned, double> mean;
  for (const auto& s : r.summaries) mean[s.combo_mask] = s.mean_openness;
  v.require(mean[7] > mean[0], "mean(all) <= mean(none)");
  v.require(r.all_vs_none.p_value < 0.05, "sign test p " + fmt("%.3g", r.all_vs_none.p_value));
  v.require(mean[1] >= mean[0], "mean(ch1) < mean(none)");
  char buf[256];
  std::snprintf(buf, sizeof buf, "mean none %.2f, ch1 %.2f, all %.2f; sign test +%zu -%zu p=%.3g", mean[0], mean[1],
                mean[7], r.all_vs_none.positive, r.all_vs_none.negative, r.all_vs_none.p_value);
  v.detail = buf + (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

Verdict metric_arithmetic() {
  Verdict v;
  using V = std::optional<VariableId>;
  const GroundTruth gt({V{}, V{VariableId{0}}, V{VariableId{1}}, V{}, V{VariableId{3}}}, 0.9);  // {0,1,2} {3,4}
  auto claim = [](std::uint32_t a, std::uint32_t b, Polarity p) { return Claim{Pair(VariableId{a}, VariableId{b}), p}; };

  LabeledKnowledge first, second;
  first.triple = {0, 0, 0};
  second.triple = {0, 0, 1};
  for (const Claim& c : {claim(0, 1, Polarity::Dependent), claim(1, 2, Polarity::Dependent)}) {
    first.claims.insert_or_assign(c.pair, LabeledClaim{c, ClaimOrigin::Pattern});
  }
  for (const Claim& c : {claim(0, 3, Polarity::Independent), claim(0, 2, Polarity::Independent)}) {
    second.claims.insert_or_assign(c.pair, LabeledClaim{c, ClaimOrigin::Pattern});
  }
  const std::vector<LabeledKnowledge> both{first, second};
  const auto r = openness(both, gt);
  v.require(r.true_count == 3 && r.false_count == 1, "counts differ from 3 true + 1 false");
  v.require(r.openness == 2, "openness " + std::to_string(r.openness) + " != 2");
  v.require(r.normalized == 0.5, "normalized " + fmt("%g", r.normalized) + " != 0.5");
  const auto empty = openness(std::span<const LabeledKnowledge>{}, gt);
  v.require(empty.openness == 0 && empty.normalized == 0.0, "empty union is not 0");
  v.detail = "3 true + 1 false -> " + std::to_string(r.openness) + " (normalized " + fmt("%g", r.normalized) +
             "), empty -> " + std::to_string(empty.openness) + (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream f(e.path(), std::ios::binary);
    files[fs::relative(e.path(), root).string()] = {std::istreambuf_iterator<char>(f), {}};
  }
  return files;
}

Verdict determinism() {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / "ktsim_acceptance_determinism";
  fs::remove_all(root);
  std::ostringstream sink;
  for (const char* name : {"a", "b"}) {
    const int code = cli::run_cli({"--quiet", "run", "--seed", "42", "--out", (root / name).string()}, sink, sink);
    v.require(code == 0, std::string("run into ") + name + " exited " + std::to_string(code));
  }
  std::size_t files = 0;
  if (v.pass) {
    const auto a = read_tree(root / "a");
    const auto b = read_tree(root / "b");
    files = a.size();
    v.require(!a.empty() && a == b, "result directories differ");
  }
  fs::remove_all(root);

  // Every combo of one sweep replicate must see the same datasets.
  ScenarioConfig cfg;
  cfg.seed = 42;
  std::mutex mu;
  std::map<unsigned, std::vector<std::uint64_t>> hashes;
  SweepOptions opts{1, 1, [&](const RunResult& r, unsigned combo, std::size_t) {
                      std::vector<std::uint64_t> h;
                      for (const auto& sd : r.upstream.datasets) h.push_back(sd.dataset.content_hash());
                      std::lock_guard lock(mu);
                      hashes[combo] = h;
                    }};
  const SweepResult r = sweep(cfg, opts);
  std::set<std::vector<std::uint64_t>> distinct;
  for (const auto& [combo, h] : hashes) distinct.insert(h);
  v.require(hashes.size() == 8 && distinct.size() == 1, "dataset hashes differ across combos");
  std::set<std::uint64_t> digests;
  for (const auto& row : r.rows) digests.insert(row.dataset_digest);
  v.require(digests.size() == 1, "sweep rows disagree on the dataset digest");
  v.detail = std::to_string(files) + " files byte-identical across two runs; " + std::to_string(hashes.size()) +
             " combos share " + std::to_string(distinct.size()) + " dataset hash set" +
             (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

struct Criterion {
  const char* id;
  const char* name;
  double limit_seconds;  // 0 = no runtime bound
  std::function<Verdict()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"AC1", "analytic correlation oracle", 30, analytic_oracle},
      {"AC2", "correction round-trip", 0, correction_round_trip},
      {"AC3", "selection masking", 0, selection_masking},
      {"AC4", "monotonicity validator", 60, monotonicity},
      {"AC5", "openness ordering", 300, openness_ordering},
      {"AC6", "metric arithmetic", 0, metric_arithmetic},
      {"AC7", "determinism", 0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && secs >= c.limit_seconds) {
      v.pass = false;
      v.detail += "; runtime " + fmt("%.1f", secs) + " s exceeds " + fmt("%.0f", c.limit_seconds) + " s";
    }
    std::printf("%s %-4s %-28s %6.2fs  %s\n", c.id, v.pass ? "PASS" : "FAIL", c.name, secs, v.detail.c_str());
    std::fflush(stdout);
    failures += !v.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
