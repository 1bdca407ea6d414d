#include "ktsim/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "ktsim/error.hpp"
#include "ktsim/serialize.hpp"

namespace ktsim {

using nlohmann::json;

namespace {

// Stream labels for the upstream draws.
enum StreamLabel : std::uint64_t {
  kGroundTruthStream = 1,
  kPoolStream = 2,
  kTeamStream = 3,
  kDesignStream = 4,
  kSamplingStream = 5,
};

std::vector<KnowledgeBase> team_knowledge(const std::vector<Team>& teams, const std::vector<std::uint32_t>& ids) {
  std::vector<KnowledgeBase> out;
  out.reserve(ids.size());
  for (std::uint32_t id : ids) out.push_back(teams.at(id).knowledge);
  return out;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

}  // namespace

UpstreamState build_upstream(const ScenarioConfig& cfg, std::uint64_t seed) {
  cfg.validate();

  SeedStream gt_rng = make_stream(seed, {kGroundTruthStream});
  GroundTruth gt = build_ground_truth(cfg.variables, cfg.trees, cfg.p_stay, gt_rng);

  SeedStream pool_rng = make_stream(seed, {kPoolStream});
  AgentPool pool = sample_agent_pool(gt, cfg.agents, cfg.coverage, cfg.accuracy, pool_rng);

  SeedStream team_rng = make_stream(seed, {kTeamStream});
  std::vector<Team> experimenting;
  std::vector<Team> mining;
  std::vector<Team> labeling;
  for (std::uint32_t k = 0; k < cfg.experimenting.count; ++k) {
    experimenting.push_back(form_team(TeamId{Role::Experimenting, k}, pool, cfg.experimenting.size, team_rng));
  }
  auto form_role = [&](Role role, const TeamSpec& spec, std::vector<Team>& out) {
    for (std::uint32_t k = 0; k < spec.count; ++k) {
      if (cfg.shared_members) {
        out.push_back(form_team(TeamId{role, k}, pool, experimenting[k].members));
      } else {
        out.push_back(form_team(TeamId{role, k}, pool, spec.size, team_rng));
      }
    }
  };
  form_role(Role::Mining, cfg.mining, mining);
  form_role(Role::Labeling, cfg.labeling, labeling);

  std::vector<SampledDataset> datasets;
  datasets.reserve(experimenting.size());
  for (std::uint32_t i = 0; i < experimenting.size(); ++i) {
    SeedStream design_rng = make_stream(seed, {kDesignStream, i});
    const ExperimentDesign design =
        design_experiment(experimenting[i].knowledge, cfg.variables, cfg.target_width, cfg.selection_prob,
                          cfg.noise_rate, cfg.samples, design_rng);
    SampledDataset sd = sample_dataset(gt, design, experimenting[i].id, derive_seed(seed, {kSamplingStream, i}));
    // The snapshot always travels with the datasheet; channels decide who reads it.
    sd.datasheet.knowledge_snapshot = experimenting[i].knowledge;
    datasets.push_back(std::move(sd));
  }

  return UpstreamState{std::move(gt), std::move(pool), std::move(experimenting), std::move(mining),
                       std::move(labeling), std::move(datasets)};
}

std::vector<MinedInformation> mine_all(const ScenarioConfig& cfg, const UpstreamState& up) {
  std::vector<MinedInformation> out;
  for (std::uint32_t j = 0; j < up.mining.size(); ++j) {
    const auto peers =
        cfg.peer_mining.empty() ? std::vector<KnowledgeBase>{} : team_knowledge(up.mining, cfg.peer_mining[j]);
    for (std::uint32_t i : cfg.datasets_for_miner(j)) {
      const SampledDataset& sd = up.datasets.at(i);
      const std::optional<Datasheet> delivered = cfg.channels.ch1 ? std::optional(sd.datasheet) : std::nullopt;
      out.push_back(MinedInformation{
          i, j,
          mine(sd.dataset, sd.datasheet.team_id, up.mining[j].id, up.mining[j].knowledge, delivered, peers,
               cfg.mining_params)});
    }
  }
  std::sort(out.begin(), out.end(), [](const MinedInformation& a, const MinedInformation& b) {
    return std::tie(a.dataset, a.miner) < std::tie(b.dataset, b.miner);
  });
  return out;
}

LabelerDelivery deliver_to_labeler(const ScenarioConfig& cfg, const UpstreamState& up, const MinedInformation& mined,
                                   std::uint32_t labeler) {
  LabelerDelivery d;
  d.info = mined.info;
  std::optional<KnowledgeBase> miner_kb;
  if (cfg.channels.ch2) {
    miner_kb = mined.info.info_sheet.knowledge_snapshot;
  } else {
    // Patterns still arrive; the info sheet's provenance does not.
    d.info.info_sheet.upstream_datasheet.reset();
    d.info.info_sheet.knowledge_snapshot.reset();
  }
  std::optional<KnowledgeBase> exp_kb;
  if (cfg.channels.ch3) {
    d.exp_datasheet = up.datasets.at(mined.dataset).datasheet;
    exp_kb = d.exp_datasheet->knowledge_snapshot;
  }
  const auto peers =
      cfg.peer_labeling.empty() ? std::vector<KnowledgeBase>{} : team_knowledge(up.mining, cfg.peer_labeling[labeler]);
  d.prior = build_effective_prior(up.labeling.at(labeler).knowledge, miner_kb, exp_kb, peers);
  return d;
}

RunResult run(const ScenarioConfig& cfg, std::uint64_t seed) {
  RunResult result{cfg, seed, build_upstream(cfg, seed), {}, {}, {}};
  result.information = mine_all(cfg, result.upstream);
  for (std::uint32_t l = 0; l < result.upstream.labeling.size(); ++l) {
    const auto miners = cfg.miners_for_labeler(l);
    for (const MinedInformation& mined : result.information) {
      if (std::find(miners.begin(), miners.end(), mined.miner) == miners.end()) continue;
      const LabelerDelivery d = deliver_to_labeler(cfg, result.upstream, mined, l);
      const Information reinterpreted = reinterpret(d.info, d.prior, d.exp_datasheet, cfg.labeling_params);
      result.labelings.push_back(
          label(reinterpreted, d.prior, cfg.labeling_params, TeamTriple{mined.dataset, mined.miner, l}));
    }
  }
  std::sort(result.labelings.begin(), result.labelings.end(),
            [](const LabeledKnowledge& a, const LabeledKnowledge& b) { return a.triple < b.triple; });
  result.report = openness(result.labelings, result.upstream.ground_truth);
  return result;
}

std::string run_result_json(const RunResult& r) {
  auto teams = [](const std::vector<Team>& ts) {
    json arr = json::array();
    for (const Team& t : ts) {
      arr.push_back(json{{"id", to_json(t.id)}, {"members", t.members}, {"knowledge", to_json(t.knowledge)}});
    }
    return arr;
  };
  json datasets = json::array();
  for (const SampledDataset& sd : r.upstream.datasets) {
    datasets.push_back(json{{"rows", sd.dataset.rows()},
                            {"content_hash", hex64(sd.dataset.content_hash())},
                            {"datasheet", to_json(sd.datasheet)}});
  }
  json information = json::array();
  for (const MinedInformation& m : r.information) {
    information.push_back(json{{"i", m.dataset}, {"j", m.miner}, {"information", to_json(m.info)}});
  }
  json labelings = json::array();
  for (const LabeledKnowledge& lk : r.labelings) labelings.push_back(to_json(lk));

  json doc = {
      {"seed", r.seed},
      {"config", to_json(r.config)},
      {"channel_mask", r.config.channels.mask()},
      {"provenance",
       {{"ground_truth", to_json(r.upstream.ground_truth)},
        {"agent_count", r.upstream.pool.size()},
        {"teams",
         {{"experimenting", teams(r.upstream.experimenting)},
          {"mining", teams(r.upstream.mining)},
          {"labeling", teams(r.upstream.labeling)}}},
        {"datasets", datasets},
        {"information", information}}},
      {"labelings", labelings},
      {"openness", to_json(r.report)},
  };
  return doc.dump(2) + "\n";
}

SignTest sign_test(const std::vector<double>& differences) {
  SignTest t;
  for (double d : differences) {
    if (d > 0) {
      ++t.positive;
    } else if (d < 0) {
      ++t.negative;
    } else {
      ++t.ties;
    }
  }
  const std::size_t n = t.positive + t.negative;
  if (n == 0) return t;
  const std::size_t k = std::min(t.positive, t.negative);
  const double log_half_n = static_cast<double>(n) * std::log(0.5);
  double tail = 0.0;
  for (std::size_t i = 0; i <= k; ++i) {
    const double log_choose = std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(i) + 1) -
                              std::lgamma(static_cast<double>(n - i) + 1);
    tail += std::exp(log_choose + log_half_n);
  }
  t.p_value = std::min(1.0, 2.0 * tail);
  return t;
}

std::uint64_t sweep_data_seed(std::uint64_t master, std::size_t replicate) {
  return derive_seed(master, {0xda7aULL, replicate});
}

std::uint64_t sweep_run_key(std::uint64_t master, unsigned combo, std::size_t replicate) {
  return derive_seed(master, {0x5eedULL, combo, replicate});
}

SweepResult sweep(const ScenarioConfig& cfg, const SweepOptions& opts) {
  cfg.validate();
  if (opts.replicates < 1) throw ConfigError("must be positive", "replicates");
  const std::uint64_t master = cfg.seed.value_or(0);
  const std::size_t total = ChannelPolicy::kComboCount * opts.replicates;

  std::vector<SweepRow> rows(total);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      const auto combo = static_cast<unsigned>(task / opts.replicates);
      const std::size_t rep = task % opts.replicates;
      try {
        ScenarioConfig c = cfg;
        c.channels = ChannelPolicy::from_mask(combo);
        const std::uint64_t data_seed = sweep_data_seed(master, rep);
        const RunResult res = run(c, data_seed);
        std::uint64_t digest = 0;
        for (const SampledDataset& sd : res.upstream.datasets) digest = mix64(digest ^ sd.dataset.content_hash());
        rows[task] = SweepRow{cfg.scenario,
                              combo,
                              rep,
                              data_seed,
                              sweep_run_key(master, combo, rep),
                              res.report.union_size,
                              res.report.true_count,
                              res.report.false_count,
                              res.report.openness,
                              res.report.normalized,
                              digest};
        if (opts.on_run) opts.on_run(res, combo, rep);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const std::size_t jobs = std::clamp<std::size_t>(opts.jobs, 1, total);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult out;
  out.rows = std::move(rows);
  for (unsigned combo = 0; combo < ChannelPolicy::kComboCount; ++combo) {
    ComboSummary s;
    s.combo_mask = combo;
    std::vector<double> open;
    std::vector<double> norm;
    for (const SweepRow& row : out.rows) {
      if (row.combo_mask != combo) continue;
      open.push_back(static_cast<double>(row.openness));
      norm.push_back(row.normalized);
    }
    auto mean_sd = [](const std::vector<double>& xs, double& mean, double& sd) {
      mean = 0.0;
      for (double x : xs) mean += x;
      mean /= static_cast<double>(xs.size());
      double ss = 0.0;
      for (double x : xs) ss += (x - mean) * (x - mean);
      sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    };
    s.runs = open.size();
    mean_sd(open, s.mean_openness, s.stddev_openness);
    mean_sd(norm, s.mean_normalized, s.stddev_normalized);
    out.summaries.push_back(s);
  }

  std::vector<double> diffs;
  const std::size_t all = ChannelPolicy::kComboCount - 1;
  for (std::size_t rep = 0; rep < opts.replicates; ++rep) {
    diffs.push_back(static_cast<double>(out.rows[all * opts.replicates + rep].openness -
                                        out.rows[rep].openness));
  }
  out.all_vs_none = sign_test(diffs);
  return out;
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "scenario,combo_mask,replicate,seed,union_size,true_count,false_count,openness,normalized\n";
  for (const SweepRow& r : result.rows) {
    std::string name = r.scenario;
    if (name.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char ch : name) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      name = quoted + "\"";
    }
    out << name << ',' << r.combo_mask << ',' << r.replicate << ',' << r.seed << ',' << r.union_size << ','
        << r.true_count << ',' << r.false_count << ',' << r.openness << ',' << format_double(r.normalized) << '\n';
  }
  return out.str();
}

std::string sweep_summary_json(const SweepResult& result) {
  json combos = json::array();
  for (const ComboSummary& s : result.summaries) {
    combos.push_back(json{{"combo_mask", s.combo_mask},
                          {"combo", combo_name(s.combo_mask)},
                          {"runs", s.runs},
                          {"mean_openness", s.mean_openness},
                          {"stddev_openness", s.stddev_openness},
                          {"mean_normalized", s.mean_normalized},
                          {"stddev_normalized", s.stddev_normalized}});
  }
  const SignTest& t = result.all_vs_none;
  json doc = {
      {"scenario", result.rows.empty() ? std::string() : result.rows.front().scenario},
      {"runs", result.rows.size()},
      {"combos", combos},
      {"sign_test_all_vs_none",
       {{"positive", t.positive}, {"negative", t.negative}, {"ties", t.ties}, {"p_value", t.p_value}}},
  };
  return doc.dump(2) + "\n";
}

}  // namespace ktsim
