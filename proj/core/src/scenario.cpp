#include "ktsim/scenario.hpp"

#include <fstream>
#include <initializer_list>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ktsim/error.hpp"

namespace ktsim {

using nlohmann::json;

std::string combo_name(unsigned mask) {
  if ((mask & 7U) == 0) return "none";
  std::string s = "ch";
  if (mask & 1U) s += '1';
  if (mask & 2U) s += '2';
  if (mask & 4U) s += '3';
  return s;
}

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown field", join(path, key));
  }
}

const json* object_at(const json& parent, const char* key, const std::string& path) {
  auto it = parent.find(key);
  if (it == parent.end()) return nullptr;
  if (!it->is_object()) throw ConfigError("expected an object", join(path, key));
  return &*it;
}

template <typename T>
void read(const json& obj, const char* key, const std::string& path, T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  const std::string field = join(path, key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!it->is_boolean()) throw ConfigError("expected a boolean", field);
  } else if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_unsigned()) throw ConfigError("expected a non-negative integer", field);
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!it->is_number()) throw ConfigError("expected a number", field);
  } else {
    if (!it->is_string()) throw ConfigError("expected a string", field);
  }
  out = it->get<T>();
}

void read_matrix(const json& obj, const char* key, const std::string& path,
                 std::vector<std::vector<std::uint32_t>>& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  const std::string field = join(path, key);
  if (!it->is_array()) throw ConfigError("expected an array of arrays", field);
  out.clear();
  for (std::size_t r = 0; r < it->size(); ++r) {
    const json& row = (*it)[r];
    const std::string row_field = field + "[" + std::to_string(r) + "]";
    if (!row.is_array()) throw ConfigError("expected an array", row_field);
    std::vector<std::uint32_t> ids;
    for (const json& x : row) {
      if (!x.is_number_unsigned()) throw ConfigError("expected team indices", row_field);
      ids.push_back(x.get<std::uint32_t>());
    }
    out.push_back(std::move(ids));
  }
}

void read_team(const json& teams, const char* key, TeamSpec& spec) {
  const std::string path = join("teams", key);
  if (const json* t = object_at(teams, key, "teams")) {
    reject_unknown(*t, path, {"count", "size"});
    read(*t, "count", path, spec.count);
    read(*t, "size", path, spec.size);
  }
}

void check_matrix(const std::vector<std::vector<std::uint32_t>>& m, std::size_t rows, std::size_t bound,
                  const std::string& field) {
  if (m.empty()) return;
  if (m.size() != rows) {
    throw ConfigError("expected " + std::to_string(rows) + " rows, got " + std::to_string(m.size()), field);
  }
  for (std::size_t r = 0; r < m.size(); ++r) {
    for (std::uint32_t id : m[r]) {
      if (id >= bound) {
        throw ConfigError("team index " + std::to_string(id) + " out of range", field + "[" + std::to_string(r) + "]");
      }
    }
  }
}

std::vector<std::uint32_t> row_or_all(const std::vector<std::vector<std::uint32_t>>& m, std::uint32_t row,
                                      std::size_t all) {
  if (!m.empty()) return m.at(row);
  std::vector<std::uint32_t> ids(all);
  std::iota(ids.begin(), ids.end(), 0U);
  return ids;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (scenario.empty()) throw ConfigError("must not be empty", "scenario");
  if (variables < 2) throw ConfigError("need at least two variables", "ground_truth.variables");
  if (trees < 1 || trees > variables) throw ConfigError("must lie in [1, variables]", "ground_truth.trees");
  if (!(p_stay > 0.5 && p_stay < 1.0)) throw ConfigError("must lie in (0.5, 1)", "ground_truth.p_stay");
  if (agents < 1) throw ConfigError("need at least one agent", "agents.count");
  if (!(coverage >= 0.0 && coverage <= 1.0)) throw ConfigError("must lie in [0, 1]", "agents.coverage");
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) throw ConfigError("must lie in [0, 1]", "agents.accuracy");
  const std::pair<const char*, const TeamSpec*> roles[] = {
      {"experimenting", &experimenting}, {"mining", &mining}, {"labeling", &labeling}};
  for (const auto& [name, spec] : roles) {
    const std::string path = std::string("teams.") + name;
    if (spec->count < 1) throw ConfigError("need at least one team", path + ".count");
    if (spec->size < 1 || spec->size > agents) throw ConfigError("must lie in [1, agents.count]", path + ".size");
  }
  if (shared_members && (mining.count != experimenting.count || labeling.count != experimenting.count)) {
    throw ConfigError("shared members need equal team counts across roles", "teams.shared_members");
  }
  if (target_width < 2 || target_width > variables) {
    throw ConfigError("must lie in [2, variables]", "experiment.target_width");
  }
  if (!(selection_prob >= 0.0 && selection_prob <= 1.0)) {
    throw ConfigError("must lie in [0, 1]", "experiment.selection_prob");
  }
  if (!(noise_rate >= 0.0 && noise_rate < 0.5)) throw ConfigError("must lie in [0, 0.5)", "experiment.noise_rate");
  if (samples < 1) throw ConfigError("must be positive", "experiment.samples");
  try {
    mining_params.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), "mining");
  }
  try {
    labeling_params.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), "labeling");
  }
  check_matrix(peer_mining, mining.count, mining.count, "peer_access.mining");
  check_matrix(peer_labeling, labeling.count, mining.count, "peer_access.labeling");
  check_matrix(wiring_mining, mining.count, experimenting.count, "wiring.mining");
  check_matrix(wiring_labeling, labeling.count, mining.count, "wiring.labeling");
  if (replicates < 1) throw ConfigError("must be positive", "replicates");
}

std::vector<std::uint32_t> ScenarioConfig::datasets_for_miner(std::uint32_t j) const {
  return row_or_all(wiring_mining, j, experimenting.count);
}

std::vector<std::uint32_t> ScenarioConfig::miners_for_labeler(std::uint32_t l) const {
  return row_or_all(wiring_labeling, l, mining.count);
}

ScenarioConfig parse_scenario(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc, "", {"schema", "scenario", "ground_truth", "agents", "teams", "experiment", "mining",
                           "labeling", "peer_access", "wiring", "channels", "replicates", "seed"});
  auto schema = doc.find("schema");
  if (schema == doc.end()) throw ConfigError("required field missing", "schema");
  if (!schema->is_number_integer() || schema->get<int>() != ScenarioConfig::kSchemaVersion) {
    throw ConfigError("unsupported schema version (expected 1)", "schema");
  }

  ScenarioConfig cfg;
  read(doc, "scenario", "", cfg.scenario);
  if (const json* g = object_at(doc, "ground_truth", "")) {
    reject_unknown(*g, "ground_truth", {"variables", "trees", "p_stay"});
    read(*g, "variables", "ground_truth", cfg.variables);
    read(*g, "trees", "ground_truth", cfg.trees);
    read(*g, "p_stay", "ground_truth", cfg.p_stay);
  }
  if (const json* a = object_at(doc, "agents", "")) {
    reject_unknown(*a, "agents", {"count", "coverage", "accuracy"});
    read(*a, "count", "agents", cfg.agents);
    read(*a, "coverage", "agents", cfg.coverage);
    read(*a, "accuracy", "agents", cfg.accuracy);
  }
  if (const json* t = object_at(doc, "teams", "")) {
    reject_unknown(*t, "teams", {"experimenting", "mining", "labeling", "shared_members"});
    read_team(*t, "experimenting", cfg.experimenting);
    read_team(*t, "mining", cfg.mining);
    read_team(*t, "labeling", cfg.labeling);
    read(*t, "shared_members", "teams", cfg.shared_members);
  }
  if (const json* e = object_at(doc, "experiment", "")) {
    reject_unknown(*e, "experiment", {"target_width", "selection_prob", "noise_rate", "samples"});
    read(*e, "target_width", "experiment", cfg.target_width);
    read(*e, "selection_prob", "experiment", cfg.selection_prob);
    read(*e, "noise_rate", "experiment", cfg.noise_rate);
    read(*e, "samples", "experiment", cfg.samples);
  }
  if (const json* m = object_at(doc, "mining", "")) {
    reject_unknown(*m, "mining", {"veto_confidence"});
    read(*m, "veto_confidence", "mining", cfg.mining_params.veto_confidence);
  }
  if (const json* l = object_at(doc, "labeling", "")) {
    reject_unknown(*l, "labeling", {"theta_dep", "theta_ind", "veto_confidence", "trust_confidence"});
    read(*l, "theta_dep", "labeling", cfg.labeling_params.thresholds.dependent);
    read(*l, "theta_ind", "labeling", cfg.labeling_params.thresholds.independent);
    read(*l, "veto_confidence", "labeling", cfg.labeling_params.veto_confidence);
    read(*l, "trust_confidence", "labeling", cfg.labeling_params.trust_confidence);
  }
  // The miner's dispute check uses the same polarity thresholds as the labeler.
  cfg.mining_params.thresholds = cfg.labeling_params.thresholds;
  if (const json* p = object_at(doc, "peer_access", "")) {
    reject_unknown(*p, "peer_access", {"mining", "labeling"});
    read_matrix(*p, "mining", "peer_access", cfg.peer_mining);
    read_matrix(*p, "labeling", "peer_access", cfg.peer_labeling);
  }
  if (const json* w = object_at(doc, "wiring", "")) {
    reject_unknown(*w, "wiring", {"mining", "labeling"});
    read_matrix(*w, "mining", "wiring", cfg.wiring_mining);
    read_matrix(*w, "labeling", "wiring", cfg.wiring_labeling);
  }
  if (const json* c = object_at(doc, "channels", "")) {
    reject_unknown(*c, "channels", {"ch1", "ch2", "ch3"});
    read(*c, "ch1", "channels", cfg.channels.ch1);
    read(*c, "ch2", "channels", cfg.channels.ch2);
    read(*c, "ch3", "channels", cfg.channels.ch3);
  }
  read(doc, "replicates", "", cfg.replicates);
  if (doc.contains("seed")) {
    std::uint64_t seed = 0;
    read(doc, "seed", "", seed);
    cfg.seed = seed;
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig parse_scenario_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

json to_json(const ScenarioConfig& cfg) {
  auto team = [](const TeamSpec& t) { return json{{"count", t.count}, {"size", t.size}}; };
  json doc = {
      {"schema", ScenarioConfig::kSchemaVersion},
      {"scenario", cfg.scenario},
      {"ground_truth", {{"variables", cfg.variables}, {"trees", cfg.trees}, {"p_stay", cfg.p_stay}}},
      {"agents", {{"count", cfg.agents}, {"coverage", cfg.coverage}, {"accuracy", cfg.accuracy}}},
      {"teams",
       {{"experimenting", team(cfg.experimenting)},
        {"mining", team(cfg.mining)},
        {"labeling", team(cfg.labeling)},
        {"shared_members", cfg.shared_members}}},
      {"experiment",
       {{"target_width", cfg.target_width},
        {"selection_prob", cfg.selection_prob},
        {"noise_rate", cfg.noise_rate},
        {"samples", cfg.samples}}},
      {"mining", {{"veto_confidence", cfg.mining_params.veto_confidence}}},
      {"labeling",
       {{"theta_dep", cfg.labeling_params.thresholds.dependent},
        {"theta_ind", cfg.labeling_params.thresholds.independent},
        {"veto_confidence", cfg.labeling_params.veto_confidence},
        {"trust_confidence", cfg.labeling_params.trust_confidence}}},
      {"peer_access", {{"mining", cfg.peer_mining}, {"labeling", cfg.peer_labeling}}},
      {"wiring", {{"mining", cfg.wiring_mining}, {"labeling", cfg.wiring_labeling}}},
      {"channels", {{"ch1", cfg.channels.ch1}, {"ch2", cfg.channels.ch2}, {"ch3", cfg.channels.ch3}}},
      {"replicates", cfg.replicates},
  };
  if (cfg.seed) doc["seed"] = *cfg.seed;
  return doc;
}

}  // namespace ktsim
