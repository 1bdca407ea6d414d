#include "ktsim/serialize.hpp"

#include <charconv>
#include <sstream>

#include "ktsim/error.hpp"

namespace ktsim {

using nlohmann::json;

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

json to_json(const WeightedClaim& wc) {
  return json{{"u", wc.claim.pair.u().index},
              {"v", wc.claim.pair.v().index},
              {"polarity", to_string(wc.claim.polarity)},
              {"confidence", wc.confidence}};
}

json to_json(const KnowledgeBase& kb) {
  json arr = json::array();
  for (const auto& [pair, wc] : kb) arr.push_back(to_json(wc));
  return arr;
}

KnowledgeBase knowledge_base_from_json(const json& arr) {
  if (!arr.is_array()) throw ConfigError("knowledge base must be a JSON array");
  KnowledgeBase kb;
  for (const json& c : arr) {
    const auto polarity = parse_polarity(c.at("polarity").get<std::string>());
    if (!polarity) throw ConfigError("polarity must be \"dep\" or \"indep\"");
    const Pair pair(VariableId{c.at("u").get<std::uint32_t>()}, VariableId{c.at("v").get<std::uint32_t>()});
    if (!kb.insert(WeightedClaim{Claim{pair, *polarity}, c.at("confidence").get<double>()})) {
      throw ConfigError("knowledge base lists pair (" + std::to_string(pair.u().index) + ", " +
                        std::to_string(pair.v().index) + ") twice");
    }
  }
  return kb;
}

json to_json(const TeamId& id) { return json{{"role", to_string(id.role)}, {"index", id.index}}; }

namespace {

std::vector<std::uint32_t> ids(const std::vector<VariableId>& vs) {
  std::vector<std::uint32_t> out;
  out.reserve(vs.size());
  for (VariableId v : vs) out.push_back(v.index);
  return out;
}

Role parse_role(const std::string& s) {
  if (s == "experimenting") return Role::Experimenting;
  if (s == "mining") return Role::Mining;
  if (s == "labeling") return Role::Labeling;
  throw ConfigError("unknown role \"" + s + "\"");
}

}  // namespace

json to_json(const Datasheet& ds) {
  json sel = nullptr;
  if (ds.selection) sel = json{{"variable", ds.selection->variable.index}, {"value", ds.selection->value}};
  return json{{"team_id", to_json(ds.team_id)},
              {"measured", ids(ds.measured)},
              {"selection", sel},
              {"noise_rate", ds.noise_rate},
              {"n", ds.samples},
              {"seed_fingerprint", ds.seed_fingerprint},
              {"knowledge_snapshot", ds.knowledge_snapshot ? to_json(*ds.knowledge_snapshot) : json(nullptr)}};
}

Datasheet datasheet_from_json(const json& doc) {
  Datasheet ds;
  const json& team = doc.at("team_id");
  ds.team_id = TeamId{parse_role(team.at("role").get<std::string>()), team.at("index").get<std::uint32_t>()};
  for (const json& v : doc.at("measured")) ds.measured.push_back(VariableId{v.get<std::uint32_t>()});
  if (const json& sel = doc.at("selection"); !sel.is_null()) {
    ds.selection = SelectionCondition{VariableId{sel.at("variable").get<std::uint32_t>()},
                                      sel.at("value").get<std::uint8_t>()};
  }
  ds.noise_rate = doc.at("noise_rate").get<double>();
  ds.samples = doc.at("n").get<std::size_t>();
  ds.seed_fingerprint = doc.at("seed_fingerprint").get<std::string>();
  if (const json& kb = doc.at("knowledge_snapshot"); !kb.is_null()) ds.knowledge_snapshot = knowledge_base_from_json(kb);
  return ds;
}

json to_json(const Pattern& p) {
  json tags = json::array();
  for (PatternTag t : kAllPatternTags) {
    if (p.tags.has(t)) tags.push_back(to_string(t));
  }
  return json{{"u", p.pair.u().index}, {"v", p.pair.v().index}, {"phi", p.phi}, {"support", p.support}, {"tags", tags}};
}

json to_json(const InfoSheet& s) {
  const auto& prm = s.params;
  return json{
      {"mining_team", to_json(s.mining_team)},
      {"params",
       {{"report_all", prm.report_all},
        {"veto_confidence", prm.veto_confidence},
        {"theta_dep", prm.thresholds.dependent},
        {"theta_ind", prm.thresholds.independent}}},
      {"corrections_applied",
       {{"noise_corrected", s.corrections_applied.noise_corrected},
        {"selection_flagged", s.corrections_applied.selection_flagged}}},
      {"upstream_datasheet", s.upstream_datasheet ? to_json(*s.upstream_datasheet) : json(nullptr)},
      {"knowledge_snapshot", s.knowledge_snapshot ? to_json(*s.knowledge_snapshot) : json(nullptr)},
  };
}

json to_json(const Information& info) {
  json patterns = json::array();
  for (const Pattern& p : info.patterns) patterns.push_back(to_json(p));
  return json{{"source_dataset", to_json(info.source_dataset)},
              {"patterns", patterns},
              {"info_sheet", to_json(info.info_sheet)}};
}

json to_json(const LabeledKnowledge& lk) {
  json claims = json::array();
  for (const auto& [pair, lc] : lk.claims) {
    claims.push_back(json{{"u", pair.u().index},
                          {"v", pair.v().index},
                          {"polarity", to_string(lc.claim.polarity)},
                          {"origin", to_string(lc.origin)}});
  }
  return json{{"triple", {{"i", lk.triple.experimenting}, {"j", lk.triple.mining}, {"l", lk.triple.labeling}}},
              {"claims", claims}};
}

json to_json(const OpennessReport& r) {
  json per = json::array();
  for (const TripleCounts& t : r.per_triple) {
    per.push_back(json{{"i", t.triple.experimenting},
                       {"j", t.triple.mining},
                       {"l", t.triple.labeling},
                       {"claims", t.claims},
                       {"true_count", t.true_count},
                       {"false_count", t.false_count}});
  }
  return json{{"union_size", r.union_size},
              {"true_count", r.true_count},
              {"false_count", r.false_count},
              {"openness", r.openness},
              {"normalized", r.normalized},
              {"per_triple", per}};
}

json to_json(const GroundTruth& gt) {
  json parents = json::array();
  for (const auto& p : gt.parents()) parents.push_back(p ? json(p->index) : json(nullptr));
  return json{{"variables", gt.variable_count()}, {"p_stay", gt.p_stay()}, {"trees", gt.tree_count()},
              {"parent", parents}};
}

std::string dataset_csv(const Dataset& ds) {
  std::ostringstream out;
  for (std::size_t c = 0; c < ds.cols(); ++c) {
    if (c) out << ',';
    out << ds.columns()[c].index;
  }
  out << '\n';
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    for (std::size_t c = 0; c < ds.cols(); ++c) {
      if (c) out << ',';
      out << static_cast<int>(ds.at(r, c));
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace ktsim
