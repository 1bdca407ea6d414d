#include "ktsim/mining.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ktsim/error.hpp"

namespace ktsim {

void PolarityThresholds::validate() const {
  if (!(independent >= 0.0 && independent < dependent && dependent <= 1.0)) {
    throw ConfigError("thresholds need 0 <= theta_ind < theta_dep <= 1");
  }
}

std::optional<Polarity> PolarityThresholds::implied(double phi) const noexcept {
  const double mag = std::fabs(phi);
  if (mag >= dependent) return Polarity::Dependent;
  if (mag <= independent) return Polarity::Independent;
  return std::nullopt;
}

void MiningParams::validate() const {
  if (!(veto_confidence > 0.0 && veto_confidence <= 1.0)) {
    throw ConfigError("veto confidence must lie in (0, 1]", "mining.veto_confidence");
  }
  thresholds.validate();
}

std::string_view to_string(PatternTag t) noexcept {
  switch (t) {
    case PatternTag::NoiseCorrected:
      return "noise_corrected";
    case PatternTag::SelectionConditioned:
      return "selection_conditioned";
    case PatternTag::Degenerate:
      return "degenerate";
    case PatternTag::Disputed:
      return "disputed";
  }
  return "unknown";
}

const Pattern* Information::find(const Pair& p) const {
  auto it = std::lower_bound(patterns.begin(), patterns.end(), p,
                             [](const Pattern& x, const Pair& key) { return x.pair < key; });
  return it != patterns.end() && it->pair == p ? &*it : nullptr;
}

namespace {

std::size_t require_column(const Dataset& ds, VariableId v) {
  auto col = ds.column_of(v);
  if (!col) throw ConfigError("variable " + std::to_string(v.index) + " is not measured in the dataset");
  return *col;
}

Contingency count_columns(const Dataset& ds, std::size_t cu, std::size_t cv) {
  Contingency t;
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    const unsigned cell = (static_cast<unsigned>(ds.at(r, cu)) << 1U) | ds.at(r, cv);
    switch (cell) {
      case 0:
        ++t.n00;
        break;
      case 1:
        ++t.n01;
        break;
      case 2:
        ++t.n10;
        break;
      default:
        ++t.n11;
        break;
    }
  }
  return t;
}

}  // namespace

Contingency contingency(const Dataset& ds, VariableId u, VariableId v) {
  return count_columns(ds, require_column(ds, u), require_column(ds, v));
}

std::optional<double> phi_coefficient(const Contingency& t) {
  const double a = static_cast<double>(t.n11);
  const double b = static_cast<double>(t.n10);
  const double c = static_cast<double>(t.n01);
  const double d = static_cast<double>(t.n00);
  const double denom = (a + b) * (c + d) * (a + c) * (b + d);
  if (denom == 0.0) return std::nullopt;
  return std::clamp((a * d - b * c) / std::sqrt(denom), -1.0, 1.0);
}

std::optional<double> phi_coefficient(const Dataset& ds, VariableId u, VariableId v) {
  return phi_coefficient(contingency(ds, u, v));
}

double correct_for_noise(double phi, double noise_rate) {
  const double attenuation = (1.0 - 2.0 * noise_rate) * (1.0 - 2.0 * noise_rate);
  return std::clamp(phi / attenuation, -1.0, 1.0);
}

Information mine(const Dataset& ds, TeamId source, TeamId miner, const KnowledgeBase& miner_kb,
                 const std::optional<Datasheet>& delivered, std::span<const KnowledgeBase> peer_kbs,
                 const MiningParams& params) {
  params.validate();

  const bool correct = delivered && delivered->noise_rate > 0.0;
  const VariableId* selected = delivered && delivered->selection ? &delivered->selection->variable : nullptr;

  std::vector<const KnowledgeBase*> sources{&miner_kb};
  for (const KnowledgeBase& kb : peer_kbs) sources.push_back(&kb);
  if (delivered && delivered->knowledge_snapshot) sources.push_back(&*delivered->knowledge_snapshot);

  const auto& cols = ds.columns();
  Information info;
  info.source_dataset = source;
  info.patterns.reserve(pair_count(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) {
    for (std::size_t j = i + 1; j < cols.size(); ++j) {
      Pattern p{Pair(cols[i], cols[j]), 0.0, ds.rows(), {}};
      if (auto phi = phi_coefficient(count_columns(ds, i, j))) {
        p.phi = *phi;
        if (correct) {
          p.phi = correct_for_noise(p.phi, delivered->noise_rate);
          p.tags.add(PatternTag::NoiseCorrected);
        }
      } else {
        p.tags.add(PatternTag::Degenerate);
      }
      if (selected && !p.pair.contains(*selected)) p.tags.add(PatternTag::SelectionConditioned);

      if (auto implied = p.implied(params.thresholds)) {
        const bool disputed = std::any_of(sources.begin(), sources.end(), [&](const KnowledgeBase* kb) {
          const WeightedClaim* wc = kb->find(p.pair);
          return wc != nullptr && wc->claim.polarity != *implied && wc->confidence >= params.veto_confidence;
        });
        if (disputed) p.tags.add(PatternTag::Disputed);
      }
      info.patterns.push_back(p);
    }
  }
  std::sort(info.patterns.begin(), info.patterns.end(),
            [](const Pattern& a, const Pattern& b) { return a.pair < b.pair; });

  info.info_sheet.mining_team = miner;
  info.info_sheet.params = params;
  info.info_sheet.corrections_applied = CorrectionFlags{correct, selected != nullptr};
  info.info_sheet.upstream_datasheet = delivered;
  info.info_sheet.knowledge_snapshot = miner_kb;
  return info;
}

}  // namespace ktsim
