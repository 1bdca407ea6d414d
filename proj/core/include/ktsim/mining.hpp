#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ktsim/agents.hpp"
#include "ktsim/experimenting.hpp"
#include "ktsim/knowledge.hpp"

namespace ktsim {

// |phi| >= dependent labels Dependent, |phi| <= independent labels Independent,
// anything in between implies nothing.
struct PolarityThresholds {
  double dependent = 0.3;
  double independent = 0.05;

  void validate() const;
  std::optional<Polarity> implied(double phi) const noexcept;

  friend bool operator==(const PolarityThresholds&, const PolarityThresholds&) = default;
};

struct MiningParams {
  bool report_all = true;
  double veto_confidence = 0.8;
  PolarityThresholds thresholds;

  void validate() const;

  friend bool operator==(const MiningParams&, const MiningParams&) = default;
};

enum class PatternTag : std::uint8_t {
  NoiseCorrected = 1U << 0,
  SelectionConditioned = 1U << 1,
  Degenerate = 1U << 2,
  Disputed = 1U << 3,
};

std::string_view to_string(PatternTag t) noexcept;
inline constexpr PatternTag kAllPatternTags[] = {PatternTag::NoiseCorrected, PatternTag::SelectionConditioned,
                                                 PatternTag::Degenerate, PatternTag::Disputed};

class TagSet {
 public:
  constexpr TagSet() = default;

  constexpr bool has(PatternTag t) const noexcept { return (bits_ & static_cast<std::uint8_t>(t)) != 0; }
  constexpr void add(PatternTag t) noexcept { bits_ |= static_cast<std::uint8_t>(t); }
  constexpr std::uint8_t bits() const noexcept { return bits_; }

  friend constexpr bool operator==(TagSet, TagSet) = default;

 private:
  std::uint8_t bits_ = 0;
};

struct Pattern {
  Pair pair;
  double phi = 0.0;  // 0 when degenerate
  std::size_t support = 0;
  TagSet tags;

  std::optional<Polarity> implied(const PolarityThresholds& t) const noexcept {
    return tags.has(PatternTag::Degenerate) ? std::nullopt : t.implied(phi);
  }

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

struct CorrectionFlags {
  bool noise_corrected = false;
  bool selection_flagged = false;

  friend bool operator==(const CorrectionFlags&, const CorrectionFlags&) = default;
};

struct InfoSheet {
  TeamId mining_team;
  MiningParams params;
  CorrectionFlags corrections_applied;
  std::optional<Datasheet> upstream_datasheet;
  std::optional<KnowledgeBase> knowledge_snapshot;

  friend bool operator==(const InfoSheet&, const InfoSheet&) = default;
};

struct Information {
  TeamId source_dataset;  // experimenting team that produced the data
  std::vector<Pattern> patterns;  // sorted by pair
  InfoSheet info_sheet;

  const Pattern* find(const Pair& p) const;

  friend bool operator==(const Information&, const Information&) = default;
};

// 2x2 contingency counts for two binary columns.
struct Contingency {
  std::size_t n00 = 0, n01 = 0, n10 = 0, n11 = 0;

  std::size_t total() const noexcept { return n00 + n01 + n10 + n11; }
};

Contingency contingency(const Dataset& ds, VariableId u, VariableId v);

// (ad - bc) / sqrt((a+b)(c+d)(a+c)(b+d)); nullopt when any margin is zero.
std::optional<double> phi_coefficient(const Contingency& t);

// Throws ConfigError if u or v is not a column of ds.
std::optional<double> phi_coefficient(const Dataset& ds, VariableId u, VariableId v);

// Inverse of the symmetric bit-flip attenuation (1 - 2 delta)^2, clamped to [-1, 1].
double correct_for_noise(double phi, double noise_rate);

// One pattern per measured pair. The delivered datasheet, when present, drives
// noise correction and selection tagging and contributes its knowledge
// snapshot to the dispute check. Consumes no randomness.
Information mine(const Dataset& ds, TeamId source, TeamId miner, const KnowledgeBase& miner_kb,
                 const std::optional<Datasheet>& delivered, std::span<const KnowledgeBase> peer_kbs,
                 const MiningParams& params);

}  // namespace ktsim
