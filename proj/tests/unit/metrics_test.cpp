#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "ktsim/error.hpp"
#include "ktsim/ground_truth.hpp"
#include "ktsim/metrics.hpp"
#include "ktsim/monotonicity.hpp"

namespace ktsim {
namespace {

Pair P(std::uint32_t a, std::uint32_t b) { return Pair(VariableId{a}, VariableId{b}); }
Claim Dep(std::uint32_t a, std::uint32_t b) { return Claim{P(a, b), Polarity::Dependent}; }
Claim Indep(std::uint32_t a, std::uint32_t b) { return Claim{P(a, b), Polarity::Independent}; }

LabeledKnowledge lk_of(TeamTriple t, std::initializer_list<Claim> claims) {
  LabeledKnowledge lk;
  lk.triple = t;
  for (const auto& c : claims) lk.claims.insert_or_assign(c.pair, LabeledClaim{c, ClaimOrigin::Pattern});
  return lk;
}

// Two trees: {0,1,2} and {3,4}.
GroundTruth two_trees() {
  using V = std::optional<VariableId>;
  return GroundTruth({V{}, V{VariableId{0}}, V{VariableId{1}}, V{}, V{VariableId{3}}}, 0.9);
}

TEST(OpennessTest, EmptyUnionIsZero) {
  const auto r = openness(std::span<const LabeledKnowledge>{}, two_trees());
  EXPECT_EQ(r.union_size, 0U);
  EXPECT_EQ(r.openness, 0);
  EXPECT_EQ(r.normalized, 0.0);
}

TEST(OpennessTest, ThreeTrueOneFalse) {
  const std::vector<LabeledKnowledge> lks{lk_of({0, 0, 0}, {Dep(0, 1), Dep(1, 2)}),
                                          lk_of({0, 0, 1}, {Indep(0, 3), Indep(0, 2)})};
  const auto r = openness(lks, two_trees());
  EXPECT_EQ(r.union_size, 4U);
  EXPECT_EQ(r.true_count, 3U);
  EXPECT_EQ(r.false_count, 1U);
  EXPECT_EQ(r.openness, 2);
  EXPECT_EQ(r.normalized, 0.5);
  ASSERT_EQ(r.per_triple.size(), 2U);
  EXPECT_EQ(r.per_triple[1], (TripleCounts{{0, 0, 1}, 2, 1, 1}));
}

TEST(OpennessTest, OppositeClaimsBothCount) {
  const std::vector<LabeledKnowledge> lks{lk_of({0, 0, 0}, {Dep(0, 1)}), lk_of({0, 0, 1}, {Indep(0, 1)})};
  const auto r = openness(lks, two_trees());
  EXPECT_EQ(r.union_size, 2U);
  EXPECT_EQ(r.true_count, 1U);
  EXPECT_EQ(r.false_count, 1U);
  EXPECT_EQ(r.openness, 0);
}

TEST(OpennessTest, BareClaimsAndRangeCheck) {
  const std::vector<Claim> claims{Dep(0, 1), Dep(0, 1), Dep(3, 4), Dep(0, 4)};
  const auto r = openness_of_claims(claims, two_trees());
  EXPECT_EQ(r.union_size, 3U);
  EXPECT_EQ(r.openness, 1);
  const std::vector<Claim> bad{Dep(0, 7)};
  EXPECT_THROW(openness_of_claims(bad, two_trees()), ConfigError);
}

LabeledKnowledge random_lk(std::mt19937_64& rng, std::uint32_t m, TeamTriple t) {
  LabeledKnowledge lk;
  lk.triple = t;
  for (const Pair& p : all_pairs(m)) {
    if (rng() % 3 == 0) {
      const Claim c{p, rng() % 2 ? Polarity::Dependent : Polarity::Independent};
      lk.claims.insert_or_assign(p, LabeledClaim{c, ClaimOrigin::Pattern});
    }
  }
  return lk;
}

void expect_same_totals(const OpennessReport& a, const OpennessReport& b) {
  EXPECT_EQ(a.union_size, b.union_size);
  EXPECT_EQ(a.true_count, b.true_count);
  EXPECT_EQ(a.false_count, b.false_count);
  EXPECT_EQ(a.openness, b.openness);
  EXPECT_EQ(a.normalized, b.normalized);
}

TEST(OpennessProperty, InvariantUnderPermutationAndDuplication) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    SeedStream gt_rng(rng());
    const GroundTruth gt = build_ground_truth(8, 1 + rng() % 8, 0.9, gt_rng);
    std::vector<LabeledKnowledge> lks;
    const std::uint32_t count = 1 + static_cast<std::uint32_t>(rng() % 4);
    for (std::uint32_t i = 0; i < count; ++i) lks.push_back(random_lk(rng, 8, {0, 0, i}));
    const auto base = openness(lks, gt);
    EXPECT_EQ(base.true_count + base.false_count, base.union_size);
    EXPECT_GE(base.normalized, -1.0);
    EXPECT_LE(base.normalized, 1.0);

    auto shuffled = lks;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    shuffled.push_back(lks[rng() % lks.size()]);
    const auto other = openness(shuffled, gt);
    expect_same_totals(base, other);
    EXPECT_EQ(base.per_triple, other.per_triple);
  }
}

TEST(OpennessProperty, IdenticalClaimSetsMatchOneTriple) {
  const auto one = lk_of({0, 0, 0}, {Dep(0, 1), Indep(1, 3)});
  auto two = one;
  two.triple = {1, 1, 1};
  const std::vector<LabeledKnowledge> single{one};
  const std::vector<LabeledKnowledge> both{one, two};
  expect_same_totals(openness(single, two_trees()), openness(both, two_trees()));
}

TEST(OpennessProperty, TrueOnlyAdditionsNeverHurtFalseOnlyNeverHelp) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    SeedStream gt_rng(rng());
    const GroundTruth gt = build_ground_truth(9, 1 + rng() % 9, 0.9, gt_rng);
    std::vector<LabeledKnowledge> lks{random_lk(rng, 9, {0, 0, 0}), random_lk(rng, 9, {0, 0, 1})};
    const auto base = openness(lks, gt).openness;

    LabeledKnowledge good, bad;
    good.triple = bad.triple = {0, 0, 2};
    for (const Pair& p : all_pairs(9)) {
      if (rng() % 2) continue;
      const Claim truth = true_claim(p, gt);
      good.claims.insert_or_assign(p, LabeledClaim{truth, ClaimOrigin::Pattern});
      bad.claims.insert_or_assign(p, LabeledClaim{negate(truth), ClaimOrigin::Pattern});
    }
    auto with_good = lks;
    with_good.push_back(good);
    auto with_bad = lks;
    with_bad.push_back(bad);
    EXPECT_GE(openness(with_good, gt).openness, base);
    EXPECT_LE(openness(with_bad, gt).openness, base);
  }
}

TEST(ValidatorTest, ZeroTrialsRejected) {
  EXPECT_THROW(validate_monotonicity(0, ScenarioConfig{}, 1), ConfigError);
}

ScenarioConfig small_scenario() {
  ScenarioConfig cfg;
  cfg.variables = 12;
  cfg.trees = 2;
  cfg.samples = 800;
  cfg.target_width = 6;
  cfg.agents = 8;
  cfg.coverage = 0.4;
  return cfg;
}

TEST(ValidatorTest, NoViolationsOnSoundLabeler) {
  const auto report = validate_monotonicity(150, small_scenario(), 10);
  EXPECT_EQ(report.trials, 150U);
  EXPECT_EQ(report.violations, 0U);
  EXPECT_TRUE(report.violating.empty());
}

TEST(ValidatorTest, NegativeControlReportsViolations) {
  ScenarioConfig cfg = small_scenario();
  cfg.labeling_params.break_passthrough = true;
  const auto report = validate_monotonicity(150, cfg, 10);
  EXPECT_GT(report.violations, 0U);
  EXPECT_EQ(report.violating.size(), report.violations);
  for (const auto& t : report.violating) EXPECT_TRUE(t.violated());
}

TEST(ValidatorTest, JobCountDoesNotChangeResults) {
  ScenarioConfig cfg = small_scenario();
  cfg.labeling_params.break_passthrough = true;
  const auto a = validate_monotonicity(40, cfg, 11, 1);
  const auto b = validate_monotonicity(40, cfg, 11, 3);
  ASSERT_EQ(a.violations, b.violations);
  for (std::size_t i = 0; i < a.violating.size(); ++i) {
    EXPECT_EQ(a.violating[i].index, b.violating[i].index);
    EXPECT_EQ(a.violating[i].added, b.violating[i].added);
    EXPECT_EQ(a.violating[i].before, b.violating[i].before);
  }
}

}  // namespace
}  // namespace ktsim
