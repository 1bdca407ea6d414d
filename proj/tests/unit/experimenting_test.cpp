#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "ktsim/error.hpp"
#include "ktsim/experimenting.hpp"
#include "ktsim/ground_truth.hpp"
#include "ktsim/mining.hpp"
#include "oracles.hpp"

namespace ktsim {
namespace {

Pair P(std::uint32_t a, std::uint32_t b) { return Pair(VariableId{a}, VariableId{b}); }

ExperimentDesign design_of(std::vector<std::uint32_t> ids, double delta, std::size_t n,
                           std::optional<std::uint32_t> select = std::nullopt) {
  ExperimentDesign d;
  for (auto i : ids) d.measured.push_back(VariableId{i});
  d.noise_rate = delta;
  d.samples = n;
  if (select) d.selection = SelectionCondition{VariableId{*select}, 1};
  return d;
}

std::vector<int> column(const Dataset& ds, std::size_t c) {
  std::vector<int> out(ds.rows());
  for (std::size_t r = 0; r < ds.rows(); ++r) out[r] = ds.at(r, c);
  return out;
}

double phi_of(const SampledDataset& s, std::uint32_t a, std::uint32_t b) {
  return phi_coefficient(s.dataset, VariableId{a}, VariableId{b}).value();
}

TEST(DesignTest, EmptyKnowledgeFallsBackToRandomVariables) {
  SeedStream rng(1);
  const auto d = design_experiment(KnowledgeBase{}, 20, 5, 0.0, 0.0, 10, rng);
  EXPECT_EQ(d.measured.size(), 5U);
  EXPECT_TRUE(std::is_sorted(d.measured.begin(), d.measured.end()));
  EXPECT_EQ(std::set<VariableId>(d.measured.begin(), d.measured.end()).size(), 5U);
  EXPECT_FALSE(d.selection);
}

TEST(DesignTest, DependentClaimFillsWidth) {
  KnowledgeBase kb;
  kb.insert({Claim{P(2, 7), Polarity::Dependent}, 0.9});
  kb.insert({Claim{P(3, 4), Polarity::Independent}, 0.99});
  SeedStream rng(2);
  const auto d = design_experiment(kb, 10, 2, 0.0, 0.0, 10, rng);
  EXPECT_EQ(d.measured, (std::vector<VariableId>{VariableId{2}, VariableId{7}}));
}

TEST(DesignTest, HighestConfidenceClaimsComeFirst) {
  KnowledgeBase kb;
  kb.insert({Claim{P(0, 1), Polarity::Dependent}, 0.6});
  kb.insert({Claim{P(5, 8), Polarity::Dependent}, 0.95});
  SeedStream rng(3);
  const auto d = design_experiment(kb, 10, 2, 0.0, 0.0, 10, rng);
  EXPECT_EQ(d.measured, (std::vector<VariableId>{VariableId{5}, VariableId{8}}));
}

TEST(DesignTest, SelectionProbabilityOneAlwaysSelects) {
  SeedStream rng(4);
  for (int i = 0; i < 50; ++i) {
    const auto d = design_experiment(KnowledgeBase{}, 12, 4, 1.0, 0.1, 10, rng);
    ASSERT_TRUE(d.selection);
    EXPECT_EQ(d.selection->value, 1);
    EXPECT_NE(std::find(d.measured.begin(), d.measured.end(), d.selection->variable), d.measured.end());
  }
}

TEST(DesignTest, RejectsBadWidthAndProbability) {
  SeedStream rng(5);
  EXPECT_THROW(design_experiment(KnowledgeBase{}, 5, 1, 0.0, 0.0, 10, rng), ConfigError);
  EXPECT_THROW(design_experiment(KnowledgeBase{}, 5, 6, 0.0, 0.0, 10, rng), ConfigError);
  EXPECT_THROW(design_experiment(KnowledgeBase{}, 5, 3, 1.5, 0.0, 10, rng), ConfigError);
  EXPECT_THROW(design_experiment(KnowledgeBase{}, 5, 3, 0.0, 0.5, 10, rng), ConfigError);
}

TEST(SampleTest, DimensionsAndDatasheet) {
  const GroundTruth gt = make_chain(6, 0.9);
  const auto design = design_of({0, 2, 5}, 0.1, 123, 2);
  const auto s = sample_dataset(gt, design, TeamId{Role::Experimenting, 1}, 77);
  EXPECT_EQ(s.dataset.rows(), 123U);
  EXPECT_EQ(s.dataset.cols(), 3U);
  EXPECT_EQ(s.datasheet.measured, design.measured);
  EXPECT_EQ(s.datasheet.selection, design.selection);
  EXPECT_EQ(s.datasheet.noise_rate, 0.1);
  EXPECT_EQ(s.datasheet.samples, 123U);
  EXPECT_EQ(s.datasheet.team_id, (TeamId{Role::Experimenting, 1}));
  EXPECT_EQ(s.datasheet.seed_fingerprint, seed_fingerprint(77));
  EXPECT_EQ(s.datasheet.seed_fingerprint.size(), 16U);
  for (std::size_t r = 0; r < s.dataset.rows(); ++r) {
    for (std::size_t c = 0; c < s.dataset.cols(); ++c) EXPECT_LE(s.dataset.at(r, c), 1);
  }
}

TEST(SampleTest, DeterministicUnderSeed) {
  const GroundTruth gt = make_chain(5, 0.85);
  const auto design = design_of({0, 1, 3, 4}, 0.05, 500, 1);
  const auto a = sample_dataset(gt, design, {}, 9);
  const auto b = sample_dataset(gt, design, {}, 9);
  const auto c = sample_dataset(gt, design, {}, 10);
  EXPECT_EQ(a.dataset, b.dataset);
  EXPECT_EQ(a.dataset.content_hash(), b.dataset.content_hash());
  EXPECT_NE(a.dataset, c.dataset);
}

TEST(SampleTest, RejectsInvalidDesign) {
  const GroundTruth gt = make_chain(4, 0.9);
  EXPECT_THROW(sample_dataset(gt, design_of({0}, 0.0, 10), {}, 1), ConfigError);
  EXPECT_THROW(sample_dataset(gt, design_of({0, 9}, 0.0, 10), {}, 1), ConfigError);
  EXPECT_THROW(sample_dataset(gt, design_of({0, 1}, 0.0, 10, 3), {}, 1), ConfigError);
  EXPECT_THROW(sample_dataset(gt, design_of({0, 1}, 0.0, 0), {}, 1), ConfigError);
}

TEST(SampleTest, MarginalIsHalf) {
  SeedStream rng(6);
  const GroundTruth gt = build_ground_truth(10, 3, 0.9, rng);
  const auto s = sample_dataset(gt, design_of({0, 3, 6, 9}, 0.0, 10000), {}, 11);
  for (std::size_t c = 0; c < 4; ++c) {
    const auto col = column(s.dataset, c);
    const double mean = std::accumulate(col.begin(), col.end(), 0.0) / 10000.0;
    EXPECT_GE(mean, 0.47);
    EXPECT_LE(mean, 0.53);
  }
}

TEST(SampleTest, AdjacentPairPhi) {
  const GroundTruth gt = make_chain(2, 0.9);
  EXPECT_NEAR(phi_of(sample_dataset(gt, design_of({0, 1}, 0.0, 100000), {}, 12), 0, 1), 0.8, 0.01);
  EXPECT_NEAR(phi_of(sample_dataset(gt, design_of({0, 1}, 0.1, 100000), {}, 13), 0, 1), 0.512, 0.01);
}

TEST(SampleTest, PhiAgreesWithPearsonOracle) {
  const GroundTruth gt = make_chain(3, 0.8);
  const auto s = sample_dataset(gt, design_of({0, 2}, 0.05, 20000), {}, 14);
  EXPECT_NEAR(phi_of(s, 0, 2), testing::pearson(column(s.dataset, 0), column(s.dataset, 1)), 1e-9);
}

TEST(SampleTest, DifferentTreesAreIndependent) {
  using V = std::optional<VariableId>;
  // trees {0,1,2} and {3,4}
  const GroundTruth gt({V{}, V{VariableId{0}}, V{VariableId{1}}, V{}, V{VariableId{3}}}, 0.9);
  const auto s = sample_dataset(gt, design_of({0, 1, 2, 3, 4}, 0.0, 100000), {}, 15);
  for (std::uint32_t a : {0U, 1U, 2U}) {
    for (std::uint32_t b : {3U, 4U}) EXPECT_LT(std::abs(phi_of(s, a, b)), 0.02) << a << "," << b;
  }
}

// Simulated by the sampler and, independently, by the chain oracle.
TEST(SampleTest, DistanceLaw) {
  for (double p : {0.8, 0.9}) {
    const GroundTruth gt = make_chain(4, p);
    const auto s = sample_dataset(gt, design_of({0, 1, 2, 3}, 0.0, 100000), {}, 16);
    for (std::uint32_t d = 1; d <= 3; ++d) {
      const double analytic = std::pow(2 * p - 1, d);
      EXPECT_NEAR(phi_of(s, 0, d), analytic, 0.015) << "p=" << p << " d=" << d;
      EXPECT_NEAR(testing::simulate_chain_phi(p, d, 0.0, 100000, 100 + d), analytic, 0.015);
    }
  }
}

TEST(SampleTest, NoiseAttenuationRatio) {
  const GroundTruth gt = make_chain(2, 0.9);
  const double clean = phi_of(sample_dataset(gt, design_of({0, 1}, 0.0, 100000), {}, 17), 0, 1);
  for (double delta : {0.05, 0.1, 0.2}) {
    const double noisy = phi_of(sample_dataset(gt, design_of({0, 1}, delta, 100000), {}, 18), 0, 1);
    EXPECT_NEAR(noisy / clean, (1 - 2 * delta) * (1 - 2 * delta), 0.03) << "delta=" << delta;
  }
}

TEST(SampleTest, SelectionMasksDependenceAcrossSelectedVariable) {
  const GroundTruth gt = make_chain(3, 0.9);
  ASSERT_TRUE(gt.path_crosses(VariableId{0}, VariableId{2}, VariableId{1}));
  const auto s = sample_dataset(gt, design_of({0, 1, 2}, 0.0, 100000, 1), {}, 19);
  EXPECT_LT(std::abs(phi_of(s, 0, 2)), 0.03);
  for (std::size_t r = 0; r < s.dataset.rows(); ++r) ASSERT_EQ(s.dataset.at(r, 1), 1);
  // Without selection the same pair is strongly dependent.
  const auto open = sample_dataset(gt, design_of({0, 1, 2}, 0.0, 100000), {}, 19);
  EXPECT_NEAR(phi_of(open, 0, 2), 0.64, 0.015);
}

TEST(SampleTest, NoiseAppliesAfterSelection) {
  const GroundTruth gt = make_chain(2, 0.9);
  const auto s = sample_dataset(gt, design_of({0, 1}, 0.2, 50000, 0), {}, 20);
  const auto col = column(s.dataset, 0);
  const double mean = std::accumulate(col.begin(), col.end(), 0.0) / 50000.0;
  EXPECT_NEAR(mean, 0.8, 0.01);
}

}  // namespace
}  // namespace ktsim
