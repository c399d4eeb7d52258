#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "regionplan/losses.hpp"
#include "support/test_util.hpp"

namespace regionplan {
namespace {

using testing::as_real;
using testing::oracle_neighbour_sum;

// Scalar oracles written directly from the loss definitions.

double oracle_wbce(const ProbabilityMap& pred, const RegionMask& gt, double sigma, double eps) {
  const Raster<double> g = as_real(gt);
  double sum = 0.0;
  for (int y = 0; y < gt.height(); ++y) {
    for (int x = 0; x < gt.width(); ++x) {
      const double w =
          std::abs(oracle_neighbour_sum(g, x, y) - oracle_neighbour_sum(pred, x, y)) + sigma;
      const double p = std::clamp(pred(x, y), eps, 1.0 - eps);
      const double t = g(x, y);
      sum += -w * (t * std::log(p) + (1.0 - t) * std::log(1.0 - p));
    }
  }
  return sum;
}

double oracle_dice(const ProbabilityMap& pred, const RegionMask& gt) {
  double inter = 0.0, sp = 0.0, sg = 0.0;
  for (int y = 0; y < gt.height(); ++y) {
    for (int x = 0; x < gt.width(); ++x) {
      inter += pred(x, y) * gt(x, y);
      sp += pred(x, y);
      sg += gt(x, y);
    }
  }
  return (2.0 * inter + 1.0) / (sp + sg + 1.0);
}

double oracle_purity_loss(const ProbabilityMap& pred, const RegionMask& gt) {
  const Raster<double> g = as_real(gt);
  double sum = 0.0;
  for (int y = 0; y < gt.height(); ++y) {
    for (int x = 0; x < gt.width(); ++x) {
      sum += std::abs(oracle_neighbour_sum(g, x, y) - oracle_neighbour_sum(pred, x, y));
    }
  }
  return sum;
}

RegionMask oracle_block_max(const RegionMask& gt, int level) {
  const int b = 1 << level;
  RegionMask out(gt.width() / b, gt.height() / b, 0);
  for (int y = 0; y < gt.height(); ++y) {
    for (int x = 0; x < gt.width(); ++x) {
      if (gt(x, y)) out(x / b, y / b) = 1;
    }
  }
  return out;
}

TEST(PurityMatrix, ThreeByThreeOnes) {
  const PurityMatrix p = purity_matrix(RegionMask(3, 3, 1));
  EXPECT_EQ(p(1, 1), 8.0);
  EXPECT_EQ(p(1, 0), 5.0);
  EXPECT_EQ(p(0, 1), 5.0);
  EXPECT_EQ(p(2, 1), 5.0);
  EXPECT_EQ(p(1, 2), 5.0);
  EXPECT_EQ(p(0, 0), 3.0);
  EXPECT_EQ(p(2, 2), 3.0);
}

TEST(PurityMatrix, ZerosAndBruteForce) {
  const PurityMatrix zero = purity_matrix(RegionMask(5, 4, 0));
  for (double v : zero.cells()) EXPECT_EQ(v, 0.0);

  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 50; ++trial) {
    const RegionMask m = testing::random_mask(gen, 16, 16);
    const PurityMatrix p = purity_matrix(m);
    const Raster<double> r = as_real(m);
    for (int y = 0; y < 16; ++y) {
      for (int x = 0; x < 16; ++x) ASSERT_EQ(p(x, y), oracle_neighbour_sum(r, x, y));
    }
  }
}

TEST(PurityMatrix, RealInputsStayInRange) {
  std::mt19937_64 gen(2);
  const ProbabilityMap pm = testing::random_probabilities(gen, 9, 7);
  const PurityMatrix p = purity_matrix(pm);
  for (int y = 0; y < 7; ++y) {
    for (int x = 0; x < 9; ++x) {
      EXPECT_NEAR(p(x, y), oracle_neighbour_sum(pm, x, y), 1e-12);
      EXPECT_GE(p(x, y), 0.0);
      EXPECT_LE(p(x, y), 8.0);
    }
  }
}

TEST(WeightedBce, ExactPredictionHitsClampedFloor) {
  std::mt19937_64 gen(4);
  const RegionMask gt = testing::random_mask(gen, 8, 8);
  const ProbabilityMap pred = to_probabilities(gt);
  const LossConfig cfg;
  const double floor = -std::log(1.0 - cfg.epsilon_clamp) * 64;
  EXPECT_NEAR(weighted_bce(pred, gt, cfg), clamped_bce(pred, gt, cfg.epsilon_clamp), 1e-12);
  EXPECT_NEAR(weighted_bce(pred, gt, cfg), floor, 1e-12);
}

TEST(WeightedBce, ReducesToPlainBceWhenPuritiesAgree) {
  // Prediction equals gt, so the purity difference is zero everywhere.
  const RegionMask gt(6, 6, 1);
  const ProbabilityMap pred(6, 6, 1.0);
  const LossConfig cfg;
  EXPECT_NEAR(weighted_bce(pred, gt, cfg), clamped_bce(pred, gt, cfg.epsilon_clamp), 1e-12);
}

TEST(WeightedBce, MatchesScalarOracle) {
  std::mt19937_64 gen(17);
  LossConfig cfg;
  for (int trial = 0; trial < 30; ++trial) {
    const RegionMask gt = testing::random_mask(gen, 8, 8);
    const ProbabilityMap pred = testing::random_probabilities(gen, 8, 8);
    const double expected = oracle_wbce(pred, gt, cfg.sigma_smoothing, cfg.epsilon_clamp);
    EXPECT_NEAR(weighted_bce(pred, gt, cfg), expected, 1e-9 * std::max(1.0, expected));
  }
}

TEST(WeightedBce, SigmaShiftAddsUnweightedBce) {
  std::mt19937_64 gen(5);
  const RegionMask gt = testing::random_mask(gen, 8, 8);
  const ProbabilityMap pred = testing::random_probabilities(gen, 8, 8);
  LossConfig a, b;
  b.sigma_smoothing = a.sigma_smoothing + 0.75;
  const double delta = weighted_bce(pred, gt, b) - weighted_bce(pred, gt, a);
  EXPECT_NEAR(delta, 0.75 * clamped_bce(pred, gt, a.epsilon_clamp), 1e-9);
}

TEST(WeightedBce, ShapeMismatch) {
  EXPECT_THROW(weighted_bce(ProbabilityMap(4, 4, 0.5), RegionMask(4, 5, 0), {}), Error);
}

TEST(Dice, Examples) {
  std::mt19937_64 gen(6);
  RegionMask gt = testing::random_mask(gen, 16, 16);
  gt(0, 0) = 1;
  EXPECT_NEAR(dice_coefficient(to_probabilities(gt), gt), 1.0, 1e-6);

  // Two disjoint 100-cell masks.
  RegionMask a(20, 20, 0), b(20, 20, 0);
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 20; ++x) {
      a(x, y) = 1;
      b(x, y + 10) = 1;
    }
  }
  EXPECT_NEAR(dice_coefficient(to_probabilities(a), b), 1.0 / 201.0, 1e-15);

  RegionMask two(8, 8, 0);
  two(0, 0) = two(1, 0) = 1;
  ProbabilityMap pred(8, 8, 0.0);
  pred(0, 0) = pred(5, 5) = 1.0;
  EXPECT_NEAR(dice_coefficient(pred, two), 0.6, 1e-15);
  EXPECT_NEAR(dice_loss(pred, two), 0.4, 1e-15);

  EXPECT_EQ(dice_coefficient(ProbabilityMap(8, 8, 0.0), RegionMask(8, 8, 0)), 1.0);
}

TEST(Dice, RangeSymmetryAndOracle) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    const RegionMask a = testing::random_mask(gen, 8, 8, 0.3);
    const RegionMask b = testing::random_mask(gen, 8, 8, 0.6);
    const double ab = dice_coefficient(to_probabilities(a), b);
    EXPECT_EQ(ab, dice_coefficient(to_probabilities(b), a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    const ProbabilityMap p = testing::random_probabilities(gen, 8, 8);
    EXPECT_NEAR(dice_coefficient(p, a), oracle_dice(p, a), 1e-12);
  }
}

TEST(PurityLoss, Examples) {
  std::mt19937_64 gen(8);
  const RegionMask gt = testing::random_mask(gen, 8, 8);
  EXPECT_EQ(purity_loss(to_probabilities(gt), gt), 0.0);
  EXPECT_EQ(purity_loss(ProbabilityMap(3, 3, 1.0), RegionMask(3, 3, 0)), 40.0);
  for (int trial = 0; trial < 30; ++trial) {
    const RegionMask g = testing::random_mask(gen, 8, 8);
    const ProbabilityMap p = testing::random_probabilities(gen, 8, 8);
    EXPECT_NEAR(purity_loss(p, g), oracle_purity_loss(p, g), 1e-10);
  }
}

TEST(DownsampleMask, ShapesAndContent) {
  const RegionMask big(256, 256, 0);
  const RegionMask half = downsample_mask(big, 1);
  EXPECT_EQ(half.width(), 128);
  EXPECT_EQ(half.height(), 128);
  for (int l = 1; l <= 4; ++l) {
    const RegionMask d = downsample_mask(big, l);
    EXPECT_EQ(d.width(), 256 >> l);
    EXPECT_TRUE(std::all_of(d.cells().begin(), d.cells().end(), [](auto c) { return c == 0; }));
  }

  RegionMask one(64, 64, 0);
  one(37, 21) = 1;
  for (int l = 1; l <= 4; ++l) {
    const RegionMask d = downsample_mask(one, l);
    int positives = 0;
    for (auto c : d.cells()) positives += c;
    EXPECT_EQ(positives, 1);
    EXPECT_EQ(d(37 >> l, 21 >> l), 1);
  }

  std::mt19937_64 gen(9);
  const RegionMask r = testing::random_mask(gen, 32, 48, 0.05);
  for (int l = 1; l <= 4; ++l) EXPECT_EQ(downsample_mask(r, l), oracle_block_max(r, l));
}

TEST(DownsampleMask, Errors) {
  EXPECT_THROW(downsample_mask(RegionMask(24, 24, 0), 4), Error);
  EXPECT_THROW(downsample_mask(RegionMask(16, 16, 0), 0), Error);
  EXPECT_THROW(downsample_mask(RegionMask(16, 16, 0), 5), Error);
}

TEST(SupervisedLoss, BetaDefaults) {
  const LossConfig cfg;
  EXPECT_EQ(cfg.beta, (std::array<double, 4>{1.0, 0.5, 0.25, 0.125}));
  for (int l = 1; l <= 4; ++l) EXPECT_EQ(cfg.beta[l - 1], std::pow(2.0, -(l - 1)));
}

TEST(SupervisedLoss, PerfectSideOutputs) {
  std::mt19937_64 gen(10);
  const RegionMask gt = testing::random_mask(gen, 32, 32, 0.4);
  const LossConfig cfg;
  std::vector<ProbabilityMap> sides;
  double floor = 0.0;
  for (int l = 1; l <= 4; ++l) {
    const RegionMask d = downsample_mask(gt, l);
    sides.push_back(to_probabilities(d));
    floor += cfg.beta[l - 1] * clamped_bce(sides.back(), d, cfg.epsilon_clamp);
    EXPECT_NEAR(dice_loss(sides.back(), d), 0.0, 1e-6);
  }
  EXPECT_NEAR(supervised_loss(sides, gt, cfg), floor, 1e-6);
}

TEST(SupervisedLoss, TwoLevelToyCase) {
  RegionMask gt(4, 4, 0);
  gt(0, 0) = gt(1, 1) = gt(3, 2) = 1;
  ProbabilityMap s1(2, 2), s2(1, 1);
  s1(0, 0) = 0.9;
  s1(1, 0) = 0.2;
  s1(0, 1) = 0.3;
  s1(1, 1) = 0.6;
  s2(0, 0) = 0.7;
  const LossConfig cfg;

  // Level 1 gt: [[1,0],[0,1]]; level 2 gt: [[1]].
  RegionMask g1(2, 2, 0), g2(1, 1, 1);
  g1(0, 0) = g1(1, 1) = 1;
  const double level1 = oracle_wbce(s1, g1, 1.0, cfg.epsilon_clamp) + 1.0 - oracle_dice(s1, g1);
  const double level2 = oracle_wbce(s2, g2, 1.0, cfg.epsilon_clamp) + 1.0 - oracle_dice(s2, g2);
  const std::vector<ProbabilityMap> sides{s1, s2};
  EXPECT_NEAR(supervised_loss(sides, gt, cfg), 1.0 * level1 + 0.5 * level2, 1e-12);
}

TEST(SupervisedLoss, ShapeMismatch) {
  const std::vector<ProbabilityMap> sides{ProbabilityMap(3, 3, 0.5)};
  EXPECT_THROW(supervised_loss(sides, RegionMask(8, 8, 0), {}), Error);
}

TEST(HybridLoss, Reductions) {
  std::mt19937_64 gen(12);
  const RegionMask gt = testing::random_mask(gen, 16, 16);
  const ProbabilityMap pred = testing::random_probabilities(gen, 16, 16);
  LossConfig cfg;
  cfg.alpha = 0.0;
  EXPECT_NEAR(hybrid_loss(pred, {}, gt, cfg), weighted_bce(pred, gt, cfg) + dice_loss(pred, gt),
              1e-12);

  cfg.alpha = 0.3;
  std::vector<ProbabilityMap> sides;
  for (int l = 1; l <= 4; ++l) sides.push_back(testing::random_probabilities(gen, 16 >> l, 16 >> l));
  const double parts = weighted_bce(pred, gt, cfg) + dice_loss(pred, gt) +
                       0.3 * purity_loss(pred, gt) + supervised_loss(sides, gt, cfg);
  EXPECT_NEAR(hybrid_loss(pred, sides, gt, cfg), parts, 1e-12);
}

TEST(HybridLoss, CompositeOracle) {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 20; ++trial) {
    const RegionMask gt = testing::random_mask(gen, 8, 8);
    const ProbabilityMap pred = testing::random_probabilities(gen, 8, 8);
    std::vector<ProbabilityMap> sides;
    for (int l = 1; l <= 3; ++l) sides.push_back(testing::random_probabilities(gen, 8 >> l, 8 >> l));
    const LossConfig cfg;
    const double alpha = 1.0 / (8.0 * 64.0);
    double expected = oracle_wbce(pred, gt, 1.0, 1e-7) + 1.0 - oracle_dice(pred, gt) +
                      alpha * oracle_purity_loss(pred, gt);
    const double beta[] = {1.0, 0.5, 0.25};
    for (int l = 1; l <= 3; ++l) {
      const RegionMask d = oracle_block_max(gt, l);
      const ProbabilityMap& s = sides[l - 1];
      expected += beta[l - 1] * (oracle_wbce(s, d, 1.0, 1e-7) + 1.0 - oracle_dice(s, d));
    }
    EXPECT_NEAR(hybrid_loss(pred, sides, gt, cfg), expected, 1e-9);
  }
}

TEST(Losses, BitwiseDeterministic) {
  std::mt19937_64 gen(14);
  const RegionMask gt = testing::random_mask(gen, 16, 16);
  const ProbabilityMap pred = testing::random_probabilities(gen, 16, 16);
  const LossConfig cfg;
  EXPECT_EQ(hybrid_loss(pred, {}, gt, cfg), hybrid_loss(pred, {}, gt, cfg));
  EXPECT_EQ(weighted_bce(pred, gt, cfg), weighted_bce(pred, gt, cfg));
}

TEST(RegionMetricsTest, PerfectAndComplement) {
  std::mt19937_64 gen(15);
  const RegionMask gt = testing::random_mask(gen, 16, 16);
  const RegionMetrics perfect = evaluate_region(to_probabilities(gt), gt);
  EXPECT_NEAR(perfect.dice, 1.0, 1e-6);
  EXPECT_EQ(perfect.purity_loss, 0.0);
  RegionMask inv = gt;
  for (auto& c : inv.cells()) c = 1 - c;
  EXPECT_LT(evaluate_region(to_probabilities(inv), gt).dice, 0.01);
}

TEST(LossConfigTest, Validation) {
  LossConfig cfg;
  EXPECT_DOUBLE_EQ(cfg.alpha_for(16, 8), 1.0 / (8.0 * 128.0));
  cfg.epsilon_clamp = 0.5;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.sigma_smoothing = -1;
  EXPECT_THROW(cfg.validate(), Error);
}

}  // namespace
}  // namespace regionplan
