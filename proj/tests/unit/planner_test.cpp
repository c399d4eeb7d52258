#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "regionplan/planner.hpp"
#include "regionplan/region.hpp"
#include "support/test_util.hpp"

namespace regionplan {
namespace {

std::shared_ptr<const GridMap> empty_map(int size) {
  return std::make_shared<const GridMap>(size, size);
}

TEST(UniformSample, SeededDeterminism) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    const Point p = uniform_sample(64, 64, a);
    const Point q = uniform_sample(64, 64, b);
    ASSERT_EQ(p, q);
  }
}

TEST(UniformSample, QuadrantCountsWithinFourSigma) {
  Rng rng(7);
  std::array<int, 4> counts{};
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Point p = uniform_sample(64, 64, rng);
    ASSERT_GE(p.x, 0.0);
    ASSERT_LT(p.x, 64.0);
    ASSERT_GE(p.y, 0.0);
    ASSERT_LT(p.y, 64.0);
    counts[(p.x >= 32 ? 1 : 0) + (p.y >= 32 ? 2 : 0)]++;
  }
  // Binomial(n, 1/4): sigma = sqrt(n * 1/4 * 3/4).
  const double sigma = std::sqrt(n * 0.25 * 0.75);
  for (int c : counts) EXPECT_LE(std::abs(c - 25000), 4.0 * sigma);
}

TEST(UniformSample, UnitExtent) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const Point p = uniform_sample(1, 1, rng);
    ASSERT_GE(p.x, 0.0);
    ASSERT_LT(p.x, 1.0);
    ASSERT_GE(p.y, 0.0);
    ASSERT_LT(p.y, 1.0);
  }
}

TEST(Nearest, Basics) {
  Tree single(Point{3, 3});
  EXPECT_EQ(single.nearest({50, 50}), 0u);

  Tree tree(Point{0, 0});
  tree.add({10, 0}, 0);
  EXPECT_EQ(tree.nearest({4, 0}), 0u);
  EXPECT_EQ(tree.nearest({5, 0}), 0u);  // tie goes to the lower id
  EXPECT_THROW(Tree().nearest({0, 0}), Error);
}

TEST(Nearest, MatchesLinearScan) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0.0, 64.0);
  for (int trial = 0; trial < 50; ++trial) {
    Tree tree(Point{u(gen), u(gen)});
    for (int i = 1; i < 200; ++i) {
      tree.add({u(gen), u(gen)}, static_cast<VertexId>(gen() % tree.size()));
    }
    for (int q = 0; q < 40; ++q) {
      const Point query{u(gen) * 1.2 - 6.0, u(gen) * 1.2 - 6.0};
      VertexId best = 0;
      for (VertexId v = 1; v < tree.size(); ++v) {
        if (distance(tree.point(v), query) < distance(tree.point(best), query)) best = v;
      }
      ASSERT_EQ(tree.nearest(query), best);
    }
  }
}

TEST(Near, MatchesLinearScan) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 32.0), r(0.0, 12.0);
  Tree tree(Point{u(gen), u(gen)});
  for (int i = 1; i < 300; ++i) tree.add({u(gen), u(gen)}, 0);
  for (int q = 0; q < 100; ++q) {
    const Point query{u(gen), u(gen)};
    const double radius = r(gen);
    std::vector<VertexId> expected;
    for (VertexId v = 0; v < tree.size(); ++v) {
      if (distance(tree.point(v), query) <= radius) expected.push_back(v);
    }
    ASSERT_EQ(tree.near(query, radius), expected);
  }
}

TEST(Steer, Examples) {
  EXPECT_EQ(steer({0, 0}, {10, 0}, 5), (Point{5, 0}));
  EXPECT_EQ(steer({0, 0}, {3, 4}, 10), (Point{3, 4}));
  const Point p = steer({0, 0}, {3, 4}, 2.5);
  EXPECT_NEAR(p.x, 1.5, 1e-12);
  EXPECT_NEAR(p.y, 2.0, 1e-12);
  EXPECT_EQ(steer({2, 2}, {2, 2}, 1.0), (Point{2, 2}));
  EXPECT_THROW(steer({0, 0}, {1, 1}, 0.0), Error);
}

TEST(NearRadius, Formula) {
  PlannerConfig c;
  c.near_gamma = 1.0;
  c.min_radius = 0.0;
  EXPECT_NEAR(near_radius(1, c, 64, 64), 64.0 * std::sqrt(std::log(2.0) / 2.0), 1e-12);

  c.min_radius = 5.0;
  EXPECT_EQ(near_radius(1000000, c, 64, 64), 5.0);

  c.min_radius = 0.0;
  c.near_gamma = 1.1;
  for (std::size_t n = 8; n < 100000; n = n * 3 + 1) {
    EXPECT_GE(near_radius(n, c, 64, 64), near_radius(4 * n, c, 64, 64));
  }
  EXPECT_THROW(near_radius(0, c, 64, 64), Error);
}

TEST(ChooseParent, RootOnEmptyMap) {
  const GridMap map(16, 16);
  Tree tree(Point{2, 2});
  const std::vector<VertexId> near{0};
  const auto choice = choose_parent(tree, {5, 6}, near, map, 0.5);
  ASSERT_TRUE(choice);
  EXPECT_EQ(choice->parent, 0u);
  EXPECT_DOUBLE_EQ(choice->cost, 5.0);
}

TEST(ChooseParent, ForcedArithmetic) {
  // Candidate A: cost 10, distance 5. Candidate B: cost 12, distance 2.
  const GridMap map(64, 64);
  Tree tree(Point{1, 1});
  const VertexId a = tree.add({11, 1}, 0);        // cost 10
  const VertexId b = tree.add({1, 13}, 0);        // cost 12
  const Point q{14, 5};                            // |a-q| = 5
  ASSERT_DOUBLE_EQ(distance(tree.point(a), q), 5.0);
  const Point qb{1, 15};                           // |b-qb| = 2
  const std::vector<VertexId> near{a, b};
  auto pick = choose_parent(tree, qb, near, map, 0.5);
  ASSERT_TRUE(pick);
  EXPECT_EQ(pick->parent, b);
  EXPECT_DOUBLE_EQ(pick->cost, 14.0);
}

TEST(ChooseParent, AbsentWhenEverythingBlocked) {
  Raster<std::uint8_t> occ(16, 16, 0);
  for (int y = 0; y < 16; ++y) occ(8, y) = 1;
  const GridMap map(occ);
  Tree tree(Point{2, 2});
  tree.add({3, 5}, 0);
  const std::vector<VertexId> near{0, 1};
  EXPECT_FALSE(choose_parent(tree, {12, 3}, near, map, 0.5));
}

TEST(ChooseParent, MatchesExhaustiveEvaluation) {
  std::mt19937_64 gen(123);
  std::uniform_real_distribution<double> u(0.0, 32.0);
  for (int trial = 0; trial < 100; ++trial) {
    const GridMap map = testing::random_map(gen, 32, 32, 0.1);
    Tree tree(Point{u(gen), u(gen)});
    for (int i = 1; i < 20; ++i) tree.add({u(gen), u(gen)}, static_cast<VertexId>(gen() % i));
    std::vector<VertexId> near(tree.size());
    for (VertexId v = 0; v < near.size(); ++v) near[v] = v;
    const Point q{u(gen), u(gen)};

    std::optional<std::pair<VertexId, double>> best;
    for (VertexId v = 0; v < tree.size(); ++v) {
      if (!segment_free(map, tree.point(v), q, 0.5)) continue;
      const double c = tree.cost(v) + distance(tree.point(v), q);
      if (!best || c < best->second) best = std::pair{v, c};
    }
    const auto choice = choose_parent(tree, q, near, map, 0.5);
    ASSERT_EQ(choice.has_value(), best.has_value());
    if (best) {
      EXPECT_EQ(choice->parent, best->first);
      EXPECT_DOUBLE_EQ(choice->cost, best->second);
    }
  }
}

TEST(Rewire, NothingCheaper) {
  const GridMap map(16, 16);
  Tree tree(Point{1, 1});
  tree.add({5, 1}, 0);
  tree.add({1, 5}, 0);
  const VertexId v = tree.add({9, 9}, 1);
  const std::vector<VertexId> near{0, 1, 2};
  EXPECT_EQ(rewire(tree, v, near, map, 0.5), 0u);
  EXPECT_EQ(tree.parent(1), 0u);
  EXPECT_EQ(tree.parent(2), 0u);
}

TEST(Rewire, ShortcutReparentsChainTail) {
  // root(0,0) -> A(0,4) -> B(4,4): cost(B) = 8. v_new at (3,0) under root,
  // cost 3; via v_new B costs 3 + sqrt(1 + 16) ~= 7.123 < 8.
  const GridMap map(16, 16);
  Tree tree(Point{0.5, 0.5});
  const VertexId a = tree.add({0.5, 4.5}, 0);
  const VertexId b = tree.add({4.5, 4.5}, a);
  const VertexId c = tree.add({8.5, 4.5}, b);  // B's child follows along
  ASSERT_DOUBLE_EQ(tree.cost(b), 8.0);
  const VertexId v = tree.add({3.5, 0.5}, 0);
  const std::vector<VertexId> near{a, b};
  EXPECT_EQ(rewire(tree, v, near, map, 0.5), 1u);
  EXPECT_EQ(tree.parent(b), v);
  EXPECT_NEAR(tree.cost(b), 3.0 + std::sqrt(17.0), 1e-12);
  EXPECT_NEAR(tree.cost(c), 3.0 + std::sqrt(17.0) + 4.0, 1e-12);
  EXPECT_EQ(find_tree_violation(tree, map, 0.5), std::nullopt);
}

TEST(Rewire, RandomTreesKeepInvariantsAndNeverRaiseCosts) {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(0.0, 32.0);
  const GridMap map(32, 32);
  for (int trial = 0; trial < 50; ++trial) {
    Tree tree(Point{u(gen), u(gen)});
    for (int i = 1; i < 60; ++i) tree.add({u(gen), u(gen)}, static_cast<VertexId>(gen() % i));
    std::vector<double> before(tree.size());
    for (VertexId v = 0; v < tree.size(); ++v) before[v] = tree.cost(v);
    const VertexId v_new = tree.add({u(gen), u(gen)}, 0);
    rewire(tree, v_new, tree.near(tree.point(v_new), 10.0), map, 0.5);
    ASSERT_EQ(find_tree_violation(tree, map, 0.5), std::nullopt);
    for (VertexId v = 0; v < before.size(); ++v) EXPECT_LE(tree.cost(v), before[v] + 1e-12);
  }
}

TEST(ExtractPath, Cases) {
  auto map = empty_map(16);
  const PlanInstance far = make_instance(map, {1, 1}, {14, 14}, 1.0);
  Tree tree(Point{1, 1});
  tree.add({5, 5}, 0);
  EXPECT_FALSE(extract_path(tree, far));

  const PlanInstance near_start = make_instance(map, {1, 1}, {1.5, 1.5}, 1.0);
  const auto single = extract_path(tree, near_start);
  ASSERT_TRUE(single);
  EXPECT_EQ(single->size(), 1u);
  EXPECT_EQ(single->front(), (Point{1, 1}));

  const VertexId a = tree.add({9, 6}, 1);
  tree.add({13.6, 13.8}, a);
  // chain cost ~18.84 versus 13*sqrt(2) ~18.38 for the direct vertex
  tree.add({14, 14}, 0);
  const auto path = extract_path(tree, far);
  ASSERT_TRUE(path);
  EXPECT_EQ(path->size(), 2u);
  EXPECT_NEAR(path_length(*path), 13.0 * std::sqrt(2.0), 1e-9);
}

TEST(Instance, Validation) {
  auto map = std::make_shared<const GridMap>(testing::boxed_map(16, 4, 4, 10, 10));
  EXPECT_NO_THROW(validate_instance(make_instance(map, {1.5, 1.5}, {7.5, 7.5})));
  EXPECT_THROW(validate_instance(make_instance(map, {4.5, 4.5}, {7.5, 7.5})), Error);
  EXPECT_THROW(validate_instance(make_instance(map, {1.5, 1.5}, {20, 7.5})), Error);
  EXPECT_THROW(validate_instance(make_instance(map, {1.5, 1.5}, {7.5, 7.5}, 0.0)), Error);
}

TEST(Plan, EmptyMapConvergesNearStraightLine) {
  auto map = empty_map(64);
  const PlanInstance inst = make_instance(map, {5, 5}, {58, 58});
  PlannerConfig config = default_planner_config(*map);
  config.reference_cost = distance(inst.start, inst.goal);
  config.rng_seed = 3;
  const PlanResult r = plan(inst, config, UniformSampler(*map));
  ASSERT_EQ(r.terminated_by, Termination::kConverged);
  ASSERT_TRUE(r.path && r.cost);
  EXPECT_LE(*r.cost, 1.03 * *config.reference_cost);
  EXPECT_EQ(r.path->front(), inst.start);
  EXPECT_LE(distance(r.path->back(), inst.goal), inst.goal_tolerance);
  EXPECT_LE(r.vertices_added, r.samples_drawn);
  EXPECT_LE(r.samples_drawn, config.max_samples);
}

TEST(Plan, SealedGoalExhaustsBudget) {
  auto map = std::make_shared<const GridMap>(testing::boxed_map(32, 20, 20, 28, 28));
  const PlanInstance inst = make_instance(map, {3.5, 3.5}, {24.5, 24.5});
  PlannerConfig config = default_planner_config(*map);
  config.max_samples = 1500;
  config.reference_cost = 30.0;
  const PlanResult r = plan(inst, config, UniformSampler(*map));
  EXPECT_EQ(r.terminated_by, Termination::kSampleBudget);
  EXPECT_FALSE(r.path);
  EXPECT_FALSE(r.cost);
  EXPECT_EQ(r.samples_drawn, 1500u);
}

TEST(Plan, ZeroBiasReplaysUniformBitForBit) {
  auto map = std::make_shared<const GridMap>(testing::boxed_map(64, 20, 20, 40, 40));
  const PlanInstance inst = make_instance(map, {3.5, 3.5}, {60.5, 60.5});
  ProbabilityMap region(64, 64, 0.0);
  for (int x = 0; x < 64; ++x) region(x, 10) = 1.0;
  auto sampler = std::make_shared<const RegionSampler>(region);

  PlannerConfig config = default_planner_config(*map);
  config.heuristic_bias = 0.0;
  config.max_samples = 800;
  config.rng_seed = 9;
  const UniformSampler uniform_sampler(*map);
  Planner uniform(inst, config, uniform_sampler);
  BiasedSampler biased_sampler(sampler, map);
  Planner biased(inst, config, biased_sampler);
  const PlanResult a = uniform.run();
  const PlanResult b = biased.run();
  ASSERT_EQ(uniform.tree().size(), biased.tree().size());
  for (VertexId v = 0; v < uniform.tree().size(); ++v) {
    ASSERT_EQ(uniform.tree().point(v), biased.tree().point(v));
    ASSERT_EQ(uniform.tree().parent(v), biased.tree().parent(v));
  }
  EXPECT_EQ(a.vertices_added, b.vertices_added);
  EXPECT_EQ(a.rewire_count, b.rewire_count);
  EXPECT_EQ(a.cost, b.cost);
}

TEST(Plan, DeterministicAndObservable) {
  auto map = std::make_shared<const GridMap>(testing::boxed_map(64, 20, 8, 40, 56));
  const PlanInstance inst = make_instance(map, {5.5, 30.5}, {58.5, 30.5});
  PlannerConfig config = default_planner_config(*map);
  config.max_samples = 1200;
  config.rng_seed = 1234;

  std::optional<double> last;
  std::size_t iterations = 0;
  const UniformSampler uniform_sampler(*map);
  Planner p1(inst, config, uniform_sampler);
  const PlanResult a = p1.run([&](const IterationInfo& info) {
    ++iterations;
    if (last && info.best_cost) EXPECT_LE(*info.best_cost, *last);
    if (info.best_cost) last = info.best_cost;
    if (iterations % 100 == 0) {
      EXPECT_EQ(find_tree_violation(info.tree, *map, config.resolution), std::nullopt);
    }
  });
  EXPECT_EQ(iterations, a.samples_drawn);
  const PlanResult b = plan(inst, config, UniformSampler(*map));
  EXPECT_EQ(a.vertices_added, b.vertices_added);
  EXPECT_EQ(a.samples_drawn, b.samples_drawn);
  EXPECT_EQ(a.rewire_count, b.rewire_count);
  EXPECT_EQ(a.path, b.path);
  EXPECT_EQ(a.cost, b.cost);
}

TEST(Plan, RejectsInvalidInputs) {
  auto map = empty_map(16);
  PlannerConfig config = default_planner_config(*map);
  EXPECT_THROW(plan(make_instance(map, {-1, 2}, {5, 5}), config, UniformSampler(*map)), Error);
  config.heuristic_bias = 1.5;
  EXPECT_THROW(plan(make_instance(map, {1, 2}, {5, 5}), config, UniformSampler(*map)), Error);
  config = default_planner_config(*map);
  config.termination_ratio = 0.9;
  EXPECT_THROW(plan(make_instance(map, {1, 2}, {5, 5}), config, UniformSampler(*map)), Error);
}

TEST(TreeViolation, DetectsBrokenCostAndCollision) {
  Raster<std::uint8_t> occ(16, 16, 0);
  for (int y = 0; y < 16; ++y) occ(8, y) = 1;
  const GridMap map(occ);
  Tree tree(Point{2, 2});
  tree.add({12, 2}, 0);  // crosses the wall
  EXPECT_NE(find_tree_violation(tree, map, 0.5), std::nullopt);
  EXPECT_EQ(find_tree_violation(tree, GridMap(16, 16), 0.5), std::nullopt);
}

}  // namespace
}  // namespace regionplan
