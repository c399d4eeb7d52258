#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "regionplan/grid_map.hpp"
#include "regionplan/rng.hpp"

namespace regionplan {

/// One planning problem. The map is shared and immutable.
struct PlanInstance {
  std::shared_ptr<const GridMap> map;
  Point start;
  Point goal;
  double goal_tolerance = 1.0;
};

/// Builds an instance with goal_tolerance defaulting to the default step.
PlanInstance make_instance(std::shared_ptr<const GridMap> map, Point start, Point goal,
                           std::optional<double> goal_tolerance = std::nullopt);

/// Throws kInvalidInstance unless both endpoints are free and the tolerance
/// is positive.
void validate_instance(const PlanInstance& instance);

using VertexId = std::uint32_t;

/// Exploration tree rooted at vertex 0. Keeps parent links, children lists,
/// cost-to-come and a bucket index for proximity queries.
class Tree {
 public:
  Tree() = default;
  explicit Tree(Point root);

  bool empty() const noexcept { return points_.empty(); }
  std::size_t size() const noexcept { return points_.size(); }

  const Point& point(VertexId v) const { return points_[v]; }
  VertexId parent(VertexId v) const { return parents_[v]; }
  double cost(VertexId v) const { return costs_[v]; }
  std::span<const VertexId> children(VertexId v) const { return children_[v]; }
  std::span<const Point> points() const noexcept { return points_; }

  /// Adds the root when the tree is empty, otherwise a child of `parent`.
  VertexId add(Point p, VertexId parent);

  /// Moves v under new_parent and recomputes cost-to-come over v's subtree.
  void reparent(VertexId v, VertexId new_parent);

  /// Sorted ids of all vertices within `radius` of q (inclusive).
  std::vector<VertexId> near(const Point& q, double radius) const;

  /// Vertex closest to q, ties broken by the lowest id. kEmptyTree if empty.
  VertexId nearest(const Point& q) const;

 private:
  using BucketKey = std::int64_t;
  static constexpr double kBucketSize = 2.0;

  static BucketKey key(int bx, int by) noexcept {
    return (static_cast<BucketKey>(bx) << 32) ^ static_cast<std::uint32_t>(by);
  }
  static int bucket_coord(double v) noexcept;
  const std::vector<VertexId>* bucket(int bx, int by) const;

  std::vector<Point> points_;
  std::vector<VertexId> parents_;
  std::vector<double> costs_;
  std::vector<std::vector<VertexId>> children_;
  std::unordered_map<BucketKey, std::vector<VertexId>> buckets_;
  int min_bx_ = 0, max_bx_ = -1, min_by_ = 0, max_by_ = -1;
};

/// Returns the first violated tree invariant, or nullopt when the tree is a
/// single acyclic tree rooted at 0 with consistent costs (within
/// `cost_tolerance`) and collision-free edges.
std::optional<std::string> find_tree_violation(const Tree& tree, const GridMap& map,
                                               double resolution,
                                               double cost_tolerance = 1e-9);

struct PlannerConfig {
  double step = 1.0;
  double heuristic_bias = 0.8;
  std::size_t max_samples = 5000;
  double near_gamma = 1.1;
  double min_radius = 1.0;
  std::uint64_t rng_seed = 0;
  double resolution = kDefaultResolution;
  double termination_ratio = 1.03;
  std::optional<double> reference_cost;

  /// Throws kInvalidArgument when a field is out of range.
  void validate() const;
};

/// Step = 2% of the longer side, min_radius = step.
PlannerConfig default_planner_config(const GridMap& map);
double default_step(const GridMap& map) noexcept;

/// Sampling strategy plugged into the planner loop.
class Sampler {
 public:
  virtual ~Sampler() = default;
  /// `heuristic_bias` is the configured b_h; strategies without a region
  /// ignore it.
  virtual Point sample(double heuristic_bias, Rng& rng) const = 0;
};

/// Point uniform over [0,width) x [0,height); obstacles are not rejected.
Point uniform_sample(int width, int height, Rng& rng);
Point uniform_sample(const GridMap& map, Rng& rng);

class UniformSampler final : public Sampler {
 public:
  explicit UniformSampler(const GridMap& map) : width_(map.width()), height_(map.height()) {}
  Point sample(double, Rng& rng) const override { return uniform_sample(width_, height_, rng); }

 private:
  int width_;
  int height_;
};

Point steer(const Point& from, const Point& to, double step);

/// max(min_radius, near_gamma * sqrt(log(n+1)/(n+1)) * sqrt(width*height)).
double near_radius(std::size_t n, const PlannerConfig& config, int width, int height);

struct ParentChoice {
  VertexId parent = 0;
  double cost = 0.0;
};

/// Cheapest collision-free connection to q_new among `near`.
std::optional<ParentChoice> choose_parent(const Tree& tree, const Point& q_new,
                                          std::span<const VertexId> near, const GridMap& map,
                                          double resolution);

/// Reparents near vertices through v_new when that strictly lowers their
/// cost-to-come and the edge is free. Returns the number reparented.
std::size_t rewire(Tree& tree, VertexId v_new, std::span<const VertexId> near,
                   const GridMap& map, double resolution);

/// Minimum-cost vertex within goal_tolerance traced back to the root.
std::optional<std::vector<Point>> extract_path(const Tree& tree, const PlanInstance& instance);

double path_length(std::span<const Point> path) noexcept;

enum class Termination { kConverged, kSampleBudget };
std::string_view to_string(Termination t) noexcept;

struct PlanResult {
  std::optional<std::vector<Point>> path;
  std::optional<double> cost;
  std::size_t vertices_added = 0;
  std::size_t samples_drawn = 0;
  std::size_t rewire_count = 0;
  double wall_time = 0.0;
  Termination terminated_by = Termination::kSampleBudget;
};

struct IterationInfo {
  const Tree& tree;
  std::size_t samples_drawn;
  std::optional<double> best_cost;
};
using IterationObserver = std::function<void(const IterationInfo&)>;

/// RRT* with pluggable sampling. Each iteration draws a sample, extends the
/// nearest vertex by `step`, picks the cheapest parent among the near set,
/// rewires, then checks the goal. Stops at max_samples or once the best goal
/// cost is within termination_ratio of reference_cost.
class Planner {
 public:
  Planner(PlanInstance instance, PlannerConfig config, const Sampler& sampler);

  PlanResult run(const IterationObserver& observer = {});
  const Tree& tree() const noexcept { return tree_; }

 private:
  PlanInstance instance_;
  PlannerConfig config_;
  const Sampler& sampler_;
  Tree tree_;
};

PlanResult plan(const PlanInstance& instance, const PlannerConfig& config,
                const Sampler& sampler);

}  // namespace regionplan
