#include "regionplan/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace regionplan {

PlanInstance make_instance(std::shared_ptr<const GridMap> map, Point start, Point goal,
                           std::optional<double> goal_tolerance) {
  PlanInstance instance;
  instance.goal_tolerance = goal_tolerance.value_or(map ? default_step(*map) : 1.0);
  instance.map = std::move(map);
  instance.start = start;
  instance.goal = goal;
  return instance;
}

void validate_instance(const PlanInstance& instance) {
  if (!instance.map) throw Error(ErrorCode::kInvalidInstance, "instance has no map");
  if (!is_free(*instance.map, instance.start)) {
    throw Error(ErrorCode::kInvalidInstance, "start is not in free space");
  }
  if (!is_free(*instance.map, instance.goal)) {
    throw Error(ErrorCode::kInvalidInstance, "goal is not in free space");
  }
  if (!(instance.goal_tolerance > 0.0)) {
    throw Error(ErrorCode::kInvalidInstance, "goal tolerance must be positive");
  }
}

// ---------------------------------------------------------------------------
// Tree

Tree::Tree(Point root) { add(root, 0); }

int Tree::bucket_coord(double v) noexcept {
  return static_cast<int>(std::floor(v / kBucketSize));
}

const std::vector<VertexId>* Tree::bucket(int bx, int by) const {
  auto it = buckets_.find(key(bx, by));
  return it == buckets_.end() ? nullptr : &it->second;
}

VertexId Tree::add(Point p, VertexId parent) {
  const auto id = static_cast<VertexId>(points_.size());
  if (points_.empty()) {
    parents_.push_back(id);
    costs_.push_back(0.0);
  } else {
    parents_.push_back(parent);
    costs_.push_back(costs_[parent] + distance(points_[parent], p));
    children_[parent].push_back(id);
  }
  points_.push_back(p);
  children_.emplace_back();

  const int bx = bucket_coord(p.x);
  const int by = bucket_coord(p.y);
  buckets_[key(bx, by)].push_back(id);
  if (id == 0) {
    min_bx_ = max_bx_ = bx;
    min_by_ = max_by_ = by;
  } else {
    min_bx_ = std::min(min_bx_, bx);
    max_bx_ = std::max(max_bx_, bx);
    min_by_ = std::min(min_by_, by);
    max_by_ = std::max(max_by_, by);
  }
  return id;
}

void Tree::reparent(VertexId v, VertexId new_parent) {
  auto& siblings = children_[parents_[v]];
  siblings.erase(std::remove(siblings.begin(), siblings.end(), v), siblings.end());
  parents_[v] = new_parent;
  children_[new_parent].push_back(v);
  costs_[v] = costs_[new_parent] + distance(points_[new_parent], points_[v]);

  std::vector<VertexId> stack(children_[v].begin(), children_[v].end());
  while (!stack.empty()) {
    const VertexId u = stack.back();
    stack.pop_back();
    costs_[u] = costs_[parents_[u]] + distance(points_[parents_[u]], points_[u]);
    stack.insert(stack.end(), children_[u].begin(), children_[u].end());
  }
}

std::vector<VertexId> Tree::near(const Point& q, double radius) const {
  std::vector<VertexId> out;
  if (empty()) return out;
  const int x0 = std::max(min_bx_, bucket_coord(q.x - radius));
  const int x1 = std::min(max_bx_, bucket_coord(q.x + radius));
  const int y0 = std::max(min_by_, bucket_coord(q.y - radius));
  const int y1 = std::min(max_by_, bucket_coord(q.y + radius));
  for (int by = y0; by <= y1; ++by) {
    for (int bx = x0; bx <= x1; ++bx) {
      if (const auto* ids = bucket(bx, by)) {
        for (VertexId id : *ids) {
          if (distance(points_[id], q) <= radius) out.push_back(id);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

VertexId Tree::nearest(const Point& q) const {
  if (empty()) throw Error(ErrorCode::kEmptyTree, "nearest on an empty tree");
  const int qx = bucket_coord(q.x);
  const int qy = bucket_coord(q.y);
  const int max_ring = std::max({std::abs(qx - min_bx_), std::abs(qx - max_bx_),
                                 std::abs(qy - min_by_), std::abs(qy - max_by_)});

  VertexId best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  auto consider = [&](int bx, int by) {
    if (const auto* ids = bucket(bx, by)) {
      for (VertexId id : *ids) {
        const double d = distance(points_[id], q);
        if (d < best_d || (d == best_d && id < best)) {
          best_d = d;
          best = id;
        }
      }
    }
  };

  for (int r = 0; r <= max_ring; ++r) {
    // Everything in ring r is farther than (r-1) buckets away.
    if ((r - 1) * kBucketSize > best_d) break;
    if (r == 0) {
      consider(qx, qy);
      continue;
    }
    for (int dx = -r; dx <= r; ++dx) {
      consider(qx + dx, qy - r);
      consider(qx + dx, qy + r);
    }
    for (int dy = -r + 1; dy <= r - 1; ++dy) {
      consider(qx - r, qy + dy);
      consider(qx + r, qy + dy);
    }
  }
  return best;
}

std::optional<std::string> find_tree_violation(const Tree& tree, const GridMap& map,
                                               double resolution, double cost_tolerance) {
  if (tree.empty()) return std::nullopt;
  if (tree.parent(0) != 0) return "root does not map to itself";
  if (tree.cost(0) != 0.0) return "root cost is not zero";

  const auto n = static_cast<VertexId>(tree.size());
  // 0 = unvisited, 1 = on the current walk, 2 = known to reach the root.
  std::vector<std::uint8_t> state(n, 0);
  state[0] = 2;
  std::vector<VertexId> walk;
  for (VertexId v = 1; v < n; ++v) {
    const VertexId p = tree.parent(v);
    if (p >= n || p == v) return "vertex " + std::to_string(v) + " has an invalid parent";
    const double expected = tree.cost(p) + distance(tree.point(p), tree.point(v));
    if (std::abs(tree.cost(v) - expected) > cost_tolerance) {
      return "cost inconsistency at vertex " + std::to_string(v);
    }
    if (!segment_free(map, tree.point(p), tree.point(v), resolution)) {
      return "edge " + std::to_string(p) + "->" + std::to_string(v) + " is in collision";
    }
    const auto kids = tree.children(p);
    if (std::find(kids.begin(), kids.end(), v) == kids.end()) {
      return "vertex " + std::to_string(v) + " missing from its parent's children";
    }

    walk.clear();
    VertexId u = v;
    while (state[u] == 0) {
      state[u] = 1;
      walk.push_back(u);
      u = tree.parent(u);
    }
    if (state[u] == 1) return "cycle through vertex " + std::to_string(u);
    for (VertexId w : walk) state[w] = 2;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Configuration and primitives

void PlannerConfig::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (!(step > 0.0)) fail("step must be positive");
  if (!(heuristic_bias >= 0.0 && heuristic_bias <= 1.0)) fail("heuristic_bias must be in [0,1]");
  if (max_samples < 1) fail("max_samples must be at least 1");
  if (!(termination_ratio >= 1.0)) fail("termination_ratio must be >= 1");
  if (!(resolution > 0.0)) fail("resolution must be positive");
  if (!(near_gamma >= 0.0)) fail("near_gamma must be non-negative");
  if (!(min_radius >= 0.0)) fail("min_radius must be non-negative");
  if (reference_cost && !(*reference_cost >= 0.0)) fail("reference_cost must be non-negative");
}

double default_step(const GridMap& map) noexcept {
  return 0.02 * std::max(map.width(), map.height());
}

PlannerConfig default_planner_config(const GridMap& map) {
  PlannerConfig config;
  config.step = default_step(map);
  config.min_radius = config.step;
  return config;
}

Point uniform_sample(int width, int height, Rng& rng) {
  const double x = uniform01(rng) * width;
  const double y = uniform01(rng) * height;
  return {x, y};
}

Point uniform_sample(const GridMap& map, Rng& rng) {
  return uniform_sample(map.width(), map.height(), rng);
}

Point steer(const Point& from, const Point& to, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "steer step must be positive");
  const double d = distance(from, to);
  if (d <= step) return to;
  const double s = step / d;
  return {from.x + (to.x - from.x) * s, from.y + (to.y - from.y) * s};
}

double near_radius(std::size_t n, const PlannerConfig& config, int width, int height) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "near_radius needs n >= 1");
  const double m = static_cast<double>(n) + 1.0;
  const double scale = std::sqrt(static_cast<double>(width) * static_cast<double>(height));
  return std::max(config.min_radius, config.near_gamma * std::sqrt(std::log(m) / m) * scale);
}

std::optional<ParentChoice> choose_parent(const Tree& tree, const Point& q_new,
                                          std::span<const VertexId> near, const GridMap& map,
                                          double resolution) {
  std::optional<ParentChoice> best;
  for (VertexId v : near) {
    const double c = tree.cost(v) + distance(tree.point(v), q_new);
    if (best && (c > best->cost || (c == best->cost && v > best->parent))) continue;
    if (!segment_free(map, tree.point(v), q_new, resolution)) continue;
    best = ParentChoice{v, c};
  }
  return best;
}

std::size_t rewire(Tree& tree, VertexId v_new, std::span<const VertexId> near, const GridMap& map,
                   double resolution) {
  std::size_t count = 0;
  for (VertexId v : near) {
    if (v == v_new || v == tree.parent(v_new)) continue;
    const double via = tree.cost(v_new) + distance(tree.point(v_new), tree.point(v));
    if (!(via < tree.cost(v))) continue;
    if (!segment_free(map, tree.point(v_new), tree.point(v), resolution)) continue;
    tree.reparent(v, v_new);
    ++count;
  }
  return count;
}

std::optional<std::vector<Point>> extract_path(const Tree& tree, const PlanInstance& instance) {
  std::optional<VertexId> best;
  for (VertexId v = 0; v < tree.size(); ++v) {
    if (distance(tree.point(v), instance.goal) > instance.goal_tolerance) continue;
    if (!best || tree.cost(v) < tree.cost(*best)) best = v;
  }
  if (!best) return std::nullopt;

  std::vector<Point> path;
  for (VertexId v = *best;; v = tree.parent(v)) {
    path.push_back(tree.point(v));
    if (v == 0) break;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

double path_length(std::span<const Point> path) noexcept {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) total += distance(path[i - 1], path[i]);
  return total;
}

std::string_view to_string(Termination t) noexcept {
  return t == Termination::kConverged ? "converged" : "sample_budget";
}

// ---------------------------------------------------------------------------
// Main loop

Planner::Planner(PlanInstance instance, PlannerConfig config, const Sampler& sampler)
    : instance_(std::move(instance)), config_(config), sampler_(sampler) {
  validate_instance(instance_);
  config_.validate();
}

PlanResult Planner::run(const IterationObserver& observer) {
  const GridMap& map = *instance_.map;
  const auto t0 = std::chrono::steady_clock::now();

  Rng rng(config_.rng_seed);
  tree_ = Tree(instance_.start);
  PlanResult result;

  std::vector<VertexId> goal_vertices;
  std::optional<double> best_cost;
  auto note_goal_vertex = [&](VertexId v) {
    if (distance(tree_.point(v), instance_.goal) <= instance_.goal_tolerance) {
      goal_vertices.push_back(v);
    }
  };
  auto refresh_best = [&] {
    // Rewiring only lowers costs, so the minimum is non-increasing.
    for (VertexId v : goal_vertices) {
      if (!best_cost || tree_.cost(v) < *best_cost) best_cost = tree_.cost(v);
    }
  };
  auto converged = [&] {
    return config_.reference_cost && best_cost &&
           *best_cost <= config_.termination_ratio * *config_.reference_cost;
  };

  note_goal_vertex(0);
  refresh_best();

  while (!converged() && result.samples_drawn < config_.max_samples) {
    const Point q = sampler_.sample(config_.heuristic_bias, rng);
    ++result.samples_drawn;

    const VertexId nearest_id = tree_.nearest(q);
    const Point x_new = steer(tree_.point(nearest_id), q, config_.step);
    if (segment_free(map, tree_.point(nearest_id), x_new, config_.resolution)) {
      const double radius = near_radius(tree_.size(), config_, map.width(), map.height());
      std::vector<VertexId> near = tree_.near(x_new, radius);
      if (!std::binary_search(near.begin(), near.end(), nearest_id)) {
        near.insert(std::upper_bound(near.begin(), near.end(), nearest_id), nearest_id);
      }
      // The nearest vertex is a valid fallback, so a parent always exists.
      const auto choice = choose_parent(tree_, x_new, near, map, config_.resolution);
      const VertexId v = tree_.add(x_new, choice ? choice->parent : nearest_id);
      ++result.vertices_added;
      result.rewire_count += rewire(tree_, v, near, map, config_.resolution);
      note_goal_vertex(v);
      refresh_best();
    }

    if (observer) observer(IterationInfo{tree_, result.samples_drawn, best_cost});
  }

  result.terminated_by = converged() ? Termination::kConverged : Termination::kSampleBudget;
  result.path = extract_path(tree_, instance_);
  if (result.path) result.cost = path_length(*result.path);
  result.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

PlanResult plan(const PlanInstance& instance, const PlannerConfig& config,
                const Sampler& sampler) {
  Planner planner(instance, config, sampler);
  return planner.run();
}

}  // namespace regionplan
