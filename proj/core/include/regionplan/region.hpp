#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "regionplan/grid_map.hpp"
#include "regionplan/planner.hpp"
#include "regionplan/raster.hpp"
#include "regionplan/rng.hpp"

namespace regionplan {

inline constexpr double kDefaultRegionThreshold = 0.5;

/// Cell is 1 iff p >= threshold.
RegionMask threshold_region(const ProbabilityMap& pm, double threshold = kDefaultRegionThreshold);

/// Uniform sampling over the cells of a probability map that meet a
/// threshold. Immutable after construction.
class RegionSampler {
 public:
  explicit RegionSampler(ProbabilityMap region, double threshold = kDefaultRegionThreshold);

  const ProbabilityMap& region() const noexcept { return region_; }
  double threshold() const noexcept { return threshold_; }
  std::span<const Cell> index() const noexcept { return index_; }
  bool empty() const noexcept { return index_.empty(); }

 private:
  ProbabilityMap region_;
  double threshold_;
  std::vector<Cell> index_;
};

/// A cell drawn uniformly from the index, then a point uniform inside it.
/// Throws kRegionExhausted when the index is empty.
Point heuristic_sample(const RegionSampler& sampler, Rng& rng);

/// With probability b_h a heuristic sample (uniform when the region is
/// exhausted), otherwise a uniform sample. The Bernoulli draw is skipped when
/// b_h is exactly 0 or 1, so b_h = 0 replays uniform_sample bit for bit.
Point mixed_sample(const RegionSampler& sampler, const GridMap& map, double b_h, Rng& rng);

/// Planner strategy that mixes region and uniform samples with the planner's
/// configured b_h.
class BiasedSampler final : public Sampler {
 public:
  BiasedSampler(std::shared_ptr<const RegionSampler> region, std::shared_ptr<const GridMap> map);
  Point sample(double heuristic_bias, Rng& rng) const override;

 private:
  std::shared_ptr<const RegionSampler> region_;
  std::shared_ptr<const GridMap> map_;
};

/// 5% of the longer map side.
double default_dilation_radius(const GridMap& map) noexcept;

/// Cells visited by a polyline's segments at the default sampling spacing.
RegionMask rasterize_path(std::span<const Point> path, int width, int height);

/// Reference path rasterized, dilated by `dilation_radius`, as p in {0,1}.
/// Throws kNoPath for unsolvable instances.
ProbabilityMap oracle_region(const GridMap& map, const Point& start, const Point& goal,
                             double dilation_radius);

/// p = pixel / 255.
ProbabilityMap load_region(const std::filesystem::path& path);
/// As above; throws kDimensionMismatch when the file does not match the map.
ProbabilityMap load_region(const std::filesystem::path& path, const GridMap& map);
/// pixel = round(255 p).
void save_region(const ProbabilityMap& pm, const std::filesystem::path& path);
void save_mask(const RegionMask& mask, const std::filesystem::path& path);
RegionMask load_mask(const std::filesystem::path& path);

}  // namespace regionplan
