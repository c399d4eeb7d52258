#include "regionplan/region.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "regionplan/datagen.hpp"
#include "regionplan/raster_io.hpp"

namespace regionplan {

RegionMask threshold_region(const ProbabilityMap& pm, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold must be in [0,1]");
  }
  RegionMask mask(pm.width(), pm.height());
  std::transform(pm.cells().begin(), pm.cells().end(), mask.cells().begin(),
                 [threshold](double p) { return p >= threshold ? 1 : 0; });
  return mask;
}

RegionSampler::RegionSampler(ProbabilityMap region, double threshold)
    : region_(std::move(region)), threshold_(threshold) {
  validate_probabilities(region_);
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold must be in [0,1]");
  }
  for (int y = 0; y < region_.height(); ++y) {
    for (int x = 0; x < region_.width(); ++x) {
      if (region_(x, y) >= threshold_) index_.push_back({x, y});
    }
  }
}

Point heuristic_sample(const RegionSampler& sampler, Rng& rng) {
  if (sampler.empty()) throw Error(ErrorCode::kRegionExhausted, "region index is empty");
  const Cell c = sampler.index()[uniform_index(rng, sampler.index().size())];
  const double x = c.x + uniform01(rng);
  const double y = c.y + uniform01(rng);
  return {x, y};
}

Point mixed_sample(const RegionSampler& sampler, const GridMap& map, double b_h, Rng& rng) {
  if (!(b_h >= 0.0 && b_h <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "heuristic bias must be in [0,1]");
  }
  bool heuristic = b_h >= 1.0;
  if (b_h > 0.0 && b_h < 1.0) heuristic = uniform01(rng) < b_h;
  if (heuristic && !sampler.empty()) return heuristic_sample(sampler, rng);
  return uniform_sample(map, rng);
}

BiasedSampler::BiasedSampler(std::shared_ptr<const RegionSampler> region,
                             std::shared_ptr<const GridMap> map)
    : region_(std::move(region)), map_(std::move(map)) {
  if (!region_ || !map_) throw Error(ErrorCode::kInvalidArgument, "null region or map");
  if (!region_->region().same_shape(map_->width(), map_->height())) {
    throw Error(ErrorCode::kDimensionMismatch, "region does not match map dimensions");
  }
}

Point BiasedSampler::sample(double heuristic_bias, Rng& rng) const {
  return mixed_sample(*region_, *map_, heuristic_bias, rng);
}

double default_dilation_radius(const GridMap& map) noexcept {
  return 0.05 * std::max(map.width(), map.height());
}

RegionMask rasterize_path(std::span<const Point> path, int width, int height) {
  RegionMask mask(width, height, 0);
  auto mark = [&](const Cell& c) {
    if (mask.in_bounds(c.x, c.y)) mask(c.x, c.y) = 1;
  };
  if (path.size() == 1) mark(cell_of(path.front()));
  for (std::size_t i = 1; i < path.size(); ++i) {
    for (const Cell& c : rasterize_segment(path[i - 1], path[i])) mark(c);
  }
  return mask;
}

ProbabilityMap oracle_region(const GridMap& map, const Point& start, const Point& goal,
                             double dilation_radius) {
  const ReferencePath ref = reference_path(map, start, goal);
  RegionMask mask = rasterize_path(ref.points, map.width(), map.height());
  return to_probabilities(dilate(mask, dilation_radius));
}

ProbabilityMap load_region(const std::filesystem::path& path) {
  const GreyImage image = read_pgm(path);
  ProbabilityMap pm(image.width(), image.height());
  std::transform(image.cells().begin(), image.cells().end(), pm.cells().begin(),
                 [](std::uint8_t v) { return v / 255.0; });
  return pm;
}

ProbabilityMap load_region(const std::filesystem::path& path, const GridMap& map) {
  ProbabilityMap pm = load_region(path);
  if (!pm.same_shape(map.width(), map.height())) {
    throw Error(ErrorCode::kDimensionMismatch,
                "region " + std::to_string(pm.width()) + "x" + std::to_string(pm.height()) +
                    " does not match map " + std::to_string(map.width()) + "x" +
                    std::to_string(map.height()));
  }
  return pm;
}

void save_region(const ProbabilityMap& pm, const std::filesystem::path& path) {
  validate_probabilities(pm);
  GreyImage image(pm.width(), pm.height());
  std::transform(pm.cells().begin(), pm.cells().end(), image.cells().begin(),
                 [](double p) { return static_cast<std::uint8_t>(std::lround(255.0 * p)); });
  write_pgm(path, image);
}

void save_mask(const RegionMask& mask, const std::filesystem::path& path) {
  GreyImage image(mask.width(), mask.height());
  std::transform(mask.cells().begin(), mask.cells().end(), image.cells().begin(),
                 [](std::uint8_t v) { return v ? 255 : 0; });
  write_pgm(path, image);
}

RegionMask load_mask(const std::filesystem::path& path) {
  return threshold_region(load_region(path), kDefaultRegionThreshold);
}

}  // namespace regionplan
