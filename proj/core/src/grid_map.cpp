#include "regionplan/grid_map.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "regionplan/raster_io.hpp"

namespace regionplan {

void validate_probabilities(const ProbabilityMap& pm) {
  for (double p : pm.cells()) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "probability outside [0,1]");
    }
  }
}

ProbabilityMap to_probabilities(const RegionMask& mask) {
  ProbabilityMap pm(mask.width(), mask.height());
  std::transform(mask.cells().begin(), mask.cells().end(), pm.cells().begin(),
                 [](std::uint8_t v) { return v ? 1.0 : 0.0; });
  return pm;
}

GridMap::GridMap(Raster<std::uint8_t> occupancy) : occupancy_(std::move(occupancy)) {
  if (occupancy_.width() < kMinMapSide || occupancy_.height() < kMinMapSide) {
    throw Error(ErrorCode::kDimensionTooSmall,
                "map is " + std::to_string(occupancy_.width()) + "x" +
                    std::to_string(occupancy_.height()) + ", minimum side is " +
                    std::to_string(kMinMapSide));
  }
  for (auto& c : occupancy_.cells()) c = c ? 1 : 0;
}

GridMap::GridMap(int width, int height, bool fill_obstacle)
    : GridMap(Raster<std::uint8_t>(width, height, fill_obstacle ? 1 : 0)) {}

std::size_t GridMap::obstacle_count() const noexcept {
  return static_cast<std::size_t>(
      std::count(occupancy_.cells().begin(), occupancy_.cells().end(), std::uint8_t{1}));
}

GridMap load_map(const std::filesystem::path& path) {
  GreyImage image = read_pgm(path);
  for (auto& px : image.cells()) px = px < kOccupancyThreshold ? 1 : 0;
  return GridMap(std::move(image));
}

void save_map(const GridMap& map, const std::filesystem::path& path) {
  GreyImage image(map.width(), map.height());
  std::transform(map.occupancy().cells().begin(), map.occupancy().cells().end(),
                 image.cells().begin(), [](std::uint8_t o) { return o ? 0 : 255; });
  write_pgm(path, image);
}

bool is_free(const GridMap& map, const Point& p) noexcept {
  if (!(p.x >= 0.0 && p.y >= 0.0)) return false;  // also rejects NaN
  if (p.x >= map.width() || p.y >= map.height()) return false;
  const Cell c = cell_of(p);
  return map.in_bounds(c.x, c.y) && !map.is_obstacle(c);
}

std::size_t segment_sample_count(double length, double resolution) noexcept {
  // Intervals = ceil(length / resolution); the slack absorbs rounding when the
  // ratio is an exact integer.
  const double ratio = length / resolution;
  const auto intervals = static_cast<std::size_t>(std::ceil(ratio - 1e-9));
  return std::max<std::size_t>(intervals, 1) + 1;
}

namespace {

template <typename Visit>
bool for_each_sample(const Point& a, const Point& b, double resolution, Visit&& visit) {
  if (!(resolution > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "segment resolution must be positive");
  }
  const std::size_t n = segment_sample_count(distance(a, b), resolution);
  const double intervals = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / intervals;
    if (!visit(Point{a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t})) return false;
  }
  return true;
}

}  // namespace

bool segment_free(const GridMap& map, const Point& a, const Point& b, double resolution) {
  if (!(resolution > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "segment resolution must be positive");
  }
  // Endpoints first: most rejected edges end inside an obstacle.
  if (!is_free(map, a) || !is_free(map, b)) return false;
  return for_each_sample(a, b, resolution, [&](const Point& p) { return is_free(map, p); });
}

std::vector<Cell> rasterize_segment(const Point& a, const Point& b, double resolution) {
  std::vector<Cell> cells;
  for_each_sample(a, b, resolution, [&](const Point& p) {
    const Cell c = cell_of(p);
    if (cells.empty() || !(cells.back() == c)) cells.push_back(c);
    return true;
  });
  return cells;
}

RegionMask dilate(const RegionMask& mask, double radius) {
  if (!(radius >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "negative dilation radius");
  if (radius == 0.0) return mask;

  const int reach = static_cast<int>(std::floor(radius));
  const double r2 = radius * radius;
  // Offsets of the disc stencil.
  std::vector<Cell> stencil;
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      if (dx * dx + dy * dy <= r2) stencil.push_back({dx, dy});
    }
  }

  RegionMask out(mask.width(), mask.height(), 0);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y)) continue;
      for (const auto& [dx, dy] : stencil) {
        if (out.in_bounds(x + dx, y + dy)) out(x + dx, y + dy) = 1;
      }
    }
  }
  return out;
}

}  // namespace regionplan
