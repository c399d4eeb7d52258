#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>

#include "regionplan/raster.hpp"

namespace regionplan {

/// Continuous map coordinates; one unit is one pixel edge. x = column, y = row.
struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(const Point& a, const Point& b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Integer cell containing a continuous point (floor of coordinates).
struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

inline Cell cell_of(const Point& p) noexcept {
  return {static_cast<int>(std::floor(p.x)), static_cast<int>(std::floor(p.y))};
}
inline Point center_of(const Cell& c) noexcept { return {c.x + 0.5, c.y + 0.5}; }

/// Samples along a segment are at most this far apart unless overridden.
inline constexpr double kDefaultResolution = 0.5;
inline constexpr int kMinMapSide = 8;
/// Greyscale pixels below this value are obstacles.
inline constexpr std::uint8_t kOccupancyThreshold = 128;

/// Occupancy grid. Immutable once built; `true` cells are obstacles.
class GridMap {
 public:
  /// Throws kDimensionTooSmall when either side is below kMinMapSide.
  explicit GridMap(Raster<std::uint8_t> occupancy);
  GridMap(int width, int height, bool fill_obstacle = false);

  int width() const noexcept { return occupancy_.width(); }
  int height() const noexcept { return occupancy_.height(); }

  bool in_bounds(int x, int y) const noexcept { return occupancy_.in_bounds(x, y); }
  bool is_obstacle(int x, int y) const noexcept { return occupancy_(x, y) != 0; }
  bool is_obstacle(const Cell& c) const noexcept { return is_obstacle(c.x, c.y); }

  const Raster<std::uint8_t>& occupancy() const noexcept { return occupancy_; }

  std::size_t obstacle_count() const noexcept;
  std::size_t free_count() const noexcept { return occupancy_.size() - obstacle_count(); }

  friend bool operator==(const GridMap&, const GridMap&) = default;

 private:
  Raster<std::uint8_t> occupancy_;
};

/// Loads a P5 PGM: pixel < 128 is an obstacle, >= 128 is free.
GridMap load_map(const std::filesystem::path& path);
/// Writes obstacles as 0 and free cells as 255.
void save_map(const GridMap& map, const std::filesystem::path& path);

/// False when p lies outside the map or inside an obstacle cell.
bool is_free(const GridMap& map, const Point& p) noexcept;

/// True iff evenly spaced samples along ab, at spacing <= resolution and
/// including both endpoints, are all free. Throws kInvalidArgument when
/// resolution <= 0.
bool segment_free(const GridMap& map, const Point& a, const Point& b,
                  double resolution = kDefaultResolution);

/// Number of samples segment_free evaluates along a segment of this length.
std::size_t segment_sample_count(double length, double resolution) noexcept;

/// Cells hit by the samples segment_free would take along ab.
std::vector<Cell> rasterize_segment(const Point& a, const Point& b,
                                    double resolution = kDefaultResolution);

/// Output cell is 1 iff some input cell within Euclidean center distance
/// <= radius is 1.
RegionMask dilate(const RegionMask& mask, double radius);

}  // namespace regionplan
