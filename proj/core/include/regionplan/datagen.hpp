#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "regionplan/grid_map.hpp"
#include "regionplan/planner.hpp"
#include "regionplan/raster.hpp"
#include "regionplan/rng.hpp"

namespace regionplan {

struct IntRange {
  int lo = 0;
  int hi = 0;
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

/// Knobs of the narrow-passage map generator.
struct GenParams {
  int size = 64;
  IntRange n_rect{6, 12};
  IntRange rect_extent{2, 12};
  IntRange n_walls{1, 3};
  IntRange gap_width{3, 8};
  int wall_thickness = 2;
  std::uint64_t seed = 0;

  /// Defaults scaled to a map side: rectangle extents are [8,48] at 256,
  /// gap widths [3,8] at 64.
  static GenParams for_size(int size);
  void validate() const;
};

enum class WallAxis { kVertical, kHorizontal };

/// One full-span wall. `offset` is the first column (vertical) or row
/// (horizontal) it occupies; gaps are [begin, end) spans along the wall.
struct Wall {
  WallAxis axis = WallAxis::kVertical;
  int offset = 0;
  int thickness = 1;
  std::vector<std::pair<int, int>> gaps;
};

struct MapLayout {
  GridMap map;
  std::vector<Wall> walls;
};

/// Border + random rectangles + parallel full-span walls each pierced by one
/// or two gaps. Pure function of (params, rng state).
MapLayout generate_layout(const GenParams& params, Rng& rng);
GridMap generate_map(const GenParams& params, Rng& rng);

/// 8-connected A* over free cells (diagonal cost sqrt 2, no corner cutting).
/// When `allowed` is given, cells outside it are treated as blocked.
std::optional<std::vector<Cell>> grid_astar(const GridMap& map, Cell start, Cell goal,
                                            const RegionMask* allowed = nullptr);

struct ReferencePath {
  std::vector<Point> points;  // smoothed polyline, start..goal
  double cost = 0.0;          // Euclidean length of `points`
  double raw_cost = 0.0;      // length of the unsmoothed cell-centre polyline
};

/// A* then shortcut smoothing. Throws kNoPath.
ReferencePath reference_path(const GridMap& map, const Point& start, const Point& goal);

/// Repeatedly replaces runs of the polyline by a straight collision-free
/// segment until nothing changes.
std::vector<Point> shortcut_smooth(const GridMap& map, std::vector<Point> path,
                                   double resolution = kDefaultResolution);

/// Start and goal at distinct free cell centres at least `min_separation`
/// apart, with a reference path between them. Throws kRetryBudgetExhausted.
PlanInstance generate_instance(std::shared_ptr<const GridMap> map, Rng& rng,
                               double min_separation, int max_attempts = 1000);

/// Oracle region binarized at 0.5.
RegionMask make_ground_truth(const GridMap& map, const PlanInstance& instance,
                             double dilation_radius);

// ---------------------------------------------------------------------------
// Files

/// {"map", "start", "goal", "region"?, "reference_cost"?}; relative paths
/// resolve against the manifest's directory.
struct InstanceManifest {
  std::filesystem::path map;
  Point start;
  Point goal;
  std::optional<std::filesystem::path> region;
  std::optional<double> reference_cost;
};

InstanceManifest read_instance_manifest(const std::filesystem::path& path);
void write_instance_manifest(const InstanceManifest& manifest, const std::filesystem::path& path);

struct LoadedInstance {
  PlanInstance instance;
  std::optional<ProbabilityMap> region;
  std::optional<double> reference_cost;
};
LoadedInstance load_instance(const std::filesystem::path& manifest_path);

enum class Split { kTrain, kVal, kTest };
std::string_view to_string(Split split) noexcept;
Split parse_split(std::string_view name);

struct SplitRatio {
  int train = 8;
  int val = 1;
  int test = 1;
};

struct DatasetRecord {
  std::string id;
  std::filesystem::path map;
  std::filesystem::path instance;
  std::filesystem::path gt_region;
  double reference_cost = 0.0;
  Split split = Split::kTrain;
};

struct Dataset {
  std::filesystem::path root;  // directory containing manifest.json
  std::vector<DatasetRecord> records;  // paths already resolved against root
};

/// Writes out_dir/{maps,instances,regions}/<id>.{pgm,json,pgm} and
/// out_dir/manifest.json; returns the manifest path. Requires n >= 10.
std::filesystem::path build_dataset(int n, const GenParams& params,
                                    const std::filesystem::path& out_dir,
                                    SplitRatio ratio = {});

Dataset read_dataset(const std::filesystem::path& manifest_path);

/// Deterministic split assignment: ids ordered by hash, then cut by ratio.
std::vector<Split> assign_splits(const std::vector<std::string>& ids, SplitRatio ratio);

}  // namespace regionplan
