#include "regionplan/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <queue>

#include <nlohmann/json.hpp>

#include "regionplan/region.hpp"

namespace regionplan {

namespace fs = std::filesystem;
using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Parameters

GenParams GenParams::for_size(int size) {
  GenParams p;
  p.size = size;
  auto scale = [size](int v, int base) {
    return std::max(1, static_cast<int>(std::lround(static_cast<double>(v) * size / base)));
  };
  p.rect_extent = {scale(8, 256), scale(48, 256)};
  p.gap_width = {std::max(3, scale(3, 64)), std::max(3, scale(8, 64))};
  p.wall_thickness = std::max(1, scale(2, 64));
  return p;
}

void GenParams::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (size < 32 || (size & (size - 1)) != 0) fail("size must be a power of two >= 32");
  auto check = [&](const IntRange& r, int min, const char* name) {
    if (r.lo < min || r.hi < r.lo) fail(std::string("invalid range for ") + name);
  };
  check(n_rect, 0, "n_rect");
  check(rect_extent, 1, "rect_extent");
  check(n_walls, 0, "n_walls");
  check(gap_width, 3, "gap_width");
  if (wall_thickness < 1) fail("wall_thickness must be >= 1");
  // Two gaps must fit in half of the interior.
  if (gap_width.hi > (size - 2) / 2 - 1) fail("gap_width too large for map size");
  if (n_walls.hi > 0 && size / (n_walls.hi + 1) < 2 * wall_thickness + 4) {
    fail("too many walls for map size");
  }
}

// ---------------------------------------------------------------------------
// Map generation

MapLayout generate_layout(const GenParams& params, Rng& rng) {
  params.validate();
  const int n = params.size;
  Raster<std::uint8_t> grid(n, n, 0);
  Raster<std::uint8_t> wall_cells(n, n, 0);

  const int n_rect = uniform_int(rng, params.n_rect.lo, params.n_rect.hi);
  for (int i = 0; i < n_rect; ++i) {
    const int w = uniform_int(rng, params.rect_extent.lo, params.rect_extent.hi);
    const int h = uniform_int(rng, params.rect_extent.lo, params.rect_extent.hi);
    const int x0 = uniform_int(rng, 1, n - 2);
    const int y0 = uniform_int(rng, 1, n - 2);
    for (int y = y0; y < std::min(n - 1, y0 + h); ++y) {
      for (int x = x0; x < std::min(n - 1, x0 + w); ++x) grid(x, y) = 1;
    }
  }

  std::vector<Wall> walls;
  const int n_walls = uniform_int(rng, params.n_walls.lo, params.n_walls.hi);
  const WallAxis axis = uniform_index(rng, 2) == 0 ? WallAxis::kVertical : WallAxis::kHorizontal;
  const int t = params.wall_thickness;
  const int pitch = n / (n_walls + 1);
  const int jitter = std::max(0, (pitch - 2 * t - 4) / 4);
  // Cell (along, across): `along` runs the length of the wall.
  auto at = [axis](auto& raster, int along, int across) -> auto& {
    return axis == WallAxis::kVertical ? raster(across, along) : raster(along, across);
  };

  for (int i = 0; i < n_walls; ++i) {
    Wall wall;
    wall.axis = axis;
    wall.thickness = t;
    wall.offset = (i + 1) * pitch - t / 2 + uniform_int(rng, -jitter, jitter);

    for (int along = 0; along < n; ++along) {
      for (int k = 0; k < t; ++k) {
        at(grid, along, wall.offset + k) = 1;
        at(wall_cells, along, wall.offset + k) = 1;
      }
    }

    // Interior span along the wall is [1, n-1); two gaps take one half each.
    const int n_gaps = uniform_int(rng, 1, 2);
    const int mid = n / 2;
    for (int g = 0; g < n_gaps; ++g) {
      const int width = uniform_int(rng, params.gap_width.lo, params.gap_width.hi);
      int lo = 1, hi = n - 1;
      if (n_gaps == 2) {
        lo = g == 0 ? 1 : mid + 1;
        hi = g == 0 ? mid - 1 : n - 1;
      }
      const int begin = uniform_int(rng, lo, hi - width);
      wall.gaps.emplace_back(begin, begin + width);
    }
    walls.push_back(std::move(wall));
  }

  // Carve gaps, then clear a short apron on both sides so clutter cannot
  // seal a passage. Apron cells never touch another wall.
  const int apron = std::max(1, std::min(3, jitter));
  for (auto& wall : walls) {
    for (const auto& [begin, end] : wall.gaps) {
      for (int along = begin; along < end; ++along) {
        for (int k = 0; k < t; ++k) at(grid, along, wall.offset + k) = 0;
        for (int k = 1; k <= apron; ++k) {
          for (int across : {wall.offset - k, wall.offset + t - 1 + k}) {
            if (across <= 0 || across >= n - 1) continue;
            if (!at(wall_cells, along, across)) at(grid, along, across) = 0;
          }
        }
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    grid(i, 0) = grid(i, n - 1) = 1;
    grid(0, i) = grid(n - 1, i) = 1;
  }
  return {GridMap(std::move(grid)), std::move(walls)};
}

GridMap generate_map(const GenParams& params, Rng& rng) {
  return generate_layout(params, rng).map;
}

// ---------------------------------------------------------------------------
// Reference paths

std::optional<std::vector<Cell>> grid_astar(const GridMap& map, Cell start, Cell goal,
                                            const RegionMask* allowed) {
  const int w = map.width();
  const int h = map.height();
  auto passable = [&](int x, int y) {
    return map.in_bounds(x, y) && !map.is_obstacle(x, y) && (!allowed || (*allowed)(x, y));
  };
  if (!passable(start.x, start.y) || !passable(goal.x, goal.y)) return std::nullopt;

  constexpr double kSqrt2 = 1.4142135623730951;
  auto heuristic = [&](int x, int y) {
    const double dx = std::abs(x - goal.x);
    const double dy = std::abs(y - goal.y);
    return (dx + dy) + (kSqrt2 - 2.0) * std::min(dx, dy);
  };

  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<double> g(n, std::numeric_limits<double>::infinity());
  std::vector<std::int64_t> came_from(n, -1);
  std::vector<std::uint8_t> closed(n, 0);
  auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };

  using Entry = std::pair<double, std::size_t>;  // (f, index); index breaks ties
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  g[idx(start.x, start.y)] = 0.0;
  open.emplace(heuristic(start.x, start.y), idx(start.x, start.y));

  static constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  const std::size_t goal_i = idx(goal.x, goal.y);
  while (!open.empty()) {
    const auto [f, cur] = open.top();
    open.pop();
    if (closed[cur]) continue;
    closed[cur] = 1;
    if (cur == goal_i) break;
    const int cx = static_cast<int>(cur % w);
    const int cy = static_cast<int>(cur / w);
    for (int k = 0; k < 8; ++k) {
      const int nx = cx + kDx[k];
      const int ny = cy + kDy[k];
      if (!passable(nx, ny)) continue;
      const bool diagonal = kDx[k] != 0 && kDy[k] != 0;
      if (diagonal && (!passable(cx + kDx[k], cy) || !passable(cx, cy + kDy[k]))) continue;
      const std::size_t ni = idx(nx, ny);
      const double cand = g[cur] + (diagonal ? kSqrt2 : 1.0);
      if (cand < g[ni]) {
        g[ni] = cand;
        came_from[ni] = static_cast<std::int64_t>(cur);
        open.emplace(cand + heuristic(nx, ny), ni);
      }
    }
  }
  if (!closed[goal_i]) return std::nullopt;

  std::vector<Cell> cells;
  for (std::int64_t c = static_cast<std::int64_t>(goal_i); c >= 0; c = came_from[c]) {
    cells.push_back({static_cast<int>(c % w), static_cast<int>(c / w)});
  }
  std::reverse(cells.begin(), cells.end());
  return cells;
}

std::vector<Point> shortcut_smooth(const GridMap& map, std::vector<Point> path,
                                   double resolution) {
  bool changed = true;
  while (changed && path.size() > 2) {
    changed = false;
    std::vector<Point> out{path.front()};
    std::size_t i = 0;
    while (i + 1 < path.size()) {
      std::size_t j = path.size() - 1;
      while (j > i + 1 && !segment_free(map, path[i], path[j], resolution)) --j;
      if (j > i + 1) changed = true;
      out.push_back(path[j]);
      i = j;
    }
    path = std::move(out);
  }
  return path;
}

ReferencePath reference_path(const GridMap& map, const Point& start, const Point& goal) {
  if (!is_free(map, start) || !is_free(map, goal)) {
    throw Error(ErrorCode::kNoPath, "start or goal is not free");
  }
  const auto cells = grid_astar(map, cell_of(start), cell_of(goal));
  if (!cells) throw Error(ErrorCode::kNoPath, "goal unreachable from start");

  std::vector<Point> raw{start};
  for (std::size_t i = 1; i + 1 < cells->size(); ++i) raw.push_back(center_of((*cells)[i]));
  raw.push_back(goal);

  ReferencePath ref;
  ref.raw_cost = path_length(raw);
  ref.points = shortcut_smooth(map, std::move(raw));
  ref.cost = path_length(ref.points);
  return ref;
}

PlanInstance generate_instance(std::shared_ptr<const GridMap> map, Rng& rng,
                               double min_separation, int max_attempts) {
  std::vector<Cell> free_cells;
  for (int y = 0; y < map->height(); ++y) {
    for (int x = 0; x < map->width(); ++x) {
      if (!map->is_obstacle(x, y)) free_cells.push_back({x, y});
    }
  }
  if (free_cells.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "map needs at least two free cells");
  }

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const auto si = uniform_index(rng, free_cells.size());
    auto gi = uniform_index(rng, free_cells.size() - 1);
    if (gi >= si) ++gi;
    const Point start = center_of(free_cells[si]);
    const Point goal = center_of(free_cells[gi]);
    if (distance(start, goal) < min_separation) continue;
    if (!grid_astar(*map, free_cells[si], free_cells[gi])) continue;
    return make_instance(std::move(map), start, goal);
  }
  throw Error(ErrorCode::kRetryBudgetExhausted,
              "no solvable start/goal pair after " + std::to_string(max_attempts) + " attempts");
}

RegionMask make_ground_truth(const GridMap& map, const PlanInstance& instance,
                             double dilation_radius) {
  return threshold_region(oracle_region(map, instance.start, instance.goal, dilation_radius),
                          0.5);
}

// ---------------------------------------------------------------------------
// Manifests

namespace {

json point_json(const Point& p) { return json::array({p.x, p.y}); }

Point point_from(const json& j, const char* field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(ErrorCode::kManifest, std::string(field) + " must be [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kManifest, path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

fs::path resolve(const fs::path& base_dir, const fs::path& p) {
  return p.is_absolute() ? p : (base_dir / p).lexically_normal();
}

std::string record_id(int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "inst_%05d", i);
  return buf;
}

}  // namespace

InstanceManifest read_instance_manifest(const fs::path& path) {
  const json j = read_json(path);
  const fs::path dir = path.parent_path();
  try {
    InstanceManifest m;
    if (!j.contains("map") || !j["map"].is_string()) {
      throw Error(ErrorCode::kManifest, "missing \"map\"");
    }
    m.map = resolve(dir, j["map"].get<std::string>());
    if (!j.contains("start") || !j.contains("goal")) {
      throw Error(ErrorCode::kManifest, "missing \"start\" or \"goal\"");
    }
    m.start = point_from(j["start"], "start");
    m.goal = point_from(j["goal"], "goal");
    if (j.contains("region") && !j["region"].is_null()) {
      m.region = resolve(dir, j["region"].get<std::string>());
    }
    if (j.contains("reference_cost") && !j["reference_cost"].is_null()) {
      m.reference_cost = j["reference_cost"].get<double>();
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kManifest, path.string() + ": " + e.what());
  }
}

void write_instance_manifest(const InstanceManifest& m, const fs::path& path) {
  json j;
  j["map"] = m.map.generic_string();
  j["start"] = point_json(m.start);
  j["goal"] = point_json(m.goal);
  if (m.region) j["region"] = m.region->generic_string();
  if (m.reference_cost) j["reference_cost"] = *m.reference_cost;
  write_text(path, j.dump(2) + "\n");
}

LoadedInstance load_instance(const fs::path& manifest_path) {
  const InstanceManifest m = read_instance_manifest(manifest_path);
  auto map = std::make_shared<const GridMap>(load_map(m.map));
  LoadedInstance loaded;
  if (m.region) loaded.region = load_region(*m.region, *map);
  loaded.reference_cost = m.reference_cost;
  loaded.instance = make_instance(std::move(map), m.start, m.goal);
  validate_instance(loaded.instance);
  return loaded;
}

std::string_view to_string(Split split) noexcept {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw Error(ErrorCode::kManifest, "unknown split \"" + std::string(name) + "\"");
}

std::vector<Split> assign_splits(const std::vector<std::string>& ids, SplitRatio ratio) {
  const int total = ratio.train + ratio.val + ratio.test;
  if (ratio.train < 0 || ratio.val < 0 || ratio.test < 0 || total <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid split ratio");
  }
  const auto n = static_cast<long>(ids.size());
  const long n_val = std::lround(static_cast<double>(n) * ratio.val / total);
  const long n_test = std::lround(static_cast<double>(n) * ratio.test / total);

  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ha = fnv1a(ids[a]);
    const auto hb = fnv1a(ids[b]);
    return ha != hb ? ha < hb : ids[a] < ids[b];
  });

  std::vector<Split> splits(ids.size(), Split::kTrain);
  for (long k = 0; k < n; ++k) {
    if (k < n_val) {
      splits[order[k]] = Split::kVal;
    } else if (k < n_val + n_test) {
      splits[order[k]] = Split::kTest;
    }
  }
  return splits;
}

fs::path build_dataset(int n, const GenParams& params, const fs::path& out_dir,
                       SplitRatio ratio) {
  if (n < 10) throw Error(ErrorCode::kInvalidArgument, "dataset needs at least 10 records");
  params.validate();
  std::error_code ec;
  for (const char* sub : {"maps", "instances", "regions"}) {
    fs::create_directories(out_dir / sub, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create " + (out_dir / sub).string());
  }

  std::vector<std::string> ids;
  std::vector<json> rows;
  for (int i = 0; i < n; ++i) {
    const std::string id = record_id(i);
    // Records are independent: each owns a stream derived from the seed.
    Rng rng(hash_combine(params.seed, static_cast<std::uint64_t>(i)));
    std::shared_ptr<const GridMap> map;
    std::optional<PlanInstance> instance;
    for (int tries = 0; !instance; ++tries) {
      map = std::make_shared<const GridMap>(generate_map(params, rng));
      try {
        instance = generate_instance(map, rng, 0.5 * params.size);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kRetryBudgetExhausted || tries >= 100) throw;
      }
    }
    const ReferencePath ref = reference_path(*map, instance->start, instance->goal);
    const RegionMask gt = make_ground_truth(*map, *instance, default_dilation_radius(*map));

    const fs::path map_rel = fs::path("maps") / (id + ".pgm");
    const fs::path inst_rel = fs::path("instances") / (id + ".json");
    const fs::path region_rel = fs::path("regions") / (id + ".pgm");
    save_map(*map, out_dir / map_rel);
    save_mask(gt, out_dir / region_rel);
    InstanceManifest im;
    im.map = fs::path("..") / map_rel;
    im.start = instance->start;
    im.goal = instance->goal;
    im.reference_cost = ref.cost;
    write_instance_manifest(im, out_dir / inst_rel);

    ids.push_back(id);
    rows.push_back({{"id", id},
                    {"map", map_rel.generic_string()},
                    {"instance", inst_rel.generic_string()},
                    {"gt_region", region_rel.generic_string()},
                    {"reference_cost", ref.cost}});
  }

  const auto splits = assign_splits(ids, ratio);
  json records = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i]["split"] = std::string(to_string(splits[i]));
    records.push_back(std::move(rows[i]));
  }
  json manifest = {
      {"format", "regionplan-dataset"},
      {"version", 1},
      {"seed", params.seed},
      {"params",
       {{"size", params.size},
        {"n_rect", {params.n_rect.lo, params.n_rect.hi}},
        {"rect_extent", {params.rect_extent.lo, params.rect_extent.hi}},
        {"n_walls", {params.n_walls.lo, params.n_walls.hi}},
        {"gap_width", {params.gap_width.lo, params.gap_width.hi}},
        {"wall_thickness", params.wall_thickness}}},
      {"split_ratio", {ratio.train, ratio.val, ratio.test}},
      {"records", std::move(records)},
  };
  const fs::path manifest_path = out_dir / "manifest.json";
  write_text(manifest_path, manifest.dump(2) + "\n");
  return manifest_path;
}

Dataset read_dataset(const fs::path& manifest_path) {
  const json j = read_json(manifest_path);
  Dataset ds;
  ds.root = manifest_path.parent_path();
  try {
    if (!j.contains("records") || !j["records"].is_array()) {
      throw Error(ErrorCode::kManifest, "manifest has no records array");
    }
    for (const auto& r : j["records"]) {
      DatasetRecord rec;
      rec.id = r.at("id").get<std::string>();
      rec.map = resolve(ds.root, r.at("map").get<std::string>());
      rec.instance = resolve(ds.root, r.at("instance").get<std::string>());
      rec.gt_region = resolve(ds.root, r.at("gt_region").get<std::string>());
      rec.reference_cost = r.at("reference_cost").get<double>();
      rec.split = parse_split(r.at("split").get<std::string>());
      ds.records.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kManifest, manifest_path.string() + ": " + e.what());
  }
  return ds;
}

}  // namespace regionplan
