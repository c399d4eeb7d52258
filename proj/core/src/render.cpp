#include "regionplan/render.hpp"

#include <algorithm>
#include <cmath>

namespace regionplan {

namespace {

std::uint8_t lerp(std::uint8_t a, std::uint8_t b, double t) {
  return static_cast<std::uint8_t>(std::lround(a + (b - a) * t));
}

void plot(RgbImage& img, int x, int y, Rgb color) {
  if (img.in_bounds(x, y)) img(x, y) = color;
}

// Bresenham between endpoints in image pixels.
void draw_line(RgbImage& img, const Point& a, const Point& b, int scale, Rgb color, int width) {
  int x0 = static_cast<int>(std::floor(a.x * scale));
  int y0 = static_cast<int>(std::floor(a.y * scale));
  const int x1 = static_cast<int>(std::floor(b.x * scale));
  const int y1 = static_cast<int>(std::floor(b.y * scale));
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  const int half = width / 2;
  for (;;) {
    for (int oy = -half; oy < width - half; ++oy) {
      for (int ox = -half; ox < width - half; ++ox) plot(img, x0 + ox, y0 + oy, color);
    }
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void draw_disc(RgbImage& img, const Point& c, int scale, double radius_px, Rgb color) {
  const double cx = c.x * scale;
  const double cy = c.y * scale;
  const int r = static_cast<int>(std::ceil(radius_px));
  for (int y = static_cast<int>(cy) - r; y <= static_cast<int>(cy) + r; ++y) {
    for (int x = static_cast<int>(cx) - r; x <= static_cast<int>(cx) + r; ++x) {
      if (std::hypot(x + 0.5 - cx, y + 0.5 - cy) <= radius_px) plot(img, x, y, color);
    }
  }
}

}  // namespace

RgbImage render(const PlanInstance& instance, const PlanResult& result, const Tree& tree,
                const ProbabilityMap* region, RenderOptions options) {
  const GridMap& map = *instance.map;
  const int s = std::max(1, options.scale);
  if (region && !region->same_shape(map.width(), map.height())) {
    throw Error(ErrorCode::kDimensionMismatch, "region does not match map");
  }

  RgbImage img(map.width() * s, map.height() * s, palette::kFree);
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      Rgb c = palette::kFree;
      if (map.is_obstacle(x, y)) {
        c = palette::kObstacle;
      } else if (region) {
        const double p = std::clamp((*region)(x, y), 0.0, 1.0);
        c = {lerp(palette::kFree.r, palette::kRegion.r, p),
             lerp(palette::kFree.g, palette::kRegion.g, p),
             lerp(palette::kFree.b, palette::kRegion.b, p)};
      }
      for (int py = 0; py < s; ++py) {
        for (int px = 0; px < s; ++px) img(x * s + px, y * s + py) = c;
      }
    }
  }

  for (VertexId v = 1; v < tree.size(); ++v) {
    draw_line(img, tree.point(tree.parent(v)), tree.point(v), s, palette::kTree, 1);
  }
  if (result.path) {
    const auto& path = *result.path;
    const int width = std::max(1, s / 2);
    for (std::size_t i = 1; i < path.size(); ++i) {
      draw_line(img, path[i - 1], path[i], s, palette::kPath, width);
    }
    if (path.size() == 1) draw_disc(img, path.front(), s, 0.5 * width, palette::kPath);
  }
  const double marker = std::max(1.5, 0.75 * s);
  draw_disc(img, instance.start, s, marker, palette::kStart);
  draw_disc(img, instance.goal, s, marker, palette::kGoal);
  return img;
}

void render_to_file(const PlanInstance& instance, const PlanResult& result, const Tree& tree,
                    const ProbabilityMap* region, const std::filesystem::path& out,
                    RenderOptions options) {
  write_ppm(out, render(instance, result, tree, region, options));
}

}  // namespace regionplan
