#pragma once

#include <filesystem>

#include "regionplan/planner.hpp"
#include "regionplan/raster.hpp"
#include "regionplan/raster_io.hpp"

namespace regionplan {

namespace palette {
inline constexpr Rgb kFree{255, 255, 255};
inline constexpr Rgb kObstacle{0, 0, 0};
inline constexpr Rgb kRegion{255, 170, 170};
inline constexpr Rgb kTree{150, 150, 150};
inline constexpr Rgb kPath{139, 0, 0};
inline constexpr Rgb kStart{255, 0, 0};
inline constexpr Rgb kGoal{0, 0, 255};
}  // namespace palette

struct RenderOptions {
  int scale = 4;  // output pixels per map cell
};

/// Free space white, obstacles black, region tinted by probability, tree
/// edges grey, final path dark red, start red, goal blue.
RgbImage render(const PlanInstance& instance, const PlanResult& result, const Tree& tree,
                const ProbabilityMap* region, RenderOptions options = {});

void render_to_file(const PlanInstance& instance, const PlanResult& result, const Tree& tree,
                    const ProbabilityMap* region, const std::filesystem::path& out,
                    RenderOptions options = {});

}  // namespace regionplan
