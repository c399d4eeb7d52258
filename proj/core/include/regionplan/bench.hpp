#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "regionplan/datagen.hpp"
#include "regionplan/losses.hpp"
#include "regionplan/planner.hpp"

namespace regionplan {

enum class Method { kUniform, kOracleRegion, kFileRegion };
std::string_view to_string(Method method) noexcept;
Method parse_method(std::string_view name);

struct BenchConfig {
  std::filesystem::path dataset;  // manifest.json
  std::vector<Method> methods{Method::kUniform, Method::kOracleRegion};
  int trials = 1;
  std::size_t max_samples = 5000;
  double termination_ratio = 1.03;
  double heuristic_bias = 0.8;
  std::uint64_t seed = 0;
  /// Restrict to one split; all records when unset.
  std::optional<Split> split;
  /// Where file-region reads <id>.region.pgm; defaults to the manifest dir.
  std::optional<std::filesystem::path> region_dir;
  unsigned jobs = 1;

  void validate() const;
};

struct RunRow {
  std::string instance;
  Method method = Method::kUniform;
  int trial = 0;
  std::size_t vertices_added = 0;
  std::size_t samples_drawn = 0;
  double wall_time = 0.0;
  std::optional<double> cost;
  bool success = false;

  friend bool operator==(const RunRow&, const RunRow&) = default;
};

inline constexpr std::string_view kRunsCsvVersion = "# regionplan-runs v1";

std::uint64_t trial_seed(std::uint64_t seed, std::string_view instance, Method method,
                         int trial) noexcept;

/// One planner run per (record, method, trial), rows sorted by
/// (record order, method order, trial).
std::vector<RunRow> run_benchmark(const BenchConfig& config);

void write_runs_csv(std::ostream& out, std::span<const RunRow> rows);
void write_runs_csv(const std::filesystem::path& path, std::span<const RunRow> rows);
std::vector<RunRow> read_runs_csv(std::istream& in);
std::vector<RunRow> read_runs_csv(const std::filesystem::path& path);

struct SummaryRow {
  std::string instance;
  Method method = Method::kUniform;
  std::size_t runs = 0;
  double mean_vertices = 0.0;
  double median_vertices = 0.0;
  double mean_time = 0.0;
  double median_time = 0.0;
  double success_rate = 0.0;  // percent
  /// method / uniform on the same instance, when uniform rows exist.
  std::optional<double> vertex_ratio;
  std::optional<double> time_ratio;
};

/// Per-(instance, method) statistics in first-appearance order. Throws
/// kEmptyInput for no rows.
std::vector<SummaryRow> summarize(std::span<const RunRow> rows);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);

double median(std::vector<double> values);

nlohmann::json to_json(const PlanResult& result);
nlohmann::json to_json(const RegionMetrics& metrics);

/// Region metrics of a predicted region file against a ground-truth region
/// file, default loss settings.
RegionMetrics eval_region(const std::filesystem::path& pred, const std::filesystem::path& gt);

}  // namespace regionplan
