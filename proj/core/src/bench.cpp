#include "regionplan/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include "regionplan/region.hpp"

namespace regionplan {

namespace fs = std::filesystem;

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::kUniform: return "uniform";
    case Method::kOracleRegion: return "oracle-region";
    case Method::kFileRegion: return "file-region";
  }
  return "uniform";
}

Method parse_method(std::string_view name) {
  if (name == "uniform") return Method::kUniform;
  if (name == "oracle-region") return Method::kOracleRegion;
  if (name == "file-region") return Method::kFileRegion;
  throw Error(ErrorCode::kInvalidArgument, "unknown method \"" + std::string(name) + "\"");
}

void BenchConfig::validate() const {
  if (trials < 1) throw Error(ErrorCode::kInvalidArgument, "trials must be >= 1");
  if (methods.empty()) throw Error(ErrorCode::kInvalidArgument, "no methods selected");
  if (max_samples < 1) throw Error(ErrorCode::kInvalidArgument, "max_samples must be >= 1");
  if (!(termination_ratio >= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "termination_ratio must be >= 1");
  }
  if (!(heuristic_bias >= 0.0 && heuristic_bias <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "heuristic_bias must be in [0,1]");
  }
}

std::uint64_t trial_seed(std::uint64_t seed, std::string_view instance, Method method,
                         int trial) noexcept {
  std::uint64_t h = hash_combine(seed, fnv1a(instance));
  h = hash_combine(h, fnv1a(to_string(method)));
  return hash_combine(h, static_cast<std::uint64_t>(trial));
}

namespace {

struct PreparedInstance {
  std::string id;
  PlanInstance instance;
  double reference_cost = 0.0;
  // One sampler per method slot; null for uniform.
  std::vector<std::shared_ptr<const Sampler>> samplers;
};

std::shared_ptr<const Sampler> make_region_sampler(const fs::path& file,
                                                   const PlanInstance& instance) {
  auto region = std::make_shared<const RegionSampler>(load_region(file, *instance.map));
  return std::make_shared<const BiasedSampler>(std::move(region), instance.map);
}

}  // namespace

std::vector<RunRow> run_benchmark(const BenchConfig& config) {
  config.validate();
  const Dataset dataset = read_dataset(config.dataset);
  const fs::path region_dir = config.region_dir.value_or(dataset.root);

  std::vector<PreparedInstance> prepared;
  for (const auto& rec : dataset.records) {
    if (config.split && rec.split != *config.split) continue;
    PreparedInstance p;
    p.id = rec.id;
    const LoadedInstance loaded = load_instance(rec.instance);
    p.instance = loaded.instance;
    p.reference_cost = rec.reference_cost;
    for (Method m : config.methods) {
      switch (m) {
        case Method::kUniform:
          p.samplers.push_back(std::make_shared<const UniformSampler>(*p.instance.map));
          break;
        case Method::kOracleRegion:
          p.samplers.push_back(make_region_sampler(rec.gt_region, p.instance));
          break;
        case Method::kFileRegion: {
          const fs::path file = region_dir / (rec.id + ".region.pgm");
          if (!fs::exists(file)) {
            throw Error(ErrorCode::kMissingRegion, file.string());
          }
          p.samplers.push_back(make_region_sampler(file, p.instance));
          break;
        }
      }
    }
    prepared.push_back(std::move(p));
  }

  const std::size_t n_methods = config.methods.size();
  const std::size_t n_trials = static_cast<std::size_t>(config.trials);
  const std::size_t total = prepared.size() * n_methods * n_trials;
  std::vector<RunRow> rows(total);

  auto run_cell = [&](std::size_t k) {
    const std::size_t trial = k % n_trials;
    const std::size_t mi = (k / n_trials) % n_methods;
    const PreparedInstance& p = prepared[k / (n_trials * n_methods)];
    const Method method = config.methods[mi];

    PlannerConfig pc = default_planner_config(*p.instance.map);
    pc.max_samples = config.max_samples;
    pc.termination_ratio = config.termination_ratio;
    pc.heuristic_bias = config.heuristic_bias;
    pc.reference_cost = p.reference_cost;
    pc.rng_seed = trial_seed(config.seed, p.id, method, static_cast<int>(trial));
    const PlanResult result = plan(p.instance, pc, *p.samplers[mi]);

    RunRow& row = rows[k];
    row.instance = p.id;
    row.method = method;
    row.trial = static_cast<int>(trial);
    row.vertices_added = result.vertices_added;
    row.samples_drawn = result.samples_drawn;
    row.wall_time = result.wall_time;
    row.cost = result.cost;
    row.success = result.terminated_by == Termination::kConverged;
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(config.jobs, static_cast<unsigned>(total)));
  if (jobs <= 1) {
    for (std::size_t k = 0; k < total; ++k) run_cell(k);
  } else {
    // Each worker writes only its own rows; order is fixed by index.
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t k = next++; k < total; k = next++) run_cell(k);
      });
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string format_double(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

constexpr std::string_view kRunsHeader =
    "instance,method,trial,vertices_added,samples_drawn,wall_time,cost,success";

}  // namespace

void write_runs_csv(std::ostream& out, std::span<const RunRow> rows) {
  out << kRunsCsvVersion << '\n' << kRunsHeader << '\n';
  for (const RunRow& r : rows) {
    out << r.instance << ',' << to_string(r.method) << ',' << r.trial << ',' << r.vertices_added
        << ',' << r.samples_drawn << ',' << format_double(r.wall_time, "%.6f") << ','
        << (r.cost ? format_double(*r.cost, "%.17g") : std::string()) << ','
        << (r.success ? "true" : "false") << '\n';
  }
}

void write_runs_csv(const fs::path& path, std::span<const RunRow> rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  write_runs_csv(out, rows);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::vector<RunRow> read_runs_csv(std::istream& in) {
  std::vector<RunRow> rows;
  std::string line;
  bool saw_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!saw_header) {
      if (line != kRunsHeader) throw Error(ErrorCode::kManifest, "unexpected CSV header");
      saw_header = true;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 8) {
      throw Error(ErrorCode::kManifest, "CSV line " + std::to_string(line_no) + " has " +
                                            std::to_string(f.size()) + " fields");
    }
    try {
      RunRow r;
      r.instance = f[0];
      r.method = parse_method(f[1]);
      r.trial = std::stoi(f[2]);
      r.vertices_added = std::stoull(f[3]);
      r.samples_drawn = std::stoull(f[4]);
      r.wall_time = std::stod(f[5]);
      if (!f[6].empty()) r.cost = std::stod(f[6]);
      if (f[7] != "true" && f[7] != "false") throw std::invalid_argument("success");
      r.success = f[7] == "true";
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kManifest, "malformed CSV line " + std::to_string(line_no));
    }
  }
  return rows;
}

std::vector<RunRow> read_runs_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_runs_csv(in);
}

// ---------------------------------------------------------------------------
// Statistics

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "median of no values");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<SummaryRow> summarize(std::span<const RunRow> rows) {
  if (rows.empty()) throw Error(ErrorCode::kEmptyInput, "no benchmark rows to summarize");

  using Key = std::pair<std::string, Method>;
  std::vector<Key> order;
  std::map<Key, std::vector<const RunRow*>> groups;
  for (const RunRow& r : rows) {
    Key key{r.instance, r.method};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&r);
  }

  std::vector<SummaryRow> out;
  for (const Key& key : order) {
    const auto& group = groups[key];
    SummaryRow s;
    s.instance = key.first;
    s.method = key.second;
    s.runs = group.size();
    std::vector<double> verts, times;
    std::size_t successes = 0;
    for (const RunRow* r : group) {
      verts.push_back(static_cast<double>(r->vertices_added));
      times.push_back(r->wall_time);
      successes += r->success ? 1 : 0;
    }
    for (double v : verts) s.mean_vertices += v;
    for (double t : times) s.mean_time += t;
    s.mean_vertices /= static_cast<double>(s.runs);
    s.mean_time /= static_cast<double>(s.runs);
    s.median_vertices = median(verts);
    s.median_time = median(times);
    s.success_rate = 100.0 * static_cast<double>(successes) / static_cast<double>(s.runs);
    out.push_back(std::move(s));
  }

  std::map<std::string, const SummaryRow*> uniform;
  for (const SummaryRow& s : out) {
    if (s.method == Method::kUniform) uniform[s.instance] = &s;
  }
  for (SummaryRow& s : out) {
    auto it = uniform.find(s.instance);
    if (it == uniform.end()) continue;
    const SummaryRow& u = *it->second;
    if (u.mean_vertices > 0.0) s.vertex_ratio = s.mean_vertices / u.mean_vertices;
    if (u.mean_time > 0.0) s.time_ratio = s.mean_time / u.mean_time;
  }
  return out;
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << "instance,method,runs,mean_vertices,median_vertices,mean_time,median_time,"
         "success_rate,vertex_ratio,time_ratio\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v, "%.6g") : std::string();
  };
  for (const SummaryRow& s : rows) {
    out << s.instance << ',' << to_string(s.method) << ',' << s.runs << ','
        << format_double(s.mean_vertices, "%.6g") << ','
        << format_double(s.median_vertices, "%.6g") << ','
        << format_double(s.mean_time, "%.6g") << ',' << format_double(s.median_time, "%.6g")
        << ',' << format_double(s.success_rate, "%.6g") << ',' << opt(s.vertex_ratio) << ','
        << opt(s.time_ratio) << '\n';
  }
}

// ---------------------------------------------------------------------------
// JSON records

nlohmann::json to_json(const PlanResult& result) {
  nlohmann::json j;
  if (result.path) {
    nlohmann::json path = nlohmann::json::array();
    for (const Point& p : *result.path) path.push_back({p.x, p.y});
    j["path"] = std::move(path);
  } else {
    j["path"] = nullptr;
  }
  j["cost"] = result.cost ? nlohmann::json(*result.cost) : nlohmann::json(nullptr);
  j["vertices_added"] = result.vertices_added;
  j["samples_drawn"] = result.samples_drawn;
  j["rewire_count"] = result.rewire_count;
  j["wall_time"] = result.wall_time;
  j["terminated_by"] = std::string(to_string(result.terminated_by));
  return j;
}

nlohmann::json to_json(const RegionMetrics& m) {
  return {{"dice", m.dice}, {"wbce", m.wbce}, {"purity_loss", m.purity_loss},
          {"hybrid", m.hybrid}};
}

RegionMetrics eval_region(const fs::path& pred, const fs::path& gt) {
  const ProbabilityMap p = load_region(pred);
  const RegionMask g = load_mask(gt);
  if (!p.same_shape(g)) {
    throw Error(ErrorCode::kDimensionMismatch, "prediction and ground truth differ in size");
  }
  return evaluate_region(p, g);
}

}  // namespace regionplan
