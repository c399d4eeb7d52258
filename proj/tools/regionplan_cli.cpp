// regionplan command-line front end: dataset generation, single planning
// runs, benchmarks, summaries, region metrics and rendering.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "regionplan/bench.hpp"
#include "regionplan/datagen.hpp"
#include "regionplan/region.hpp"
#include "regionplan/render.hpp"

namespace fs = std::filesystem;
using namespace regionplan;

namespace {

struct PlanFlags {
  std::string instance;
  std::string method = "uniform";
  std::string region;
  std::optional<double> step;
  double bias = 0.8;
  std::size_t max_samples = 5000;
  double termination_ratio = 1.03;
  std::optional<double> reference_cost;
  std::optional<double> radius;
  std::uint64_t seed = 0;
};

void add_plan_flags(CLI::App* cmd, PlanFlags& f) {
  cmd->add_option("--instance", f.instance, "Instance manifest (JSON)")->required();
  cmd->add_option("--method", f.method, "uniform | oracle-region | file-region")
      ->check(CLI::IsMember({"uniform", "oracle-region", "file-region"}));
  cmd->add_option("--region", f.region, "Region PGM for file-region (overrides manifest)");
  cmd->add_option("--step", f.step, "Steer step in map units (default 2% of map side)");
  cmd->add_option("--bias", f.bias, "Heuristic sampling bias b_h")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--max-samples", f.max_samples, "Sample budget");
  cmd->add_option("--termination-ratio", f.termination_ratio, "Converged when cost <= ratio*ref");
  cmd->add_option("--reference-cost", f.reference_cost, "Overrides the manifest reference cost");
  cmd->add_option("--radius", f.radius, "Dilation radius for oracle-region");
  cmd->add_option("--seed", f.seed, "Random seed");
}

struct PreparedRun {
  LoadedInstance loaded;
  PlannerConfig config;
  std::unique_ptr<Sampler> sampler;
  std::optional<ProbabilityMap> region;
};

PreparedRun prepare_run(const PlanFlags& f) {
  PreparedRun run;
  run.loaded = load_instance(f.instance);
  const PlanInstance& inst = run.loaded.instance;
  run.config = default_planner_config(*inst.map);
  if (f.step) {
    run.config.step = *f.step;
    run.config.min_radius = *f.step;
  }
  run.config.heuristic_bias = f.bias;
  run.config.max_samples = f.max_samples;
  run.config.termination_ratio = f.termination_ratio;
  run.config.reference_cost = f.reference_cost ? f.reference_cost : run.loaded.reference_cost;
  run.config.rng_seed = f.seed;

  const Method method = parse_method(f.method);
  if (method == Method::kUniform) {
    run.sampler = std::make_unique<UniformSampler>(*inst.map);
    return run;
  }
  if (method == Method::kOracleRegion) {
    run.region = oracle_region(*inst.map, inst.start, inst.goal,
                               f.radius.value_or(default_dilation_radius(*inst.map)));
  } else if (!f.region.empty()) {
    run.region = load_region(f.region, *inst.map);
  } else if (run.loaded.region) {
    run.region = run.loaded.region;
  } else {
    throw Error(ErrorCode::kMissingRegion, "file-region needs --region or a manifest region");
  }
  run.sampler = std::make_unique<BiasedSampler>(
      std::make_shared<const RegionSampler>(*run.region), inst.map);
  return run;
}

std::vector<Method> parse_methods(const std::string& csv) {
  std::vector<Method> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_method(item));
  }
  return out;
}

SplitRatio parse_ratio(const std::string& text) {
  SplitRatio r;
  if (std::sscanf(text.c_str(), "%d:%d:%d", &r.train, &r.val, &r.test) != 3) {
    throw Error(ErrorCode::kInvalidArgument, "split ratio must look like 8:1:1");
  }
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Region-guided RRT* planning toolkit"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Build a narrow-passage dataset");
  std::string gen_out;
  int gen_n = 200;
  int gen_size = 64;
  std::uint64_t gen_seed = 0;
  std::string gen_ratio = "8:1:1";
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("-n,--count", gen_n, "Number of records")->check(CLI::Range(10, 1000000));
  gen->add_option("--size", gen_size, "Map side in pixels (power of two >= 32)");
  gen->add_option("--split-ratio", gen_ratio, "train:val:test");
  gen->add_option("--seed", gen_seed, "Master seed");

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "Run the planner once and print the result");
  PlanFlags plan_flags;
  add_plan_flags(plan_cmd, plan_flags);

  // bench
  auto* bench = app.add_subcommand("bench", "Benchmark sampling strategies over a dataset");
  BenchConfig bc;
  std::string bench_dataset, bench_methods = "uniform,oracle-region", bench_out, bench_split,
                             bench_region_dir;
  bench->add_option("--dataset", bench_dataset, "Dataset manifest.json")->required();
  bench->add_option("--methods", bench_methods, "Comma list of uniform,oracle-region,file-region");
  bench->add_option("--trials", bc.trials, "Trials per (instance, method)");
  bench->add_option("--max-samples", bc.max_samples, "Sample budget per run");
  bench->add_option("--termination-ratio", bc.termination_ratio, "Convergence ratio");
  bench->add_option("--bias", bc.heuristic_bias, "Heuristic sampling bias b_h");
  bench->add_option("--split", bench_split, "Only records of this split")
      ->check(CLI::IsMember({"train", "val", "test"}));
  bench->add_option("--region-dir", bench_region_dir, "Directory of <id>.region.pgm files");
  bench->add_option("--jobs", bc.jobs, "Worker threads");
  bench->add_option("--seed", bc.seed, "Master seed");
  bench->add_option("--out", bench_out, "CSV output path (stdout when omitted)");

  // summarize
  auto* summ = app.add_subcommand("summarize", "Per-instance statistics from a bench CSV");
  std::string summ_csv, summ_out;
  std::uint64_t unused_seed = 0;
  summ->add_option("--csv", summ_csv, "Bench CSV")->required();
  summ->add_option("--out", summ_out, "Summary CSV path (stdout when omitted)");
  summ->add_option("--seed", unused_seed, "Accepted for uniformity; unused");

  // eval-region
  auto* eval = app.add_subcommand("eval-region", "Dice / wBCE / purity metrics of a region");
  std::string eval_pred, eval_gt;
  eval->add_option("--pred", eval_pred, "Predicted region PGM")->required();
  eval->add_option("--gt", eval_gt, "Ground-truth region PGM")->required();
  eval->add_option("--seed", unused_seed, "Accepted for uniformity; unused");

  // oracle-region
  auto* oracle = app.add_subcommand("oracle-region", "Write the dilated reference-path region");
  std::string oracle_instance, oracle_out;
  std::optional<double> oracle_radius;
  oracle->add_option("--instance", oracle_instance, "Instance manifest")->required();
  oracle->add_option("--out", oracle_out, "Output PGM")->required();
  oracle->add_option("--radius", oracle_radius, "Dilation radius (default 5% of map side)");
  oracle->add_option("--seed", unused_seed, "Accepted for uniformity; unused");

  // render
  auto* rend = app.add_subcommand("render", "Plan once and render map, region, tree and path");
  PlanFlags render_flags;
  std::string render_out;
  int render_scale = 4;
  add_plan_flags(rend, render_flags);
  rend->add_option("--out", render_out, "Output PPM")->required();
  rend->add_option("--scale", render_scale, "Pixels per map cell")->check(CLI::Range(1, 64));

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      GenParams params = GenParams::for_size(gen_size);
      params.seed = gen_seed;
      const fs::path manifest = build_dataset(gen_n, params, gen_out, parse_ratio(gen_ratio));
      std::cout << manifest.string() << "\n";
    } else if (plan_cmd->parsed()) {
      PreparedRun run = prepare_run(plan_flags);
      const PlanResult result = plan(run.loaded.instance, run.config, *run.sampler);
      std::cout << to_json(result).dump() << "\n";
    } else if (bench->parsed()) {
      bc.dataset = bench_dataset;
      bc.methods = parse_methods(bench_methods);
      if (!bench_split.empty()) bc.split = parse_split(bench_split);
      if (!bench_region_dir.empty()) bc.region_dir = bench_region_dir;
      const auto rows = run_benchmark(bc);
      if (bench_out.empty()) {
        write_runs_csv(std::cout, rows);
      } else {
        write_runs_csv(fs::path(bench_out), rows);
      }
    } else if (summ->parsed()) {
      const auto rows = read_runs_csv(fs::path(summ_csv));
      const auto summary = summarize(rows);
      if (summ_out.empty()) {
        write_summary_csv(std::cout, summary);
      } else {
        std::ofstream out(summ_out);
        if (!out) throw Error(ErrorCode::kIo, "cannot write " + summ_out);
        write_summary_csv(out, summary);
      }
    } else if (eval->parsed()) {
      std::cout << to_json(eval_region(eval_pred, eval_gt)).dump() << "\n";
    } else if (oracle->parsed()) {
      const LoadedInstance loaded = load_instance(oracle_instance);
      const PlanInstance& inst = loaded.instance;
      save_region(oracle_region(*inst.map, inst.start, inst.goal,
                                oracle_radius.value_or(default_dilation_radius(*inst.map))),
                  oracle_out);
    } else if (rend->parsed()) {
      PreparedRun run = prepare_run(render_flags);
      Planner planner(run.loaded.instance, run.config, *run.sampler);
      const PlanResult result = planner.run();
      render_to_file(run.loaded.instance, result, planner.tree(),
                     run.region ? &*run.region : nullptr, render_out,
                     RenderOptions{render_scale});
      std::cout << to_json(result).dump() << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "regionplan: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
