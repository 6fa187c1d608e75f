// cos_search: run, benchmark and render correlational object search trials.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "cospomdp/bench.hpp"
#include "cospomdp/presets.hpp"
#include "cospomdp/render.hpp"
#include "cospomdp/scenario_io.hpp"
#include "cospomdp/suite.hpp"

namespace fs = std::filesystem;
using namespace cospomdp;

namespace {

struct Overrides {
  std::string ablation;
  int num_sims = 0;
  int max_steps = 0;
};

ScenarioSpec apply(ScenarioSpec s, const Overrides& o) {
  if (o.ablation == "accurate") s.ablation = Ablation::Accurate;
  if (o.ablation == "wrong") s.ablation = Ablation::Wrong;
  if (o.num_sims > 0) {
    s.hierarchy.high_level.num_sims = o.num_sims;
    s.hierarchy.low_level.num_sims = o.num_sims;
  }
  if (o.max_steps > 0) s.max_steps = o.max_steps;
  s.validate();
  return s;
}

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--ablation", o.ablation, "Override the scenario's correlation ablation")
      ->check(CLI::IsMember({"accurate", "wrong"}));
  cmd->add_option("--num-sims", o.num_sims, "Override simulations per planning call (both levels)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-steps", o.max_steps, "Override the step budget")->check(CLI::PositiveNumber);
}

std::vector<fs::path> scenario_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

int cmd_run(const fs::path& scenario, const std::string& agent, std::uint64_t seed,
            const std::string& trace_out, const Overrides& o) {
  const ScenarioResources res(apply(load_scenario(scenario), o));
  TrialTrace trace;
  const TrialResult r = run_trial(res, agent, seed, trace_out.empty() ? nullptr : &trace);
  if (!trace_out.empty()) {
    std::ofstream out(trace_out);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", trace_out));
    out << trace_to_json(res.spec(), r, trace).dump(1) << '\n';
  }
  std::cout << to_json(r).dump() << '\n';
  return r.errored ? 1 : 0;
}

int cmd_bench(const fs::path& dir, int trials, int parallel, const fs::path& out_dir,
              std::vector<std::string> agents, std::uint64_t seed, const Overrides& o) {
  std::vector<TrialJob> jobs;
  for (const fs::path& f : scenario_files(dir)) {
    auto res = std::make_shared<const ScenarioResources>(apply(load_scenario(f), o));
    for (int k = 0; k < trials; ++k) {
      const std::uint64_t trial_seed = derive_seed(seed, static_cast<std::uint64_t>(k));
      for (const std::string& a : agents) jobs.push_back({res, a, trial_seed});
    }
  }
  if (jobs.empty()) throw std::runtime_error(fmt::format("no scenario files in '{}'", dir.string()));
  spdlog::info("running {} trials on {} threads", jobs.size(), parallel);
  const std::vector<TrialResult> results = run_batch(jobs, parallel);

  fs::create_directories(out_dir);
  write_results_jsonl(out_dir / "results.jsonl", results);
  write_summary_csv(out_dir / "summary.csv", results);

  std::size_t errored = 0;
  for (const std::string& a : agents) {
    std::vector<TrialResult> ok;
    for (const TrialResult& r : results) {
      if (r.agent != a) continue;
      if (r.errored) {
        ++errored;
      } else {
        ok.push_back(r);
      }
    }
    if (ok.empty()) continue;
    const Metrics m = compute_metrics(ok);
    std::cout << fmt::format("{:<14} n={:<5} SPL {:6.2f} ({:5.2f})  DR {:8.2f} ({:5.2f})  SR {:6.2f}\n", a,
                             m.n, 100.0 * m.spl_mean, 100.0 * m.spl_ci95, m.dr_mean, m.dr_ci95,
                             100.0 * m.sr);
  }
  return errored == 0 ? 0 : 1;
}

int cmd_render(const fs::path& trace_path, const fs::path& out, int snapshots) {
  std::ifstream in(trace_path);
  if (!in) throw std::runtime_error(fmt::format("cannot open trace '{}'", trace_path.string()));
  write_svg(out, render_svg(render_input_from_trace(nlohmann::json::parse(in), snapshots)));
  return 0;
}

int cmd_gen_suite(const fs::path& out_dir, std::uint64_t seed, int count) {
  fs::create_directories(out_dir);
  for (const ScenarioSpec& s : generate_trend_suite(seed, count)) {
    save_scenario(out_dir / (s.name + ".json"), s);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlational object search: trials, benchmarks and rendering"};
  app.require_subcommand(1);

  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "spdlog level")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  Overrides run_o;
  fs::path run_scenario;
  std::string run_agent = "cospomdp";
  std::uint64_t run_seed = 0;
  std::string run_trace;
  auto* run = app.add_subcommand("run", "Run one trial and print its result as JSON");
  run->add_option("--scenario", run_scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--agent", run_agent, "Agent")->check(CLI::IsMember(agent_names()));
  run->add_option("--seed", run_seed, "Trial seed");
  run->add_option("--trace", run_trace, "Write the step trace and belief snapshots here");
  add_overrides(run, run_o);

  Overrides bench_o;
  fs::path bench_dir;
  fs::path bench_out = "bench_out";
  int trials = 10;
  int parallel = default_parallelism();
  std::vector<std::string> agents = agent_names();
  std::uint64_t bench_seed = 0;
  auto* bench = app.add_subcommand("bench", "Run every agent on every scenario in a directory");
  bench->add_option("--scenarios", bench_dir, "Directory of scenario JSON files")
      ->required()
      ->check(CLI::ExistingDirectory);
  bench->add_option("--trials", trials, "Trials per scenario and agent")->check(CLI::PositiveNumber);
  bench->add_option("--parallel", parallel, "Worker threads (default: COSPOMDP_PARALLEL or cores)")
      ->check(CLI::PositiveNumber);
  bench->add_option("--out", bench_out, "Output directory for results.jsonl and summary.csv");
  bench->add_option("--agents", agents, "Agents to run")->check(CLI::IsMember(agent_names()));
  bench->add_option("--seed", bench_seed, "Batch seed");
  add_overrides(bench, bench_o);

  fs::path render_trace;
  fs::path render_out;
  int snapshots = 4;
  auto* render = app.add_subcommand("render", "Render a trial trace to SVG");
  render->add_option("--trace", render_trace, "Trace JSON from `run --trace`")
      ->required()
      ->check(CLI::ExistingFile);
  render->add_option("--out", render_out, "Output SVG")->required();
  render->add_option("--snapshots", snapshots, "Belief snapshot panels")->check(CLI::NonNegativeNumber);

  fs::path suite_out;
  std::uint64_t suite_seed = 2022;
  int suite_count = 10;
  auto* gen = app.add_subcommand("gen-suite", "Write the generated trend scenarios");
  gen->add_option("--out", suite_out, "Output directory")->required();
  gen->add_option("--seed", suite_seed, "Generator seed");
  gen->add_option("--count", suite_count, "Number of scenarios")->check(CLI::PositiveNumber);

  auto* presets = app.add_subcommand("presets", "List detector presets");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*run) return cmd_run(run_scenario, run_agent, run_seed, run_trace, run_o);
    if (*bench) return cmd_bench(bench_dir, trials, parallel, bench_out, agents, bench_seed, bench_o);
    if (*render) return cmd_render(render_trace, render_out, snapshots);
    if (*gen) return cmd_gen_suite(suite_out, suite_seed, suite_count);
    if (*presets) {
      for (const std::string& name : detector_preset_names()) {
        const DetectorParams p = *detector_preset(name);
        std::cout << fmt::format("{:<28} tp {:.3f}  fp {:.3f}  r {:.2f}\n", name, p.tp, p.fp, p.r);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 0;
}
