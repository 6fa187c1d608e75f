// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. COSPOMDP_ACCEPT_TRIALS raises the trials
// per trend scenario (default 10, i.e. 100 per agent).

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cospomdp/bench.hpp"
#include "cospomdp/fpomdp.hpp"
#include "cospomdp/hierarchical_agent.hpp"
#include "cospomdp/hierarchy.hpp"
#include "cospomdp/low_level.hpp"
#include "cospomdp/pouct.hpp"
#include "cospomdp/scenario_io.hpp"
#include "cospomdp/suite.hpp"
#include "test_support.hpp"

using namespace cospomdp;
using namespace cospomdp::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  std::vector<std::string> notes;
};

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::vector<ObjectModelSpec> random_objects(Rng& rng, int n) {
  std::vector<ObjectModelSpec> objects(static_cast<std::size_t>(n));
  for (auto& o : objects) {
    o = {random_detector(rng),
         {uniform01(rng) < 0.5 ? Relation::Close : Relation::Far, 0.26 + 0.5 * uniform01(rng)}};
  }
  return objects;
}

bool well_formed(const GridMap& m, const std::vector<ObjectModelSpec>& objects) {
  for (const auto& o : objects) {
    if (!CorrelationModel(m, o.correlation).well_formed(m)) return false;
  }
  return true;
}

Outcome belief_correctness() {
  Rng rng(1001);
  int instances = 0;
  long observations = 0;
  double worst = 0.0;
  while (instances < 200) {
    const int side = instances % 2 == 0 ? 3 : 4;
    const GridMap m = random_map(rng, side, side, 0.1);
    const auto objects = random_objects(rng, uniform_int(rng, 1, 2));
    if (!well_formed(m, objects)) continue;
    const CosModel model = make_model(m, random_detector(rng), objects);
    const CosBelief b = random_belief(m, random_pose(m, rng), rng);
    const FBelief fb = FBelief::from_cos(b, model);
    const Action a = kAllActions[uniform_index(rng, 3)];
    const Pose next = apply_move(b.robot, *as_move(a), m);
    for (const JointObservation& z : enumerate_observations(m, next, model.num_classes())) {
      const CosBelief post = belief_update(b, a, z, model);
      worst = std::max(worst, max_abs_diff(post.target_dist, marginal_target(fpomdp_update(fb, a, z, model), m)));
      ++observations;
    }
    ++instances;
  }
  return {worst <= 1e-9,
          fmt::format("{} instances, {} observations, max abs error {:.3g}", instances, observations, worst)};
}

Outcome distribution_laws() {
  Rng rng(1002);
  double worst = 0.0;
  int cases = 0;
  while (cases < 10000) {
    const GridMap m = random_map(rng, uniform_int(rng, 3, 6), uniform_int(rng, 3, 6), 0.15);
    const auto objects = random_objects(rng, uniform_int(rng, 0, 2));
    if (!well_formed(m, objects)) continue;
    const DetectorParams det = random_detector(rng);
    const Pose pose = random_pose(m, rng);
    const Cell x = random_free_cell(m, rng);
    const DetectionModel cached(std::make_shared<const VisibilityMap>(m), det);
    double direct = detection_likelihood({0, std::nullopt}, x, pose, det, m);
    double table = cached.null_probability(m.index(x), pose);
    for (const Cell& z : m.free_cells()) {
      direct += detection_likelihood({0, z}, x, pose, det, m);
      table += cached.likelihood(m.index(z), m.index(x), pose);
    }
    worst = std::max({worst, std::abs(direct - 1.0), std::abs(table - 1.0)});
    for (const auto& o : objects) {
      double corr = correlational_likelihood({1, std::nullopt}, x, pose, o.detector, o.correlation, m);
      for (const Cell& z : m.free_cells()) {
        corr += correlational_likelihood({1, z}, x, pose, o.detector, o.correlation, m);
      }
      worst = std::max(worst, std::abs(corr - 1.0));
    }
    const CosModel model = make_model(m, det, objects);
    const CosBelief b = random_belief(m, pose, rng);
    const Action a = kAllActions[uniform_index(rng, 3)];
    const Pose next = apply_move(pose, *as_move(a), m);
    const JointObservation z = model.sample_observation(next, b.sample_target(m, rng), rng);
    worst = std::max(worst, std::abs(belief_update(b, a, z, model).total() - 1.0));
    ++cases;
  }

  Rng fixed(1003);
  const int n = 100000;
  int rejected = 0;
  double worst_ratio = 0.0;
  for (int k = 0; k < 20; ++k) {
    const GridMap m = random_map(fixed, 6, 6, 0.1);
    const DetectorParams det = random_detector(fixed);
    const Pose pose = random_pose(m, fixed);
    Cell x = random_free_cell(m, fixed);
    // Half the cases put the object in view so the in-view branches are exercised.
    const auto vis = visible_cells(pose, m);
    if (k % 2 == 0 && !vis.empty()) x = vis[uniform_index(fixed, vis.size())];
    std::vector<double> probs{detection_likelihood({0, std::nullopt}, x, pose, det, m)};
    for (const Cell& z : m.free_cells()) probs.push_back(detection_likelihood({0, z}, x, pose, det, m));
    std::vector<long> counts(probs.size(), 0);
    std::vector<std::size_t> slot(static_cast<std::size_t>(m.num_cells()), 0);
    for (std::size_t i = 0; i < m.free_cells().size(); ++i) slot[m.index(m.free_cells()[i])] = i + 1;
    for (int s = 0; s < n; ++s) {
      const Detection d = sample_detection(0, x, pose, det, m, fixed);
      if (!d.value) {
        ++counts[0];
        continue;
      }
      ++counts[slot[m.index(*d.value)]];
    }
    const auto [stat, dof] = chi_square(counts, probs, n);
    const double crit = chi_square_critical_99(dof);
    worst_ratio = std::max(worst_ratio, stat / crit);
    rejected += stat >= crit;
  }
  return {worst <= 1e-9 && rejected == 0,
          fmt::format("{} cases, max |sum - 1| {:.3g}; chi-square rejections at p=0.01: {}/20 "
                      "(largest stat/critical {:.2f})",
                      cases, worst, rejected, worst_ratio)};
}

Outcome planner_sanity() {
  const ScenarioResources res(corridor_scenario());
  const CosModel model = res.model();
  const LowLevelModel low(model);
  CosBelief b = CosBelief::uniform(model.map(), res.spec().init_pose);
  std::fill(b.target_dist.begin(), b.target_dist.end(), 0.0);
  b.target_dist[model.map().index(res.spec().target.cell)] = 1.0;
  const int length = model.map().width();
  const Action best = corridor_optimum(length, res.spec().target.cell.col,
                                       res.spec().success_distance / model.map().cell_size(), 0.95);
  std::vector<int> hits;
  for (int sims : {100, 1000, 10000}) {
    PlannerParams p = res.spec().hierarchy.low_level;
    p.num_sims = sims;
    int h = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(derive_seed(1004, seed));
      h += plan(b, low, p, rng).action == best;
    }
    hits.push_back(h);
  }
  const bool monotone = hits[0] <= hits[1] && hits[1] <= hits[2];
  return {hits[1] >= 95 && monotone,
          fmt::format("optimum {}; matches out of 100 at 1e2/1e3/1e4 sims: {}/{}/{}", to_string(best),
                      hits[0], hits[1], hits[2])};
}

Outcome navigation_optimality() {
  Rng rng(1005);
  int mismatches = 0;
  int reachable = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const GridMap m = random_map(rng, 10, 10, 0.25);
    const Pose from = random_pose(m, rng);
    const Cell goal = random_free_cell(m, rng);
    const int oracle = ucs_cost(m, from, goal);
    Pose p = from;
    int executed = 0;
    bool ok = true;
    for (;;) {
      const NavResult r = astar(m, p, goal);
      if (r.status != NavStatus::Step) {
        ok = r.status == (oracle < 0 ? NavStatus::Unreachable : NavStatus::Arrived);
        break;
      }
      p = apply_move(p, r.action, m);
      if (++executed > 400) {
        ok = false;
        break;
      }
    }
    if (oracle >= 0) {
      ++reachable;
      ok = ok && executed == oracle;
    }
    mismatches += !ok;
  }
  return {mismatches == 0, fmt::format("500 maps ({} reachable goals), {} cost mismatches", reachable, mismatches)};
}

/// Returns a description of the first violated invariant, or empty.
std::string graph_violation(const TopoGraph& g, const HierParams& p, double cell_size, int* clamped) {
  const int n = static_cast<int>(g.nodes.size());
  if (n < 1 || n > p.max_nodes) return fmt::format("{} nodes", n);
  if (!g.connected()) return "disconnected";
  if (n > 1 && g.min_separation() < p.d_sep / cell_size - 1e-9) {
    return fmt::format("separation {:.2f} cells", g.min_separation());
  }
  for (int u = 0; u < n; ++u) {
    if (g.degree(u) > p.deg_max) return fmt::format("degree {} above {}", g.degree(u), p.deg_max);
    if (g.degree(u) < std::min(p.deg_min, n - 1)) return fmt::format("degree {} below the clamp", g.degree(u));
    *clamped += g.degree(u) < p.deg_min;
  }
  return {};
}

Outcome topological_graph(const std::vector<ScenarioSpec>& suite) {
  int resamples = 0;
  int violations = 0;
  int clamped = 0;
  int trials = 0;
  std::string first;
  while (resamples < 1000) {
    ScenarioSpec s = suite[static_cast<std::size_t>(trials) % suite.size()];
    s.hierarchy.high_level.num_sims = 100;
    s.hierarchy.low_level.num_sims = 100;
    const ScenarioResources res(s);
    HierarchicalAgent agent(res.model(), s.init_pose, s.hierarchy);
    Rng rng(derive_seed(1006, static_cast<std::uint64_t>(trials)));
    Rng env(derive_seed(1007, static_cast<std::uint64_t>(trials)));
    Pose pose = s.init_pose;
    std::optional<JointObservation> z;
    for (int t = 0; t < s.max_steps && resamples < 1000; ++t) {
      const Action a = agent.act(z, rng);
      if (agent.resampled()) {
        ++resamples;
        const std::string v = graph_violation(*agent.graph(), s.hierarchy, s.map.cell_size(), &clamped);
        if (!v.empty()) {
          ++violations;
          if (first.empty()) first = fmt::format(" (first: {} in {})", v, s.name);
        }
      }
      if (a == Action::Done) break;
      pose = apply_move(pose, *as_move(a), s.map);
      z = res.model().sample_observation(pose, s.target.cell, env);
    }
    ++trials;
  }
  return {violations == 0,
          fmt::format("{} resamples over {} agent runs, {} violations{}; {} node degrees clamped below {}",
                      resamples, trials, violations, first, clamped, suite.front().hierarchy.deg_min)};
}

// ---------------------------------------------------------------------------

struct TrendRuns {
  std::map<std::string, std::vector<TrialResult>> by_agent;  ///< keyed by agent label
  std::size_t errored = 0;
  double seconds = 0.0;
};

int env_int(const char* name, int fallback) {
  if (const char* v = std::getenv(name)) {
    const int n = std::atoi(v);
    if (n > 0) return n;
  }
  return fallback;
}

TrendRuns run_trend(const std::vector<ScenarioSpec>& suite, int trials) {
  const std::vector<std::string> agents{"cospomdp", "target-pomdp", "greedy-nbv", "random"};
  std::vector<TrialJob> jobs;
  std::vector<std::string> labels;
  for (const ScenarioSpec& spec : suite) {
    ScenarioSpec accurate = spec;
    accurate.ablation = Ablation::Accurate;
    ScenarioSpec wrong = spec;
    wrong.ablation = Ablation::Wrong;
    auto acc = std::make_shared<const ScenarioResources>(accurate);
    auto wrg = std::make_shared<const ScenarioResources>(wrong);
    for (int k = 0; k < trials; ++k) {
      const std::uint64_t seed = derive_seed(0, static_cast<std::uint64_t>(k));
      for (const std::string& a : agents) {
        jobs.push_back({acc, a, seed});
        labels.push_back(a);
      }
      jobs.push_back({wrg, "cospomdp", seed});
      labels.push_back("cospomdp-wrong");
    }
  }
  const auto start = std::chrono::steady_clock::now();
  const std::vector<TrialResult> results = run_batch(jobs, default_parallelism());
  TrendRuns out;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].errored) {
      ++out.errored;
      continue;
    }
    out.by_agent[labels[i]].push_back(results[i]);
  }
  std::vector<TrialResult> all;
  for (const auto& [label, rs] : out.by_agent) {
    for (TrialResult r : rs) {
      r.agent = label;
      all.push_back(r);
    }
  }
  write_results_jsonl("acceptance_results.jsonl", all);
  write_summary_csv("acceptance_summary.csv", all);
  return out;
}

std::string describe(const std::string& label, const Metrics& m) {
  return fmt::format("{} SPL {:.1f} +/- {:.1f} (n={})", label, 100.0 * m.spl_mean, 100.0 * m.spl_ci95, m.n);
}

Outcome trend(const TrendRuns& runs) {
  const auto& a = runs.by_agent;
  if (runs.errored > 0 || !a.count("cospomdp") || !a.count("target-pomdp") || !a.count("greedy-nbv")) {
    return {false, fmt::format("{} errored trials", runs.errored)};
  }
  const Metrics cos = compute_metrics(a.at("cospomdp"));
  const Metrics tgt = compute_metrics(a.at("target-pomdp"));
  const Metrics nbv = compute_metrics(a.at("greedy-nbv"));
  auto separated = [&](const Metrics& other) {
    return cos.spl_mean - cos.spl_ci95 > other.spl_mean + other.spl_ci95;
  };
  const bool enough = cos.n >= 100 && tgt.n >= 100 && nbv.n >= 100;
  return {enough && separated(tgt) && separated(nbv),
          fmt::format("{}; {}; {} ({:.0f} s for all trend trials)", describe("cospomdp", cos),
                      describe("target-pomdp", tgt), describe("greedy-nbv", nbv), runs.seconds)};
}

Outcome ablation(const TrendRuns& runs) {
  const auto& a = runs.by_agent;
  if (!a.count("cospomdp") || !a.count("cospomdp-wrong")) return {false, "missing runs"};
  const Metrics acc = compute_metrics(a.at("cospomdp"));
  const Metrics wrg = compute_metrics(a.at("cospomdp-wrong"));
  Outcome out{acc.spl_mean >= wrg.spl_mean,
              fmt::format("{}; {}", describe("accurate", acc), describe("wrong", wrg)), {}};
  std::map<std::string, std::pair<std::vector<TrialResult>, std::vector<TrialResult>>> per;
  for (const auto& r : a.at("cospomdp")) per[r.scenario].first.push_back(r);
  for (const auto& r : a.at("cospomdp-wrong")) per[r.scenario].second.push_back(r);
  int reversals = 0;
  for (const auto& [name, pair] : per) {
    if (pair.first.empty() || pair.second.empty()) continue;
    const double sa = compute_metrics(pair.first).spl_mean;
    const double sw = compute_metrics(pair.second).spl_mean;
    if (sw > sa) {
      ++reversals;
      out.notes.push_back(fmt::format("reversal on {}: accurate {:.1f} < wrong {:.1f}", name, 100 * sa, 100 * sw));
    }
  }
  out.detail += fmt::format("; {} per-scenario reversals", reversals);
  return out;
}

Outcome metric_units(const TrendRuns& runs) {
  TrialResult r;
  r.success = true;
  r.path_len = 2.0;
  r.shortest_len = 2.0;
  const bool equal = spl(r) == 1.0;
  r.path_len = 4.0;
  const bool twice = spl(r) == 0.5;
  r.success = false;
  const bool failed = spl(r) == 0.0;
  const auto it = runs.by_agent.find("random");
  if (it == runs.by_agent.end()) return {false, "missing random runs"};
  const Metrics m = compute_metrics(it->second);
  return {equal && twice && failed && m.sr <= 0.05,
          fmt::format("SPL cases p=l {}, failure {}, p=2l {}; random SR {:.1f}% over {} trials",
                      equal ? "ok" : "wrong", failed ? "ok" : "wrong", twice ? "ok" : "wrong",
                      100.0 * m.sr, m.n)};
}

Outcome determinism(const std::vector<ScenarioSpec>& suite) {
  const fs::path dir = fs::temp_directory_path() / "cospomdp_acceptance";
  fs::create_directories(dir);
  int compared = 0;
  int differing = 0;
  for (std::size_t i = 0; i < 2; ++i) {
    const ScenarioResources res(suite[i]);
    for (const std::string& agent : agent_names()) {
      std::string bytes[2];
      for (int run = 0; run < 2; ++run) {
        TrialTrace trace;
        const TrialResult r = run_trial(res, agent, 99, &trace);
        const fs::path file = dir / fmt::format("{}-{}-{}.json", suite[i].name, agent, run);
        {
          std::ofstream out(file, std::ios::binary);
          out << trace_to_json(res.spec(), r, trace).dump(1) << '\n';
        }
        std::ifstream in(file, std::ios::binary);
        bytes[run].assign(std::istreambuf_iterator<char>(in), {});
      }
      ++compared;
      differing += bytes[0] != bytes[1] || bytes[0].empty();
    }
  }
  return {differing == 0, fmt::format("{} (scenario, agent) trace logs run twice, {} differ", compared, differing)};
}

}  // namespace

int main() {
  std::vector<ScenarioSpec> suite;
  for (const auto& e : fs::directory_iterator(fs::path(COSPOMDP_SCENARIO_DIR) / "trend")) {
    if (e.path().extension() == ".json") suite.push_back(load_scenario(e.path()));
  }
  std::sort(suite.begin(), suite.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  if (suite.empty()) {
    fmt::print("FAIL setup: no trend scenarios found\n");
    return 1;
  }

  const int trials = env_int("COSPOMDP_ACCEPT_TRIALS", 10);
  bool all = true;
  auto report = [&](int id, const char* title, const Outcome& o) {
    all = all && o.pass;
    fmt::print("{} criterion {} ({}): {}\n", o.pass ? "PASS" : "FAIL", id, title, o.detail);
    for (const std::string& n : o.notes) fmt::print("    {}\n", n);
    std::fflush(stdout);
  };

  report(1, "belief correctness", belief_correctness());
  report(2, "distribution laws", distribution_laws());
  report(3, "planner sanity", planner_sanity());
  report(4, "navigation optimality", navigation_optimality());
  report(5, "topological graph", topological_graph(suite));
  const TrendRuns runs = run_trend(suite, trials);
  report(6, "trend reproduction", trend(runs));
  report(7, "ablation direction", ablation(runs));
  report(8, "metric units", metric_units(runs));
  report(9, "determinism", determinism(suite));
  return all ? 0 : 1;
}
