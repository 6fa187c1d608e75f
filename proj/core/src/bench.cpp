#include "cospomdp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "cospomdp/baselines.hpp"
#include "cospomdp/hierarchical_agent.hpp"
#include "cospomdp/scenario_io.hpp"

namespace cospomdp {

using nlohmann::json;

const std::vector<std::string>& agent_names() {
  static const std::vector<std::string> names{"cospomdp", "target-pomdp", "greedy-nbv", "random"};
  return names;
}

std::unique_ptr<Agent> make_agent(std::string_view name, const ScenarioResources& res, Rng& rng) {
  const ScenarioSpec& s = res.spec();
  if (name == "cospomdp") {
    return std::make_unique<HierarchicalAgent>(res.model(), s.init_pose, s.hierarchy);
  }
  if (name == "target-pomdp") return make_target_pomdp_agent(res.model(), s.init_pose, s.hierarchy);
  if (name == "greedy-nbv") {
    return std::make_unique<GreedyNbvAgent>(res.model(), s.init_pose, s.greedy, s.hierarchy, rng);
  }
  if (name == "random") return std::make_unique<RandomAgent>(s.map);
  throw std::invalid_argument(fmt::format("unknown agent '{}'", name));
}

TrialResult run_trial(const ScenarioResources& res, std::string_view agent_name,
                      std::uint64_t seed, TrialTrace* trace) {
  const std::string name(agent_name);
  return run_trial(
      res, agent_name,
      [&name](const ScenarioResources& r, Rng& rng) { return make_agent(name, r, rng); }, seed,
      trace);
}

TrialResult run_trial(const ScenarioResources& res, std::string_view agent_name,
                      const AgentFactory& factory, std::uint64_t seed, TrialTrace* trace) {
  const ScenarioSpec& s = res.spec();
  const GridMap& m = s.map;
  TrialResult out;
  out.scenario = s.name;
  out.agent = std::string(agent_name);
  out.seed = seed;
  out.shortest_len =
      shortest_path_length(m, s.init_pose, s.target.cell, s.success_distance).value_or(0.0);

  Rng env(derive_seed(seed, 1));
  Rng rng(derive_seed(seed, 2));
  if (trace) *trace = {};

  try {
    const std::unique_ptr<Agent> agent = factory(res, rng);
    Pose pose = s.init_pose;
    std::optional<JointObservation> z;
    double scale = 1.0;
    for (int t = 0; t < s.max_steps; ++t) {
      const Action a = agent->act(z, rng);
      if (trace) trace->beliefs.push_back(agent->target_belief());
      double r = kStepCost;
      if (a == Action::Done) {
        out.success = success_check(pose, s.target.cell, m, s.success_distance);
        r = out.success ? kRewardMax : kRewardMin;
      }
      out.discounted_reward += scale * r;
      scale *= kMetricDiscount;
      ++out.steps;
      StepRecord rec{t, pose, a, agent->subgoal(), agent->belief_hash(), r, {}};
      if (a == Action::Done) {
        if (trace) trace->steps.push_back(std::move(rec));
        break;
      }
      const Pose next = apply_move(pose, *as_move(a), m);
      if (next.cell != pose.cell) out.path_len += m.cell_size();
      pose = next;

      JointObservation obs{pose, {}};
      const int zt = res.target_detector().sample(m.index(s.target.cell), pose, env);
      obs.detections.push_back({0, zt < 0 ? std::nullopt : std::optional<Cell>(m.cell(zt))});
      for (std::size_t i = 0; i < s.objects.size(); ++i) {
        const int zi = res.object_detector(i).sample(m.index(s.objects[i].cell), pose, env);
        obs.detections.push_back({static_cast<std::uint16_t>(i + 1),
                                  zi < 0 ? std::nullopt : std::optional<Cell>(m.cell(zi))});
      }
      rec.detections = obs.detections;
      if (trace) trace->steps.push_back(std::move(rec));
      z = std::move(obs);
    }
    if (const auto* h = dynamic_cast<const HierarchicalAgent*>(agent.get())) {
      out.belief_resets = h->belief().resets;
    }
  } catch (const std::exception& e) {
    out.errored = true;
    out.error = e.what();
    spdlog::error("trial {} / {} / seed {} failed: {}", s.name, agent_name, seed, e.what());
  }
  return out;
}

double spl(const TrialResult& r) {
  if (!r.success) return 0.0;
  const double denom = std::max(r.path_len, r.shortest_len);
  return denom > 0.0 ? r.shortest_len / denom : 1.0;
}

namespace {

std::pair<double, double> mean_ci(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

}  // namespace

Metrics compute_metrics(std::span<const TrialResult> results) {
  if (results.empty()) throw std::invalid_argument("cannot compute metrics of an empty batch");
  std::vector<double> spls;
  std::vector<double> succ;
  std::vector<double> drs;
  for (const TrialResult& r : results) {
    if (r.errored) throw std::invalid_argument("errored trials must be excluded from metrics");
    spls.push_back(spl(r));
    succ.push_back(r.success ? 1.0 : 0.0);
    drs.push_back(r.discounted_reward);
  }
  Metrics m;
  m.n = results.size();
  std::tie(m.spl_mean, m.spl_ci95) = mean_ci(spls);
  std::tie(m.sr, m.sr_ci95) = mean_ci(succ);
  std::tie(m.dr_mean, m.dr_ci95) = mean_ci(drs);
  return m;
}

std::vector<TrialResult> run_batch(const std::vector<TrialJob>& jobs, int parallel) {
  std::vector<TrialResult> out(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      out[i] = run_trial(*jobs[i].scenario, jobs[i].agent, jobs[i].seed);
    }
  };
  const auto n = static_cast<std::size_t>(std::max(1, parallel));
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < std::min(n, jobs.size()); ++k) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  return out;
}

int default_parallelism() {
  if (const char* env = std::getenv("COSPOMDP_PARALLEL")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

json to_json(const TrialResult& r) {
  json j{{"schema_version", kResultsSchemaVersion},
         {"scenario", r.scenario},
         {"agent", r.agent},
         {"seed", r.seed},
         {"success", r.success},
         {"errored", r.errored},
         {"path_len", r.path_len},
         {"shortest_len", r.shortest_len},
         {"discounted_reward", r.discounted_reward},
         {"steps", r.steps},
         {"belief_resets", r.belief_resets},
         {"spl", spl(r)}};
  if (r.errored) j["error"] = r.error;
  return j;
}

TrialResult trial_result_from_json(const json& j) {
  TrialResult r;
  r.scenario = j.at("scenario").get<std::string>();
  r.agent = j.at("agent").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.success = j.at("success").get<bool>();
  r.errored = j.value("errored", false);
  r.error = j.value("error", std::string());
  r.path_len = j.at("path_len").get<double>();
  r.shortest_len = j.at("shortest_len").get<double>();
  r.discounted_reward = j.at("discounted_reward").get<double>();
  r.steps = j.at("steps").get<int>();
  r.belief_resets = j.value("belief_resets", 0u);
  return r;
}

void write_results_jsonl(const std::filesystem::path& path, std::span<const TrialResult> results) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  for (const TrialResult& r : results) out << to_json(r).dump() << '\n';
}

void write_summary_csv(const std::filesystem::path& path, std::span<const TrialResult> results) {
  std::map<std::pair<std::string, std::string>, std::vector<TrialResult>> groups;
  std::map<std::string, int> errored;
  for (const TrialResult& r : results) {
    if (r.errored) {
      ++errored[r.agent];
      continue;
    }
    groups[{r.scenario, r.agent}].push_back(r);
    groups[{"ALL", r.agent}].push_back(r);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << "scenario,agent,n,spl_mean,spl_ci95,sr,sr_ci95,dr_mean,dr_ci95\n";
  for (const auto& [key, rs] : groups) {
    const Metrics m = compute_metrics(rs);
    out << fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", key.first,
                       key.second, m.n, m.spl_mean, m.spl_ci95, m.sr, m.sr_ci95, m.dr_mean,
                       m.dr_ci95);
  }
  for (const auto& [agent, n] : errored) {
    spdlog::warn("{} errored trials for agent {} excluded from the summary", n, agent);
  }
}

json trace_to_json(const ScenarioSpec& spec, const TrialResult& result, const TrialTrace& trace) {
  json steps = json::array();
  for (const StepRecord& s : trace.steps) {
    json dets = json::array();
    for (const Detection& d : s.detections) {
      dets.push_back(d.value ? json::array({d.value->col, d.value->row}) : json(nullptr));
    }
    steps.push_back({{"t", s.t},
                     {"pose", {{"cell", {s.pose.cell.col, s.pose.cell.row}}, {"heading", s.pose.heading}}},
                     {"action", std::string(to_string(s.action))},
                     {"subgoal", s.subgoal},
                     {"belief_hash", fmt::format("{:016x}", s.belief_hash)},
                     {"reward", s.reward},
                     {"detections", dets}});
  }
  return {{"schema_version", kResultsSchemaVersion},
          {"scenario", scenario_to_json(spec)},
          {"result", to_json(result)},
          {"steps", steps},
          {"beliefs", trace.beliefs}};
}

}  // namespace cospomdp
