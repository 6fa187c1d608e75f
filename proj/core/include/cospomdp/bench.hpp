#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cospomdp/agent.hpp"
#include "cospomdp/cos_pomdp.hpp"

namespace cospomdp {

inline constexpr int kResultsSchemaVersion = 1;
inline constexpr double kMetricDiscount = 0.95;

struct TrialResult {
  std::string scenario;
  std::string agent;
  std::uint64_t seed = 0;
  bool success = false;
  bool errored = false;
  std::string error;
  double path_len = 0.0;      ///< meters, translation only
  double shortest_len = 0.0;  ///< meters, from the true target location
  double discounted_reward = 0.0;
  int steps = 0;
  std::uint32_t belief_resets = 0;

  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

struct StepRecord {
  int t = 0;
  Pose pose;  ///< pose the action was taken from
  Action action = Action::Done;
  std::string subgoal;
  std::uint64_t belief_hash = 0;
  double reward = 0.0;
  std::vector<Detection> detections;  ///< observation after the action; empty after Done
};

struct TrialTrace {
  std::vector<StepRecord> steps;
  /// Target belief the agent acted on at each step, by cell index.
  std::vector<std::vector<double>> beliefs;
};

const std::vector<std::string>& agent_names();

/// Agents: "cospomdp", "target-pomdp", "greedy-nbv", "random".
std::unique_ptr<Agent> make_agent(std::string_view name, const ScenarioResources& res, Rng& rng);

/// Runs one episode. The environment and the agent draw from independent
/// streams derived from `seed`. Agent exceptions mark the result errored.
TrialResult run_trial(const ScenarioResources& res, std::string_view agent, std::uint64_t seed,
                      TrialTrace* trace = nullptr);

using AgentFactory = std::function<std::unique_ptr<Agent>(const ScenarioResources&, Rng&)>;

/// Same episode loop with a caller-supplied agent recorded under `agent_name`.
TrialResult run_trial(const ScenarioResources& res, std::string_view agent_name,
                      const AgentFactory& factory, std::uint64_t seed, TrialTrace* trace = nullptr);

/// S * l / max(p, l); a successful trial with p = l = 0 scores 1.
double spl(const TrialResult& r);

struct Metrics {
  std::size_t n = 0;
  double spl_mean = 0.0;
  double spl_ci95 = 0.0;
  double sr = 0.0;
  double sr_ci95 = 0.0;
  double dr_mean = 0.0;
  double dr_ci95 = 0.0;
};

/// Means with normal-approximation 95% half-widths (1.96 s / sqrt(n)).
/// Throws std::invalid_argument on an empty list or errored trials.
Metrics compute_metrics(std::span<const TrialResult> results);

struct TrialJob {
  std::shared_ptr<const ScenarioResources> scenario;
  std::string agent;
  std::uint64_t seed = 0;
};

/// Runs jobs on up to `parallel` threads; results keep the job order.
std::vector<TrialResult> run_batch(const std::vector<TrialJob>& jobs, int parallel);

/// COSPOMDP_PARALLEL if set and positive, else the hardware concurrency.
int default_parallelism();

nlohmann::json to_json(const TrialResult& r);
TrialResult trial_result_from_json(const nlohmann::json& j);

void write_results_jsonl(const std::filesystem::path& path, std::span<const TrialResult> results);
/// One row per (scenario, agent) plus an "ALL" row per agent.
void write_summary_csv(const std::filesystem::path& path, std::span<const TrialResult> results);

nlohmann::json trace_to_json(const ScenarioSpec& spec, const TrialResult& result,
                             const TrialTrace& trace);

}  // namespace cospomdp
