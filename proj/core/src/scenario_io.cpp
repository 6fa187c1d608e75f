#include "cospomdp/scenario_io.hpp"

#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "cospomdp/presets.hpp"

namespace cospomdp {

using nlohmann::json;

namespace {

Cell cell_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw std::invalid_argument(fmt::format("expected a [col, row] pair, got {}", j.dump()));
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

json cell_to_json(Cell c) { return json::array({c.col, c.row}); }

DetectorParams detector_from_json(const json& j) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (auto p = detector_preset(name)) return *p;
    throw std::invalid_argument(fmt::format("unknown or ambiguous detector preset '{}'", name));
  }
  DetectorParams d;
  d.tp = j.at("tp").get<double>();
  d.fp = j.at("fp").get<double>();
  d.r = j.at("r").get<double>();
  d.sigma = j.value("sigma", d.sigma);
  return d;
}

json detector_to_json(const DetectorParams& d) {
  return {{"tp", d.tp}, {"fp", d.fp}, {"r", d.r}, {"sigma", d.sigma}};
}

Relation relation_from_string(const std::string& s) {
  if (s == "close") return Relation::Close;
  if (s == "far") return Relation::Far;
  throw std::invalid_argument(fmt::format("relation must be 'close' or 'far', got '{}'", s));
}

GridMap map_from_json(const json& j) {
  const double cell_size = j.value("cell_size", 0.25);
  std::vector<Cell> obstacles;
  int width = 0;
  int height = 0;
  if (j.contains("rows")) {
    const auto rows = j.at("rows").get<std::vector<std::string>>();
    height = static_cast<int>(rows.size());
    width = height > 0 ? static_cast<int>(rows.front().size()) : 0;
    for (int r = 0; r < height; ++r) {
      if (static_cast<int>(rows[r].size()) != width) {
        throw std::invalid_argument("map rows must all have the same length");
      }
      for (int c = 0; c < width; ++c) {
        const char ch = rows[r][c];
        if (ch == '#') {
          obstacles.push_back({c, r});
        } else if (ch != '.') {
          throw std::invalid_argument(fmt::format("unexpected map character '{}'", ch));
        }
      }
    }
    if (j.contains("width") && j.at("width").get<int>() != width) {
      throw std::invalid_argument("map width disagrees with its rows");
    }
    if (j.contains("height") && j.at("height").get<int>() != height) {
      throw std::invalid_argument("map height disagrees with its rows");
    }
  } else {
    width = j.at("width").get<int>();
    height = j.at("height").get<int>();
    for (const json& c : j.value("obstacles", json::array())) obstacles.push_back(cell_from_json(c));
  }
  for (const Cell& c : obstacles) {
    if (c.col < 0 || c.row < 0 || c.col >= width || c.row >= height) {
      throw std::invalid_argument(fmt::format("obstacle ({}, {}) lies outside the map", c.col, c.row));
    }
  }
  return GridMap(width, height, obstacles, cell_size);
}

json map_to_json(const GridMap& m) {
  json rows = json::array();
  for (int r = 0; r < m.height(); ++r) {
    std::string row(static_cast<std::size_t>(m.width()), '.');
    for (int c = 0; c < m.width(); ++c) {
      if (m.is_obstacle({c, r})) row[static_cast<std::size_t>(c)] = '#';
    }
    rows.push_back(row);
  }
  return {{"width", m.width()}, {"height", m.height()}, {"cell_size", m.cell_size()}, {"rows", rows}};
}

}  // namespace

json to_json(const PlannerParams& p) {
  return {{"num_sims", p.num_sims},
          {"max_depth", p.max_depth},
          {"exploration_const", p.exploration_const},
          {"discount", p.discount}};
}

json to_json(const HierParams& p) {
  return {{"max_nodes", p.max_nodes},
          {"d_sep", p.d_sep},
          {"deg_min", p.deg_min},
          {"deg_max", p.deg_max},
          {"resample_threshold", p.resample_threshold},
          {"high_level", to_json(p.high_level)},
          {"low_level", to_json(p.low_level)}};
}

json to_json(const GreedyParams& p) {
  return {{"num_particles", p.num_particles},
          {"lambda", p.lambda},
          {"reinvigoration", p.reinvigoration}};
}

PlannerParams planner_params_from_json(const json& j, PlannerParams p) {
  p.num_sims = j.value("num_sims", p.num_sims);
  p.max_depth = j.value("max_depth", p.max_depth);
  p.exploration_const = j.value("exploration_const", p.exploration_const);
  p.discount = j.value("discount", p.discount);
  p.validate();
  return p;
}

HierParams hier_params_from_json(const json& j, HierParams p) {
  p.max_nodes = j.value("max_nodes", p.max_nodes);
  p.d_sep = j.value("d_sep", p.d_sep);
  p.deg_min = j.value("deg_min", p.deg_min);
  p.deg_max = j.value("deg_max", p.deg_max);
  p.resample_threshold = j.value("resample_threshold", p.resample_threshold);
  if (j.contains("high_level")) p.high_level = planner_params_from_json(j["high_level"], p.high_level);
  if (j.contains("low_level")) p.low_level = planner_params_from_json(j["low_level"], p.low_level);
  p.validate();
  return p;
}

GreedyParams greedy_params_from_json(const json& j, GreedyParams p) {
  p.num_particles = j.value("num_particles", p.num_particles);
  p.lambda = j.value("lambda", p.lambda);
  p.reinvigoration = j.value("reinvigoration", p.reinvigoration);
  p.validate();
  return p;
}

json scenario_to_json(const ScenarioSpec& s) {
  json objects = json::array();
  for (const ObjectSpec& o : s.objects) {
    objects.push_back({{"class", o.cls},
                       {"cell", cell_to_json(o.cell)},
                       {"detector", detector_to_json(o.detector)},
                       {"correlation",
                        {{"relation", std::string(to_string(o.correlation.relation))},
                         {"d", o.correlation.d}}}});
  }
  return {{"schema_version", kScenarioSchemaVersion},
          {"name", s.name},
          {"map", map_to_json(s.map)},
          {"target",
           {{"class", s.target.cls},
            {"cell", cell_to_json(s.target.cell)},
            {"detector", detector_to_json(s.target.detector)}}},
          {"objects", objects},
          {"ablation", std::string(to_string(s.ablation))},
          {"init_pose", {{"cell", cell_to_json(s.init_pose.cell)}, {"heading", s.init_pose.heading}}},
          {"max_steps", s.max_steps},
          {"success_distance", s.success_distance},
          {"hierarchy", to_json(s.hierarchy)},
          {"greedy", to_json(s.greedy)}};
}

ScenarioSpec scenario_from_json(const json& j) {
  try {
    const int version = j.value("schema_version", kScenarioSchemaVersion);
    if (version != kScenarioSchemaVersion) {
      throw std::invalid_argument(fmt::format("unsupported scenario schema_version {}", version));
    }
    ScenarioSpec s;
    s.name = j.value("name", std::string("unnamed"));
    s.map = map_from_json(j.at("map"));
    const json& t = j.at("target");
    s.target = {t.at("class").get<std::string>(), cell_from_json(t.at("cell")),
                detector_from_json(t.at("detector"))};
    for (const json& o : j.value("objects", json::array())) {
      const json& c = o.at("correlation");
      s.objects.push_back({o.at("class").get<std::string>(), cell_from_json(o.at("cell")),
                           detector_from_json(o.at("detector")),
                           {relation_from_string(c.at("relation").get<std::string>()),
                            c.at("d").get<double>()}});
    }
    const std::string ablation = j.value("ablation", std::string("accurate"));
    if (ablation == "accurate") {
      s.ablation = Ablation::Accurate;
    } else if (ablation == "wrong") {
      s.ablation = Ablation::Wrong;
    } else {
      throw std::invalid_argument(fmt::format("ablation must be 'accurate' or 'wrong', got '{}'", ablation));
    }
    const json& pose = j.at("init_pose");
    s.init_pose = {cell_from_json(pose.at("cell")), pose.value("heading", 0)};
    s.max_steps = j.value("max_steps", s.max_steps);
    s.success_distance = j.value("success_distance", s.success_distance);
    if (j.contains("hierarchy")) s.hierarchy = hier_params_from_json(j["hierarchy"]);
    if (j.contains("greedy")) s.greedy = greedy_params_from_json(j["greedy"]);
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw std::invalid_argument(fmt::format("malformed scenario: {}", e.what()));
  }
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open scenario '{}'", path.string()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(fmt::format("{}: {}", path.string(), e.what()));
  }
  return scenario_from_json(j);
}

void save_scenario(const std::filesystem::path& path, const ScenarioSpec& spec) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write scenario '{}'", path.string()));
  out << scenario_to_json(spec).dump(2) << '\n';
}

}  // namespace cospomdp
