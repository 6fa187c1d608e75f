#include "cospomdp/render.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "cospomdp/scenario_io.hpp"

namespace cospomdp {

namespace {

constexpr double kCell = 20.0;
constexpr double kGap = 12.0;
constexpr double kHeader = 22.0;

struct Panel {
  std::string& out;
  const GridMap& map;
  double x0;

  double cx(int col) const { return x0 + (col + 0.5) * kCell; }
  double cy(int row) const { return kHeader + (map.height() - row - 0.5) * kCell; }

  void rect(Cell c, const char* cls, const std::string& style) const {
    out += fmt::format(R"(<rect class="{}" x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" {}/>)",
                       cls, x0 + c.col * kCell, kHeader + (map.height() - 1 - c.row) * kCell, kCell,
                       kCell, style);
    out += '\n';
  }

  void grid(const std::string& title) const {
    out += fmt::format(R"(<text x="{:.2f}" y="15" font-size="12">{}</text>)", x0, title);
    out += '\n';
    out += fmt::format(
        R"(<rect x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="#ffffff" stroke="#444444"/>)",
        x0, kHeader, map.width() * kCell, map.height() * kCell);
    out += '\n';
  }

  void belief(const std::vector<double>& dist) const {
    const double peak = dist.empty() ? 0.0 : *std::max_element(dist.begin(), dist.end());
    if (!(peak > 0.0)) return;
    for (std::size_t i = 0; i < dist.size(); ++i) {
      if (dist[i] <= 0.0) continue;
      rect(map.cell(static_cast<int>(i)), "belief",
           fmt::format(R"(fill="#d62728" fill-opacity="{:.3f}")", dist[i] / peak));
    }
  }

  void cells(const ScenarioSpec& s) const {
    for (const Cell& c : map.obstacles()) rect(c, "obstacle", R"(fill="#333333")");
    for (int c = 0; c <= map.width(); ++c) {
      out += fmt::format(R"(<line x1="{0:.2f}" y1="{1:.2f}" x2="{0:.2f}" y2="{2:.2f}" stroke="#dddddd" stroke-width="0.5"/>)",
                         x0 + c * kCell, kHeader, kHeader + map.height() * kCell);
      out += '\n';
    }
    for (int r = 0; r <= map.height(); ++r) {
      out += fmt::format(R"(<line x1="{0:.2f}" y1="{1:.2f}" x2="{2:.2f}" y2="{1:.2f}" stroke="#dddddd" stroke-width="0.5"/>)",
                         x0, kHeader + r * kCell, x0 + map.width() * kCell);
      out += '\n';
    }
    for (const ObjectSpec& o : s.objects) {
      out += fmt::format(
          R"(<rect class="object" x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="#1f77b4"><title>{}</title></rect>)",
          cx(o.cell.col) - 0.3 * kCell, cy(o.cell.row) - 0.3 * kCell, 0.6 * kCell, 0.6 * kCell, o.cls);
      out += '\n';
    }
    out += fmt::format(
        R"(<circle class="target" cx="{:.2f}" cy="{:.2f}" r="{:.2f}" fill="#2ca02c" stroke="#000000"><title>{}</title></circle>)",
        cx(s.target.cell.col), cy(s.target.cell.row), 0.35 * kCell, s.target.cls);
    out += '\n';
  }

  void viewpoint(const Pose& p, int step, const char* cls = "viewpoint") const {
    const Cell d = heading_step(p.heading);
    const double len = 0.45 * kCell;
    const double norm = (d.col != 0 && d.row != 0) ? 0.7071067811865476 : 1.0;
    const double x = cx(p.cell.col);
    const double y = cy(p.cell.row);
    out += fmt::format(
        R"(<g class="{}" data-step="{}"><circle cx="{:.2f}" cy="{:.2f}" r="{:.2f}" fill="#ff7f0e" fill-opacity="0.8"/><line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="#000000" stroke-width="1.5"/></g>)",
        cls, step, x, y, 0.22 * kCell, x, y, x + d.col * norm * len, y - d.row * norm * len);
    out += '\n';
  }

  void path(const std::vector<Pose>& poses) const {
    if (poses.size() < 2) return;
    std::string pts;
    for (const Pose& p : poses) pts += fmt::format("{:.2f},{:.2f} ", cx(p.cell.col), cy(p.cell.row));
    pts.pop_back();
    out += fmt::format(R"(<polyline class="path" points="{}" fill="none" stroke="#ff7f0e" stroke-width="1"/>)", pts);
    out += '\n';
  }
};

}  // namespace

RenderInput render_input_from_trace(const nlohmann::json& trace, int max_snapshots) {
  RenderInput in;
  in.spec = scenario_from_json(trace.at("scenario"));
  for (const auto& s : trace.at("steps")) {
    const auto& cell = s.at("pose").at("cell");
    in.poses.push_back({{cell[0].get<int>(), cell[1].get<int>()}, s.at("pose").at("heading").get<int>()});
  }
  const auto& beliefs = trace.value("beliefs", nlohmann::json::array());
  const int n = static_cast<int>(beliefs.size());
  const int keep = std::min(n, std::max(0, max_snapshots));
  for (int k = 0; k < keep; ++k) {
    const int t = keep == 1 ? n - 1 : static_cast<int>((static_cast<long>(k) * (n - 1)) / (keep - 1));
    in.snapshots.push_back({t, beliefs[t].get<std::vector<double>>()});
  }
  return in;
}

std::string render_svg(const RenderInput& input) {
  const GridMap& m = input.spec.map;
  const double panel_w = m.width() * kCell;
  const std::size_t panels = 1 + input.snapshots.size();
  const double width = panels * panel_w + (panels - 1) * kGap;
  const double height = kHeader + m.height() * kCell;
  std::string out;
  out += fmt::format(
      R"(<svg xmlns="http://www.w3.org/2000/svg" width="{:.0f}" height="{:.0f}" viewBox="0 0 {:.2f} {:.2f}" font-family="sans-serif">)",
      width, height, width, height);
  out += '\n';

  Panel main{out, m, 0.0};
  main.grid(fmt::format("{}: {} steps", input.spec.name, input.poses.size()));
  if (!input.snapshots.empty()) main.belief(input.snapshots.back().dist);
  main.cells(input.spec);
  main.path(input.poses);
  for (std::size_t i = 0; i < input.poses.size(); ++i) main.viewpoint(input.poses[i], static_cast<int>(i));

  for (std::size_t k = 0; k < input.snapshots.size(); ++k) {
    const BeliefSnapshot& snap = input.snapshots[k];
    Panel p{out, m, (k + 1) * (panel_w + kGap)};
    p.grid(fmt::format("belief t={}", snap.t));
    p.belief(snap.dist);
    p.cells(input.spec);
    if (snap.t >= 0 && static_cast<std::size_t>(snap.t) < input.poses.size()) {
      p.viewpoint(input.poses[snap.t], snap.t, "snapshot-viewpoint");
    }
  }
  out += "</svg>\n";
  return out;
}

void write_svg(const std::filesystem::path& path, const std::string& svg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << svg;
  if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace cospomdp
