#include "cospomdp/presets.hpp"

#include <map>

#include <nlohmann/json.hpp>

#include "presets_data.hpp"

namespace cospomdp {

namespace {

const std::map<std::string, DetectorParams, std::less<>>& table() {
  static const auto presets = [] {
    std::map<std::string, DetectorParams, std::less<>> out;
    const auto doc = nlohmann::json::parse(detail::kDetectorPresetsJson);
    for (const auto& [name, v] : doc.at("presets").items()) {
      out.emplace(name, DetectorParams{v.at("tp").get<double>(), v.at("fp").get<double>(),
                                       v.at("r").get<double>(), v.value("sigma", 0.5)});
    }
    return out;
  }();
  return presets;
}

}  // namespace

std::optional<DetectorParams> detector_preset(std::string_view name) {
  const auto& t = table();
  if (auto it = t.find(name); it != t.end()) return it->second;
  std::optional<DetectorParams> found;
  for (const auto& [key, params] : t) {
    const auto slash = key.find('/');
    if (slash != std::string::npos && std::string_view(key).substr(slash + 1) == name) {
      if (found) return std::nullopt;
      found = params;
    }
  }
  return found;
}

std::vector<std::string> detector_preset_names() {
  std::vector<std::string> out;
  for (const auto& [key, params] : table()) out.push_back(key);
  return out;
}

}  // namespace cospomdp
