#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cospomdp/sensing.hpp"

namespace cospomdp {

/// Named detector parameter sets, keyed "Room/Class" (for example
/// "Kitchen/PepperShaker"). A bare class name resolves when it is unique.
std::optional<DetectorParams> detector_preset(std::string_view name);

std::vector<std::string> detector_preset_names();

}  // namespace cospomdp
