#pragma once

#include <string>

#include "dse/simulator.hpp"

namespace dse {

/// Scenario <-> JSON document with unit-suffixed keys (r_load_ohm,
/// l_load_h, ...). Missing keys keep their defaults.
Scenario scenario_from_json_text(const std::string& text);
Scenario scenario_from_json_file(const std::string& path);
std::string scenario_to_json_text(const Scenario& s);

}  // namespace dse
