#pragma once

#include <nlohmann/json.hpp>

#include "mk2/hsched/sim.hpp"

namespace mk2::hsched {

/// Scenario document: servers, tasks and scripted stimuli (schema in
/// docs/formats.md). The optional "horizon" field provides a default.
struct Scenario {
    System system;
    Ms horizon = 0; // 0: caller must supply one
};

Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::string& text);

nlohmann::ordered_json trace_to_json(const SimTrace& trace);

} // namespace mk2::hsched
