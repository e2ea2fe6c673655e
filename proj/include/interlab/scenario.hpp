#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "interlab/report.hpp"

namespace interlab {

// Scenario parameters arrive as strings (CLI --key value pairs or JSON
// scalars) and are parsed by each builder.
using ParameterMap = std::map<std::string, std::string>;

struct ScenarioSpec {
    std::string name;
    std::string kind;  // slit | semi_general | fock | completion | event_model | property_suite
    ParameterMap parameters;
    std::uint64_t seed = 0;
    std::string output_dir = ".";
    ordered_json inline_payload;  // raw matrices / models for custom scenarios
};

struct BuiltinInfo {
    std::string name;
    std::string description;
};

// Stable catalog of built-in scenarios.
const std::vector<BuiltinInfo>& builtin_catalog();

// Runs a built-in by name. Unknown names throw ParseError.
Report run_builtin(const std::string& name, const ParameterMap& parameters,
                   std::uint64_t seed);

// Parses a scenario JSON document.
ScenarioSpec parse_scenario(const ordered_json& j);

// Runs a parsed spec and writes its report files; returns the report.
Report run_scenario(const ScenarioSpec& spec);

} // namespace interlab
