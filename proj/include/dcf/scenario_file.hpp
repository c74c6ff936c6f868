#pragma once

#include "dcf/scenario.hpp"
#include "dcf/sim.hpp"
#include "dcf/solver.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dcf::io {

struct SimSettings
{
  double duration_s = 100.0;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::size_t queue_capacity = 2;
  double warmup_fraction = 0.05;

  sim::SimOptions options(std::uint64_t seed) const
  {
    return {duration_s, seed, queue_capacity, warmup_fraction};
  }
  bool operator==(const SimSettings &) const = default;
};

/// Everything a scenario document holds.
struct ScenarioFile
{
  Scenario scenario;
  solver::SolverOptions solver;
  SimSettings sim;

  bool operator==(const ScenarioFile &) const = default;
};

/// Parses a YAML scenario document. Sections `network`, `propagation`,
/// `stations`, `solver` and `sim`; all keys optional except the station
/// list, unknown keys rejected. Throws ParseError carrying the line.
ScenarioFile parse_scenario(std::string_view text);

ScenarioFile load_scenario(const std::string &path);

/// Writes every field explicitly; parse_scenario(dump_scenario(f)) == f.
std::string dump_scenario(const ScenarioFile &file);

/// Network defaults and a single saturated ideal 11 Mbps station.
ScenarioFile default_scenario();

/// Built-in experiments: "scenario1" (nine saturated 11 Mbps stations plus
/// one slow 1 Mbps station), "scenario2" (eight stations, two per rate class,
/// common arrival rate), "scenario3" (two saturated 11 Mbps stations at 5 m
/// and a third saturated station whose rate follows its distance).
ScenarioFile preset(std::string_view name);

std::vector<std::string> preset_names();

} // namespace dcf::io
