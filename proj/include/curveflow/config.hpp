#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

#include "curveflow/levelset2d.hpp"
#include "curveflow/source_model.hpp"

namespace curveflow {

struct SourceConfig {
  std::string preset = "tent";  // tent, multi_tent, bump, plateau, zero, table, stadium
  nlohmann::json params = nlohmann::json::object();
};

struct GridConfig {
  double dr = 0.05;
  double r_max = 30.0;
  double dx = 0.05;
  double L = 6.0;
};

struct RunConfig {
  std::string experiment;  // optional in the file; the CLI subcommand sets it
  SourceConfig source;
  GridConfig grid;
  double T = 1.0;
  double epsilon = 0.0;  // 0 (absent) selects dx^2
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  nlohmann::json extra = nlohmann::json::object();  // experiment-specific options

  nlohmann::json to_json() const;
};

bool is_experiment(const std::string& name);

/// Parses and validates. Every failure is a ConfigError whose message names
/// the offending field (e.g. "grid.dr").
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Builds the configured source. Radial presets honour "n" (default 2).
SourceModel make_source(const SourceConfig& cfg);

/// Planar view for the 2D solver: radial presets go through as_planar.
SourceModel make_planar_source(const SourceConfig& cfg);

/// Stadium geometry of a "stadium" preset; a = 1 otherwise.
StadiumSpec stadium_of(const SourceConfig& cfg);

}  // namespace curveflow
