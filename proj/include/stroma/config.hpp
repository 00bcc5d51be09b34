#pragma once

#include "stroma/scenarios.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace stroma {

enum class ScenarioKind { Inflation, UnitCell, Keratoconus };

std::string_view to_string(ScenarioKind k);
std::string_view to_string(ConstitutiveModel m);
std::string_view to_string(LimbusMode m);
std::string_view to_string(SolverMethod m);
std::string_view to_string(HexTangentMode m);

/// One swept config key (dotted path, e.g. "mesh.n_m") and its values.
struct SweepAxis {
  std::string key;
  std::vector<nlohmann::json> values;
};

struct OutputSettings {
  std::string directory = "out";
  int snapshot_every = 0;  ///< VTK snapshot cadence in load steps (0: final state only)
  bool vtk = true;
};

/// Fully resolved run description. Every field has a default; see docs/config.md.
struct RunConfig {
  CorneaGeometry geometry;
  MeshSpec mesh;
  MaterialSet materials;

  ScenarioKind scenario = ScenarioKind::Inflation;
  LoadProgram load;
  DamageField damage;
  UnitCellSpec unit_cell;

  ScenarioSettings settings;  ///< model, limbus BC, solver method and tolerances
  OutputSettings output;
  std::vector<SweepAxis> sweep;

  /// Runs every validator; errors name the offending key.
  void validate() const;
};

/// Builds a config from a JSON document. Missing keys take their defaults and
/// unknown keys are rejected. Throws ConfigError.
RunConfig config_from_json(const nlohmann::json& doc);

/// First line of every run manifest.
inline constexpr std::string_view kManifestHeader = "# stroma-sim run manifest";

/// Reads and validates a config file; an empty file yields the default run.
/// A run manifest is accepted too: its trailing config echo is used.
RunConfig parse_config(const std::filesystem::path& path);

/// Every field, including defaults. config_from_json(config_to_json(c)) reproduces c.
nlohmann::json config_to_json(const RunConfig& config);

/// Sets a dotted key ("solver.tolerance") in a JSON document, creating objects as needed.
void set_json_key(nlohmann::json& doc, const std::string& dotted, const nlohmann::json& value);

}  // namespace stroma
