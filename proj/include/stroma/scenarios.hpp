#pragma once

#include "stroma/model.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace stroma {

/// Pressure ramp; pressures in mmHg at the interface, converted to MPa internally.
struct LoadProgram {
  double iop_start_mmhg = 0.0;
  double iop_end_mmhg = 30.0;
  int steps = 30;

  void validate() const;
  /// Pressure of load level k in [0, steps] [mmHg].
  double level(int k) const { return iop_start_mmhg + (iop_end_mmhg - iop_start_mmhg) * k / steps; }
};

/// Radially quadratic degeneration d = max(0, 1 - (r/R)^2) about a point of the corneal plane.
struct DamageField {
  Vec2 centre{0.0, -1.0};  ///< [mm], inferior by default
  double radius = 2.5;     ///< [mm]

  void validate() const;
  double at(double x, double y) const;
  bool contains(double x, double y) const { return (Vec2(x, y) - centre).norm() < radius; }
};

enum class ConstitutiveModel { CoupledMultiscale, VarianceBased };
enum class SolverMethod { NewtonRaphson, DynamicRelaxation };

/// Radial interpolation of the von Mises concentration between the centre and the limbus.
/// Defaults are a least-squares fit of the healthy inflation curve to the coupled model.
struct DispersionField {
  double b_centre = 1.0;
  double b_limbus = 8.0;

  void validate() const;
  double at(double r_over_limbus) const;
};

struct MaterialSet {
  CollagenParams collagen;
  CrosslinkParams crosslink;
  MatrixParams matrix;
  double a_bar = 1.0;  ///< reference truss area [mm^2]
  bool crosslinks_enabled = true;

  // Variance-based comparison model.
  double k1m = 0.2;
  double k2m = 510.0;
  DispersionField dispersion;
  bool fibrils_tension_only = false;

  void validate() const;
};

struct ScenarioSettings {
  ConstitutiveModel model = ConstitutiveModel::CoupledMultiscale;
  LimbusMode limbus = LimbusMode::OrthogonalityPreserving;
  SolverMethod method = SolverMethod::NewtonRaphson;
  SolveSettings solve;
  MassSettings mass;
  HexTangentMode tangent = HexTangentMode::Consistent;
  int max_cutbacks = 8;       ///< halvings of a failing load increment
  int snapshot_every = 0;     ///< keep displacement snapshots every n steps (0: final only)
  std::function<void(const std::string&)> progress;  ///< optional per-step message sink
};

struct StepRecord;

/// Called after every converged load level (lets callers stream partial results).
using StepObserver = std::function<void(const StepRecord&)>;

/// Builds the organ-scale model. With a damage field every hex is damaged at its
/// centroid and every truss at its midpoint (projected on the corneal plane).
std::shared_ptr<FeModel> build_cornea_model(const CorneaGeometry& geom, const MeshSpec& spec,
                                            const MaterialSet& materials, ConstitutiveModel model,
                                            const DamageField* damage = nullptr);

struct StepRecord {
  int step = 0;
  double iop_mmhg = 0.0;
  double apex_displacement = 0.0;  ///< z-displacement of the anterior apex node [mm]
  double residual = 0.0;
  long iterations = 0;
  int cutbacks = 0;
};

struct HistoryRecord {
  int step = 0;
  IterationRecord iteration;
};

struct Snapshot {
  int step = 0;
  Eigen::Matrix3Xd displacement;
};

struct ScenarioResult {
  std::shared_ptr<const FeModel> model;
  std::vector<StepRecord> steps;
  std::vector<HistoryRecord> history;
  std::vector<Snapshot> snapshots;  ///< always ends with the final state
  Eigen::Matrix3Xd positions;       ///< final deformed coordinates
  int apex_node = -1;
  double mean_shape_factor = 0.0;

  Eigen::Matrix3Xd displacement() const { return positions - model->mesh.nodes; }
};

/// Anterior node nearest to the optic axis.
int apex_node(const Mesh& mesh);

/// Ramps the pressure through the load program, solving every level to tolerance.
/// Failing increments are halved up to `max_cutbacks` times before a SolverError
/// naming the step is raised.
ScenarioResult run_pressure_ramp(std::shared_ptr<const FeModel> model, const LoadProgram& load,
                                 const ScenarioSettings& settings, const StepObserver& observer = {});

ScenarioResult run_inflation(const CorneaGeometry& geom, const MeshSpec& spec, const MaterialSet& materials,
                             const LoadProgram& load, const ScenarioSettings& settings,
                             const StepObserver& observer = {});

ScenarioResult run_keratoconus(const CorneaGeometry& geom, const MeshSpec& spec, const MaterialSet& materials,
                               const DamageField& damage, const LoadProgram& load, const ScenarioSettings& settings,
                               const StepObserver& observer = {});

struct UnitCellSpec {
  double shape_factor = 1.0;  ///< f = L_IP / L_OP
  double facet_area = 1.0;    ///< L_IP * L_OP, kept fixed across f [mm^2]
  double target_force = 0.05;  ///< total force per loaded facet [N]; the crosslinks limit the cell near 0.1 N
  int steps = 20;

  void validate() const;
  double l_ip() const;
  double l_op() const;
};

struct UnitCellPoint {
  double force = 0.0;      ///< per loaded facet [N]
  double stretch_x = 1.0;  ///< mean x-position of the x = L_IP facet over L_IP
  double stretch_y = 1.0;  ///< mean y-position of the y = L_IP facet over L_IP
  double stretch_z = 1.0;  ///< mean top minus mean bottom height over L_OP

  double in_plane() const { return 0.5 * (stretch_x + stretch_y); }
};

/// One odd unit cell (hex plus its 16 trusses) under dead equibiaxial in-plane
/// facet forces. Symmetry planes x = 0 and y = 0 carry roller supports; the top
/// and bottom faces are traction free.
std::vector<UnitCellPoint> run_unit_cell_equibiaxial(const UnitCellSpec& cell, const MaterialSet& materials,
                                                     const SolveSettings& solve = {});

enum class Meridian { SI, NT };

std::string_view to_string(Meridian m);

struct Profile {
  std::vector<Vec3> anterior;   ///< ordered along the meridian
  std::vector<Vec3> posterior;
  std::vector<double> thickness;  ///< per anterior point: distance to the posterior polyline [mm]
  double min_thickness = 0.0;
  int min_index = 0;
};

/// Nodes of the grid line through the centre along the meridian, in deformed coordinates.
Profile extract_profile(const Mesh& mesh, const Eigen::Matrix3Xd& positions, Meridian meridian);
Profile extract_profile(const ScenarioResult& result, Meridian meridian);

/// Anterior node with the largest z-displacement.
int bulge_apex_node(const ScenarioResult& result);

}  // namespace stroma
