#include "stroma/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace stroma {

void LoadProgram::validate() const {
  if (steps < 1) throw ConfigError("load program needs at least one step");
  if (!(iop_start_mmhg >= 0.0) || !(iop_end_mmhg >= iop_start_mmhg)) {
    throw ConfigError("load program must ramp monotonically upward from a non-negative pressure");
  }
}

void DamageField::validate() const {
  if (!(radius > 0.0)) throw ConfigError("damage radius must be positive");
}

double DamageField::at(double x, double y) const {
  const double r = (Vec2(x, y) - centre).norm() / radius;
  return std::max(0.0, 1.0 - r * r);
}

void DispersionField::validate() const {
  if (!(b_centre >= 0.0) || !(b_limbus >= 0.0)) throw ConfigError("von Mises concentration must be non-negative");
}

double DispersionField::at(double r) const {
  const double t = std::clamp(r, 0.0, 1.0);
  return b_centre + (b_limbus - b_centre) * t;
}

void MaterialSet::validate() const {
  collagen.validate();
  crosslink.validate();
  matrix.validate();
  if (!(a_bar > 0.0)) throw ConfigError("reference truss area must be positive");
  if (!(k1m >= 0.0) || !(k2m > 0.0)) throw ConfigError("fibril family needs k1 >= 0 and k2 > 0");
  dispersion.validate();
}

namespace {

Vec3 hex_centroid(const Mesh& mesh, const Hex& h) {
  Vec3 c = Vec3::Zero();
  for (int n : h.nodes) c += mesh.node(n);
  return c / 8.0;
}

Vec3 grid_direction(const HexNodes& x, bool along_i) {
  const Vec3 d = along_i ? Vec3((x.row(1) - x.row(0) + x.row(2) - x.row(3) + x.row(5) - x.row(4) + x.row(6) - x.row(7)).transpose())
                         : Vec3((x.row(3) - x.row(0) + x.row(2) - x.row(1) + x.row(7) - x.row(4) + x.row(6) - x.row(5)).transpose());
  return d.normalized();
}

}  // namespace

std::shared_ptr<FeModel> build_cornea_model(const CorneaGeometry& geom, const MeshSpec& spec,
                                            const MaterialSet& materials, ConstitutiveModel model,
                                            const DamageField* damage) {
  materials.validate();
  if (damage) damage->validate();
  auto fe = std::make_shared<FeModel>();
  fe->mesh = generate_mesh(geom, spec);
  const Mesh& mesh = fe->mesh;
  fe->pressure_facets = mesh.posterior_facets;
  const double limbus_radius = 0.5 * geom.in_plane_diameter;

  fe->hex_damage.resize(mesh.hexes.size());
  fe->hex_materials.resize(mesh.hexes.size());
  for (int h = 0; h < mesh.hex_count(); ++h) {
    const Vec3 c = hex_centroid(mesh, mesh.hexes[h]);
    const DamageScaling d{damage ? damage->at(c.x(), c.y()) : 0.0};
    fe->hex_damage[h] = d.d;
    HexMaterial& mat = fe->hex_materials[h];
    if (model == ConstitutiveModel::CoupledMultiscale) {
      mat.matrix = apply_damage(materials.matrix, d);
      continue;
    }
    VarianceParams vp;
    vp.matrix = materials.matrix;
    const HexNodes x = mesh.hex_coords(h);
    const double b = materials.dispersion.at(c.head<2>().norm() / limbus_radius);
    for (bool along_i : {true, false}) vp.families.push_back({materials.k1m, materials.k2m, grid_direction(x, along_i), b});
    vp = apply_damage(vp, d);
    mat.matrix = vp.matrix;
    for (const FibrilFamily& fam : vp.families) mat.families.push_back(make_family_tensors(fam, materials.fibrils_tension_only));
  }

  if (model == ConstitutiveModel::CoupledMultiscale) {
    TrussSet ts = assign_truss_areas(build_trusswork(mesh, spec), spec, materials.a_bar);
    for (const Truss& t : ts.trusses) {
      if (!materials.crosslinks_enabled && is_crosslink(t.kind)) continue;
      const Vec3 mid = 0.5 * (mesh.node(t.node_a) + mesh.node(t.node_b));
      const DamageScaling d{damage ? damage->at(mid.x(), mid.y()) : 0.0};
      fe->trusses.push_back(t);
      fe->truss_damage.push_back(d.d);
      if (t.kind == TrussKind::Collagen) {
        fe->truss_laws.emplace_back(apply_damage(materials.collagen, d));
      } else {
        fe->truss_laws.emplace_back(apply_damage(materials.crosslink, d));
      }
    }
  }
  fe->prepare();
  return fe;
}

int apex_node(const Mesh& mesh) {
  int best = -1;
  double best_r = std::numeric_limits<double>::infinity();
  for (int j = 0; j <= mesh.n_grid; ++j)
    for (int i = 0; i <= mesh.n_grid; ++i) {
      const int id = mesh.node_id(i, j, mesh.n_layers);
      const double r = mesh.node(id).head<2>().squaredNorm();
      if (r < best_r) {
        best_r = r;
        best = id;
      }
    }
  return best;
}

namespace {

SolveResult solve_level(StructuralSystem& system, const Eigen::VectorXd& q0, const ScenarioSettings& s) {
  return s.method == SolverMethod::NewtonRaphson ? newton_solve(system, q0, s.solve)
                                                 : dynamic_relaxation_solve(system, q0, s.solve);
}

}  // namespace

ScenarioResult run_pressure_ramp(std::shared_ptr<const FeModel> model, const LoadProgram& load,
                                 const ScenarioSettings& settings, const StepObserver& observer) {
  load.validate();
  settings.solve.validate();
  ScenarioResult out;
  out.model = model;
  out.apex_node = apex_node(model->mesh);
  out.mean_shape_factor = shape_factors(model->mesh).mean_f;

  StructuralSystem system(*model, apply_limbus_bc(model->mesh, settings.limbus), settings.mass);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(system.size());
  double current = 0.0;  // [mmHg] pressure of the last converged state

  auto record = [&](int step, const SolveResult& r, int cutbacks) {
    const Eigen::Matrix3Xd x = system.positions(q);
    StepRecord rec;
    rec.step = step;
    rec.iop_mmhg = current;
    rec.apex_displacement = x(2, out.apex_node) - model->mesh.nodes(2, out.apex_node);
    rec.residual = r.residual;
    rec.iterations = r.iterations;
    rec.cutbacks = cutbacks;
    out.steps.push_back(rec);
    if (observer) observer(rec);
    for (const IterationRecord& it : r.history) out.history.push_back({step, it});
    if (settings.snapshot_every > 0 && step % settings.snapshot_every == 0 && step != load.steps) {
      out.snapshots.push_back({step, x - model->mesh.nodes});
    }
    if (settings.progress) {
      std::ostringstream os;
      os << "step " << step << "  iop " << current << " mmHg  apex " << rec.apex_displacement << " mm  residual "
         << r.residual << "  iterations " << r.iterations;
      if (cutbacks) os << "  cutbacks " << cutbacks;
      settings.progress(os.str());
    }
  };

  for (int step = 0; step <= load.steps; ++step) {
    const double target = load.level(step);
    double increment = target - current;
    int cutbacks = 0;
    SolveResult last;
    bool first = true;
    while (first || current < target) {
      const double next = std::min(target, current + increment);
      system.set_pressure(mmhg_to_mpa(next));
      try {
        SolveResult r = solve_level(system, q, settings);
        q = r.q;
        last.iterations += r.iterations;
        last.residual = r.residual;
        last.history.insert(last.history.end(), r.history.begin(), r.history.end());
        current = next;
        first = false;
      } catch (const Error& e) {
        if (++cutbacks > settings.max_cutbacks) {
          std::ostringstream os;
          os << "load step " << step << " (" << target << " mmHg) failed: " << e.what();
          throw SolverError(os.str());
        }
        increment *= 0.5;
      }
    }
    record(step, last, cutbacks);
  }
  out.positions = system.positions(q);
  out.snapshots.push_back({load.steps, out.positions - model->mesh.nodes});
  return out;
}

ScenarioResult run_inflation(const CorneaGeometry& geom, const MeshSpec& spec, const MaterialSet& materials,
                             const LoadProgram& load, const ScenarioSettings& settings, const StepObserver& observer) {
  auto fe = build_cornea_model(geom, spec, materials, settings.model);
  fe->tangent_mode = settings.tangent;
  return run_pressure_ramp(fe, load, settings, observer);
}

ScenarioResult run_keratoconus(const CorneaGeometry& geom, const MeshSpec& spec, const MaterialSet& materials,
                               const DamageField& damage, const LoadProgram& load, const ScenarioSettings& settings,
                               const StepObserver& observer) {
  auto fe = build_cornea_model(geom, spec, materials, settings.model, &damage);
  fe->tangent_mode = settings.tangent;
  return run_pressure_ramp(fe, load, settings, observer);
}

void UnitCellSpec::validate() const {
  if (!(shape_factor > 0.0)) throw ConfigError("shape factor must be positive");
  if (!(facet_area > 0.0)) throw ConfigError("facet area must be positive");
  if (!(target_force >= 0.0)) throw ConfigError("target force must be non-negative");
  if (steps < 1) throw ConfigError("unit cell needs at least one load step");
}

double UnitCellSpec::l_ip() const { return std::sqrt(shape_factor * facet_area); }
double UnitCellSpec::l_op() const { return std::sqrt(facet_area / shape_factor); }

std::vector<UnitCellPoint> run_unit_cell_equibiaxial(const UnitCellSpec& cell, const MaterialSet& materials,
                                                     const SolveSettings& solve) {
  cell.validate();
  materials.validate();
  const double l_ip = cell.l_ip();
  const double l_op = cell.l_op();

  FeModel fe;
  fe.mesh = make_box_mesh(1, 1, l_ip, l_ip, l_op);
  const MeshSpec spec{1, 1};
  const TrussSet ts = assign_truss_areas(build_trusswork(fe.mesh, spec), spec, materials.a_bar);
  for (const Truss& t : ts.trusses) {
    if (!materials.crosslinks_enabled && is_crosslink(t.kind)) continue;
    fe.trusses.push_back(t);
    if (t.kind == TrussKind::Collagen) {
      fe.truss_laws.emplace_back(materials.collagen);
    } else {
      fe.truss_laws.emplace_back(materials.crosslink);
    }
  }
  fe.hex_materials.push_back({materials.matrix, {}});
  fe.prepare();

  const Mesh& mesh = fe.mesh;
  DofMap dofs(mesh.node_count());
  Eigen::VectorXd dead = Eigen::VectorXd::Zero(3 * mesh.node_count());
  const double tol = 1e-9 * l_ip;
  for (int n = 0; n < mesh.node_count(); ++n) {
    const Vec3 p = mesh.node(n);
    if (std::abs(p.x()) < tol) dofs.fix_component(n, 0);
    if (std::abs(p.y()) < tol) dofs.fix_component(n, 1);
    if (std::abs(p.x() - l_ip) < tol) dead(3 * n + 0) = 0.25;
    if (std::abs(p.y() - l_ip) < tol) dead(3 * n + 1) = 0.25;
  }
  dofs.fix_component(mesh.node_id(0, 0, 0), 2);
  dofs.finalize();

  StructuralSystem system(fe, dofs);
  system.set_dead_load(dead);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(system.size());

  // Stretches are facet averages: the cell tilts out of plane, so single nodes are biased.
  std::vector<int> x_face, y_face, top, bottom;
  for (int n = 0; n < mesh.node_count(); ++n) {
    const Vec3 p = mesh.node(n);
    if (std::abs(p.x() - l_ip) < tol) x_face.push_back(n);
    if (std::abs(p.y() - l_ip) < tol) y_face.push_back(n);
    (n < 4 ? bottom : top).push_back(n);
  }
  const auto mean = [](const Eigen::Matrix3Xd& x, const std::vector<int>& ids, int c) {
    double s = 0.0;
    for (int id : ids) s += x(c, id);
    return s / static_cast<double>(ids.size());
  };

  std::vector<UnitCellPoint> curve;
  for (int k = 0; k <= cell.steps; ++k) {
    const double force = cell.target_force * k / cell.steps;
    system.set_dead_load_factor(force);
    q = newton_solve(system, q, solve).q;
    const Eigen::Matrix3Xd x = system.positions(q);
    UnitCellPoint p;
    p.force = force;
    p.stretch_x = mean(x, x_face, 0) / l_ip;
    p.stretch_y = mean(x, y_face, 1) / l_ip;
    p.stretch_z = (mean(x, top, 2) - mean(x, bottom, 2)) / l_op;
    curve.push_back(p);
  }
  return curve;
}

std::string_view to_string(Meridian m) { return m == Meridian::SI ? "SI" : "NT"; }

namespace {

double distance_to_polyline(const Vec3& p, const std::vector<Vec3>& line) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s + 1 < line.size(); ++s) {
    const Vec3 a = line[s], b = line[s + 1];
    const Vec3 ab = b - a;
    const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    best = std::min(best, (a + t * ab - p).norm());
  }
  return best;
}

}  // namespace

Profile extract_profile(const Mesh& mesh, const Eigen::Matrix3Xd& x, Meridian meridian) {
  const int n = mesh.n_grid;
  const int mid = n / 2;
  Profile out;
  for (int s = 0; s <= n; ++s) {
    const int i = meridian == Meridian::SI ? mid : s;
    const int j = meridian == Meridian::SI ? s : mid;
    out.anterior.push_back(x.col(mesh.node_id(i, j, mesh.n_layers)));
    out.posterior.push_back(x.col(mesh.node_id(i, j, 0)));
  }
  for (const Vec3& p : out.anterior) out.thickness.push_back(distance_to_polyline(p, out.posterior));
  const auto it = std::min_element(out.thickness.begin(), out.thickness.end());
  out.min_thickness = *it;
  out.min_index = static_cast<int>(it - out.thickness.begin());
  return out;
}

Profile extract_profile(const ScenarioResult& result, Meridian meridian) {
  return extract_profile(result.model->mesh, result.positions, meridian);
}

int bulge_apex_node(const ScenarioResult& result) {
  const Mesh& mesh = result.model->mesh;
  int best = -1;
  double best_u = -std::numeric_limits<double>::infinity();
  for (int j = 0; j <= mesh.n_grid; ++j)
    for (int i = 0; i <= mesh.n_grid; ++i) {
      const int id = mesh.node_id(i, j, mesh.n_layers);
      const double u = result.positions(2, id) - mesh.nodes(2, id);
      if (u > best_u) {
        best_u = u;
        best = id;
      }
    }
  return best;
}

}  // namespace stroma
