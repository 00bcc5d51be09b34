// stroma-sim: command-line driver for the corneal stroma simulations.

#include "stroma/config.hpp"
#include "stroma/output.hpp"
#include "stroma/verification.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace stroma;

namespace {

struct Overrides {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> sets;  // key=value
  std::optional<int> n_m, n_l, steps, snapshot_every;
  std::optional<double> iop_start, iop_end, tolerance, dt, damage_radius;
  std::vector<double> damage_centre;
  std::optional<std::string> model, limbus, method;
  std::optional<double> shape_factor, facet_area, target_force;
  bool quiet = false;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("-c,--config", o.config_path, "JSON config file (see docs/config.md)")->check(CLI::ExistingFile);
  app->add_option("-o,--out", o.out_dir, "output directory (output.directory)");
  app->add_option("--set", o.sets, "override any config key, e.g. --set solver.tolerance=1e-8");
  app->add_option("--nm", o.n_m, "mesh.n_m");
  app->add_option("--nl", o.n_l, "mesh.n_l (odd)");
  app->add_flag("-q,--quiet", o.quiet, "no per-step progress");
}

void add_solver(CLI::App* app, Overrides& o) {
  app->add_option("--method", o.method, "solver.method: newton_raphson | dynamic_relaxation");
  app->add_option("--tol", o.tolerance, "solver.tolerance");
  app->add_option("--dt", o.dt, "solver.pseudo_time_step");
}

void add_ramp(CLI::App* app, Overrides& o) {
  add_solver(app, o);
  app->add_option("--iop-start", o.iop_start, "scenario.load.iop_start_mmhg");
  app->add_option("--iop-end", o.iop_end, "scenario.load.iop_end_mmhg");
  app->add_option("--steps", o.steps, "scenario.load.steps");
  app->add_option("--model", o.model, "scenario.model: coupled_multiscale | variance_based");
  app->add_option("--limbus", o.limbus, "scenario.limbus: orthogonality_preserving | fixed | pinned_midsurface");
  app->add_option("--snapshot-every", o.snapshot_every, "output.snapshot_every");
}

json parse_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return text;
  }
}

json base_document(const Overrides& o, const std::string& scenario) {
  json doc = json::object();
  if (!o.config_path.empty()) doc = config_to_json(parse_config(o.config_path));
  if (!scenario.empty()) set_json_key(doc, "scenario.kind", scenario);
  auto put = [&](const char* key, const auto& v) {
    if (v) set_json_key(doc, key, *v);
  };
  if (!o.out_dir.empty()) set_json_key(doc, "output.directory", o.out_dir);
  put("mesh.n_m", o.n_m);
  put("mesh.n_l", o.n_l);
  put("scenario.load.steps", o.steps);
  put("scenario.load.iop_start_mmhg", o.iop_start);
  put("scenario.load.iop_end_mmhg", o.iop_end);
  put("scenario.model", o.model);
  put("scenario.limbus", o.limbus);
  put("scenario.damage.radius", o.damage_radius);
  put("scenario.unit_cell.shape_factor", o.shape_factor);
  put("scenario.unit_cell.facet_area", o.facet_area);
  put("scenario.unit_cell.target_force", o.target_force);
  put("solver.method", o.method);
  put("solver.tolerance", o.tolerance);
  put("solver.pseudo_time_step", o.dt);
  put("output.snapshot_every", o.snapshot_every);
  if (!o.damage_centre.empty()) set_json_key(doc, "scenario.damage.centre", o.damage_centre);
  for (const std::string& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got \"" + s + "\"");
    set_json_key(doc, s.substr(0, eq), parse_value(s.substr(eq + 1)));
  }
  return doc;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

// Runs one scenario into cfg.output.directory. Writes the manifest whatever happens.
void run_scenario(const RunConfig& cfg, const std::string& command, bool quiet) {
  const fs::path dir = cfg.output.directory;
  fs::create_directories(dir);
  const auto t0 = Clock::now();
  RunManifest manifest;
  manifest.command = command;
  manifest.config = config_to_json(cfg);
  {
    PartialFile f(dir / "config.resolved.json");
    f.stream() << manifest.config.dump(2) << '\n';
    f.commit();
  }

  ScenarioSettings settings = cfg.settings;
  if (!quiet) settings.progress = [](const std::string& s) { std::cout << s << std::endl; };

  try {
    if (cfg.scenario == ScenarioKind::UnitCell) {
      const auto points = run_unit_cell_equibiaxial(cfg.unit_cell, cfg.materials, cfg.settings.solve);
      write_unit_cell_csv(dir / "unitcell.csv", points);
      const UnitCellPoint& last = points.back();
      manifest.notes.push_back("shape factor " + fmt(cfg.unit_cell.shape_factor) + ", L_IP " +
                               fmt(cfg.unit_cell.l_ip()) + " mm, L_OP " + fmt(cfg.unit_cell.l_op()) + " mm");
      manifest.notes.push_back("final force " + fmt(last.force) + " N: stretch x " + fmt(last.stretch_x) + ", y " +
                               fmt(last.stretch_y) + ", z " + fmt(last.stretch_z));
      if (!quiet) std::cout << manifest.notes.back() << '\n';
    } else {
      const bool kc = cfg.scenario == ScenarioKind::Keratoconus;
      CurveWriter curve(dir / "curve.csv");
      auto observer = [&](const StepRecord& r) {
        curve.add(r);
        manifest.steps.push_back(r);
      };
      const ScenarioResult res =
          kc ? run_keratoconus(cfg.geometry, cfg.mesh, cfg.materials, cfg.damage, cfg.load, settings, observer)
             : run_inflation(cfg.geometry, cfg.mesh, cfg.materials, cfg.load, settings, observer);
      curve.commit();
      write_history_log(dir / "history.log", res.history);
      for (Meridian m : {Meridian::SI, Meridian::NT})
        write_profile_csv(dir / ("profile_" + std::string(to_string(m)) + ".csv"), extract_profile(res, m));
      const FeModel& fe = *res.model;
      if (cfg.output.vtk) {
        for (const Snapshot& s : res.snapshots) {
          std::ostringstream name;
          name << "mesh_step_" << std::setw(3) << std::setfill('0') << s.step << ".vtk";
          const Eigen::Matrix3Xd x = fe.mesh.nodes + s.displacement;
          write_hex_vtk(dir / name.str(), fe.mesh, x, &s.displacement, &fe.hex_damage);
        }
        write_truss_vtk(dir / "trusses_final.vtk", res.positions, fe.trusses, &fe.truss_damage);
      }
      const StepRecord& last = res.steps.back();
      manifest.notes.push_back("mean shape factor " + fmt(res.mean_shape_factor));
      manifest.notes.push_back("apex displacement " + fmt(last.apex_displacement) + " mm at " + fmt(last.iop_mmhg) +
                               " mmHg");
      if (kc) {
        const int bulge = bulge_apex_node(res);
        const Vec3 b = fe.mesh.node(bulge);
        manifest.notes.push_back("bulge apex node " + std::to_string(bulge) + " at (" + fmt(b.x()) + ", " +
                                 fmt(b.y()) + ") mm, z-displacement " +
                                 fmt(res.positions(2, bulge) - b.z()) + " mm");
        const Profile si = extract_profile(res, Meridian::SI);
        const Vec3& p = si.anterior[si.min_index];
        manifest.notes.push_back("minimum SI thickness " + fmt(si.min_thickness) + " mm at y = " + fmt(p.y()) +
                                 " mm");
      }
      if (!quiet)
        for (const std::string& n : manifest.notes) std::cout << n << '\n';
    }
  } catch (const std::exception& e) {
    manifest.status = "failed";
    manifest.error = e.what();
    manifest.wall_clock_s = seconds_since(t0);
    write_manifest(dir / "manifest.txt", manifest);
    throw;
  }
  manifest.wall_clock_s = seconds_since(t0);
  write_manifest(dir / "manifest.txt", manifest);
}

int cmd_mesh(const RunConfig& cfg) {
  const fs::path dir = cfg.output.directory;
  fs::create_directories(dir);
  const Mesh mesh = generate_mesh(cfg.geometry, cfg.mesh);
  check_jacobians(mesh);
  const TrussSet ts = assign_truss_areas(build_trusswork(mesh, cfg.mesh), cfg.mesh, cfg.materials.a_bar);
  write_hex_vtk(dir / "mesh.vtk", mesh, mesh.nodes);
  write_truss_vtk(dir / "trusses.vtk", mesh.nodes, ts.trusses);
  const ShapeFactorReport sf = shape_factors(mesh);
  std::cout << mesh.node_count() << " nodes / " << mesh.hex_count() << " hexes\n";
  std::cout << ts.trusses.size() << " trusses (" << ts.count(TrussKind::Collagen) << " collagen)\n";
  std::cout << "mean shape factor " << fmt(sf.mean_f) << ", dome height " << fmt(dome_height(mesh)) << " mm\n";
  return 0;
}

int cmd_check() {
  const auto t0 = Clock::now();
  const std::vector<CheckResult> results = run_verification_suite();
  int failed = 0;
  for (const CheckResult& r : results) {
    std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << "  (" << std::setprecision(3) << r.value
              << " <= " << r.limit << ")\n";
    failed += !r.passed;
  }
  std::cout << results.size() - failed << "/" << results.size() << " checks passed in " << std::setprecision(3)
            << seconds_since(t0) << " s\n";
  return failed ? 1 : 0;
}

int worker_limit() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("STROMA_SIM_THREADS")) {
    const int v = std::atoi(env);
    if (v < 1) throw ConfigError("STROMA_SIM_THREADS must be a positive integer");
    n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return static_cast<int>(n);
}

int cmd_sweep(json doc, const std::vector<std::string>& params, bool quiet) {
  for (const std::string& p : params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw ConfigError("--param expects key=v1,v2,..., got \"" + p + "\"");
    json values = json::array();
    std::stringstream ss(p.substr(eq + 1));
    for (std::string item; std::getline(ss, item, ',');) values.push_back(parse_value(item));
    if (!doc.contains("sweep")) doc["sweep"] = json::array();
    doc["sweep"].push_back({{"key", p.substr(0, eq)}, {"values", values}});
  }
  const RunConfig base = config_from_json(doc);
  if (base.sweep.empty()) throw ConfigError("sweep: no axes given (use --param or the sweep config key)");

  // Cartesian product of the axes.
  std::vector<std::vector<std::size_t>> points{{}};
  for (const SweepAxis& a : base.sweep) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& p : points)
      for (std::size_t v = 0; v < a.values.size(); ++v) {
        next.push_back(p);
        next.back().push_back(v);
      }
    points = std::move(next);
  }

  json base_doc = config_to_json(base);
  base_doc["sweep"] = json::array();
  const fs::path root = base.output.directory;
  fs::create_directories(root);

  std::vector<std::string> status(points.size());
  std::atomic<std::size_t> next{0};
  std::mutex io;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < points.size();) {
      std::ostringstream name;
      name << "point_" << std::setw(3) << std::setfill('0') << i;
      try {
        json d = base_doc;
        for (std::size_t a = 0; a < base.sweep.size(); ++a)
          set_json_key(d, base.sweep[a].key, base.sweep[a].values[points[i][a]]);
        set_json_key(d, "output.directory", (root / name.str()).string());
        const RunConfig cfg = config_from_json(d);
        run_scenario(cfg, "sweep " + name.str(), true);
        const std::string curve = cfg.scenario == ScenarioKind::UnitCell ? "unitcell.csv" : "curve.csv";
        status[i] = "ok";
        std::lock_guard lock(io);
        if (!quiet) std::cout << name.str() << " done (" << curve << ")\n";
      } catch (const std::exception& e) {
        status[i] = std::string("failed: ") + e.what();
        std::lock_guard lock(io);
        std::cerr << name.str() << " failed: " << e.what() << '\n';
      }
    }
  };
  const int n_workers = std::min<int>(worker_limit(), static_cast<int>(points.size()));
  std::vector<std::thread> pool;
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  PartialFile summary(root / "sweep.csv");
  auto& o = summary.stream();
  o << "point";
  for (const SweepAxis& a : base.sweep) o << ',' << a.key;
  o << ",status\n";
  int failed = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    o << i;
    for (std::size_t a = 0; a < base.sweep.size(); ++a) o << ',' << base.sweep[a].values[points[i][a]].dump();
    // Quote the status: solver messages may contain commas.
    std::string s = status[i];
    for (std::size_t p = 0; (p = s.find('"', p)) != std::string::npos; p += 2) s.insert(p, "\"");
    o << ",\"" << s << "\"\n";
    failed += status[i] != "ok";
  }
  summary.commit();
  std::cout << points.size() - failed << "/" << points.size() << " sweep points succeeded\n";
  return failed ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corneal stroma finite-element simulations"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);
  Overrides o;

  CLI::App* mesh = app.add_subcommand("mesh", "write the hexahedral mesh and trusswork as VTK");
  add_common(mesh, o);

  CLI::App* inflate = app.add_subcommand("inflate", "pressure ramp on the healthy cornea");
  add_common(inflate, o);
  add_ramp(inflate, o);

  CLI::App* kc = app.add_subcommand("keratoconus", "pressure ramp with a localized damage field");
  add_common(kc, o);
  add_ramp(kc, o);
  kc->add_option("--damage-centre", o.damage_centre, "scenario.damage.centre (x y) [mm]")->expected(2);
  kc->add_option("--damage-radius", o.damage_radius, "scenario.damage.radius [mm]");

  CLI::App* uc = app.add_subcommand("unitcell", "single unit cell under equibiaxial facet forces");
  add_common(uc, o);
  add_solver(uc, o);
  uc->add_option("--shape-factor", o.shape_factor, "scenario.unit_cell.shape_factor");
  uc->add_option("--facet-area", o.facet_area, "scenario.unit_cell.facet_area [mm^2]");
  uc->add_option("--target-force", o.target_force, "scenario.unit_cell.target_force [N]");

  std::vector<std::string> sweep_params;
  std::string sweep_scenario = "";
  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter grid, one curve per point");
  add_common(sweep, o);
  add_ramp(sweep, o);
  sweep->add_option("--param", sweep_params, "axis as key=v1,v2,... (repeatable)");
  sweep->add_option("--scenario", sweep_scenario, "scenario.kind for every point");

  app.add_subcommand("check", "run the built-in verification suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand("check")) return cmd_check();
    if (app.got_subcommand("mesh")) return cmd_mesh(config_from_json(base_document(o, "")));
    if (app.got_subcommand("sweep")) return cmd_sweep(base_document(o, sweep_scenario), sweep_params, o.quiet);
    const std::string kind = app.got_subcommand("inflate") ? "inflation"
                             : app.got_subcommand("keratoconus") ? "keratoconus"
                                                                 : "unitcell";
    const RunConfig cfg = config_from_json(base_document(o, kind));
    run_scenario(cfg, app.get_subcommands().front()->get_name(), o.quiet);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "stroma-sim: config error: " << e.what() << '\n';
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "stroma-sim: solver error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "stroma-sim: error: " << e.what() << '\n';
    return 1;
  }
}
