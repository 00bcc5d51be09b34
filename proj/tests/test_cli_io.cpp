#include "stroma/config.hpp"
#include "stroma/output.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace stroma;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("stroma_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

/// Runs the CLI with stdout and stderr captured to `log`; returns the exit status.
int run_cli(const std::string& args, const fs::path& log) {
  const char* exe = std::getenv("STROMA_SIM");
  REQUIRE_MESSAGE(exe != nullptr, "STROMA_SIM must point at the stroma-sim executable");
  const std::string cmd = std::string("\"") + exe + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("empty document gives the default run") {
  const RunConfig c = config_from_json(json::object());
  CHECK(c.mesh.n_m == 26);
  CHECK(c.mesh.n_l == 3);
  CHECK(c.scenario == ScenarioKind::Inflation);
  CHECK(c.load.iop_end_mmhg == 30.0);
  CHECK(c.settings.solve.tolerance == 1e-6);
  CHECK(c.materials.collagen.k2 == 4000.0);
  CHECK(c.materials.collagen.active_in_compression);
  CHECK(c.damage.radius == 2.5);

  const fs::path dir = scratch_dir("empty");
  std::ofstream(dir / "empty.json").close();
  CHECK(config_to_json(parse_config(dir / "empty.json")) == config_to_json(c));
  CHECK_THROWS_AS(parse_config(dir / "missing.json"), ConfigError);
}

TEST_CASE("invalid configurations name the offending key") {
  CHECK_THROWS_WITH_AS(config_from_json(json::parse(R"({"mesh": {"nm": 4}})")), doctest::Contains("mesh.nm"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(config_from_json(json::parse(R"({"mesh": {"n_l": 4}})")),
                       doctest::Contains("odd total number of layers"), ConfigError);
  CHECK_THROWS_WITH_AS(config_from_json(json::parse(R"({"materials": {"matrix": {"k_bulk": -1}}})")),
                       doctest::Contains("materials"), ConfigError);
  CHECK_THROWS_WITH_AS(config_from_json(json::parse(R"({"solver": {"method": "gauss"}})")),
                       doctest::Contains("solver.method"), ConfigError);
  CHECK_THROWS_WITH_AS(config_from_json(json::parse(R"({"solver": {"tolerance": "small"}})")),
                       doctest::Contains("solver.tolerance"), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"scenario": {"damage": {"centre": [1]}}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"sweep": [{"key": "mesh.n_m", "values": []}]})")), ConfigError);
}

TEST_CASE("config round trip") {
  json doc = json::object();
  set_json_key(doc, "mesh.n_m", 10);
  set_json_key(doc, "scenario.kind", "keratoconus");
  set_json_key(doc, "scenario.model", "variance_based");
  set_json_key(doc, "scenario.limbus", "pinned_midsurface");
  set_json_key(doc, "solver.method", "dynamic_relaxation");
  set_json_key(doc, "materials.variance.b_limbus", 12.5);
  CHECK(doc["mesh"]["n_m"] == 10);
  const RunConfig c = config_from_json(doc);
  CHECK(c.mesh.n_m == 10);
  CHECK(c.scenario == ScenarioKind::Keratoconus);
  CHECK(c.settings.model == ConstitutiveModel::VarianceBased);
  CHECK(c.settings.limbus == LimbusMode::PinnedMidsurface);
  CHECK(c.settings.method == SolverMethod::DynamicRelaxation);
  CHECK(c.materials.dispersion.b_limbus == 12.5);
  const json echoed = config_to_json(c);
  CHECK(config_to_json(config_from_json(echoed)) == echoed);
  CHECK(to_string(ScenarioKind::UnitCell) == "unitcell");
  CHECK(to_string(HexTangentMode::FiniteDifference) == "finite_difference");
}

TEST_CASE("a run manifest is itself a valid config") {
  json doc = json::object();
  set_json_key(doc, "mesh.n_m", 6);
  set_json_key(doc, "scenario.load.steps", 7);
  const RunConfig c = config_from_json(doc);
  RunManifest m;
  m.config = config_to_json(c);
  m.command = "stroma-sim inflate";
  m.steps.push_back(StepRecord{1, 15.0, 0.1, 1e-9, 3, 0});
  m.notes.push_back("note");
  const fs::path dir = scratch_dir("manifest");
  write_manifest(dir / "manifest.txt", m);
  const std::string text = slurp(dir / "manifest.txt");
  CHECK(text.rfind(std::string(kManifestHeader), 0) == 0);
  CHECK(config_to_json(parse_config(dir / "manifest.txt")) == m.config);
}

TEST_CASE("partial files are renamed only on commit") {
  const fs::path dir = scratch_dir("partial");
  {
    PartialFile f(dir / "kept.csv");
    f.stream() << "a,b\n";
  }
  CHECK(fs::exists(dir / "kept.csv.partial"));
  CHECK_FALSE(fs::exists(dir / "kept.csv"));
  {
    PartialFile f(dir / "done.csv");
    f.stream() << "a,b\n";
    f.commit();
  }
  CHECK(fs::exists(dir / "done.csv"));
  CHECK_FALSE(fs::exists(dir / "done.csv.partial"));

  CurveWriter w(dir / "curve.csv");
  w.add(StepRecord{0, 0.0, 0.0, 0.0, 0, 0});
  w.add(StepRecord{1, 3.0, 0.05, 1e-10, 4, 0});
  CHECK(count_lines(dir / "curve.csv.partial") == 3);
  w.commit();
  CHECK(slurp(dir / "curve.csv").rfind("step,iop_mmHg,apex_disp_mm,residual", 0) == 0);
}

TEST_CASE("VTK and CSV writers") {
  const Mesh mesh = generate_mesh(CorneaGeometry::healthy(), MeshSpec{4, 3});
  const fs::path dir = scratch_dir("vtk");
  const Eigen::Matrix3Xd u = Eigen::Matrix3Xd::Zero(3, mesh.node_count());
  const std::vector<double> damage(mesh.hex_count(), 0.0);
  write_hex_vtk(dir / "mesh.vtk", mesh, mesh.nodes, &u, &damage);
  const std::string vtk = slurp(dir / "mesh.vtk");
  CHECK(vtk.rfind("# vtk DataFile Version", 0) == 0);
  CHECK(vtk.find("POINTS 100 double") != std::string::npos);
  CHECK(vtk.find("CELLS 48 432") != std::string::npos);
  CHECK(vtk.find("CELL_TYPES 48") != std::string::npos);

  const TrussSet ts = build_trusswork(mesh, MeshSpec{4, 3});
  write_truss_vtk(dir / "trusses.vtk", mesh.nodes, ts.trusses);
  CHECK(slurp(dir / "trusses.vtk").find("CELLS " + std::to_string(ts.trusses.size())) != std::string::npos);

  write_unit_cell_csv(dir / "uc.csv", {UnitCellPoint{}, UnitCellPoint{0.1, 1.01, 1.01, 0.98}});
  CHECK(count_lines(dir / "uc.csv") == 3);
  CHECK(!version().empty());
}

TEST_CASE("command line: mesh, inflate, check and errors") {
  const fs::path dir = scratch_dir("cli");
  CHECK(run_cli("mesh --nm 24 --nl 3 -o \"" + (dir / "mesh").string() + "\"", dir / "mesh.log") == 0);
  CHECK(slurp(dir / "mesh.log").find("2500 nodes / 1728 hexes") != std::string::npos);
  CHECK(fs::exists(dir / "mesh" / "mesh.vtk"));

  CHECK(run_cli("mesh --nl 4 -o \"" + (dir / "bad").string() + "\"", dir / "bad.log") == 2);
  CHECK(slurp(dir / "bad.log").find("odd total number of layers") != std::string::npos);

  const fs::path out = dir / "inflate";
  CHECK(run_cli("inflate -q --nm 4 -o \"" + out.string() + "\"", dir / "inflate.log") == 0);
  CHECK(count_lines(out / "curve.csv") == 32);
  CHECK(fs::exists(out / "manifest.txt"));
  CHECK(fs::exists(out / "config.resolved.json"));
  CHECK(fs::exists(out / "profile_SI.csv"));

  // Re-running from the manifest reproduces the curve.
  const fs::path again = dir / "again";
  CHECK(run_cli("inflate -q -c \"" + (out / "manifest.txt").string() + "\" -o \"" + again.string() + "\"",
                dir / "again.log") == 0);
  CHECK(slurp(again / "curve.csv") == slurp(out / "curve.csv"));

  CHECK(run_cli("inflate -q --nm 4 --set mesh.bogus=1 -o \"" + (dir / "x").string() + "\"", dir / "x.log") == 2);
  CHECK(run_cli("check", dir / "check.log") == 0);
}
