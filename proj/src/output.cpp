#include "stroma/output.hpp"

#include <iomanip>

#ifndef STROMA_VERSION
#define STROMA_VERSION "0.0.0"
#endif

namespace stroma {

namespace fs = std::filesystem;

std::string_view version() { return STROMA_VERSION; }

PartialFile::PartialFile(fs::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
  partial_ = path_;
  partial_ += ".partial";
  out_.open(partial_);
  if (!out_) throw Error("cannot open " + partial_.string() + " for writing");
  out_ << std::setprecision(12);
}

void PartialFile::commit() {
  if (committed_) return;
  out_.close();
  if (!out_) throw Error("failed writing " + partial_.string());
  fs::rename(partial_, path_);
  committed_ = true;
}

CurveWriter::CurveWriter(const fs::path& path) : file_(path) {
  file_.stream() << "step,iop_mmHg,apex_disp_mm,residual\n";
  file_.stream().flush();
}

void CurveWriter::add(const StepRecord& r) {
  file_.stream() << r.step << ',' << r.iop_mmhg << ',' << r.apex_displacement << ',' << r.residual << '\n';
  file_.stream().flush();
}

void write_curve_csv(const fs::path& path, const std::vector<StepRecord>& steps) {
  CurveWriter w(path);
  for (const StepRecord& r : steps) w.add(r);
  w.commit();
}

void write_profile_csv(const fs::path& path, const Profile& p) {
  PartialFile f(path);
  auto& o = f.stream();
  o << "index,x_mm,y_mm,z_anterior_mm,x_posterior_mm,y_posterior_mm,z_posterior_mm,thickness_mm\n";
  for (std::size_t i = 0; i < p.anterior.size(); ++i) {
    const Vec3& a = p.anterior[i];
    const Vec3& b = p.posterior[i];
    o << i << ',' << a.x() << ',' << a.y() << ',' << a.z() << ',' << b.x() << ',' << b.y() << ',' << b.z() << ','
      << p.thickness[i] << '\n';
  }
  f.commit();
}

void write_unit_cell_csv(const fs::path& path, const std::vector<UnitCellPoint>& points) {
  PartialFile f(path);
  auto& o = f.stream();
  o << "force_N,stretch_x,stretch_y,stretch_z\n";
  for (const UnitCellPoint& p : points)
    o << p.force << ',' << p.stretch_x << ',' << p.stretch_y << ',' << p.stretch_z << '\n';
  f.commit();
}

void write_history_log(const fs::path& path, const std::vector<HistoryRecord>& history) {
  PartialFile f(path);
  auto& o = f.stream();
  o << "# step iteration residual omega0\n";
  for (const HistoryRecord& h : history)
    o << h.step << ' ' << h.iteration.iteration << ' ' << h.iteration.residual << ' ' << h.iteration.omega0 << '\n';
  f.commit();
}

namespace {

void vtk_header(std::ostream& o, const std::string& title, const Eigen::Matrix3Xd& x) {
  o << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  o << "POINTS " << x.cols() << " double\n";
  for (Eigen::Index i = 0; i < x.cols(); ++i) o << x(0, i) << ' ' << x(1, i) << ' ' << x(2, i) << '\n';
}

void vtk_scalars(std::ostream& o, const char* name, const char* type, const auto& values) {
  o << "SCALARS " << name << ' ' << type << " 1\nLOOKUP_TABLE default\n";
  for (const auto& v : values) o << v << '\n';
}

int kind_code(TrussKind k) {
  switch (k) {
    case TrussKind::Collagen: return 0;
    case TrussKind::CrosslinkInPlaneAxial: return 1;
    case TrussKind::CrosslinkInPlaneDiagonal: return 2;
    case TrussKind::CrosslinkOutOfPlane: return 3;
  }
  return -1;
}

}  // namespace

void write_hex_vtk(const fs::path& path, const Mesh& mesh, const Eigen::Matrix3Xd& x, const Eigen::Matrix3Xd* u,
                   const std::vector<double>* damage) {
  PartialFile f(path);
  auto& o = f.stream();
  vtk_header(o, "stroma hexahedral mesh", x);
  const std::size_t nc = mesh.hexes.size();
  o << "CELLS " << nc << ' ' << nc * 9 << '\n';
  for (const Hex& h : mesh.hexes) {
    o << 8;
    for (int n : h.nodes) o << ' ' << n;
    o << '\n';
  }
  o << "CELL_TYPES " << nc << '\n';
  for (std::size_t i = 0; i < nc; ++i) o << "12\n";
  o << "CELL_DATA " << nc << '\n';
  std::vector<int> layer;
  for (const Hex& h : mesh.hexes) layer.push_back(h.layer);
  vtk_scalars(o, "layer", "int", layer);
  if (damage) vtk_scalars(o, "damage", "double", *damage);
  if (u) {
    o << "POINT_DATA " << u->cols() << "\nVECTORS displacement double\n";
    for (Eigen::Index i = 0; i < u->cols(); ++i) o << (*u)(0, i) << ' ' << (*u)(1, i) << ' ' << (*u)(2, i) << '\n';
  }
  f.commit();
}

void write_truss_vtk(const fs::path& path, const Eigen::Matrix3Xd& x, const std::vector<Truss>& trusses,
                     const std::vector<double>* damage) {
  PartialFile f(path);
  auto& o = f.stream();
  vtk_header(o, "stroma trusswork (kind: 0 collagen, 1 axial, 2 diagonal, 3 out-of-plane crosslink)", x);
  const std::size_t nc = trusses.size();
  o << "CELLS " << nc << ' ' << nc * 3 << '\n';
  for (const Truss& t : trusses) o << "2 " << t.node_a << ' ' << t.node_b << '\n';
  o << "CELL_TYPES " << nc << '\n';
  for (std::size_t i = 0; i < nc; ++i) o << "3\n";
  o << "CELL_DATA " << nc << '\n';
  std::vector<int> kind;
  std::vector<double> area;
  for (const Truss& t : trusses) {
    kind.push_back(kind_code(t.kind));
    area.push_back(t.ref_area);
  }
  vtk_scalars(o, "kind", "int", kind);
  vtk_scalars(o, "area", "double", area);
  if (damage) vtk_scalars(o, "damage", "double", *damage);
  f.commit();
}

void write_manifest(const fs::path& path, const RunManifest& m) {
  PartialFile f(path);
  auto& o = f.stream();
  o << kManifestHeader << '\n';
  o << "version: " << version() << '\n';
  o << "command: " << m.command << '\n';
  o << "status: " << m.status << '\n';
  if (!m.error.empty()) o << "error: " << m.error << '\n';
  o << "wall_clock_s: " << std::fixed << std::setprecision(3) << m.wall_clock_s << std::defaultfloat
    << std::setprecision(12) << '\n';
  o << "steps: " << m.steps.size() << '\n';
  o << "#  step  iop_mmHg  apex_disp_mm  residual  iterations  cutbacks\n";
  for (const StepRecord& r : m.steps)
    o << "   " << r.step << "  " << r.iop_mmhg << "  " << r.apex_displacement << "  " << r.residual << "  "
      << r.iterations << "  " << r.cutbacks << '\n';
  for (const std::string& n : m.notes) o << "note: " << n << '\n';
  o << "config:\n" << m.config.dump(2) << '\n';
  f.commit();
}

}  // namespace stroma
