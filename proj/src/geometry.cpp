#include "stroma/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace stroma {

void BiconicSurface::validate() const {
  if (!(r_steep > 0.0) || !(r_flat > 0.0)) {
    throw DomainError("biconic radii must be positive");
  }
  if (steep_axis_deg != 0.0 && steep_axis_deg != 90.0) {
    throw DomainError("steep_axis_deg must be 0 or 90");
  }
}

void CorneaGeometry::validate() const {
  anterior.validate();
  posterior.validate();
  if (!(central_thickness > 0.0)) throw DomainError("central_thickness must be positive");
  if (!(in_plane_diameter > 0.0)) throw DomainError("in_plane_diameter must be positive");
}

double CorneaGeometry::anterior_z(double x, double y) const {
  return central_thickness - biconic_sag(x, y, anterior);
}

double CorneaGeometry::posterior_z(double x, double y) const { return -biconic_sag(x, y, posterior); }

double biconic_sag(double x, double y, const BiconicSurface& s) {
  const bool steep_on_x = s.steep_axis_deg == 0.0;
  const double rx = steep_on_x ? s.r_steep : s.r_flat;
  const double ry = steep_on_x ? s.r_flat : s.r_steep;
  const double qx = steep_on_x ? s.q_steep : s.q_flat;
  const double qy = steep_on_x ? s.q_flat : s.q_steep;

  const double radicand = 1.0 - (1.0 - qx) * x * x / (rx * rx) - (1.0 - qy) * y * y / (ry * ry);
  if (radicand < 0.0) {
    std::ostringstream os;
    os << "biconic sag undefined at (" << x << ", " << y << "): radicand " << radicand;
    throw DomainError(os.str());
  }
  return (x * x / rx + y * y / ry) / (1.0 + std::sqrt(radicand));
}

void MeshSpec::validate(bool allow_single_cell) const {
  if (n_l < 1) throw MeshError("N_L must be at least 1");
  if (n_l % 2 == 0) throw MeshError("N_L must be odd (odd total number of layers)");
  if (n_m < (allow_single_cell ? 1 : 2)) throw MeshError("N_M must be at least 2");
}

Eigen::Matrix<double, 8, 3> Mesh::hex_coords(int h) const {
  Eigen::Matrix<double, 8, 3> x;
  for (int a = 0; a < 8; ++a) x.row(a) = nodes.col(hexes[h].nodes[a]).transpose();
  return x;
}

namespace {

// Shared connectivity for every structured mesh; coordinates are filled by the caller.
void build_connectivity(Mesh& mesh) {
  const int n = mesh.n_grid;
  mesh.hexes.clear();
  mesh.posterior_facets.clear();
  mesh.limbus_columns.clear();
  for (int k = 0; k < mesh.n_layers; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        Hex h;
        h.layer = k + 1;
        h.i = i;
        h.j = j;
        h.nodes = {mesh.node_id(i, j, k),         mesh.node_id(i + 1, j, k),
                   mesh.node_id(i + 1, j + 1, k), mesh.node_id(i, j + 1, k),
                   mesh.node_id(i, j, k + 1),     mesh.node_id(i + 1, j, k + 1),
                   mesh.node_id(i + 1, j + 1, k + 1), mesh.node_id(i, j + 1, k + 1)};
        mesh.hexes.push_back(h);
        if (k == 0) mesh.posterior_facets.push_back({h.nodes[0], h.nodes[1], h.nodes[2], h.nodes[3]});
      }
    }
  }
  // Outer ring, walked counter-clockwise from (0,0).
  std::vector<std::pair<int, int>> ring;
  for (int i = 0; i < n; ++i) ring.emplace_back(i, 0);
  for (int j = 0; j < n; ++j) ring.emplace_back(n, j);
  for (int i = n; i > 0; --i) ring.emplace_back(i, n);
  for (int j = n; j > 0; --j) ring.emplace_back(0, j);
  for (auto [i, j] : ring) {
    std::vector<int> column;
    for (int k = 0; k <= mesh.n_layers; ++k) column.push_back(mesh.node_id(i, j, k));
    mesh.limbus_columns.push_back(std::move(column));
  }
}

// Trilinear shape-function derivatives in the parent cube [-1,1]^3.
Eigen::Matrix<double, 8, 3> parent_gradients(double xi, double eta, double zeta) {
  static constexpr int s[8][3] = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                                  {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};
  Eigen::Matrix<double, 8, 3> d;
  for (int a = 0; a < 8; ++a) {
    d(a, 0) = 0.125 * s[a][0] * (1 + s[a][1] * eta) * (1 + s[a][2] * zeta);
    d(a, 1) = 0.125 * s[a][1] * (1 + s[a][0] * xi) * (1 + s[a][2] * zeta);
    d(a, 2) = 0.125 * s[a][2] * (1 + s[a][0] * xi) * (1 + s[a][1] * eta);
  }
  return d;
}

}  // namespace

Mesh generate_mesh(const CorneaGeometry& geom, const MeshSpec& spec) {
  geom.validate();
  spec.validate();

  Mesh mesh;
  mesh.n_grid = spec.n_m;
  mesh.n_layers = spec.n_l;
  const int n = spec.n_m;
  const double radius = 0.5 * geom.in_plane_diameter;
  mesh.nodes.resize(3, (n + 1) * (n + 1) * (spec.n_l + 1));

  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      // Symmetric parametrisation keeps the mesh exactly mirror-symmetric.
      const double u = (2.0 * i - n) / n;
      const double v = (2.0 * j - n) / n;
      const double x = radius * u * std::sqrt(1.0 - 0.5 * v * v);
      const double y = radius * v * std::sqrt(1.0 - 0.5 * u * u);
      const double z_post = geom.posterior_z(x, y);
      const double z_ant = geom.anterior_z(x, y);
      if (!(z_ant > z_post)) {
        std::ostringstream os;
        os << "non-positive thickness at (" << x << ", " << y << ")";
        throw MeshError(os.str());
      }
      for (int k = 0; k <= spec.n_l; ++k) {
        const double t = static_cast<double>(k) / spec.n_l;
        mesh.nodes.col(mesh.node_id(i, j, k)) = Vec3(x, y, z_post + t * (z_ant - z_post));
      }
    }
  }
  build_connectivity(mesh);
  check_jacobians(mesh);
  return mesh;
}

Mesh make_box_mesh(int n, int nz, double lx, double ly, double lz) {
  if (n < 1 || nz < 1) throw MeshError("box mesh needs at least one cell per direction");
  Mesh mesh;
  mesh.n_grid = n;
  mesh.n_layers = nz;
  mesh.nodes.resize(3, (n + 1) * (n + 1) * (nz + 1));
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i)
        mesh.nodes.col(mesh.node_id(i, j, k)) = Vec3(lx * i / n, ly * j / n, lz * k / nz);
  build_connectivity(mesh);
  return mesh;
}

void check_jacobians(const Mesh& mesh) {
  const double g = 1.0 / std::sqrt(3.0);
  for (int h = 0; h < mesh.hex_count(); ++h) {
    const auto x = mesh.hex_coords(h);
    for (int q = 0; q < 8; ++q) {
      const double xi = (q & 1) ? g : -g;
      const double eta = (q & 2) ? g : -g;
      const double zeta = (q & 4) ? g : -g;
      const Mat3 jac = x.transpose() * parent_gradients(xi, eta, zeta);
      if (!(jac.determinant() > 0.0)) {
        throw MeshError("non-positive reference Jacobian in cell " + std::to_string(h));
      }
    }
  }
}

ShapeFactorReport shape_factors(const Mesh& mesh) {
  ShapeFactorReport report;
  const int count = mesh.hex_count();
  report.per_cell_f.reserve(count);
  report.in_plane.reserve(count);
  report.out_of_plane.reserve(count);
  double sum = 0.0;
  for (const Hex& h : mesh.hexes) {
    auto len = [&](int a, int b) { return (mesh.node(h.nodes[a]) - mesh.node(h.nodes[b])).norm(); };
    const double dir1 = 0.25 * (len(0, 1) + len(3, 2) + len(4, 5) + len(7, 6));
    const double dir2 = 0.25 * (len(0, 3) + len(1, 2) + len(4, 7) + len(5, 6));
    const double l_ip = 0.5 * (dir1 + dir2);
    const double l_op = 0.25 * (len(0, 4) + len(1, 5) + len(2, 6) + len(3, 7));
    report.in_plane.push_back(l_ip);
    report.out_of_plane.push_back(l_op);
    report.per_cell_f.push_back(l_ip / l_op);
    sum += l_ip / l_op;
  }
  report.mean_f = count > 0 ? sum / count : 0.0;
  return report;
}

std::vector<double> limbus_orientation_deviation(const Mesh& mesh) {
  std::vector<double> out;
  const int n = mesh.n_grid;
  for (const Hex& h : mesh.hexes) {
    if (h.layer != 1) continue;
    if (h.i != 0 && h.j != 0 && h.i != n - 1 && h.j != n - 1) continue;
    Vec3 centre = Vec3::Zero();
    for (int a : h.nodes) centre += mesh.node(a);
    centre /= 8.0;
    const Vec3 d1 = (mesh.node(h.nodes[1]) - mesh.node(h.nodes[0]) + mesh.node(h.nodes[2]) -
                     mesh.node(h.nodes[3]));
    const Eigen::Vector2d dir = d1.head<2>().normalized();
    const Eigen::Vector2d radial = centre.head<2>().normalized();
    // Angle to the nearest of radial/circumferential lies in [0, 45] degrees.
    const double c = std::min(1.0, std::abs(dir.dot(radial)));
    const double angle = std::acos(c) * 180.0 / std::numbers::pi;
    out.push_back(std::min(angle, 90.0 - angle));
  }
  return out;
}

double dome_height(const Mesh& mesh) {
  double apex = -1e300;
  double lowest = 1e300;
  const int top = mesh.n_layers;
  for (int id = 0; id < mesh.node_count(); ++id) {
    const int k = id / ((mesh.n_grid + 1) * (mesh.n_grid + 1));
    if (k == top) apex = std::max(apex, mesh.nodes(2, id));
  }
  for (const auto& column : mesh.limbus_columns) lowest = std::min(lowest, mesh.nodes(2, column.front()));
  return apex - lowest;
}

}  // namespace stroma
