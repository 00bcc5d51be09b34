#pragma once

#include "stroma/common.hpp"

#include <array>
#include <vector>

namespace stroma {

/// One corneal face described by a biconic surface.
///
/// The asphericity enters the sag radicand as (1 - q), so q = 1 is a paraboloid
/// along that meridian and q = 0 a circle. Values are dimensionless.
struct BiconicSurface {
  double r_steep = 7.56;  ///< radius of the steepest meridian [mm]
  double r_flat = 7.41;   ///< radius of the flattest meridian [mm]
  double q_steep = 1.5;
  double q_flat = 1.5;
  double steep_axis_deg = 0.0;  ///< 0: steepest meridian along x (NT); 90: along y (SI)

  void validate() const;
};

struct CorneaGeometry {
  BiconicSurface anterior;
  BiconicSurface posterior{6.47, 6.07, 1.0, 1.0, 0.0};
  double central_thickness = 0.57;  ///< [mm]
  double apex_elevation = 2.48;     ///< [mm], consistency metric only
  double in_plane_diameter = 10.60; ///< limbus diameter [mm]

  void validate() const;

  /// Healthy human cornea used throughout (anterior/posterior biconics, 0.57 mm apex).
  static CorneaGeometry healthy() { return {}; }

  /// Anterior and posterior face heights along the optic axis; the anterior apex sits at z = central_thickness.
  double anterior_z(double x, double y) const;
  double posterior_z(double x, double y) const;
};

/// Sag (depth below the apex tangent plane) of a biconic surface.
/// Throws DomainError when the point lies outside the surface's real domain.
double biconic_sag(double x, double y, const BiconicSurface& s);

struct MeshSpec {
  int n_m = 26;  ///< elements along each principal meridian diameter
  int n_l = 3;   ///< element layers through the thickness (odd)

  /// Throws MeshError unless n_m >= 2 (or 1 for single-cell builds) and n_l is odd.
  void validate(bool allow_single_cell = false) const;
};

struct Hex {
  /// Bottom face (i,j),(i+1,j),(i+1,j+1),(i,j+1) then the same four one node layer up.
  std::array<int, 8> nodes{};
  int layer = 1;  ///< 1 = posterior-most layer
  int i = 0;
  int j = 0;
};

/// Four nodes ordered so that (x1 - x0) x (x3 - x0) points into the solid.
using Facet = std::array<int, 4>;

/// Structured hexahedral mesh of a (possibly curved) plate.
///
/// Nodes are numbered id = k*(n+1)^2 + j*(n+1) + i with i, j in-plane grid
/// indices and k the node layer (0 = posterior surface).
struct Mesh {
  Eigen::Matrix3Xd nodes;
  std::vector<Hex> hexes;
  std::vector<Facet> posterior_facets;
  /// Node ids of each through-thickness limbus column, posterior to anterior.
  std::vector<std::vector<int>> limbus_columns;
  int n_grid = 0;    ///< cells per in-plane grid direction
  int n_layers = 0;  ///< cell layers

  int node_count() const { return static_cast<int>(nodes.cols()); }
  int hex_count() const { return static_cast<int>(hexes.size()); }
  int node_id(int i, int j, int k) const { return (k * (n_grid + 1) + j) * (n_grid + 1) + i; }
  Vec3 node(int id) const { return nodes.col(id); }
  Eigen::Matrix<double, 8, 3> hex_coords(int h) const;
};

/// Mapped-square discretisation of the limbus disk: a uniform grid on [-1,1]^2
/// sent through the elliptical square-to-disk map, filled through the
/// thickness by N_L equal layers between the posterior and anterior faces.
Mesh generate_mesh(const CorneaGeometry& geom, const MeshSpec& spec);

/// Rectangular box [0,lx]x[0,ly]x[0,lz] with n x n in-plane cells and nz layers.
Mesh make_box_mesh(int n, int nz, double lx, double ly, double lz);

/// Minimum reference Jacobian determinant over the 2x2x2 Gauss points of every hex;
/// throws MeshError naming the first hex whose Jacobian is not positive.
void check_jacobians(const Mesh& mesh);

struct ShapeFactorReport {
  std::vector<double> per_cell_f;
  std::vector<double> in_plane;      ///< L_IP per cell [mm]
  std::vector<double> out_of_plane;  ///< L_OP per cell [mm]
  double mean_f = 0.0;
};

ShapeFactorReport shape_factors(const Mesh& mesh);

/// Angle in degrees between each boundary cell's first grid direction and the
/// nearest of the local radial/circumferential directions. Zero means the
/// lattice is exactly circumferential-radial at that cell.
std::vector<double> limbus_orientation_deviation(const Mesh& mesh);

/// Height of the anterior apex above the lowest posterior limbus point [mm].
double dome_height(const Mesh& mesh);

}  // namespace stroma
