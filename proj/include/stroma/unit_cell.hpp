#pragma once

#include "stroma/geometry.hpp"

#include <string_view>
#include <vector>

namespace stroma {

enum class TrussKind {
  Collagen,
  CrosslinkInPlaneAxial,
  CrosslinkInPlaneDiagonal,
  CrosslinkOutOfPlane,
};

std::string_view to_string(TrussKind kind);
inline bool is_crosslink(TrussKind kind) { return kind != TrussKind::Collagen; }

struct Truss {
  int node_a = 0;
  int node_b = 0;
  TrussKind kind = TrussKind::Collagen;
  double ref_length = 0.0;  ///< L [mm]
  double ref_area = 0.0;    ///< A [mm^2], zero until assign_truss_areas
  bool on_surface = false;  ///< both nodes on the anterior or on the posterior face
};

/// Grid direction followed by the collagen of one lamina (one node layer).
/// Horizontal follows the first grid index (NT at the centre), vertical the second (SI).
enum class LaminaDirection { Horizontal, Vertical };

struct TrussSet {
  std::vector<Truss> trusses;
  std::vector<LaminaDirection> lamina;  ///< one per node layer, posterior first

  std::size_t count(TrussKind kind) const;
};

/// Superposes the odd/even unit-cell trusswork onto every hexahedron and merges
/// coincident trusses. Odd layers (1 = posterior) carry horizontal collagen on
/// their bottom face and vertical collagen on their top face; even layers are
/// the mirror image through the thickness.
///
/// Per cell (before merging): four collagen trusses, four axial and four
/// diagonal in-plane crosslinks, and four out-of-plane crosslinks along the
/// body diagonals of the hexahedron.
TrussSet build_trusswork(const Mesh& mesh, const MeshSpec& spec);

/// A = w_M * w_L * a_bar with w_M = 1/N_M and w_L = 1/N_L, halved for surface trusses.
TrussSet assign_truss_areas(TrussSet set, const MeshSpec& spec, double a_bar);

}  // namespace stroma
