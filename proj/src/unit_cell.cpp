#include "stroma/unit_cell.hpp"

#include <algorithm>
#include <unordered_map>

namespace stroma {

std::string_view to_string(TrussKind kind) {
  switch (kind) {
    case TrussKind::Collagen: return "collagen";
    case TrussKind::CrosslinkInPlaneAxial: return "crosslink_axial";
    case TrussKind::CrosslinkInPlaneDiagonal: return "crosslink_diagonal";
    case TrussKind::CrosslinkOutOfPlane: return "crosslink_out_of_plane";
  }
  return "unknown";
}

std::size_t TrussSet::count(TrussKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(trusses.begin(), trusses.end(), [kind](const Truss& t) { return t.kind == kind; }));
}

namespace {

struct LocalTruss {
  int a;
  int b;
  TrussKind kind;
};

// Local node numbering follows Hex::nodes: 0..3 bottom face, 4..7 top face.
// `collagen_along_first` selects which grid direction carries collagen on a face.
void face_pattern(int base, bool collagen_along_first, std::vector<LocalTruss>& out) {
  const int n0 = base, n1 = base + 1, n2 = base + 2, n3 = base + 3;
  const TrussKind first = collagen_along_first ? TrussKind::Collagen : TrussKind::CrosslinkInPlaneAxial;
  const TrussKind second = collagen_along_first ? TrussKind::CrosslinkInPlaneAxial : TrussKind::Collagen;
  out.push_back({n0, n1, first});
  out.push_back({n3, n2, first});
  out.push_back({n0, n3, second});
  out.push_back({n1, n2, second});
  out.push_back({n0, n2, TrussKind::CrosslinkInPlaneDiagonal});
  out.push_back({n1, n3, TrussKind::CrosslinkInPlaneDiagonal});
}

std::vector<LocalTruss> cell_pattern(bool odd_layer) {
  std::vector<LocalTruss> p;
  p.reserve(16);
  // Odd cell: horizontal collagen below, vertical above; even cell mirrored.
  face_pattern(0, odd_layer, p);
  face_pattern(4, !odd_layer, p);
  // Body diagonals; the pattern is invariant under swapping the grid directions and mirroring in z.
  p.push_back({0, 6, TrussKind::CrosslinkOutOfPlane});
  p.push_back({1, 7, TrussKind::CrosslinkOutOfPlane});
  p.push_back({2, 4, TrussKind::CrosslinkOutOfPlane});
  p.push_back({3, 5, TrussKind::CrosslinkOutOfPlane});
  return p;
}

}  // namespace

TrussSet build_trusswork(const Mesh& mesh, const MeshSpec& spec) {
  if (spec.n_l % 2 == 0) throw ConfigError("N_L must be odd (odd total number of layers)");
  if (spec.n_l != mesh.n_layers || spec.n_m != mesh.n_grid) {
    throw ConfigError("mesh spec does not match the mesh");
  }

  TrussSet set;
  for (int k = 0; k <= mesh.n_layers; ++k) {
    set.lamina.push_back(k % 2 == 0 ? LaminaDirection::Horizontal : LaminaDirection::Vertical);
  }

  const auto odd = cell_pattern(true);
  const auto even = cell_pattern(false);
  const int per_layer = (mesh.n_grid + 1) * (mesh.n_grid + 1);
  const int top_layer = mesh.n_layers;

  std::unordered_map<long long, std::size_t> seen;
  seen.reserve(static_cast<std::size_t>(mesh.hex_count()) * 10);
  const long long stride = mesh.node_count();

  for (const Hex& h : mesh.hexes) {
    for (const LocalTruss& lt : (h.layer % 2 == 1 ? odd : even)) {
      int a = h.nodes[lt.a];
      int b = h.nodes[lt.b];
      if (a > b) std::swap(a, b);
      const long long key = a * stride + b;
      if (auto it = seen.find(key); it != seen.end()) {
        if (set.trusses[it->second].kind != lt.kind) {
          throw MeshError("coincident trusses of different kinds between nodes " + std::to_string(a) +
                          " and " + std::to_string(b));
        }
        continue;
      }
      const int ka = a / per_layer;
      const int kb = b / per_layer;
      Truss t;
      t.node_a = a;
      t.node_b = b;
      t.kind = lt.kind;
      t.ref_length = (mesh.node(b) - mesh.node(a)).norm();
      t.on_surface = ka == kb && (ka == 0 || ka == top_layer);
      seen.emplace(key, set.trusses.size());
      set.trusses.push_back(t);
    }
  }
  return set;
}

TrussSet assign_truss_areas(TrussSet set, const MeshSpec& spec, double a_bar) {
  if (!(a_bar > 0.0)) throw DomainError("reference truss area must be positive");
  const double w_m = 1.0 / spec.n_m;
  for (Truss& t : set.trusses) {
    const double w_l = t.on_surface ? 1.0 / (2.0 * spec.n_l) : 1.0 / spec.n_l;
    t.ref_area = w_m * w_l * a_bar;
  }
  return set;
}

}  // namespace stroma
