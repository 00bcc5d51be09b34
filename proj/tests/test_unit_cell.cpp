#include "stroma/unit_cell.hpp"

#include <doctest.h>

#include <set>

using namespace stroma;
using doctest::Approx;

namespace {

std::set<std::pair<int, int>> pairs(const TrussSet& ts) {
  std::set<std::pair<int, int>> out;
  for (const Truss& t : ts.trusses) out.insert({std::min(t.node_a, t.node_b), std::max(t.node_a, t.node_b)});
  return out;
}

}  // namespace

TEST_CASE("single odd cell carries 16 trusses") {
  const Mesh m = make_box_mesh(1, 1, 1.0, 1.0, 1.0);
  const TrussSet ts = build_trusswork(m, MeshSpec{1, 1});
  CHECK(ts.trusses.size() == 16);
  CHECK(ts.count(TrussKind::Collagen) == 4);
  CHECK(ts.count(TrussKind::CrosslinkInPlaneAxial) + ts.count(TrussKind::CrosslinkInPlaneDiagonal) == 8);
  CHECK(ts.count(TrussKind::CrosslinkOutOfPlane) == 4);
}

TEST_CASE("stacked cells share coincident trusses") {
  const Mesh m = make_box_mesh(1, 3, 1.0, 1.0, 3.0);
  const TrussSet ts = build_trusswork(m, MeshSpec{1, 3});
  CHECK(ts.trusses.size() < 3 * 16);
  CHECK(pairs(ts).size() == ts.trusses.size());
}

TEST_CASE("no duplicate trusses on a cornea mesh") {
  const Mesh m = generate_mesh(CorneaGeometry::healthy(), MeshSpec{6, 3});
  const TrussSet ts = build_trusswork(m, MeshSpec{6, 3});
  CHECK(pairs(ts).size() == ts.trusses.size());
  for (const Truss& t : ts.trusses) CHECK(t.ref_length == Approx((m.node(t.node_a) - m.node(t.node_b)).norm()));
}

TEST_CASE("laminae alternate direction through the thickness") {
  const Mesh m = generate_mesh(CorneaGeometry::healthy(), MeshSpec{6, 3});
  const TrussSet ts = build_trusswork(m, MeshSpec{6, 3});
  REQUIRE(ts.lamina.size() == 4);
  for (std::size_t k = 1; k < ts.lamina.size(); ++k) CHECK(ts.lamina[k] != ts.lamina[k - 1]);
  // Collagen never crosses layers.
  const int per_layer = 49;
  for (const Truss& t : ts.trusses)
    if (t.kind == TrussKind::Collagen) CHECK(t.node_a / per_layer == t.node_b / per_layer);
}

TEST_CASE("truss areas use meridian and layer weights") {
  const MeshSpec spec{26, 3};
  const Mesh m = generate_mesh(CorneaGeometry::healthy(), spec);
  const TrussSet ts = assign_truss_areas(build_trusswork(m, spec), spec, 1.0);
  bool saw_interior = false, saw_surface = false;
  for (const Truss& t : ts.trusses) {
    if (t.on_surface) {
      CHECK(t.ref_area == Approx(1.0 / 156.0));
      saw_surface = true;
    } else {
      CHECK(t.ref_area == Approx(1.0 / 78.0));
      saw_interior = true;
    }
  }
  CHECK(saw_interior);
  CHECK(saw_surface);
}

TEST_CASE("kind names") {
  CHECK(to_string(TrussKind::Collagen) == "collagen");
  CHECK(is_crosslink(TrussKind::CrosslinkOutOfPlane));
  CHECK_FALSE(is_crosslink(TrussKind::Collagen));
}

TEST_CASE("out-of-plane crosslinks are body diagonals") {
  const Mesh m = make_box_mesh(1, 3, 1.0, 1.0, 3.0);
  const TrussSet ts = build_trusswork(m, MeshSpec{1, 3});
  // Two shared mid-surfaces each merge six in-plane trusses; body diagonals are never shared.
  CHECK(ts.trusses.size() == 3 * 16 - 2 * 6);
  CHECK(ts.count(TrussKind::CrosslinkOutOfPlane) == 12);
  for (const Truss& t : ts.trusses)
    if (t.kind == TrussKind::CrosslinkOutOfPlane) CHECK(t.ref_length == Approx(std::sqrt(3.0)));
}

TEST_CASE("layer weights of a through-thickness stack sum to one") {
  const MeshSpec spec{4, 3};
  const Mesh m = generate_mesh(CorneaGeometry::healthy(), spec);
  const TrussSet ts = assign_truss_areas(build_trusswork(m, spec), spec, 1.0);
  const int per_layer = (m.n_grid + 1) * (m.n_grid + 1);
  // Collagen of the first grid row, first column, in each node layer.
  double sum = 0.0;
  int found = 0;
  for (const Truss& t : ts.trusses) {
    if (t.kind == TrussKind::Collagen || t.kind == TrussKind::CrosslinkInPlaneAxial) {
      const int a = std::min(t.node_a, t.node_b) % per_layer, b = std::max(t.node_a, t.node_b) % per_layer;
      if (a == 0 && b == 1) {
        sum += t.ref_area * spec.n_m;
        ++found;
      }
    }
  }
  CHECK(found == 4);
  CHECK(sum == Approx(1.0));
  // Horizontal and vertical laminae are equally represented.
  int horizontal = 0;
  for (LaminaDirection d : ts.lamina) horizontal += d == LaminaDirection::Horizontal;
  CHECK(2 * horizontal == static_cast<int>(ts.lamina.size()));
}
