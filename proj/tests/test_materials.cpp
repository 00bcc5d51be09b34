#include "stroma/materials.hpp"

#include <doctest.h>

#include <random>

using namespace stroma;
using doctest::Approx;

namespace {

double central(const auto& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

}  // namespace

TEST_CASE("collagen oracles at lambda = 1.005") {
  const TrussResponse r = collagen_response(1.005, CollagenParams{});
  CHECK(r.p == Approx(0.00994653826268083).epsilon(1e-12));
  CHECK(r.stiff == Approx(2.38716918304340).epsilon(1e-12));
  const TrussResponse zero = collagen_response(1.0, CollagenParams{});
  CHECK(zero.psi == 0.0);
  CHECK(zero.p == 0.0);
  CHECK(zero.stiff == Approx(1.8));
}

TEST_CASE("crosslink oracles") {
  const CrosslinkParams p;
  CHECK(crosslink_response(0.95, p).p == Approx(-0.0619255154806615).epsilon(1e-12));
  CHECK(crosslink_response(0.95, p).stiff == Approx(1.93268642484879).epsilon(1e-12));
  CHECK(crosslink_response(1.05, p).stiff == Approx(0.219360942568912).epsilon(1e-12));
  // Equilibrium length: no force, minimum energy -eps.
  CHECK(crosslink_response(1.0, p).p == Approx(0.0).scale(1.0));
  CHECK(crosslink_response(1.0, p).psi == Approx(-0.01));
  CHECK(crosslink_response(1.0, p).stiff == Approx(2 * 6 * 6 * 0.01));
}

TEST_CASE("crosslink peaks") {
  const CrosslinkParams p;
  const double lp = crosslink_peak_stretch(p);
  CHECK(lp == Approx(1.10868341796872155).epsilon(1e-13));
  CHECK(crosslink_response(lp, p).p == Approx(0.02689900897204720).epsilon(1e-12));
  CHECK(crosslink_response(lp, p).stiff == Approx(0.0).scale(1.0));
  const double l2 = crosslink_pk2_peak_stretch(p);
  CHECK(l2 == Approx(1.0977573193049614).epsilon(1e-13));
  // P / lambda is stationary at l2.
  const double h = 1e-5;
  const auto pk2 = [&](double l) { return crosslink_response(l, p).p / l; };
  CHECK(central(pk2, l2, h) == Approx(0.0).scale(1.0));
}

TEST_CASE("stress and stiffness are consistent derivatives") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.8, 1.2);
  const CollagenParams col;
  const CrosslinkParams xl;
  for (int s = 0; s < 200; ++s) {
    const double l = u(rng);
    const double h = 1e-5 * l;
    const auto cpsi = [&](double x) { return collagen_response(x, col).psi; };
    const auto cp = [&](double x) { return collagen_response(x, col).p; };
    const auto xpsi = [&](double x) { return crosslink_response(x, xl).psi; };
    const auto xp = [&](double x) { return crosslink_response(x, xl).p; };
    const TrussResponse rc = collagen_response(l, col);
    const TrussResponse rx = crosslink_response(l, xl);
    CHECK(central(cpsi, l, h) == Approx(rc.p).epsilon(1e-6).scale(1e-3));
    CHECK(central(cp, l, h) == Approx(rc.stiff).epsilon(1e-6));
    CHECK(central(xpsi, l, h) == Approx(rx.p).epsilon(1e-6).scale(1e-3));
    CHECK(central(xp, l, h) == Approx(rx.stiff).epsilon(1e-6).scale(1e-3));
  }
}

TEST_CASE("collagen compression toggle") {
  CollagenParams p;
  CHECK(collagen_response(0.98, p).p < 0.0);
  p.active_in_compression = false;
  const TrussResponse r = collagen_response(0.98, p);
  CHECK(r.psi == 0.0);
  CHECK(r.p == 0.0);
  CHECK(r.stiff == 0.0);
  CHECK(collagen_response(1.02, p).p > 0.0);
}

TEST_CASE("non-positive stretch is a domain error") {
  CHECK_THROWS_AS(collagen_response(0.0, CollagenParams{}), DomainError);
  CHECK_THROWS_AS(crosslink_response(-1.0, CrosslinkParams{}), DomainError);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(CollagenParams({-1.0, 4000.0, true}).validate(), DomainError);
  CHECK_THROWS_AS(CrosslinkParams({0.01, 0.0}).validate(), DomainError);
  CHECK_THROWS_AS(MatrixParams({0.001, -0.002, 5.0}).validate(), DomainError);
  CHECK_THROWS_AS(MatrixParams({0.0015, -0.0014, 0.0}).validate(), DomainError);
  CHECK_THROWS_AS(DamageScaling{1.5}.validate(), DomainError);
  CHECK_NOTHROW(MatrixParams{}.validate());
}

TEST_CASE("damage scales prefactors only") {
  const DamageScaling d{0.25};
  const CollagenParams c = apply_damage(CollagenParams{}, d);
  CHECK(c.k1 == Approx(1.35));
  CHECK(c.k2 == 4000.0);
  const CrosslinkParams x = apply_damage(CrosslinkParams{}, d);
  CHECK(x.eps == Approx(0.0075));
  CHECK(x.a == 6.0);
  const MatrixParams m = apply_damage(MatrixParams{}, d);
  CHECK(m.mu1 == Approx(0.75 * 0.0015));
  CHECK(m.mu2 == Approx(-0.75 * 0.0014));
  CHECK(m.k_bulk == 5.0);
  const TrussLaw law = apply_damage(TrussLaw{CollagenParams{}}, d);
  CHECK(truss_response(1.01, law).p == Approx(0.75 * collagen_response(1.01, CollagenParams{}).p));
}

TEST_CASE("matrix energy oracles") {
  CHECK(volumetric_energy(1.1, 5.0) == Approx(0.0242245504891878).epsilon(1e-12));
  const double l = 1.2;
  const Mat3 f = Vec3(l, 1.0 / std::sqrt(l), 1.0 / std::sqrt(l)).asDiagonal();
  const EnergyStress es = matrix_energy_stress(ContinuumPointState::from_deformation_gradient(f), MatrixParams{});
  CHECK(es.energy == Approx(1.38888888888889e-5).epsilon(1e-10));
  CHECK((es.stress - es.stress.transpose()).norm() < 1e-15);
}

TEST_CASE("matrix stress vanishes in the reference state") {
  const EnergyStress es = matrix_energy_stress(ContinuumPointState{}, MatrixParams{});
  CHECK(es.energy == Approx(0.0).scale(1.0));
  CHECK(es.stress.norm() < 1e-15);
  CHECK_THROWS_AS(ContinuumPointState::from_deformation_gradient(-Mat3::Identity()), DomainError);
}

TEST_CASE("pressure unit conversion") {
  CHECK(mmhg_to_mpa(15.0) == Approx(0.00199983));
  CHECK(mpa_to_mmhg(mmhg_to_mpa(42.0)) == Approx(42.0));
}
