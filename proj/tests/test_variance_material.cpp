#include "stroma/variance_material.hpp"
#include "stroma/verification.hpp"

#include <doctest.h>

using namespace stroma;
using doctest::Approx;

namespace {

Mat3 isochoric(const Mat3& f) { return f / std::cbrt(f.determinant()); }

FamilyTensors family(double b, const Vec3& dir, bool tension_only = false) {
  FibrilFamily fam;
  fam.b = b;
  fam.a0 = dir.normalized();
  return make_family_tensors(fam, tension_only);
}

}  // namespace

TEST_CASE("kappa oracles") {
  CHECK(kappa_from_vonmises(0.0) == Approx(1.0 / 3.0).epsilon(1e-12));
  const std::pair<double, double> table[] = {{0.5, 0.285384647086125}, {1.0, 0.234367721156734},
                                             {2.0, 0.147686703825447}, {5.0, 0.0536361192953746},
                                             {10.0, 0.0257226149543165}, {100.0, 0.00250632960581655}};
  for (const auto& [b, k] : table) CHECK(kappa_from_vonmises(b) == Approx(k).epsilon(1e-10));
}

TEST_CASE("kappa decreases with concentration and inverts") {
  double prev = 1.0;
  for (double b : {0.1, 0.3, 1.0, 3.0, 7.0, 20.0, 60.0}) {
    const double k = kappa_from_vonmises(b);
    CHECK(k < prev);
    prev = k;
    CHECK(vonmises_from_kappa(k) == Approx(b).epsilon(1e-8));
  }
}

TEST_CASE("density is normalised") {
  for (double b : {0.0, 1.0, 8.0}) {
    const int n = 4000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double t = (i + 0.5) * M_PI / n;
      s += vonmises_density(std::cos(t), b) * std::sin(t) * M_PI / n;
    }
    CHECK(0.5 * s == Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("structure tensors") {
  const Vec3 a = Vec3(1.0, 2.0, -0.5).normalized();
  FibrilFamily fam;
  fam.b = 3.0;
  fam.a0 = a;
  const StructureTensors t = structure_tensors(fam);
  const double k = kappa_from_vonmises(3.0);
  CHECK(t.kappa == Approx(k));
  const Mat3 h = k * Mat3::Identity() + (1.0 - 3.0 * k) * a * a.transpose();
  CHECK((t.h - h).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(t.h.trace() == Approx(1.0));
  // Q is fully symmetric and contracts to H.
  Mat3 contracted = Mat3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int kk = 0; kk < 3; ++kk)
        for (int l = 0; l < 3; ++l) {
          const double q = t.q(3 * i + j, 3 * kk + l);
          CHECK(q == Approx(t.q(3 * j + i, 3 * kk + l)).scale(1.0));
          CHECK(q == Approx(t.q(3 * kk + l, 3 * i + j)).scale(1.0));
          CHECK(q == Approx(t.q(3 * i + kk, 3 * j + l)).scale(1.0));
          if (kk == l) contracted(i, j) += q;
        }
  CHECK((contracted - t.h).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("variance vanishes at the reference state and for aligned fibrils") {
  const FamilyTensors fam = family(2.0, Vec3(0, 1, 1));
  const IsochoricKinematics<double> ref(Mat3::Identity());
  const VarianceTerms<double> v = variance_family(ref, fam);
  CHECK(v.i4_star == Approx(1.0));
  CHECK(std::abs(v.sigma2) < 1e-12);
  CHECK(v.piola.norm() < 1e-12);

  const Mat3 f = isochoric(Mat3::Identity() + 0.1 * Mat3::Random());
  const IsochoricKinematics<double> kin(f);
  CHECK(variance_family(kin, fam).sigma2 >= 0.0);
  // The variance shrinks as the dispersion narrows.
  CHECK(variance_family(kin, family(50.0, Vec3(0, 1, 1))).sigma2 < variance_family(kin, fam).sigma2);
}

TEST_CASE("energy matches brute-force sphere integration") {
  const VarianceCheck c = check_variance_model(20, 7);
  CHECK(c.kappa0_error < 1e-8);
  CHECK(c.trace_h_error < 1e-12);
  CHECK(c.sigma2_identity < 1e-12);
  CHECK(c.sigma2_aligned < 1e-12);
  CHECK(c.energy_rel < 1e-6);
}

TEST_CASE("Piola stress is the derivative of the energy") {
  const std::vector<FamilyTensors> fams{family(1.5, Vec3(1, 0.3, 0)), family(4.0, Vec3(0, 1, 0.2))};
  const Mat3 f = Mat3::Identity() + 0.04 * Mat3::Random();
  const MatrixParams mp;
  const EnergyStress es = variance_energy_stress(f, mp, fams);
  const Mat3 p = f * es.stress;
  const double h = 1e-6;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Mat3 fp = f, fm = f;
      fp(i, j) += h;
      fm(i, j) -= h;
      const double d = (variance_energy_stress(fp, mp, fams).energy - variance_energy_stress(fm, mp, fams).energy) / (2 * h);
      CHECK(p(i, j) == Approx(d).epsilon(1e-6).scale(1e-3));
    }
  CHECK((es.stress - es.stress.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("tension-only families carry no stress in compression") {
  const Vec3 a = Vec3::UnitX();
  const Mat3 f = Vec3(0.95, 1.0 / std::sqrt(0.95), 1.0 / std::sqrt(0.95)).asDiagonal();
  const IsochoricKinematics<double> kin(f);
  const VarianceTerms<double> off = variance_family(kin, family(10.0, a, true));
  CHECK(off.i4_star < 1.0);
  CHECK(off.piola.norm() == 0.0);
  const VarianceTerms<double> on = variance_family(kin, family(10.0, a, false));
  CHECK(on.piola.norm() > 0.0);
  std::vector<VarianceEval> per;
  variance_energy_stress(f, MatrixParams{}, {family(10.0, a, true)}, &per);
  REQUIRE(per.size() == 1);
  CHECK(per[0].i4_star == Approx(off.i4_star));
}

TEST_CASE("inverted deformation is rejected") {
  CHECK_THROWS_AS(variance_energy_stress(-Mat3::Identity(), MatrixParams{}, {}), InvertedElementError);
}

TEST_CASE("damage scales the fibril prefactor") {
  VarianceParams p;
  p.families.push_back(FibrilFamily{});
  const VarianceParams d = apply_damage(p, DamageScaling{0.5});
  CHECK(d.families[0].k1m == Approx(0.1));
  CHECK(d.families[0].k2m == 510.0);
  CHECK(d.matrix.mu1 == Approx(0.00075));
  CHECK_THROWS_AS(FibrilFamily({0.2, 510.0, Vec3::UnitX(), -1.0}).validate(), DomainError);
}
