#pragma once

#include "stroma/materials.hpp"

#include <vector>

namespace stroma {

/// One dispersed collagen family, rotationally symmetric about its mean direction.
struct FibrilFamily {
  double k1m = 0.2;    ///< [MPa]
  double k2m = 510.0;  ///< dimensionless
  Vec3 a0 = Vec3::UnitX();
  double b = 0.0;      ///< von Mises concentration; 0 is isotropic

  double kappa() const;
  void validate() const;
};

/// Rotationally symmetric von Mises density rho(Theta) ~ exp(2 b cos^2 Theta),
/// normalised so that (1/2) int_0^pi rho sin(Theta) dTheta = 1.
double vonmises_density(double cos_theta, double b);

/// kappa = (1/4) int_0^pi rho(Theta) sin^3(Theta) dTheta, by adaptive quadrature.
double kappa_from_vonmises(double b);

/// Inverse of kappa_from_vonmises on (0, 1/3].
double vonmises_from_kappa(double kappa);

/// Orientation averages of a family: H = <a (x) a> and Q = <a (x) a (x) a (x) a>.
/// Q is stored as a 9x9 matrix indexed by (3i+j, 3k+l).
struct StructureTensors {
  Mat3 h = Mat3::Identity() / 3.0;
  Eigen::Matrix<double, 9, 9> q = Eigen::Matrix<double, 9, 9>::Zero();
  double kappa = 1.0 / 3.0;
};

struct SphereRule {
  int n_theta = 32;
  int n_phi = 64;
};

/// H in closed form from kappa, Q by product Gauss quadrature on the sphere,
/// refined until two successive rules agree; throws Error if they never do.
StructureTensors structure_tensors(const FibrilFamily& family, SphereRule rule = {});

/// Precomputed data of one family as used at a Gauss point.
struct FamilyTensors {
  double k1m = 0.0;
  double k2m = 0.0;
  StructureTensors tensors;
  bool tension_only = false;
};

FamilyTensors make_family_tensors(const FibrilFamily& family, bool tension_only = false);

/// Variance-based continuum: Mooney-Rivlin matrix plus dispersed fibril families.
struct VarianceParams {
  MatrixParams matrix;
  std::vector<FibrilFamily> families;
  bool tension_only = false;
};

VarianceParams apply_damage(VarianceParams params, DamageScaling damage);

template <class T>
struct VarianceTerms {
  T i4_star;  ///< H : C-bar
  T sigma2;   ///< C-bar : Q : C-bar - (H : C-bar)^2
  T energy;
  Tensor2<T> piola;  ///< dPsi_aniso/dF
};

/// Anisotropic energy of one family,
///   k1/(2 k2) exp[k2 (I4* - 1)^2] (1 + K* sigma^2),  K* = k2 + 2 k2^2 (I4* - 1)^2,
/// and its first Piola-Kirchhoff stress.
template <class T>
VarianceTerms<T> variance_family(const IsochoricKinematics<T>& kin, const FamilyTensors& fam) {
  using std::exp;
  const Tensor2<T> h = fam.tensors.h.template cast<T>();
  const T j_m43 = kin.j_m23 * kin.j_m23;

  Eigen::Matrix<T, 9, 1> vec_c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) vec_c(3 * i + j) = kin.c(i, j);
  const Eigen::Matrix<T, 9, 1> q_c_vec = fam.tensors.q.template cast<T>() * vec_c;
  const T h_c = h.cwiseProduct(kin.c).sum();
  const T c_q_c = vec_c.dot(q_c_vec);

  VarianceTerms<T> out;
  out.i4_star = kin.j_m23 * h_c;
  out.sigma2 = j_m43 * c_q_c - out.i4_star * out.i4_star;

  const double c0 = fam.k1m / (2.0 * fam.k2m);
  if (fam.k1m == 0.0 || (fam.tension_only && value_of(out.i4_star) < 1.0)) {
    out.energy = T(c0);
    out.piola = Tensor2<T>::Zero();
    return out;
  }
  const T e = out.i4_star - T(1.0);
  const T g = exp(T(fam.k2m) * e * e);
  const T k_star = T(fam.k2m) + T(2.0 * fam.k2m * fam.k2m) * e * e;
  out.energy = T(c0) * g * (T(1.0) + k_star * out.sigma2);

  Tensor2<T> q_c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) q_c(i, j) = q_c_vec(3 * i + j);

  const Tensor2<T> d_i4 = kin.j_m23 * (T(2.0) * kin.f * h - T(2.0 / 3.0) * h_c * kin.f_inv_t);
  const Tensor2<T> d_cqc = j_m43 * (T(4.0) * kin.f * q_c - T(4.0 / 3.0) * c_q_c * kin.f_inv_t);
  const Tensor2<T> d_sigma2 = d_cqc - T(2.0) * out.i4_star * d_i4;

  const T dpsi_di4 = T(c0) * g *
                     (T(2.0 * fam.k2m) * e * (T(1.0) + k_star * out.sigma2) +
                      T(4.0 * fam.k2m * fam.k2m) * e * out.sigma2);
  const T dpsi_dsigma2 = T(c0) * g * k_star;
  out.piola = dpsi_di4 * d_i4 + dpsi_dsigma2 * d_sigma2;
  return out;
}

struct VarianceEval {
  double i4_star = 1.0;
  double sigma2 = 0.0;
  double k_star = 0.0;
  double psi_aniso = 0.0;
};

/// Full variance-model energy (volumetric + isochoric + anisotropic) and second
/// Piola-Kirchhoff stress at a deformation gradient. Throws InvertedElementError for J <= 0.
EnergyStress variance_energy_stress(const Mat3& f, const MatrixParams& matrix,
                                    const std::vector<FamilyTensors>& families,
                                    std::vector<VarianceEval>* per_family = nullptr);

}  // namespace stroma
