#pragma once

#include "stroma/common.hpp"

#include <cmath>
#include <type_traits>
#include <variant>

namespace stroma {

/// Exponential collagen law psi = k1/(2 k2) [exp(k2 (lambda-1)^2) - 1].
struct CollagenParams {
  double k1 = 1.8;     ///< [MPa]
  double k2 = 4000.0;  ///< dimensionless
  /// When false the fibril carries no load for lambda < 1.
  bool active_in_compression = true;

  void validate() const;
};

/// Lennard-Jones crosslink law psi = eps lambda^-a (lambda^-a - 2).
struct CrosslinkParams {
  double eps = 0.01;  ///< depth of the potential well [MPa]
  double a = 6.0;

  void validate() const;
};

/// Decoupled Mooney-Rivlin matrix with a volumetric penalty.
struct MatrixParams {
  double mu1 = 0.0015;  ///< [MPa]
  double mu2 = -0.0014; ///< [MPa]
  double k_bulk = 5.0;  ///< [MPa]

  void validate() const;
  double shear_modulus() const { return mu1 + mu2; }
};

struct TrussResponse {
  double psi = 0.0;    ///< energy per unit reference volume [MPa]
  double p = 0.0;      ///< first Piola-Kirchhoff stress dpsi/dlambda [MPa]
  double stiff = 0.0;  ///< dP/dlambda [MPa]
};

TrussResponse collagen_response(double lambda, const CollagenParams& params);
TrussResponse crosslink_response(double lambda, const CrosslinkParams& params);

/// Stretch at which the nominal crosslink stress P peaks: ((2a+1)/(a+1))^(1/a).
double crosslink_peak_stretch(const CrosslinkParams& params);

/// Stretch at which the 1D second Piola-Kirchhoff stress P/lambda peaks: (2(a+1)/(a+2))^(1/a).
double crosslink_pk2_peak_stretch(const CrosslinkParams& params);

using TrussLaw = std::variant<CollagenParams, CrosslinkParams>;

TrussResponse truss_response(double lambda, const TrussLaw& law);

struct DamageScaling {
  double d = 0.0;

  void validate() const;
};

/// Damage scales stiffness prefactors by (1 - d); exponents and the bulk penalty are unchanged.
CollagenParams apply_damage(CollagenParams params, DamageScaling damage);
CrosslinkParams apply_damage(CrosslinkParams params, DamageScaling damage);
MatrixParams apply_damage(MatrixParams params, DamageScaling damage);
TrussLaw apply_damage(const TrussLaw& law, DamageScaling damage);

// ---------------------------------------------------------------------------
// Continuum kinematics, templated on the scalar so the same code provides
// forces in double precision and exact tangents through forward AD.

template <class T>
double value_of(const T& x) {
  if constexpr (std::is_arithmetic_v<T>) {
    return static_cast<double>(x);
  } else {
    return x.value();
  }
}

template <class T>
using Tensor2 = Eigen::Matrix<T, 3, 3>;

template <class T>
T det3(const Tensor2<T>& f) {
  return f(0, 0) * (f(1, 1) * f(2, 2) - f(1, 2) * f(2, 1)) -
         f(0, 1) * (f(1, 0) * f(2, 2) - f(1, 2) * f(2, 0)) +
         f(0, 2) * (f(1, 0) * f(2, 1) - f(1, 1) * f(2, 0));
}

/// Cofactor matrix, cof F = det(F) F^-T.
template <class T>
Tensor2<T> cofactor3(const Tensor2<T>& f) {
  Tensor2<T> c;
  c(0, 0) = f(1, 1) * f(2, 2) - f(1, 2) * f(2, 1);
  c(0, 1) = f(1, 2) * f(2, 0) - f(1, 0) * f(2, 2);
  c(0, 2) = f(1, 0) * f(2, 1) - f(1, 1) * f(2, 0);
  c(1, 0) = f(0, 2) * f(2, 1) - f(0, 1) * f(2, 2);
  c(1, 1) = f(0, 0) * f(2, 2) - f(0, 2) * f(2, 0);
  c(1, 2) = f(0, 1) * f(2, 0) - f(0, 0) * f(2, 1);
  c(2, 0) = f(0, 1) * f(1, 2) - f(0, 2) * f(1, 1);
  c(2, 1) = f(0, 2) * f(1, 0) - f(0, 0) * f(1, 2);
  c(2, 2) = f(0, 0) * f(1, 1) - f(0, 1) * f(1, 0);
  return c;
}

/// Isochoric invariants and their derivatives with respect to F.
template <class T>
struct IsochoricKinematics {
  Tensor2<T> f;
  T j;
  Tensor2<T> f_inv_t;  ///< F^-T
  Tensor2<T> c;        ///< C = F^T F
  T j_m23;             ///< J^(-2/3)
  T i1_bar;
  T i2_bar;
  Tensor2<T> d_i1_bar;  ///< dI1bar/dF
  Tensor2<T> d_i2_bar;  ///< dI2bar/dF

  explicit IsochoricKinematics(const Tensor2<T>& f_in) : f(f_in) {
    using std::pow;
    j = det3(f);
    f_inv_t = cofactor3(f) / j;
    c = f.transpose() * f;
    j_m23 = pow(j, -2.0 / 3.0);
    const T j_m43 = j_m23 * j_m23;
    const T i1 = c.trace();
    const Tensor2<T> cc = c * c;
    const T i2 = T(0.5) * (i1 * i1 - cc.trace());
    i1_bar = j_m23 * i1;
    i2_bar = j_m43 * i2;
    d_i1_bar = j_m23 * (T(2.0) * f - T(2.0 / 3.0) * i1 * f_inv_t);
    d_i2_bar = j_m43 * (T(2.0) * (i1 * f - f * c) - T(4.0 / 3.0) * i2 * f_inv_t);
  }
};

template <class T>
T volumetric_energy(const T& j, double k_bulk) {
  using std::log;
  return T(0.25 * k_bulk) * (j * j - T(1.0) - T(2.0) * log(j));
}

/// Mooney-Rivlin energy density for a given kinematic state [MPa].
template <class T>
T matrix_energy(const IsochoricKinematics<T>& kin, const MatrixParams& p) {
  return volumetric_energy(kin.j, p.k_bulk) + T(0.5 * p.mu1) * (kin.i1_bar - T(3.0)) +
         T(0.5 * p.mu2) * (kin.i2_bar - T(3.0));
}

/// First Piola-Kirchhoff stress dPsi/dF of the Mooney-Rivlin matrix.
template <class T>
Tensor2<T> matrix_piola(const IsochoricKinematics<T>& kin, const MatrixParams& p) {
  const T dvol = T(0.5 * p.k_bulk) * (kin.j - T(1.0) / kin.j);
  return T(0.5 * p.mu1) * kin.d_i1_bar + T(0.5 * p.mu2) * kin.d_i2_bar + dvol * kin.j * kin.f_inv_t;
}

/// Deformation state at a point, with the modified invariants of C-bar.
struct ContinuumPointState {
  Mat3 f = Mat3::Identity();
  double j = 1.0;
  double i1_bar = 3.0;
  double i2_bar = 3.0;

  /// Throws DomainError when det F <= 0.
  static ContinuumPointState from_deformation_gradient(const Mat3& f);
};

struct EnergyStress {
  double energy = 0.0;            ///< [MPa]
  Mat3 stress = Mat3::Zero();     ///< second Piola-Kirchhoff stress [MPa]
};

EnergyStress matrix_energy_stress(const ContinuumPointState& state, const MatrixParams& params);

}  // namespace stroma
