#include "stroma/materials.hpp"

#include <cmath>
#include <sstream>

namespace stroma {

void CollagenParams::validate() const {
  if (!(k1 > 0.0)) throw DomainError("collagen k1 must be positive");
  if (!(k2 >= 0.0)) throw DomainError("collagen k2 must be non-negative");
}

void CrosslinkParams::validate() const {
  if (!(eps > 0.0)) throw DomainError("crosslink eps must be positive");
  if (!(a > 0.0)) throw DomainError("crosslink exponent a must be positive");
}

void MatrixParams::validate() const {
  if (!(mu1 + mu2 > 0.0)) throw DomainError("matrix shear modulus mu1 + mu2 must be positive");
  if (!(k_bulk > 0.0)) throw DomainError("matrix bulk penalty K must be positive");
}

void DamageScaling::validate() const {
  if (!(d >= 0.0 && d <= 1.0)) {
    std::ostringstream os;
    os << "damage " << d << " outside [0, 1]";
    throw DomainError(os.str());
  }
}

namespace {

void require_positive_stretch(double lambda) {
  if (!(lambda > 0.0)) {
    std::ostringstream os;
    os << "stretch must be positive, got " << lambda;
    throw DomainError(os.str());
  }
}

}  // namespace

TrussResponse collagen_response(double lambda, const CollagenParams& p) {
  require_positive_stretch(lambda);
  if (lambda < 1.0 && !p.active_in_compression) return {};
  const double e = lambda - 1.0;
  const double g = std::exp(p.k2 * e * e);
  TrussResponse r;
  // expm1 keeps psi accurate near lambda = 1; k2 = 0 degenerates to the linear law.
  r.psi = p.k2 > 0.0 ? p.k1 / (2.0 * p.k2) * std::expm1(p.k2 * e * e) : 0.5 * p.k1 * e * e;
  r.p = p.k1 * e * g;
  r.stiff = p.k1 * (1.0 + 2.0 * p.k2 * e * e) * g;
  return r;
}

TrussResponse crosslink_response(double lambda, const CrosslinkParams& p) {
  require_positive_stretch(lambda);
  const double la = std::pow(lambda, -p.a);  // lambda^-a
  TrussResponse r;
  r.psi = p.eps * la * (la - 2.0);
  r.p = 2.0 * p.a * p.eps * la / lambda * (1.0 - la);
  // dP/dlambda = 2 eps a lambda^{-2(a+1)} [(2a+1) - (a+1) lambda^a]
  r.stiff = 2.0 * p.eps * p.a * la * la / (lambda * lambda) * ((2.0 * p.a + 1.0) - (p.a + 1.0) / la);
  return r;
}

double crosslink_peak_stretch(const CrosslinkParams& p) {
  return std::pow((2.0 * p.a + 1.0) / (p.a + 1.0), 1.0 / p.a);
}

double crosslink_pk2_peak_stretch(const CrosslinkParams& p) {
  return std::pow(2.0 * (p.a + 1.0) / (p.a + 2.0), 1.0 / p.a);
}

TrussResponse truss_response(double lambda, const TrussLaw& law) {
  return std::visit(
      [lambda](const auto& params) -> TrussResponse {
        using P = std::decay_t<decltype(params)>;
        if constexpr (std::is_same_v<P, CollagenParams>) {
          return collagen_response(lambda, params);
        } else {
          return crosslink_response(lambda, params);
        }
      },
      law);
}

CollagenParams apply_damage(CollagenParams params, DamageScaling damage) {
  damage.validate();
  params.k1 *= 1.0 - damage.d;
  return params;
}

CrosslinkParams apply_damage(CrosslinkParams params, DamageScaling damage) {
  damage.validate();
  params.eps *= 1.0 - damage.d;
  return params;
}

MatrixParams apply_damage(MatrixParams params, DamageScaling damage) {
  damage.validate();
  params.mu1 *= 1.0 - damage.d;
  params.mu2 *= 1.0 - damage.d;
  return params;
}

TrussLaw apply_damage(const TrussLaw& law, DamageScaling damage) {
  return std::visit([damage](const auto& params) -> TrussLaw { return apply_damage(params, damage); }, law);
}

ContinuumPointState ContinuumPointState::from_deformation_gradient(const Mat3& f) {
  const double j = f.determinant();
  if (!(j > 0.0)) throw DomainError("inverted deformation: det F <= 0");
  IsochoricKinematics<double> kin(f);
  return {f, j, kin.i1_bar, kin.i2_bar};
}

EnergyStress matrix_energy_stress(const ContinuumPointState& state, const MatrixParams& params) {
  if (!(state.j > 0.0)) throw InvertedElementError(-1, "det F <= 0");
  IsochoricKinematics<double> kin(state.f);
  EnergyStress out;
  out.energy = matrix_energy(kin, params);
  out.stress = state.f.inverse() * matrix_piola(kin, params);
  out.stress = 0.5 * (out.stress + out.stress.transpose()).eval();
  return out;
}

}  // namespace stroma
