#pragma once

#include "stroma/scenarios.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace stroma {

/// Fourth-order central difference step shared by the checks.
double fd_step(double scale);

struct LawCheck {
  double max_rel_p = 0.0;      ///< P vs d psi / d lambda
  double max_rel_stiff = 0.0;  ///< A vs dP / d lambda
  double argmax_p = 0.0;       ///< numerical argmax of the crosslink P
  double argmax_pk2 = 0.0;     ///< numerical argmax of P / lambda
  double peak_rel = 0.0;       ///< argmax_p vs crosslink_peak_stretch
  double pk2_peak_rel = 0.0;   ///< argmax_pk2 vs crosslink_pk2_peak_stretch
};

/// Random stretches in [0.8, 1.2] for the collagen and crosslink laws.
LawCheck check_truss_laws(int samples, std::uint64_t seed);

struct TrussTangentCheck {
  double max_rel = 0.0;  ///< max over samples of |K - K_fd|_max / |K|_max
  bool blocks_exact = true;
};

TrussTangentCheck check_truss_tangent(int samples, std::uint64_t seed);

struct HexCheck {
  double patch_error = 0.0;   ///< [mm] interior node vs affine solution
  double tangent_rel = 0.0;   ///< element tangent vs FD of forces
  double rotation_rel = 0.0;  ///< energy change under a rigid rotation
};

/// Runs the three element checks with and without a dispersed fibril family.
HexCheck check_hex_element(std::uint64_t seed);

/// Follower-load stiffness vs FD of the facet forces on a warped facet.
double check_pressure_tangent(std::uint64_t seed);

/// Reduced system tangent vs FD of the reduced residual on a small cornea under pressure.
double check_system_tangent(ConstitutiveModel model, LimbusMode limbus, std::uint64_t seed);

struct VarianceCheck {
  double kappa0_error = 0.0;       ///< |kappa(b=0) - 1/3|
  double trace_h_error = 0.0;      ///< max |tr H - 1|
  double sigma2_identity = 0.0;    ///< max |sigma^2| at C-bar = I
  double sigma2_aligned = 0.0;     ///< |sigma^2| with perfectly aligned fibrils
  double energy_rel = 0.0;         ///< vs brute-force sphere integration
};

/// Random concentrations, directions and isochoric states.
VarianceCheck check_variance_model(int samples, std::uint64_t seed);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool passed = false;
};

/// Every verification with its tolerance: FD tangent checks and oracle comparisons.
std::vector<CheckResult> run_verification_suite();

}  // namespace stroma
