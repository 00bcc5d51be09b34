#include "stroma/variance_material.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace stroma {

namespace {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

double gauss_kronrod(const std::function<double(double)>& f, double a, double b, double tol, int depth) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double kronrod = kKronrodWeights[7] * f(c);
  double gauss = kGaussWeights[3] * f(c);
  for (int i = 0; i < 7; ++i) {
    const double fx = f(c - h * kKronrodNodes[i]) + f(c + h * kKronrodNodes[i]);
    kronrod += kKronrodWeights[i] * fx;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * fx;
  }
  kronrod *= h;
  gauss *= h;
  if (std::abs(kronrod - gauss) <= tol || depth >= 50) return kronrod;
  return gauss_kronrod(f, a, c, 0.5 * tol, depth + 1) + gauss_kronrod(f, c, b, 0.5 * tol, depth + 1);
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  return gauss_kronrod(f, a, b, 1e-13, 0);
}

// Unnormalised density scaled by exp(-2b) so large concentrations do not overflow.
double raw_density(double t, double b) { return std::exp(2.0 * b * (t * t - 1.0)); }

// Z such that rho = raw / Z satisfies (1/2) int_{-1}^{1} rho dt = 1.
double normaliser(double b) {
  return integrate([b](double t) { return raw_density(t, b); }, 0.0, 1.0);
}

struct GaussLegendre {
  std::vector<double> x;
  std::vector<double> w;
};

const GaussLegendre& gauss_legendre(int n) {
  static std::mutex m;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard lock(m);
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  GaussLegendre g;
  g.x.resize(n);
  g.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    g.x[i] = x;
    g.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(g)).first->second;
}

// Fourth moment of a family whose mean direction is e3.
Eigen::Matrix<double, 9, 9> local_fourth_moment(double b, SphereRule rule) {
  const GaussLegendre& gl = gauss_legendre(rule.n_theta);
  const double half_pi = 0.5 * std::numbers::pi;
  Eigen::Matrix<double, 9, 9> q = Eigen::Matrix<double, 9, 9>::Zero();
  double total = 0.0;
  Eigen::Matrix<double, 9, 1> aa;
  for (int i = 0; i < rule.n_theta; ++i) {
    // Theta in [0, pi/2]; the opposite hemisphere contributes identically.
    const double theta = half_pi * 0.5 * (gl.x[i] + 1.0);
    const double wt = half_pi * 0.5 * gl.w[i] * raw_density(std::cos(theta), b) * std::sin(theta);
    for (int k = 0; k < rule.n_phi; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / rule.n_phi;
      const Vec3 a(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
      for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s) aa(3 * r + s) = a(r) * a(s);
      q.noalias() += wt * aa * aa.transpose();
      total += wt;
    }
  }
  return q / total;
}

Eigen::Matrix<double, 9, 9> converged_local_moment(double b, SphereRule rule) {
  static std::mutex m;
  static std::map<std::tuple<double, int, int>, Eigen::Matrix<double, 9, 9>> cache;
  const auto key = std::make_tuple(b, rule.n_theta, rule.n_phi);
  {
    std::lock_guard lock(m);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  Eigen::Matrix<double, 9, 9> coarse = local_fourth_moment(b, rule);
  SphereRule current = rule;
  while (true) {
    const SphereRule finer{2 * current.n_theta, 2 * current.n_phi};
    const Eigen::Matrix<double, 9, 9> fine = local_fourth_moment(b, finer);
    if ((fine - coarse).cwiseAbs().maxCoeff() < 1e-12) {
      std::lock_guard lock(m);
      cache.emplace(key, fine);
      return fine;
    }
    if (finer.n_theta >= 2048) throw Error("fourth-order orientation average did not converge");
    coarse = fine;
    current = finer;
  }
}

}  // namespace

double vonmises_density(double cos_theta, double b) {
  if (!(b >= 0.0)) throw DomainError("von Mises concentration must be non-negative");
  return raw_density(cos_theta, b) / normaliser(b);
}

double kappa_from_vonmises(double b) {
  if (!(b >= 0.0)) throw DomainError("von Mises concentration must be non-negative");
  if (b == 0.0) return 1.0 / 3.0;
  const double num = integrate([b](double t) { return raw_density(t, b) * (1.0 - t * t); }, 0.0, 1.0);
  return 0.5 * num / normaliser(b);
}

double vonmises_from_kappa(double kappa) {
  if (!(kappa > 0.0) || kappa > 1.0 / 3.0 + 1e-15) throw DomainError("kappa must lie in (0, 1/3]");
  if (kappa >= 1.0 / 3.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (kappa_from_vonmises(hi) > kappa) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw DomainError("kappa too small to invert");
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kappa_from_vonmises(mid) > kappa ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double FibrilFamily::kappa() const { return kappa_from_vonmises(b); }

void FibrilFamily::validate() const {
  if (!(k1m >= 0.0)) throw DomainError("fibril family k1 must be non-negative");
  if (!(k2m > 0.0)) throw DomainError("fibril family k2 must be positive");
  if (!(b >= 0.0)) throw DomainError("fibril family concentration b must be non-negative");
  if (std::abs(a0.norm() - 1.0) > 1e-9) throw DomainError("fibril mean direction must be a unit vector");
}

StructureTensors structure_tensors(const FibrilFamily& family, SphereRule rule) {
  family.validate();
  StructureTensors out;
  out.kappa = family.kappa();
  const Mat3 a0a0 = family.a0 * family.a0.transpose();
  out.h = out.kappa * Mat3::Identity() + (1.0 - 3.0 * out.kappa) * a0a0;

  // Rotate the e3-aligned average onto a0: Q = (R (x) R) Q' (R (x) R)^T.
  const Vec3 helper = std::abs(family.a0.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  Mat3 r;
  r.col(0) = family.a0.cross(helper).normalized();
  r.col(1) = family.a0.cross(r.col(0));
  r.col(2) = family.a0;
  Eigen::Matrix<double, 9, 9> rr;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) rr(3 * i + j, 3 * p + q) = r(i, p) * r(j, q);
  out.q = rr * converged_local_moment(family.b, rule) * rr.transpose();
  return out;
}

FamilyTensors make_family_tensors(const FibrilFamily& family, bool tension_only) {
  return {family.k1m, family.k2m, structure_tensors(family), tension_only};
}

VarianceParams apply_damage(VarianceParams params, DamageScaling damage) {
  params.matrix = apply_damage(params.matrix, damage);
  for (FibrilFamily& fam : params.families) fam.k1m *= 1.0 - damage.d;
  return params;
}

EnergyStress variance_energy_stress(const Mat3& f, const MatrixParams& matrix,
                                    const std::vector<FamilyTensors>& families,
                                    std::vector<VarianceEval>* per_family) {
  if (!(f.determinant() > 0.0)) throw InvertedElementError(-1, "det F <= 0");
  const IsochoricKinematics<double> kin(f);
  double energy = matrix_energy(kin, matrix);
  Mat3 piola = matrix_piola(kin, matrix);
  if (per_family) per_family->clear();
  for (const FamilyTensors& fam : families) {
    const auto terms = variance_family(kin, fam);
    energy += terms.energy;
    piola += terms.piola;
    if (per_family) {
      const double e = terms.i4_star - 1.0;
      per_family->push_back({terms.i4_star, terms.sigma2, fam.k2m + 2.0 * fam.k2m * fam.k2m * e * e,
                             terms.energy});
    }
  }
  EnergyStress out;
  out.energy = energy;
  const Mat3 s = f.inverse() * piola;
  out.stress = 0.5 * (s + s.transpose());
  return out;
}

}  // namespace stroma
