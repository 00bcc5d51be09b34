#include "stroma/elements.hpp"

#include <unsupported/Eigen/AutoDiff>

#include <array>
#include <cmath>

namespace stroma {

TrussElementEval truss_eval(const Vec3& xa_ref, const Vec3& xb_ref, const Vec3& xa, const Vec3& xb,
                            const TrussLaw& law, double area) {
  const double big_l = (xb_ref - xa_ref).norm();
  if (!(big_l > 0.0)) throw DomainError("truss reference length must be positive");
  const Vec3 d = xb - xa;
  TrussElementEval e;
  e.l = d.norm();
  if (!(e.l > 0.0)) throw DomainError("truss current length is zero; direction undefined");
  e.n = d / e.l;
  e.lambda = e.l / big_l;
  const TrussResponse r = truss_response(e.lambda, law);
  e.t_b = r.p * area * e.n;
  e.t_a = -e.t_b;
  e.alpha = r.stiff * area / big_l;
  e.beta = r.p * area / e.l;
  e.k_aa = (e.alpha - e.beta) * e.n * e.n.transpose() + e.beta * Mat3::Identity();
  e.k_bb = e.k_aa;
  e.k_ab = -e.k_aa;
  e.k_ba = -e.k_aa;
  e.energy = r.psi * area * big_l;
  return e;
}

namespace {

constexpr std::array<std::array<double, 3>, 8> kHexCorners = {{
    {-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
    {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1},
}};

struct Gauss1D {
  std::vector<double> x;
  std::vector<double> w;
};

Gauss1D gauss_1d(int order) {
  switch (order) {
    case 1: return {{0.0}, {2.0}};
    case 2: {
      const double a = 1.0 / std::sqrt(3.0);
      return {{-a, a}, {1.0, 1.0}};
    }
    case 3: {
      const double a = std::sqrt(0.6);
      return {{-a, 0.0, a}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
    }
    default: throw DomainError("Gauss rule order must be 1, 2 or 3");
  }
}

// Maps the 24-vector of nodal positions to vec(F) (row-major, 3i+J).
Eigen::Matrix<double, 9, 24> gradient_operator(const Eigen::Matrix<double, 8, 3>& dn) {
  Eigen::Matrix<double, 9, 24> b = Eigen::Matrix<double, 9, 24>::Zero();
  for (int a = 0; a < 8; ++a)
    for (int i = 0; i < 3; ++i)
      for (int jj = 0; jj < 3; ++jj) b(3 * i + jj, 3 * a + i) = dn(a, jj);
  return b;
}

HexElementEval hex_forces(const HexReference& ref, const HexNodes& cur, const HexMaterial& material,
                          int element) {
  HexElementEval out;
  const std::size_t ng = ref.weight.size();
  out.gauss_j.resize(ng);
  out.gauss_energy.resize(ng);
  for (std::size_t g = 0; g < ng; ++g) {
    const Mat3 f = cur.transpose() * ref.dn_dx[g];
    const double j = f.determinant();
    out.gauss_j[g] = j;
    if (!(j > 0.0)) throw InvertedElementError(element, "det F <= 0 at Gauss point " + std::to_string(g));
    double psi = 0.0;
    const Mat3 p = material_piola<double>(f, material, psi);
    out.gauss_energy[g] = psi;
    out.energy += psi * ref.weight[g];
    // f_a = P dN_a/dX w
    const Eigen::Matrix<double, 8, 3> fa = ref.dn_dx[g] * p.transpose() * ref.weight[g];
    for (int a = 0; a < 8; ++a) out.forces.segment<3>(3 * a) += fa.row(a).transpose();
  }
  return out;
}

}  // namespace

Eigen::Matrix<double, 8, 1> hex_shape(const Vec3& xi) {
  Eigen::Matrix<double, 8, 1> n;
  for (int a = 0; a < 8; ++a) {
    const auto& c = kHexCorners[a];
    n(a) = 0.125 * (1 + c[0] * xi(0)) * (1 + c[1] * xi(1)) * (1 + c[2] * xi(2));
  }
  return n;
}

Eigen::Matrix<double, 8, 3> hex_shape_derivatives(const Vec3& xi) {
  Eigen::Matrix<double, 8, 3> d;
  for (int a = 0; a < 8; ++a) {
    const auto& c = kHexCorners[a];
    const double s0 = 1 + c[0] * xi(0), s1 = 1 + c[1] * xi(1), s2 = 1 + c[2] * xi(2);
    d(a, 0) = 0.125 * c[0] * s1 * s2;
    d(a, 1) = 0.125 * c[1] * s0 * s2;
    d(a, 2) = 0.125 * c[2] * s0 * s1;
  }
  return d;
}

HexReference HexReference::build(const HexNodes& ref, GaussRule rule, int element) {
  const Gauss1D g = gauss_1d(rule.order);
  HexReference out;
  const int n = static_cast<int>(g.x.size());
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Eigen::Matrix<double, 8, 3> dxi = hex_shape_derivatives(Vec3(g.x[i], g.x[j], g.x[k]));
        const Mat3 jac = ref.transpose() * dxi;  // dX_i/dxi_k
        const double det = jac.determinant();
        if (!(det > 0.0)) throw InvertedElementError(element, "non-positive reference Jacobian");
        out.dn_dx.push_back(dxi * jac.inverse());
        out.weight.push_back(det * g.w[i] * g.w[j] * g.w[k]);
        out.volume += out.weight.back();
      }
  return out;
}

Eigen::Matrix<double, 9, 9> material_tangent(const Mat3& f, const HexMaterial& m) {
  using Deriv = Eigen::Matrix<double, 9, 1>;
  using Ad = Eigen::AutoDiffScalar<Deriv>;
  Tensor2<Ad> fa;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) fa(i, j) = Ad(f(i, j), 9, 3 * i + j);
  Ad energy;
  const Tensor2<Ad> p = material_piola<Ad>(fa, m, energy);
  Eigen::Matrix<double, 9, 9> a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      // Derivative vectors of constant entries may be empty.
      const Deriv& d = p(i, j).derivatives();
      if (d.size() == 9) {
        a.row(3 * i + j) = d.transpose();
      } else {
        a.row(3 * i + j).setZero();
      }
    }
  return a;
}

HexElementEval hex_eval(const HexReference& ref, const HexNodes& cur, const HexMaterial& material,
                        bool with_tangent, HexTangentMode mode, int element) {
  HexElementEval out = hex_forces(ref, cur, material, element);
  if (!with_tangent) return out;

  if (mode == HexTangentMode::Consistent) {
    for (std::size_t g = 0; g < ref.weight.size(); ++g) {
      const Mat3 f = cur.transpose() * ref.dn_dx[g];
      const Eigen::Matrix<double, 9, 24> b = gradient_operator(ref.dn_dx[g]);
      out.tangent.noalias() += ref.weight[g] * b.transpose() * material_tangent(f, material) * b;
    }
    return out;
  }

  // Step scaled by element size.
  const double size = std::cbrt(ref.volume);
  const double h = 1e-6 * size;
  for (int c = 0; c < 24; ++c) {
    HexNodes plus = cur, minus = cur;
    plus(c / 3, c % 3) += h;
    minus(c / 3, c % 3) -= h;
    const HexVector fp = hex_forces(ref, plus, material, element).forces;
    const HexVector fm = hex_forces(ref, minus, material, element).forces;
    out.tangent.col(c) = (fp - fm) / (2.0 * h);
  }
  return out;
}

HexElementEval hex_eval(const HexNodes& ref, const HexNodes& cur, const MatrixParams& params, GaussRule rule) {
  params.validate();
  return hex_eval(HexReference::build(ref, rule), cur, HexMaterial{params, {}});
}

Eigen::Matrix<double, 8, 1> hex_lumped_mass(const HexNodes& ref, double rho) {
  if (!(rho > 0.0)) throw DomainError("mass density must be positive");
  const Gauss1D g = gauss_1d(2);
  Eigen::Matrix<double, 8, 1> m = Eigen::Matrix<double, 8, 1>::Zero();
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) {
        const Vec3 xi(g.x[i], g.x[j], g.x[k]);
        const double det = (ref.transpose() * hex_shape_derivatives(xi)).determinant();
        m += rho * det * g.w[i] * g.w[j] * g.w[k] * hex_shape(xi);
      }
  return m;
}

namespace {

struct FacetPoint {
  Eigen::Matrix<double, 4, 1> n;
  Eigen::Matrix<double, 4, 2> dn;
};

const std::array<FacetPoint, 4>& facet_points() {
  static const std::array<FacetPoint, 4> pts = [] {
    constexpr std::array<std::array<double, 2>, 4> corners = {{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}};
    const double a = 1.0 / std::sqrt(3.0);
    std::array<FacetPoint, 4> out;
    int idx = 0;
    for (double eta : {-a, a})
      for (double xi : {-a, a}) {
        FacetPoint& p = out[idx++];
        for (int c = 0; c < 4; ++c) {
          const double s = corners[c][0], t = corners[c][1];
          p.n(c) = 0.25 * (1 + s * xi) * (1 + t * eta);
          p.dn(c, 0) = 0.25 * s * (1 + t * eta);
          p.dn(c, 1) = 0.25 * t * (1 + s * xi);
        }
      }
    return out;
  }();
  return pts;
}

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return s;
}

void check_pressure(double iop) {
  if (!(iop >= 0.0)) throw DomainError("pressure must be non-negative");
}

}  // namespace

FacetNodes pressure_nodal_forces(const FacetNodes& facet, double iop) {
  check_pressure(iop);
  FacetNodes f = FacetNodes::Zero();
  double area = 0.0;
  for (const FacetPoint& p : facet_points()) {
    const Vec3 g1 = facet.transpose() * p.dn.col(0);
    const Vec3 g2 = facet.transpose() * p.dn.col(1);
    const Vec3 normal = g1.cross(g2);  // unit Gauss weights
    area += normal.norm();
    f += iop * p.n * normal.transpose();
  }
  if (!(area > 0.0)) throw DomainError("degenerate pressure facet (zero area)");
  return f;
}

Eigen::Matrix<double, 12, 12> pressure_load_stiffness(const FacetNodes& facet, double iop) {
  check_pressure(iop);
  Eigen::Matrix<double, 12, 12> k = Eigen::Matrix<double, 12, 12>::Zero();
  if (iop == 0.0) return k;
  for (const FacetPoint& p : facet_points()) {
    const Vec3 g1 = facet.transpose() * p.dn.col(0);
    const Vec3 g2 = facet.transpose() * p.dn.col(1);
    const Mat3 s1 = skew(g1), s2 = skew(g2);
    // d(g1 x g2) = -[g2]x dg1 + [g1]x dg2
    for (int b = 0; b < 4; ++b) {
      const Mat3 d = -p.dn(b, 0) * s2 + p.dn(b, 1) * s1;
      for (int a = 0; a < 4; ++a) k.block<3, 3>(3 * a, 3 * b) += iop * p.n(a) * d;
    }
  }
  return k;
}

}  // namespace stroma
