#include "stroma/verification.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace stroma {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Vec3 random_unit(Rng& rng) {
  std::normal_distribution<double> n;
  Vec3 v;
  do v = Vec3(n(rng), n(rng), n(rng));
  while (v.norm() < 1e-3);
  return v.normalized();
}

Mat3 random_rotation(Rng& rng) {
  return Eigen::AngleAxisd(uniform(rng, 0.0, 2.0 * std::numbers::pi), random_unit(rng)).toRotationMatrix();
}

Mat3 random_deformation(Rng& rng, double amplitude) {
  Mat3 f;
  do {
    f = Mat3::Identity();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) f(i, j) += uniform(rng, -amplitude, amplitude);
  } while (f.determinant() < 0.5);
  return f;
}

// Fourth-order central difference of a vector function along one coordinate.
Eigen::VectorXd central_difference(const std::function<Eigen::VectorXd(double)>& g, double h) {
  return (-g(2 * h) + 8.0 * g(h) - 8.0 * g(-h) + g(-2 * h)) / (12.0 * h);
}

double rel_max(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ref) {
  const double scale = ref.cwiseAbs().maxCoeff();
  return scale > 0.0 ? (a - ref).cwiseAbs().maxCoeff() / scale : (a - ref).cwiseAbs().maxCoeff();
}

double rel_scalar(double a, double ref) { return std::abs(a - ref) / std::max(std::abs(ref), 1e-300); }

HexNodes unit_hex(double size) {
  HexNodes x;
  x << 0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 0, 0, 1, 1, 0, 1, 1, 1, 1, 0, 1, 1;
  return size * x;
}

HexMaterial test_material(Rng& rng, bool with_family) {
  HexMaterial m;
  if (with_family) {
    FibrilFamily fam;
    fam.a0 = random_unit(rng);
    fam.b = uniform(rng, 0.5, 4.0);
    m.families.push_back(make_family_tensors(fam));
  }
  return m;
}

// Gauss-Legendre nodes on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

// H and Q by direct quadrature over the whole sphere in the global frame.
StructureTensors brute_force_tensors(const Vec3& a0, double b) {
  constexpr int kTheta = 160, kPhi = 320;
  static const auto rule = [] {
    std::pair<std::vector<double>, std::vector<double>> r;
    gauss_legendre(kTheta, r.first, r.second);
    return r;
  }();
  const auto& [gx, gw] = rule;
  StructureTensors t;
  t.h.setZero();
  t.q.setZero();
  double total = 0.0;
  for (int i = 0; i < kTheta; ++i) {
    const double ct = gx[i], st = std::sqrt(1.0 - ct * ct);
    for (int k = 0; k < kPhi; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / kPhi;
      const Vec3 a(st * std::cos(phi), st * std::sin(phi), ct);
      const double c = a.dot(a0);
      const double wgt = gw[i] * std::exp(2.0 * b * (c * c - 1.0));
      const Mat3 aa = a * a.transpose();
      const Eigen::Map<const Eigen::Matrix<double, 9, 1>> v(aa.data());
      t.h += wgt * aa;
      t.q += wgt * v * v.transpose();
      total += wgt;
    }
  }
  t.h /= total;
  t.q /= total;
  t.kappa = (1.0 - a0.dot(t.h * a0)) / 2.0;
  return t;
}

// Dense scan followed by golden-section refinement.
double argmax(const std::function<double(double)>& f, double lo, double hi) {
  constexpr int kScan = 10000;
  int best = 0;
  for (int i = 1; i <= kScan; ++i)
    if (f(lo + (hi - lo) * i / kScan) > f(lo + (hi - lo) * best / kScan)) best = i;
  double a = lo + (hi - lo) * std::max(best - 1, 0) / kScan;
  double b = lo + (hi - lo) * std::min(best + 1, kScan) / kScan;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  while (b - a > 1e-13) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    (f(c) > f(d) ? b : a) = (f(c) > f(d) ? d : c);
  }
  return 0.5 * (a + b);
}

double anisotropic_energy(const Mat3& f, const FamilyTensors& fam) {
  std::vector<VarianceEval> per;
  variance_energy_stress(f, MatrixParams{}, {fam}, &per);
  return per.front().psi_aniso;
}

}  // namespace

double fd_step(double scale) { return 1e-5 * scale; }

LawCheck check_truss_laws(int samples, std::uint64_t seed) {
  Rng rng(seed);
  LawCheck out;
  const CollagenParams col;
  const CrosslinkParams xl;
  const std::array<TrussLaw, 2> laws{TrussLaw(col), TrussLaw(xl)};
  for (int s = 0; s < samples; ++s) {
    const double lam = uniform(rng, 0.8, 1.2);
    const double h = fd_step(lam);
    for (const TrussLaw& law : laws) {
      const TrussResponse r = truss_response(lam, law);
      auto psi = [&](double d) { return Eigen::VectorXd::Constant(1, truss_response(lam + d, law).psi); };
      auto p = [&](double d) { return Eigen::VectorXd::Constant(1, truss_response(lam + d, law).p); };
      out.max_rel_p = std::max(out.max_rel_p, rel_scalar(central_difference(psi, h)(0), r.p));
      out.max_rel_stiff = std::max(out.max_rel_stiff, rel_scalar(central_difference(p, h)(0), r.stiff));
    }
  }
  out.argmax_p = argmax([&](double l) { return crosslink_response(l, xl).p; }, 1.0, 1.5);
  out.argmax_pk2 = argmax([&](double l) { return crosslink_response(l, xl).p / l; }, 1.0, 1.5);
  out.peak_rel = rel_scalar(out.argmax_p, crosslink_peak_stretch(xl));
  out.pk2_peak_rel = rel_scalar(out.argmax_pk2, crosslink_pk2_peak_stretch(xl));
  return out;
}

TrussTangentCheck check_truss_tangent(int samples, std::uint64_t seed) {
  Rng rng(seed);
  TrussTangentCheck out;
  for (int s = 0; s < samples; ++s) {
    const Vec3 xa_ref(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
    const double big_l = uniform(rng, 0.1, 1.0);
    const Vec3 xb_ref = xa_ref + big_l * random_unit(rng);
    const double lam = uniform(rng, 0.8, 1.2);
    const Vec3 xa = xa_ref + Vec3(uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5));
    const Vec3 xb = xa + lam * big_l * random_unit(rng);
    const TrussLaw law = (s % 2 == 0) ? TrussLaw(CollagenParams{}) : TrussLaw(CrosslinkParams{});
    const double area = uniform(rng, 0.005, 0.02);

    const TrussElementEval e = truss_eval(xa_ref, xb_ref, xa, xb, law, area);
    Eigen::Matrix<double, 6, 6> k;
    k << e.k_aa, e.k_ab, e.k_ba, e.k_bb;
    Eigen::Matrix<double, 6, 6> k_fd;
    const double h = fd_step(big_l);
    for (int c = 0; c < 6; ++c) {
      auto forces = [&](double d) {
        Vec3 pa = xa, pb = xb;
        (c < 3 ? pa : pb)(c % 3) += d;
        const TrussElementEval ed = truss_eval(xa_ref, xb_ref, pa, pb, law, area);
        Eigen::VectorXd f(6);
        f << ed.t_a, ed.t_b;
        return f;
      };
      k_fd.col(c) = central_difference(forces, h);
    }
    out.max_rel = std::max(out.max_rel, rel_max(k, k_fd));
    if (e.k_ab != -e.k_aa || e.k_ba != -e.k_aa || e.k_bb != e.k_aa) out.blocks_exact = false;
  }
  return out;
}

HexCheck check_hex_element(std::uint64_t seed) {
  Rng rng(seed);
  HexCheck out;
  for (bool with_family : {false, true}) {
    const HexMaterial mat = test_material(rng, with_family);

    // Patch test: eight distorted hexes around one interior node, boundary on an affine field.
    {
      Eigen::Matrix3Xd ref(3, 27);
      auto id = [](int i, int j, int k) { return (k * 3 + j) * 3 + i; };
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j)
          for (int i = 0; i < 3; ++i) ref.col(id(i, j, k)) = 0.5 * Vec3(i, j, k);
      const int centre = id(1, 1, 1);
      ref.col(centre) += Vec3(0.06, -0.04, 0.03);
      const Mat3 f0 = random_deformation(rng, 0.05);
      const Vec3 c0(0.1, -0.2, 0.05);
      Eigen::Matrix3Xd x = (f0 * ref).colwise() + c0;
      const Vec3 exact = x.col(centre);
      x.col(centre) += Vec3(0.01, -0.02, 0.015);

      std::vector<std::array<int, 8>> hexes;
      std::vector<HexReference> refs;
      for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j)
          for (int i = 0; i < 2; ++i) {
            const std::array<int, 8> n{id(i, j, k),         id(i + 1, j, k),     id(i + 1, j + 1, k),
                                       id(i, j + 1, k),     id(i, j, k + 1),     id(i + 1, j, k + 1),
                                       id(i + 1, j + 1, k + 1), id(i, j + 1, k + 1)};
            HexNodes r;
            for (int a = 0; a < 8; ++a) r.row(a) = ref.col(n[a]).transpose();
            hexes.push_back(n);
            refs.push_back(HexReference::build(r));
          }
      for (int it = 0; it < 30; ++it) {
        Vec3 res = Vec3::Zero();
        Mat3 kcc = Mat3::Zero();
        for (std::size_t e = 0; e < hexes.size(); ++e) {
          HexNodes cur;
          for (int a = 0; a < 8; ++a) cur.row(a) = x.col(hexes[e][a]).transpose();
          const HexElementEval ev = hex_eval(refs[e], cur, mat);
          for (int a = 0; a < 8; ++a)
            if (hexes[e][a] == centre) {
              res += ev.forces.segment<3>(3 * a);
              kcc += ev.tangent.block<3, 3>(3 * a, 3 * a);
            }
        }
        const Vec3 dx = kcc.lu().solve(-res);
        x.col(centre) += dx;
        if (dx.norm() < 1e-15) break;
      }
      out.patch_error = std::max(out.patch_error, (x.col(centre) - exact).norm());
    }

    // Tangent against finite differences of the forces.
    {
      HexNodes ref = unit_hex(0.4);
      for (int a = 0; a < 8; ++a)
        for (int c = 0; c < 3; ++c) ref(a, c) += uniform(rng, -0.04, 0.04);
      const Mat3 f0 = random_deformation(rng, 0.08);
      HexNodes cur = ref * f0.transpose();
      for (int a = 0; a < 8; ++a)
        for (int c = 0; c < 3; ++c) cur(a, c) += uniform(rng, -0.01, 0.01);
      const HexReference hr = HexReference::build(ref);
      const HexMatrix k = hex_eval(hr, cur, mat).tangent;
      HexMatrix k_fd;
      for (int c = 0; c < 24; ++c) {
        auto forces = [&](double d) {
          HexNodes p = cur;
          p(c / 3, c % 3) += d;
          return Eigen::VectorXd(hex_eval(hr, p, mat, false).forces);
        };
        k_fd.col(c) = central_difference(forces, fd_step(0.4));
      }
      out.tangent_rel = std::max(out.tangent_rel, rel_max(k, k_fd));

      // Rigid rotation of the deformed element leaves the energy unchanged.
      const Mat3 rot = random_rotation(rng);
      const double w0 = hex_eval(hr, cur, mat, false).energy;
      const double w1 = hex_eval(hr, cur * rot.transpose(), mat, false).energy;
      out.rotation_rel = std::max(out.rotation_rel, rel_scalar(w1, w0));
    }
  }
  return out;
}

double check_pressure_tangent(std::uint64_t seed) {
  Rng rng(seed);
  FacetNodes facet;
  facet << 0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0;
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < 3; ++c) facet(a, c) += uniform(rng, -0.15, 0.15);
  const double iop = 0.002;
  const Eigen::Matrix<double, 12, 12> k = pressure_load_stiffness(facet, iop);
  Eigen::Matrix<double, 12, 12> k_fd;
  for (int c = 0; c < 12; ++c) {
    auto forces = [&](double d) {
      FacetNodes p = facet;
      p(c / 3, c % 3) += d;
      const FacetNodes f = pressure_nodal_forces(p, iop);
      Eigen::VectorXd v(12);
      for (int a = 0; a < 4; ++a) v.segment<3>(3 * a) = f.row(a).transpose();
      return v;
    };
    k_fd.col(c) = central_difference(forces, fd_step(1.0));
  }
  return rel_max(k, k_fd);
}

double check_system_tangent(ConstitutiveModel model, LimbusMode limbus, std::uint64_t seed) {
  Rng rng(seed);
  auto fe = build_cornea_model(CorneaGeometry::healthy(), MeshSpec{4, 3}, MaterialSet{}, model);
  StructuralSystem sys(*fe, apply_limbus_bc(fe->mesh, limbus));
  sys.set_pressure(mmhg_to_mpa(15.0));
  Eigen::VectorXd q(sys.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) q(i) = uniform(rng, -0.005, 0.005);
  const Eigen::MatrixXd k = Eigen::MatrixXd(sys.tangent(q));
  Eigen::MatrixXd k_fd(q.size(), q.size());
  for (Eigen::Index c = 0; c < q.size(); ++c) {
    auto residual = [&](double d) {
      Eigen::VectorXd qd = q, t, f;
      qd(c) += d;
      sys.forces(qd, t, f);
      return Eigen::VectorXd(t - f);
    };
    k_fd.col(c) = central_difference(residual, fd_step(1.0));
  }
  return rel_max(k, k_fd);
}

VarianceCheck check_variance_model(int samples, std::uint64_t seed) {
  Rng rng(seed);
  VarianceCheck out;
  out.kappa0_error = std::abs(kappa_from_vonmises(0.0) - 1.0 / 3.0);
  const IsochoricKinematics<double> identity(Mat3::Identity());
  for (int s = 0; s < samples; ++s) {
    FibrilFamily fam;
    fam.a0 = random_unit(rng);
    fam.b = uniform(rng, 0.0, 10.0);
    const FamilyTensors lib = make_family_tensors(fam);
    out.trace_h_error = std::max(out.trace_h_error, std::abs(lib.tensors.h.trace() - 1.0));
    out.sigma2_identity = std::max(out.sigma2_identity, std::abs(variance_family(identity, lib).sigma2));

    FamilyTensors brute = lib;
    brute.tensors = brute_force_tensors(fam.a0, fam.b);
    const Mat3 f = random_deformation(rng, 0.1);
    out.energy_rel = std::max(out.energy_rel, rel_scalar(anisotropic_energy(f, lib), anisotropic_energy(f, brute)));

    FamilyTensors aligned = lib;
    const Mat3 aa = fam.a0 * fam.a0.transpose();
    const Eigen::Map<const Eigen::Matrix<double, 9, 1>> v(aa.data());
    aligned.tensors.h = aa;
    aligned.tensors.q = v * v.transpose();
    const IsochoricKinematics<double> kin(f);
    out.sigma2_aligned = std::max(out.sigma2_aligned, std::abs(variance_family(kin, aligned).sigma2));
  }
  return out;
}

std::vector<CheckResult> run_verification_suite() {
  std::vector<CheckResult> out;
  auto add = [&](std::string name, double value, double limit) {
    out.push_back({std::move(name), value, limit, value <= limit});
  };
  auto oracle = [&](std::string name, double value, double expected, double rel) {
    add("oracle " + name, rel_scalar(value, expected), rel);
  };

  const LawCheck laws = check_truss_laws(1000, 1);
  add("collagen/crosslink P vs d psi/d lambda", laws.max_rel_p, 1e-6);
  add("collagen/crosslink stiffness vs dP/d lambda", laws.max_rel_stiff, 1e-6);
  add("crosslink argmax P", laws.peak_rel, 1e-6);
  add("crosslink argmax P/lambda", laws.pk2_peak_rel, 1e-6);

  const TrussTangentCheck truss = check_truss_tangent(1000, 2);
  add("truss tangent vs FD", truss.max_rel, 1e-6);
  add("truss block identities", truss.blocks_exact ? 0.0 : 1.0, 0.0);

  const HexCheck hex = check_hex_element(3);
  add("hex patch test [mm]", hex.patch_error, 1e-8);
  add("hex tangent vs FD", hex.tangent_rel, 1e-5);
  add("hex rotation invariance", hex.rotation_rel, 1e-10);
  add("pressure load stiffness vs FD", check_pressure_tangent(4), 1e-6);
  add("system tangent vs FD (coupled, orthogonality)",
      check_system_tangent(ConstitutiveModel::CoupledMultiscale, LimbusMode::OrthogonalityPreserving, 5), 1e-5);
  add("system tangent vs FD (variance, pinned)",
      check_system_tangent(ConstitutiveModel::VarianceBased, LimbusMode::PinnedMidsurface, 6), 1e-5);

  const VarianceCheck vb = check_variance_model(100, 7);
  add("kappa(b=0) = 1/3", vb.kappa0_error, 1e-8);
  add("trace H = 1", vb.trace_h_error, 1e-12);
  add("sigma^2 = 0 at C-bar = I", vb.sigma2_identity, 1e-12);
  add("sigma^2 = 0 for aligned fibrils", vb.sigma2_aligned, 1e-12);
  add("variance energy vs brute-force sphere", vb.energy_rel, 1e-6);

  const CorneaGeometry g;
  oracle("anterior sag (1,0)", biconic_sag(1.0, 0.0, g.anterior), 0.0659935466863675, 1e-10);
  oracle("posterior sag (0,1)", biconic_sag(0.0, 1.0, g.posterior), 0.0823723228995058, 1e-10);
  const TrussResponse col = collagen_response(1.005, CollagenParams{});
  oracle("collagen P(1.005)", col.p, 0.00994653826268083, 1e-10);
  oracle("collagen A(1.005)", col.stiff, 2.38716918304340, 1e-10);
  oracle("crosslink P(0.95)", crosslink_response(0.95, CrosslinkParams{}).p, -0.0619255154806615, 1e-10);
  oracle("crosslink A(0.95)", crosslink_response(0.95, CrosslinkParams{}).stiff, 1.93268642484879, 1e-10);
  oracle("crosslink peak stretch", crosslink_peak_stretch(CrosslinkParams{}), 1.10868341796872, 1e-10);
  oracle("crosslink P/lambda peak stretch", crosslink_pk2_peak_stretch(CrosslinkParams{}), 1.09775731930496, 1e-10);
  oracle("crosslink peak stress", crosslink_response(1.10868341796872, CrosslinkParams{}).p, 0.0268990089720472,
         1e-9);
  oracle("crosslink P(1.0977573)", crosslink_response(1.09775731930496, CrosslinkParams{}).p, 0.0267707211650818,
         1e-9);
  oracle("volumetric energy J=1.1", volumetric_energy(1.1, 5.0), 0.0242245504891878, 1e-10);
  {
    const double l = 1.2;
    const Mat3 f = Eigen::Vector3d(l, 1.0 / std::sqrt(l), 1.0 / std::sqrt(l)).asDiagonal();
    const ContinuumPointState st = ContinuumPointState::from_deformation_gradient(f);
    oracle("isochoric energy, uniaxial 1.2", matrix_energy_stress(st, MatrixParams{}).energy, 1.38888888888889e-5,
           1e-9);
  }
  const std::pair<double, double> kappas[] = {{0.5, 0.285384647086125}, {1.0, 0.234367721156734},
                                              {2.0, 0.147686703825447}, {5.0, 0.0536361192953746},
                                              {10.0, 0.0257226149543165}, {100.0, 0.00250632960581655}};
  for (const auto& [b, k] : kappas) oracle("kappa(b=" + std::to_string(b).substr(0, 5) + ")", kappa_from_vonmises(b), k, 1e-9);
  oracle("15 mmHg in MPa", mmhg_to_mpa(15.0), 0.00199983, 1e-12);
  oracle("element density", element_density(2.0, 0.4, 1e-3), 1.25e-5, 1e-12);
  {
    const TrussElementEval e =
        truss_eval(Vec3::Zero(), Vec3(0.4, 0, 0), Vec3::Zero(), Vec3(0.4, 0, 0), CollagenParams{}, 1.0 / 78.0);
    oracle("unstretched collagen alpha", e.alpha, 1.8 / 78.0 / 0.4, 1e-12);
  }
  {
    FacetNodes sq;
    sq << 0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0;
    oracle("flat facet nodal force", pressure_nodal_forces(sq, 0.002).col(2).maxCoeff(), 0.0005, 1e-12);
  }
  {
    const Mesh m = generate_mesh(CorneaGeometry::healthy(), MeshSpec{24, 3});
    add("mesh 24x3: 2500 nodes", std::abs(m.node_count() - 2500), 0.0);
    add("mesh 24x3: 1728 hexes", std::abs(m.hex_count() - 1728), 0.0);
    bool rejected = false;
    try {
      MeshSpec{24, 4}.validate();
    } catch (const MeshError&) {
      rejected = true;
    }
    add("even N_L rejected", rejected ? 0.0 : 1.0, 0.0);
  }
  return out;
}

}  // namespace stroma
