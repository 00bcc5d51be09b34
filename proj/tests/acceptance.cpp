// Acceptance run: one PASS/FAIL line per criterion, exit status = number of failures.

#include "stroma/verification.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

using namespace stroma;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void criterion(const std::string& id, const std::string& title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string detail = o.detail + fmt("; %.1f s (budget %.0f s)", secs, budget_s);
  if (secs > budget_s) {
    o.passed = false;
    detail += " over budget";
  }
  if (!o.passed) ++failures;
  std::printf("[%s] %s %s: %s\n", o.passed ? "PASS" : "FAIL", id.c_str(), title.c_str(), detail.c_str());
  std::fflush(stdout);
}

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

double apex_at_15(const MeshSpec& spec) {
  const ScenarioResult r = run_inflation(CorneaGeometry::healthy(), spec, MaterialSet{}, LoadProgram{0.0, 15.0, 5},
                                         ScenarioSettings{});
  return r.steps.back().apex_displacement;
}

}  // namespace

int main() {
  criterion("AC1", "constitutive oracles", 1.0, [] {
    const LawCheck c = check_truss_laws(1000, 11);
    const double formula = crosslink_pk2_peak_stretch(CrosslinkParams{});
    const double peak_rel = std::abs(c.argmax_p - formula) / formula;
    const bool derivs = c.max_rel_p < 1e-6 && c.max_rel_stiff < 1e-6;
    return Outcome{derivs && peak_rel < 1e-6,
                   fmt("P vs dpsi %.2e, A vs dP %.2e; argmax P %.7f vs closed form %.7f (rel %.2e); "
                       "argmax P/lambda %.7f",
                       c.max_rel_p, c.max_rel_stiff, c.argmax_p, formula, peak_rel, c.argmax_pk2)};
  });

  criterion("AC2", "truss tangent blocks", 1.0, [] {
    const TrussTangentCheck c = check_truss_tangent(1000, 12);
    return Outcome{c.max_rel < 1e-6 && c.blocks_exact,
                   fmt("max rel %.2e, block identities %s", c.max_rel, c.blocks_exact ? "exact" : "broken")};
  });

  criterion("AC3", "hexahedron element", 5.0, [] {
    const HexCheck c = check_hex_element(13);
    return Outcome{c.patch_error < 1e-8 && c.tangent_rel < 1e-5 && c.rotation_rel < 1e-10,
                   fmt("patch %.2e mm, tangent %.2e, rotation %.2e", c.patch_error, c.tangent_rel, c.rotation_rel)};
  });

  criterion("AC4", "mesh counts", 1.0, [] {
    const Mesh m = generate_mesh(CorneaGeometry::healthy(), MeshSpec{24, 3});
    bool rejected = false;
    try {
      generate_mesh(CorneaGeometry::healthy(), MeshSpec{24, 4});
    } catch (const MeshError&) {
      rejected = true;
    }
    return Outcome{m.node_count() == 2500 && m.hex_count() == 1728 && rejected,
                   fmt("24x3: %d nodes, %d hexes; N_L = 4 %s", int(m.node_count()), int(m.hex_count()),
                       rejected ? "rejected" : "accepted")};
  });

  criterion("AC5", "Newton vs dynamic relaxation", 120.0, [] {
    ScenarioSettings s;
    const LoadProgram load{0.0, 15.0, 3};
    const ScenarioResult nr = run_inflation(CorneaGeometry::healthy(), MeshSpec{6, 3}, MaterialSet{}, load, s);
    s.method = SolverMethod::DynamicRelaxation;
    const ScenarioResult dr = run_inflation(CorneaGeometry::healthy(), MeshSpec{6, 3}, MaterialSet{}, load, s);
    const double scale = nr.displacement().cwiseAbs().maxCoeff();
    const double diff = (nr.positions - dr.positions).cwiseAbs().maxCoeff() / scale;
    const double limit = 10.0 * s.solve.tolerance;
    return Outcome{diff <= limit, fmt("max |u_NR - u_DR| / max |u_NR| = %.2e (limit %.0e)", diff, limit)};
  });

  criterion("AC6", "inflation properties 26x3", 600.0, [] {
    const ScenarioResult r = run_inflation(CorneaGeometry::healthy(), MeshSpec{26, 3}, MaterialSet{},
                                           LoadProgram{0.0, 30.0, 30}, ScenarioSettings{});
    const auto& st = r.steps;
    bool monotone = true, stiffening = true;
    for (std::size_t k = 1; k < st.size(); ++k) monotone &= st[k].apex_displacement > st[k - 1].apex_displacement;
    const auto secant = [&](std::size_t k) {
      return (st[k].iop_mmhg - st[k - 1].iop_mmhg) / (st[k].apex_displacement - st[k - 1].apex_displacement);
    };
    const std::size_t half = (st.size() - 1) / 2;
    for (std::size_t k = half + 2; k < st.size(); ++k) stiffening &= secant(k) > secant(k - 1);
    double worst = 0.0;
    for (double j : r.model->gauss_jacobians(r.positions)) worst = std::max(worst, std::abs(j - 1.0));
    return Outcome{monotone && stiffening && worst < 0.05,
                   fmt("apex %.4f mm at 30 mmHg, monotone %s, upper-half secant increasing %s, max |J-1| %.2e",
                       st.back().apex_displacement, monotone ? "yes" : "no", stiffening ? "yes" : "no", worst)};
  });

  criterion("AC7", "unit-cell shape-factor ordering", 60.0, [] {
    std::vector<std::vector<UnitCellPoint>> curves;
    for (double f : {0.5, 1.0, 2.0}) {
      UnitCellSpec cell;
      cell.shape_factor = f;
      cell.steps = 10;
      curves.push_back(run_unit_cell_equibiaxial(cell, MaterialSet{}));
    }
    bool ordered = true;
    for (std::size_t k = 1; k < curves[0].size(); ++k)
      ordered &= curves[0][k].in_plane() > curves[1][k].in_plane() && curves[1][k].in_plane() > curves[2][k].in_plane();
    return Outcome{ordered, fmt("in-plane stretch at %.3f N: f=0.5 %.5f, f=1 %.5f, f=2 %.5f (need decreasing)",
                                curves[0].back().force, curves[0].back().in_plane(), curves[1].back().in_plane(),
                                curves[2].back().in_plane())};
  });

  criterion("AC8", "discretisation consistency", 900.0, [] {
    const MeshSpec a{20, 5}, b{28, 7};
    const double fa = shape_factors(generate_mesh(CorneaGeometry::healthy(), a)).mean_f;
    const double fb = shape_factors(generate_mesh(CorneaGeometry::healthy(), b)).mean_f;
    const double ua = apex_at_15(a), ub = apex_at_15(b);
    const double df = rel_gap(fa, fb), du = rel_gap(ua, ub);
    return Outcome{df < 0.02 && du < 0.05, fmt("20x5 f=%.4f apex %.5f mm, 28x7 f=%.4f apex %.5f mm; f gap %.2f%%, "
                                               "apex gap %.2f%% (limit 5%%)",
                                               fa, ua, fb, ub, 100 * df, 100 * du)};
  });

  criterion("AC9", "keratoconus suite 26x3", 1800.0, [] {
    const CorneaGeometry g = CorneaGeometry::healthy();
    const MeshSpec spec{26, 3};
    const LoadProgram load{0.0, 15.0, 5};
    const DamageField damage;
    ScenarioSettings s;
    const ScenarioResult healthy = run_inflation(g, spec, MaterialSet{}, load, s);
    const ScenarioResult kc = run_keratoconus(g, spec, MaterialSet{}, damage, load, s);
    s.model = ConstitutiveModel::VarianceBased;
    const ScenarioResult vb = run_keratoconus(g, spec, MaterialSet{}, damage, load, s);

    const Mesh& mesh = kc.model->mesh;
    const Vec3 bulge = mesh.node(bulge_apex_node(kc));
    const bool a = bulge.y() < 0.0 && damage.contains(bulge.x(), bulge.y());
    const double u_kc = kc.steps.back().apex_displacement, u_h = healthy.steps.back().apex_displacement;
    const bool b = u_kc > u_h;
    const Profile p = extract_profile(kc, Meridian::SI);
    const Vec3 thin = extract_profile(mesh, mesh.nodes, Meridian::SI).anterior[p.min_index];
    const bool c = damage.contains(thin.x(), thin.y());
    const double u_vb = vb.steps.back().apex_displacement;
    const double gap = (u_kc - u_vb) / u_vb;
    const bool d = gap >= 0.02 && gap <= 0.15;
    return Outcome{a && b && c && d,
                   fmt("(a) bulge at (%.2f, %.2f) %s; (b) apex %.5f vs healthy %.5f mm %s; "
                       "(c) thinnest %.4f mm at y=%.2f %s; (d) CM %.5f vs VB %.5f mm, gap %+.2f%% (target 2..15%%) %s",
                       bulge.x(), bulge.y(), a ? "ok" : "no", u_kc, u_h, b ? "ok" : "no", p.min_thickness, thin.y(),
                       c ? "ok" : "no", u_kc, u_vb, 100 * gap, d ? "ok" : "no")};
  });

  criterion("AC10", "variance-model suite", 60.0, [] {
    const VarianceCheck c = check_variance_model(100, 17);
    return Outcome{c.kappa0_error < 1e-8 && c.trace_h_error < 1e-12 && c.sigma2_identity < 1e-12 &&
                       c.sigma2_aligned < 1e-12 && c.energy_rel < 1e-6,
                   fmt("kappa0 %.1e, trace H %.1e, sigma2(I) %.1e, sigma2(aligned) %.1e, energy %.2e", c.kappa0_error,
                       c.trace_h_error, c.sigma2_identity, c.sigma2_aligned, c.energy_rel)};
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures;
}
