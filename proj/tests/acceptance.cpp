// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Optional arguments select criteria, e.g. "acceptance 5 6 8".

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fracext/analysis.hpp"
#include "fracext/coupling.hpp"
#include "fracext/quadrature.hpp"
#include "fracext/specfun.hpp"
#include "fracext/study.hpp"
#include "fracext/ydisc.hpp"

using namespace fracext;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

bool within(double v, double lo, double hi) { return std::isfinite(v) && v >= lo && v <= hi; }

double last_finite(const std::vector<ConvergenceRecord>& r, double ConvergenceRecord::*field) {
  for (auto it = r.rbegin(); it != r.rend(); ++it) {
    if (std::isfinite((*it).*field)) return (*it).*field;
  }
  return std::nan("");
}

const std::vector<Point> kSamples = {{0, 0}, {0.5, 0}, {1.5, 0}};

// Studies shared by criteria 1-3, run on first use.
std::map<double, StudyResult>& bump_studies() {
  static std::map<double, StudyResult> cache;
  if (cache.empty()) {
    for (double beta : {0.3, 0.5, 0.7}) {
      StudyConfig c;
      c.beta = beta;
      c.samples = kSamples;
      std::fprintf(stderr, "  running study beta=%.1f\n", beta);
      cache[beta] = run_convergence_study(c);
    }
  }
  return cache;
}

Outcome energy_rate() {
  Outcome o;
  for (auto& [beta, r] : bump_studies()) {
    const auto& rec = r.records;
    const double a = rec[rec.size() - 2].eoc_energy, b = rec.back().eoc_energy;
    o.check(within(a, 0.75, 1.6) && within(b, 0.75, 1.6),
            "beta=" + fmt("%.1f", beta) + " eoc " + fmt("%.4f", a) + ", " + fmt("%.4f", b));
  }
  return o;
}

Outcome trace_rate() {
  Outcome o;
  for (auto& [beta, r] : bump_studies()) {
    // The finest level is the reference, so the last defined eoc_l2 is level m_max - 1.
    const double e = last_finite(r.records, &ConvergenceRecord::eoc_l2);
    o.check(within(e, 1.5, 2.5), "beta=" + fmt("%.1f", beta) + " eoc_l2 " + fmt("%.4f", e));
  }
  return o;
}

Outcome oracle_agreement() {
  Outcome o;
  const auto& r = bump_studies().at(0.5);
  const int fine = r.records.back().level;
  for (const Point& x : kSamples) {
    std::vector<double> err;
    for (int m = fine - 2; m <= fine; ++m) {
      for (const auto& s : r.samples) {
        if (s.level == m && s.x.x == x.x && s.x.y == x.y) err.push_back(std::abs(s.value - s.reference) / std::abs(s.reference));
      }
    }
    const bool ok = err.size() == 3 && err[2] <= 0.05 && err[1] < err[0] && err[2] < err[1];
    o.check(ok, "r=" + fmt("%.1f", norm(x)) + " rel " + (err.size() == 3 ? fmt("%.2e", err[0]) + " > " +
                                                                             fmt("%.2e", err[1]) + " > " + fmt("%.2e", err[2])
                                                                       : std::string("missing")));
  }
  return o;
}

Outcome variable_coefficient() {
  Outcome o;
  StudyConfig c;
  c.beta = 0.5;
  c.coefficient = CoefficientChoice::radial;
  c.source = SourceChoice::paper;
  std::fprintf(stderr, "  running variable-coefficient study\n");
  const auto r = run_convergence_study(c);
  const double e = r.records.back().eoc_energy;
  o.check(within(e, 0.75, 1.6), "eoc " + fmt("%.4f", e));
  return o;
}

Outcome bem_oracle() {
  Outcome o;
  double worst_v = 0.0, worst_w = 0.0, worst_ratio = 1e300;
  for (double mu : {0.5, 1.0, 4.0}) {
    const double k = std::sqrt(mu);
    const auto b1 = circle_boundary(1.0, 128), b2 = circle_boundary(1.0, 256);
    const auto o1 = assemble_operators(b1, k), o2 = assemble_operators(b2, k);
    for (int n = 0; n <= 4; ++n) {
      const auto e = circle_symbols(k, 1.0, n);
      const auto q1 = mode_quotients(b1, o1, n), q2 = mode_quotients(b2, o2, n);
      const double v1 = std::abs(q1.V / e.V - 1), v2 = std::abs(q2.V / e.V - 1);
      worst_v = std::max(worst_v, v2);
      worst_w = std::max(worst_w, std::abs(q2.W / e.W - 1));
      worst_ratio = std::min(worst_ratio, v1 / v2);
    }
  }
  o.check(worst_v <= 1e-2, "max V err " + fmt("%.2e", worst_v));
  o.check(worst_w <= 3e-2, "max W err " + fmt("%.2e", worst_w));
  o.check(worst_ratio >= 2.0, "min V shrink " + fmt("%.2f", worst_ratio));
  return o;
}

Outcome greens_identity() {
  Outcome o;
  const std::vector<Point> pts = {{0, 0}, {1, 0.5}, {-1.5, 1.2}, {0.3, -1.6}, {1.7, 1.7}, {-0.8, -0.4}};
  const auto b64 = build_boundary_mesh(mesh_square(4.0, 16));
  const auto b128 = build_boundary_mesh(mesh_square(4.0, 32));
  const auto b256 = build_boundary_mesh(mesh_square(4.0, 64));
  for (double mu : {0.5, 1.0, 4.0}) {
    const double k = std::sqrt(mu);
    const double r1 = greens_residual(b64, k, {1, 0.5}, pts);
    const double r2 = greens_residual(b128, k, {1, 0.5}, pts);
    const double r3 = greens_residual(b256, k, {1, 0.5}, pts);
    o.check(r2 <= 5e-2 && r2 < r1 && r3 < r2, "mu=" + fmt("%g", mu) + " N=128 " + fmt("%.2e", r2));
  }
  return o;
}

Outcome structure() {
  Outcome o;

  double jac = 0.0;
  for (double a : {-0.8, -0.4, 0.0, 0.4, 0.8}) {
    for (int n : {1, 4, 10, 20}) {
      const auto q = gauss_jacobi(n, a, 1.0);
      for (int k = 0; k <= 2 * n - 1; ++k) {
        const double exact = 1.0 / (k + 1 + a);
        jac = std::max(jac, std::abs(q.integrate([k](double y) { return std::pow(y, k); }) / exact - 1));
      }
    }
  }
  o.check(jac <= 1e-12, "Jacobi exactness " + fmt("%.1e", jac));

  double orth = 0.0, resid = 0.0;
  for (double beta : {0.3, 0.5, 0.7}) {
    const FracParams fp(beta, 1.0);
    for (int p : {4, 8, 13}) {
      const double Y = std::pow(2.0, p / 2.0 + 1);
      const HpSpaceY sp(build_geometric_grid(0.5, p, Y), p);
      const auto m = assemble_y_matrices(sp, fp.alpha(), fp.s() * fp.d_beta());
      const auto b = modal_decomposition(sp, m);
      const Eigen::MatrixXd& P = b.coefficients();
      const Eigen::MatrixXd G = P.transpose() * m.B * P;
      orth = std::max(orth, (G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff());
      using LM = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
      const LM A = m.A.cast<long double>(), B = m.B.cast<long double>();
      const double an = Eigen::JacobiSVD<Eigen::MatrixXd>(m.A).singularValues()(0);
      for (std::size_t j = 0; j < b.size(); ++j) {
        const auto v = P.col(static_cast<Eigen::Index>(j)).cast<long double>().eval();
        const auto r = (A * v - static_cast<long double>(b.eigenvalue(j)) * (B * v)).eval();
        resid = std::max(resid, static_cast<double>(std::sqrt(r.squaredNorm())) / an);
      }
    }
  }
  o.check(orth <= 1e-10, "B-orthonormality " + fmt("%.1e", orth));
  o.check(resid <= 1e-9, "eigen residual " + fmt("%.1e", resid));

  GeometricGridY g;
  g.points = {0.0, 3.0};
  const HpSpaceY one(g, 1);
  const auto b1 = modal_decomposition(one, assemble_y_matrices(one, 0.0, 0.0));
  const double ee = std::max(std::abs(b1.eigenvalue(0)), std::abs(b1.eigenvalue(1) - 12.0 / 9.0));
  o.check(ee <= 1e-10, "single element " + fmt("%.1e", ee));

  bool spd = true;
  double sym = 0.0;
  for (double beta : {0.3, 0.5, 0.7}) {
    for (auto a : {CoefficientField::identity(), CoefficientField::paper_radial()}) {
      for (auto f : {SourceTerm::bump(), SourceTerm::paper_radial()}) {
        const FracParams fp(beta, 1.0);
        const FemBemSetup setup(mesh_square(4.0, 4), a, f);
        const auto basis = build_modal_basis(0.5, 3, 3, 8.0, fp.alpha(), fp.s() * fp.d_beta());
        for (std::size_t j = 0; j < basis.size(); ++j) {
          const auto p = assemble_mode_system(j, basis, setup, fp);
          const Eigen::MatrixXd B = block_matrix(p);
          sym = std::max(sym, (B - B.transpose()).cwiseAbs().maxCoeff() / B.cwiseAbs().maxCoeff());
          const Eigen::MatrixXd S = schur_complement(p);
          spd = spd && Eigen::LLT<Eigen::MatrixXd>(0.5 * (S + S.transpose())).info() == Eigen::Success;
        }
      }
    }
  }
  o.check(spd, std::string("Schur SPD ") + (spd ? "all modes" : "violated"));
  o.check(sym <= 1e-11, "block symmetry " + fmt("%.1e", sym));

  {
    const FracParams fp(0.5, 1.0);
    auto setup = std::make_shared<const FemBemSetup>(mesh_square(4.0, 4), CoefficientField::identity(), SourceTerm::zero());
    auto basis = std::make_shared<const ModalBasis>(build_modal_basis(0.5, 2, 2, 4.0, 0.0, 1.0));
    const auto sol = solve_fractional(fp, setup, basis);
    o.check(sol.trace_field.norm() == 0.0, "zero source " + fmt("%.1e", sol.trace_field.norm()));
  }

  const auto dir = std::filesystem::temp_directory_path();
  StudyConfig c;
  c.max_level = 2;
  c.samples = kSamples;
  std::string text[2];
  for (int k = 0; k < 2; ++k) {
    c.output = (dir / ("fracext_acceptance_" + std::to_string(k) + ".csv")).string();
    run_convergence_study(c);
    std::ifstream in(c.output);
    std::stringstream ss;
    ss << in.rdbuf();
    text[k] = ss.str();
    std::filesystem::remove(c.output);
    std::filesystem::remove(samples_path(c.output));
  }
  o.check(!text[0].empty() && text[0] == text[1], "CSV rerun identical");
  return o;
}

Outcome special_functions() {
  Outcome o;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
  const double e = std::max({rel(bessel_K(0, 1.0), 0.42102443824070833333562737921260903613621974822666),
                             rel(bessel_K(1, 1.0), 0.60190723019723457473754000153561733926158688996811),
                             rel(bessel_I(0, 1.0), 1.266065877752008335598244625214717537607670311355),
                             rel(bessel_J0(1.0), 0.76519768655796655144971752610266322090927428975533)});
  o.check(e <= 1e-12, "max rel err " + fmt("%.1e", e));
  double w = 0.0;
  for (int n = 0; n <= 8; ++n) {
    for (double z : {0.05, 0.5, 1.0, 2.5, 7.5, 20.0, 40.0}) {
      w = std::max(w, std::abs(z * (bessel_I(n, z) * bessel_K(n + 1, z) + bessel_I(n + 1, z) * bessel_K(n, z)) - 1));
    }
  }
  o.check(w <= 1e-11, "Wronskian " + fmt("%.1e", w));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"energy rate (beta 0.3/0.5/0.7)", energy_rate},
      {"trace L2 rate", trace_rate},
      {"Hankel oracle agreement", oracle_agreement},
      {"variable-coefficient rate", variable_coefficient},
      {"BEM circle symbols", bem_oracle},
      {"Green's identity residual", greens_identity},
      {"structure suite", structure},
      {"special functions", special_functions},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("criterion %d %s: %s (%s)\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
