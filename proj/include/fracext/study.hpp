#pragma once

// Convergence-study driver: parameter rules, the refinement loop, extrapolated
// energy errors, L2 trace errors against the finest level, and CSV output.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fracext/analysis.hpp"
#include "fracext/core_params.hpp"
#include "fracext/coupling.hpp"
#include "fracext/errors.hpp"
#include "fracext/fem2d.hpp"
#include "fracext/ydisc.hpp"

namespace fracext {

enum class CoefficientChoice { identity, radial };
enum class SourceChoice { bump, paper };

struct StudyConfig {
  double beta = 0.5;
  double s = 1.0;
  double sigma = 0.5;
  // "square:SIDE" or the path of a vertex file.
  std::string domain = "square:4";
  CoefficientChoice coefficient = CoefficientChoice::identity;
  SourceChoice source = SourceChoice::bump;
  int max_level = 4;
  int base_n = 8;  // subdivisions per side of the level-0 square mesh
  std::optional<int> p_override;
  std::optional<double> Y_override;
  std::string output;  // CSV path; empty for none
  std::vector<Point> samples;

  void validate() const {
    (void)FracParams(beta, s);
    if (!(sigma > 0.0 && sigma < 1.0)) throw ParameterError("sigma must lie in (0, 1)");
    if (max_level < 0) throw ParameterError("levels must be nonnegative");
    if (base_n < 1) throw ParameterError("base mesh needs at least one subdivision");
    if (p_override && *p_override < 1) throw ParameterError("p override must be at least 1");
    if (Y_override && !(*Y_override > 1.0)) throw ParameterError("Y override must exceed 1");
  }
};

struct LevelParameters {
  int p = 1;
  int L = 1;
  double Y = 2.0;
};

/// p = max(1, round(2m ln(m+1))), L = p, Y = max(2, h^{-2/mu}) with mu = 1 + |alpha|
/// for s > 0 and mu = 1 + alpha for s = 0.
inline LevelParameters select_parameters(int m, double h, const FracParams& params) {
  if (m < 0) throw ParameterError("select_parameters: level must be nonnegative");
  if (!(h > 0.0)) throw ParameterError("select_parameters: h must be positive");
  LevelParameters out;
  out.p = std::max(1, static_cast<int>(std::lround(2.0 * m * std::log(m + 1.0))));
  out.L = out.p;
  const double mu = params.s() > 0.0 ? 1.0 + std::abs(params.alpha()) : 1.0 + params.alpha();
  out.Y = std::max(2.0, std::pow(h, -2.0 / mu));
  return out;
}

inline CoefficientField make_coefficient(CoefficientChoice c) {
  return c == CoefficientChoice::identity ? CoefficientField::identity() : CoefficientField::paper_radial();
}

inline SourceTerm make_source(SourceChoice c) {
  return c == SourceChoice::bump ? SourceTerm::bump() : SourceTerm::paper_radial();
}

/// Level-m mesh: the square with base_n 2^m subdivisions per side, or a polygon
/// triangulated to the level-0 width of the 4x4 square and refined m times.
inline TriMesh study_mesh(const std::string& domain, int base_n, int m) {
  const std::string prefix = "square:";
  if (domain.rfind(prefix, 0) == 0) {
    double side = 0.0;
    try {
      side = std::stod(domain.substr(prefix.size()));
    } catch (const std::exception&) {
      throw ParameterError("bad square domain '" + domain + "'");
    }
    if (!(side > 0.0)) throw ParameterError("square side must be positive");
    return mesh_square(side, base_n << m);
  }
  TriMesh mesh = mesh_polygon(DomainSpec::load(domain), 4.0 * std::sqrt(2.0) / base_n);
  for (int k = 0; k < m; ++k) mesh = refine_uniform(mesh);
  return mesh;
}

struct PointSample {
  int level;
  Point x;
  double value;
  double reference;
};

struct StudyResult {
  std::vector<ConvergenceRecord> records;
  std::vector<PointSample> samples;
};

inline std::string format_csv(const std::vector<ConvergenceRecord>& records) {
  std::string out = "level,h,p,L,Y,n_modes,ndof_fem,ndof_bem,energy,energy_err,l2_err,eoc_energy,eoc_l2\n";
  char buf[512];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%d,%.15e,%d,%d,%.15e,%zu,%zu,%zu,%.15e,%.15e,%.15e,%.15e,%.15e\n", r.level, r.h,
                  r.p, r.L, r.Y, r.n_modes, r.ndof_fem, r.ndof_bem, r.energy, r.energy_err, r.l2_err, r.eoc_energy,
                  r.eoc_l2);
    out += buf;
  }
  return out;
}

inline std::string format_samples_csv(const std::vector<PointSample>& samples) {
  std::string out = "level,x,y,u,u_ref,abs_err\n";
  char buf[256];
  for (const auto& p : samples) {
    std::snprintf(buf, sizeof buf, "%d,%.15e,%.15e,%.15e,%.15e,%.15e\n", p.level, p.x.x, p.x.y, p.value, p.reference,
                  std::abs(p.value - p.reference));
    out += buf;
  }
  return out;
}

/// "study.csv" -> "study_points.csv".
inline std::string samples_path(const std::string& csv) {
  const auto slash = csv.find_last_of('/');
  const auto dot = csv.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return csv + "_points.csv";
  return csv.substr(0, dot) + "_points" + csv.substr(dot);
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot write " + path);
  out << text;
  if (!out) throw ParameterError("write failed for " + path);
}

using StudyProgress = std::function<void(const ConvergenceRecord&)>;

/// Runs levels 0..max_level. energy_err_m = sqrt|E_ext - E_m| with E_ext the
/// Aitken limit of the last three energies (the energy norm error, since the
/// energy defect is the squared error by Galerkin orthogonality). l2_err_m is the
/// L2 trace difference to the finest level on its degree-4 Gauss points.
inline StudyResult run_convergence_study(const StudyConfig& cfg, const StudyProgress& progress = {}) {
  cfg.validate();
  const FracParams params(cfg.beta, cfg.s);
  const CoefficientField coeff = make_coefficient(cfg.coefficient);
  const SourceTerm f = make_source(cfg.source);

  struct Level {
    std::shared_ptr<const FemBemSetup> setup;
    Eigen::VectorXd trace;
    std::shared_ptr<const PointLocator> locator;
  };
  std::vector<Level> levels;
  StudyResult result;

  for (int m = 0; m <= cfg.max_level; ++m) {
    ConvergenceRecord rec;
    rec.level = m;
    try {
      auto setup = std::make_shared<const FemBemSetup>(study_mesh(cfg.domain, cfg.base_n, m), coeff, f);
      rec.h = setup->space.mesh().h;
      LevelParameters lp = select_parameters(m, rec.h, params);
      if (cfg.p_override) lp.p = lp.L = *cfg.p_override;
      if (cfg.Y_override) lp.Y = *cfg.Y_override;
      rec.p = lp.p;
      rec.L = lp.L;
      rec.Y = lp.Y;
      auto basis = std::make_shared<const ModalBasis>(
          build_modal_basis(cfg.sigma, lp.p, lp.L, lp.Y, params.alpha(), params.s() * params.d_beta()));
      ExtensionSolution sol = solve_fractional(params, setup, basis);
      rec.n_modes = basis->size();
      rec.ndof_fem = setup->space.dim();
      rec.ndof_bem = setup->boundary.size();
      rec.energy = energy_value(sol);
      levels.push_back({setup, std::move(sol.trace_field), sol.locator});
    } catch (const Error& e) {
      throw SolverError("level " + std::to_string(m) + ": " + e.what());
    }
    result.records.push_back(rec);
    if (progress) progress(rec);
  }

  auto& recs = result.records;
  const std::size_t n = recs.size();
  if (n >= 3) {
    double e_ext = recs[n - 1].energy;  // fallback when the second difference vanishes
    try {
      e_ext = aitken_delta2(recs[n - 3].energy, recs[n - 2].energy, recs[n - 1].energy);
    } catch (const ExtrapolationError&) {
    }
    for (auto& r : recs) r.energy_err = std::sqrt(std::abs(e_ext - r.energy));
  }

  // L2 trace differences on the finest mesh's quadrature points.
  const Level& fine = levels.back();
  const TriMesh& fm = fine.setup->space.mesh();
  const auto& rule = triangle_rule_deg4();
  std::vector<Point> qp;
  std::vector<double> qw, uf;
  qp.reserve(fm.num_triangles() * rule.size());
  for (std::size_t t = 0; t < fm.num_triangles(); ++t) {
    const auto& tr = fm.triangles[t];
    const double area = fm.area(t);
    for (const auto& q : rule) {
      qp.push_back(q.bary[0] * fm.vertices[tr[0]] + q.bary[1] * fm.vertices[tr[1]] + q.bary[2] * fm.vertices[tr[2]]);
      qw.push_back(area * q.weight);
      uf.push_back(evaluate_p1(fm, fine.trace, Location{t, q.bary}));
    }
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Level& lv = levels[k];
    const TriMesh& mesh = lv.setup->space.mesh();
    double sum = 0.0;
    for (std::size_t q = 0; q < qp.size(); ++q) {
      const auto loc = lv.locator->locate(qp[q]);
      if (!loc) throw MeshError("level meshes do not cover the same domain");
      const double d = evaluate_p1(mesh, lv.trace, *loc) - uf[q];
      sum += qw[q] * d * d;
    }
    recs[k].l2_err = std::sqrt(sum);
  }
  recs[n - 1].l2_err = 0.0;

  if (n >= 2) {
    std::vector<double> hs, ee, el;
    for (const auto& r : recs) {
      hs.push_back(r.h);
      ee.push_back(r.energy_err);
      el.push_back(r.l2_err);
    }
    const auto eoc_e = compute_eoc(ee, hs);
    const auto eoc_l = compute_eoc(el, hs);
    for (std::size_t k = 1; k < n; ++k) {
      recs[k].eoc_energy = eoc_e[k - 1];
      recs[k].eoc_l2 = eoc_l[k - 1];
    }
  }

  if (!cfg.samples.empty()) {
    // Hankel oracle when it applies, the finest level otherwise.
    const bool oracle = cfg.coefficient == CoefficientChoice::identity && f.is_radial();
    std::vector<double> ref;
    for (const Point& x : cfg.samples) {
      if (oracle) {
        ref.push_back(hankel_reference(cfg.beta, cfg.s, f, norm(x)));
      } else {
        const auto loc = fine.locator->locate(x);
        if (!loc) throw DomainError("sample point outside the domain");
        ref.push_back(evaluate_p1(fm, fine.trace, *loc));
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      const TriMesh& mesh = levels[k].setup->space.mesh();
      for (std::size_t i = 0; i < cfg.samples.size(); ++i) {
        const auto loc = levels[k].locator->locate(cfg.samples[i]);
        if (!loc) throw DomainError("sample point outside the domain");
        result.samples.push_back(
            {static_cast<int>(k), cfg.samples[i], evaluate_p1(mesh, levels[k].trace, *loc), ref[i]});
      }
    }
  }

  if (!cfg.output.empty()) {
    write_text(cfg.output, format_csv(recs));
    if (!result.samples.empty()) write_text(samples_path(cfg.output), format_samples_csv(result.samples));
  }
  return result;
}

/// Whitespace-separated "x y" pairs, one per line; '#' starts a comment.
inline std::vector<Point> load_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open point file " + path);
  std::vector<Point> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    Point p;
    if (ls >> p.x >> p.y) pts.push_back(p);
  }
  return pts;
}

}  // namespace fracext
