#pragma once

// Reference solutions and error bookkeeping: the Hankel-transform solution for
// A = I, circle symbols of V and W, a Green's-identity residual for the boundary
// potentials, Aitken extrapolation and experimental orders of convergence.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "fracext/bem2d.hpp"
#include "fracext/core_params.hpp"
#include "fracext/errors.hpp"
#include "fracext/quadrature.hpp"
#include "fracext/specfun.hpp"

namespace fracext {

struct ConvergenceRecord {
  int level = 0;
  double h = 0.0;
  int p = 0;
  int L = 0;
  double Y = 0.0;
  std::size_t n_modes = 0;
  std::size_t ndof_fem = 0;
  std::size_t ndof_bem = 0;
  double energy = 0.0;
  double energy_err = std::numeric_limits<double>::quiet_NaN();
  double l2_err = std::numeric_limits<double>::quiet_NaN();
  double eoc_energy = std::numeric_limits<double>::quiet_NaN();
  double eoc_l2 = std::numeric_limits<double>::quiet_NaN();
};

/// Radial Fourier transform f^(rho) = 2 pi int_0^R f(t) J0(rho t) t dt; the
/// closed form is used when the source carries one.
inline double radial_fourier_transform(const SourceTerm& f, double rho) {
  if (!f.is_radial()) throw ParameterError("radial_fourier_transform: source is not radial");
  if (f.fourier) return f.fourier(rho);
  const double R = f.support_radius;
  if (!(R > 0.0)) return 0.0;
  static const QuadRule g = gauss_legendre(16).mapped(0.0, 1.0);
  const int panels = 2 + static_cast<int>(std::ceil(rho * R / 6.0));
  double sum = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double a = R * k / panels, b = R * (k + 1) / panels;
    for (std::size_t q = 0; q < g.size(); ++q) {
      const double t = a + (b - a) * g.nodes[q];
      sum += (b - a) * g.weights[q] * f.radial_profile(t) * bessel_J0(rho * t) * t;
    }
  }
  return 2.0 * std::numbers::pi * sum;
}

/// u(r) = (1/2pi) int_0^inf f^(rho) J0(rho r) rho / (rho^{2beta} + s) drho for A = I.
/// The integral is summed over panels of width pi / max(1, R_f + r) with
/// `points` Gauss nodes each, graded geometrically on (0, 1), until a run of 16
/// panels each contributes less than 1e-10 of the running sum.
inline double hankel_reference(double beta, double s, const SourceTerm& f, double r, int points = 16) {
  derive_constants(beta);
  if (!(s > 0.0)) throw ParameterError("hankel_reference: s must be positive");
  if (!f.is_radial()) throw ParameterError("hankel_reference: source must be radial");
  if (!(r >= 0.0)) throw ParameterError("hankel_reference: radius must be nonnegative");
  const QuadRule g = gauss_legendre(points).mapped(0.0, 1.0);
  auto integrand = [&](double rho) {
    return radial_fourier_transform(f, rho) * bessel_J0(rho * r) * rho / (std::pow(rho, 2.0 * beta) + s);
  };
  auto panel = [&](double a, double b) {
    double v = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q) v += (b - a) * g.weights[q] * integrand(a + (b - a) * g.nodes[q]);
    return v;
  };
  double sum = 0.0;
  // rho^{2 beta} is not smooth at 0: geometric panels toward the origin.
  double hi = 1.0;
  for (int k = 0; k < 30; ++k) {
    sum += panel(0.5 * hi, hi);
    hi *= 0.5;
  }
  sum += panel(0.0, hi);
  const double width = std::numbers::pi / std::max(1.0, f.support_radius + r);
  double a = 1.0;
  double recent = 0.0;  // largest panel magnitude among the last 16
  int count = 0;
  constexpr double kMaxRho = 2e4;
  while (a < kMaxRho) {
    const double v = panel(a, a + width);
    sum += v;
    a += width;
    recent = (count % 16 == 0) ? std::abs(v) : std::max(recent, std::abs(v));
    if (++count % 16 == 0 && a > 50.0 && recent < 1e-10 * std::abs(sum)) break;
  }
  return sum / (2.0 * std::numbers::pi);
}

/// Aitken's delta-squared extrapolation a2 - (a2 - a1)^2 / ((a2 - a1) - (a1 - a0)).
inline double aitken_delta2(double a0, double a1, double a2) {
  const double d1 = a1 - a0, d2 = a2 - a1;
  const double den = d2 - d1;
  const double scale = std::max({std::abs(a0), std::abs(a1), std::abs(a2)});
  if (den == 0.0 || std::abs(den) <= 1e-15 * scale) {
    throw ExtrapolationError("aitken_delta2: vanishing second difference");
  }
  return a2 - d2 * d2 / den;
}

struct CircleSymbols {
  double V;
  double W;
};

/// Eigenvalues of V and W on the circle of radius R for the Fourier mode n:
/// V_n = R I_n(kR) K_n(kR), W_n = -k^2 R I_n'(kR) K_n'(kR).
inline CircleSymbols circle_symbols(double k, double R, int n) {
  if (!(k > 0.0) || !(R > 0.0)) throw ParameterError("circle_symbols: k and R must be positive");
  if (n < 0 || n > 8) throw ParameterError("circle_symbols: n must lie in [0, 8]");
  const double z = k * R;
  const double in = bessel_I(n, z), kn = bessel_K(n, z);
  const double ip = n == 0 ? bessel_I(1, z) : 0.5 * (bessel_I(n - 1, z) + bessel_I(n + 1, z));
  const double kp = n == 0 ? -bessel_K(1, z) : -0.5 * (bessel_K(n - 1, z) + bessel_K(n + 1, z));
  return {R * in * kn, -k * k * R * ip * kp};
}

/// Galerkin Rayleigh quotients of V and W on the Fourier mode cos(n theta) of a
/// boundary mesh around the origin: piecewise constant midpoint samples for V,
/// nodal P1 samples with the P1 boundary mass for W.
inline CircleSymbols mode_quotients(const BoundaryMesh& bm, const BemOperators& ops, int n) {
  const auto N = static_cast<Eigen::Index>(bm.size());
  Eigen::VectorXd c(N), g(N);
  double cc = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const Point m = bm.midpoint(ui), x = bm.nodes[ui];
    c(i) = std::cos(n * std::atan2(m.y, m.x));
    g(i) = std::cos(n * std::atan2(x.y, x.x));
    cc += bm.lengths[ui] * c(i) * c(i);
  }
  double gg = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) {
    const double l = bm.lengths[static_cast<std::size_t>(i)];
    const double a = g(i), b = g((i + 1) % N);
    gg += l * (a * a + a * b + b * b) / 3.0;
  }
  return {c.dot(ops.V * c) / cc, g.dot(ops.W * g) / gg};
}

/// Max relative error of the interior representation V~(d_n u) - K~(u) = u for
/// u(x) = exp(k d.x), with d_n u taken at panel midpoints and u at the nodes.
inline double greens_residual(const BoundaryMesh& bm, double k, Point d, const std::vector<Point>& samples) {
  const double dn = norm(d);
  if (!(dn > 0.0)) throw ParameterError("greens_residual: direction must be nonzero");
  d = (1.0 / dn) * d;
  const auto n = static_cast<Eigen::Index>(bm.size());
  Eigen::VectorXd psi(n), phi(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    psi(i) = k * dot(d, bm.normals[ui]) * std::exp(k * dot(d, bm.midpoint(ui)));
    phi(i) = std::exp(k * dot(d, bm.nodes[ui]));
  }
  double worst = 0.0;
  for (const Point& x : samples) {
    const double u = std::exp(k * dot(d, x));
    worst = std::max(worst, std::abs(eval_potentials(bm, psi, phi, k, x) - u) / std::abs(u));
  }
  return worst;
}

/// eoc_k = ln(e_{k-1}/e_k) / ln(h_{k-1}/h_k), k = 1..n-1; NaN where an error is
/// not positive.
inline std::vector<double> compute_eoc(const std::vector<double>& errors, const std::vector<double>& hs) {
  if (errors.size() != hs.size() || errors.size() < 2) {
    throw ParameterError("compute_eoc: need equal lengths of at least two");
  }
  std::vector<double> out;
  for (std::size_t k = 1; k < errors.size(); ++k) {
    const double e0 = errors[k - 1], e1 = errors[k];
    if (!(e0 > 0.0) || !(e1 > 0.0) || !(hs[k - 1] > 0.0) || !(hs[k] > 0.0)) {
      out.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    out.push_back(std::log(e0 / e1) / std::log(hs[k - 1] / hs[k]));
  }
  return out;
}

}  // namespace fracext
