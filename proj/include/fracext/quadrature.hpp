#pragma once

// Gauss rules used throughout: Legendre, Jacobi for the weight y^alpha, the
// logarithmic weight -ln y, and the rule selection for pairs of boundary panels.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "fracext/errors.hpp"

namespace fracext {

struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double a = -1.0;
  double b = 1.0;

  [[nodiscard]] std::size_t size() const { return nodes.size(); }

  /// Affine image on (lo, hi); weights are scaled by the Jacobian only.
  [[nodiscard]] QuadRule mapped(double lo, double hi) const {
    QuadRule out;
    out.a = lo;
    out.b = hi;
    const double scale = (hi - lo) / (b - a);
    out.nodes.reserve(size());
    out.weights.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
      out.nodes.push_back(lo + (nodes[i] - a) * scale);
      out.weights.push_back(weights[i] * scale);
    }
    return out;
  }

  template <class F>
  [[nodiscard]] double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

namespace detail {

// Golub-Welsch: nodes/weights from the Jacobi matrix of a monic recurrence.
inline void golub_welsch(const std::vector<double>& alpha, const std::vector<double>& beta,
                         double mu0, std::vector<double>& nodes, std::vector<double>& weights) {
  const auto n = static_cast<Eigen::Index>(alpha.size());
  Eigen::VectorXd diag(n), sub(std::max<Eigen::Index>(n - 1, 0));
  for (Eigen::Index i = 0; i < n; ++i) diag(i) = alpha[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < n; ++i) sub(i) = std::sqrt(beta[static_cast<std::size_t>(i + 1)]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw SolverError("Golub-Welsch eigenvalue solve failed");
  nodes.resize(static_cast<std::size_t>(n));
  weights.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    nodes[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    weights[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
  }
}

}  // namespace detail

/// n-point Gauss-Legendre rule on (-1, 1).
inline QuadRule gauss_legendre(int n) {
  if (n < 1 || n > 64) throw ParameterError("gauss_legendre: n must be in [1, 64]");
  QuadRule q;
  q.nodes.assign(static_cast<std::size_t>(n), 0.0);
  q.weights.assign(static_cast<std::size_t>(n), 0.0);
  // Newton iteration on P_n from the Chebyshev-like initial guess; exact symmetry by mirroring.
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) { p1 = x; p0 = 1.0; }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    q.nodes[lo] = -x;
    q.nodes[hi] = x;
    q.weights[lo] = w;
    q.weights[hi] = w;
  }
  if (n % 2 == 1) q.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return q;
}

/// n-point Gauss rule for the weight y^alpha on (0, b).
inline QuadRule gauss_jacobi(int n, double alpha, double b = 1.0) {
  if (n < 1 || n > 64) throw ParameterError("gauss_jacobi: n must be in [1, 64]");
  if (!(alpha > -1.0 && alpha < 1.0)) throw ParameterError("gauss_jacobi: alpha must lie in (-1, 1)");
  if (!(b > 0.0)) throw ParameterError("gauss_jacobi: interval length must be positive");
  // Jacobi weight (1-x)^0 (1+x)^alpha on (-1,1), monic recurrence coefficients.
  const double a = 0.0, c = alpha;
  std::vector<double> ra(static_cast<std::size_t>(n)), rb(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + c;
    ra[static_cast<std::size_t>(k)] = (k == 0) ? (c - a) / (a + c + 2.0) : (c * c - a * a) / (s * (s + 2.0));
    if (k >= 1) {
      rb[static_cast<std::size_t>(k)] =
          4.0 * k * (k + a) * (k + c) * (k + a + c) / (s * s * (s + 1.0) * (s - 1.0));
    }
  }
  const double mu0 = std::pow(2.0, alpha + 1.0) / (alpha + 1.0);
  std::vector<double> x, w;
  detail::golub_welsch(ra, rb, mu0, x, w);
  QuadRule q;
  q.a = 0.0;
  q.b = b;
  const double wscale = std::pow(0.5 * b, alpha + 1.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    q.nodes.push_back(0.5 * b * (1.0 + x[i]));
    q.weights.push_back(w[i] * wscale);
  }
  return q;
}

/// n-point Gauss rule for the weight -ln(y) on (0, 1), built by the modified
/// Chebyshev algorithm from moments against monic shifted Legendre polynomials.
inline QuadRule gauss_log(int n) {
  if (n < 1 || n > 32) throw ParameterError("gauss_log: n must be in [1, 32]");
  const int nm = 2 * n;
  std::vector<double> mom(static_cast<std::size_t>(nm));
  // m_k = (-1)^k (k!)^2 / ((2k)! k (k+1)), m_0 = 1; built by ratios to avoid overflow.
  mom[0] = 1.0;
  double fact_ratio = 1.0;  // (k!)^2/(2k)!
  for (int k = 1; k < nm; ++k) {
    fact_ratio *= static_cast<double>(k) * k / ((2.0 * k - 1.0) * (2.0 * k));
    mom[static_cast<std::size_t>(k)] = ((k % 2 == 0) ? 1.0 : -1.0) * fact_ratio / (k * (k + 1.0));
  }
  // Auxiliary recurrence: monic shifted Legendre, a_l = 1/2, b_l = l^2 / (4 (4 l^2 - 1)).
  auto aux_a = [](int) { return 0.5; };
  auto aux_b = [](int l) { return l == 0 ? 1.0 : static_cast<double>(l) * l / (4.0 * (4.0 * l * l - 1.0)); };
  std::vector<double> alpha(static_cast<std::size_t>(n)), beta(static_cast<std::size_t>(n));
  std::vector<double> sig_prev(static_cast<std::size_t>(nm), 0.0), sig(mom);
  alpha[0] = aux_a(0) + mom[1] / mom[0];
  beta[0] = mom[0];
  for (int k = 1; k < n; ++k) {
    std::vector<double> sig_next(static_cast<std::size_t>(nm), 0.0);
    for (int l = k; l <= nm - k - 1; ++l) {
      const auto L = static_cast<std::size_t>(l);
      sig_next[L] = sig[L + 1] - (alpha[static_cast<std::size_t>(k - 1)] - aux_a(l)) * sig[L] -
                    beta[static_cast<std::size_t>(k - 1)] * sig_prev[L] + aux_b(l) * sig[L - 1];
    }
    const auto K = static_cast<std::size_t>(k);
    alpha[K] = aux_a(k) + sig_next[K + 1] / sig_next[K] - sig[K] / sig[K - 1];
    beta[K] = sig_next[K] / sig[K - 1];
    sig_prev = std::move(sig);
    sig = std::move(sig_next);
  }
  QuadRule q;
  q.a = 0.0;
  q.b = 1.0;
  detail::golub_welsch(alpha, beta, beta[0], q.nodes, q.weights);
  return q;
}

// Boundary panel pairs ------------------------------------------------------

enum class PanelRelation { coincident, adjacent, disjoint };

inline std::string to_string(PanelRelation r) {
  switch (r) {
    case PanelRelation::coincident: return "coincident";
    case PanelRelation::adjacent: return "adjacent";
    case PanelRelation::disjoint: return "disjoint";
  }
  return "?";
}

/// Relation from the number of shared endpoints (2, 1 or 0).
inline PanelRelation panel_relation_from_shared(int shared_endpoints) {
  if (shared_endpoints >= 2) return PanelRelation::coincident;
  if (shared_endpoints == 1) return PanelRelation::adjacent;
  return PanelRelation::disjoint;
}

/// Relation of panels i and j on a closed loop of n panels (panel k joins vertices k, k+1).
inline PanelRelation panel_relation(std::size_t i, std::size_t j, std::size_t n) {
  if (i == j) return PanelRelation::coincident;
  if ((i + 1) % n == j || (j + 1) % n == i) return PanelRelation::adjacent;
  return PanelRelation::disjoint;
}

struct PanelPairRule {
  PanelRelation kind = PanelRelation::disjoint;
  QuadRule outer;
  QuadRule inner;
  std::optional<QuadRule> log_rule;
  int graded_levels = 0;  // dyadic levels toward a shared vertex (adjacent pairs)
};

/// Rule set for a panel pair. Coincident pairs use the log split (Gauss-Legendre
/// plus the -ln weighted rule), adjacent pairs a graded tensor Gauss rule toward the
/// common vertex, disjoint pairs a plain tensor Gauss rule.
inline PanelPairRule panel_pair_rule(PanelRelation relation, int order) {
  PanelPairRule r;
  r.kind = relation;
  const QuadRule gl = gauss_legendre(order).mapped(0.0, 1.0);
  r.outer = gl;
  r.inner = gl;
  if (relation == PanelRelation::coincident) r.log_rule = gauss_log(std::min(order, 32));
  if (relation == PanelRelation::adjacent) r.graded_levels = 4;
  return r;
}

}  // namespace fracext
