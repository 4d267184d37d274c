#pragma once

// Discretization in the extended variable y: geometric grid on (0, Y), the
// continuous hp space S^{p,1}, y^alpha-weighted stiffness/mass matrices and the
// generalized eigendecomposition that decouples the extension problem into modes.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fracext/errors.hpp"
#include "fracext/quadrature.hpp"

namespace fracext {

struct GeometricGridY {
  std::vector<double> points;  // 0 = x_0 < x_1 < ... < x_last = Y
  double sigma = 0.5;
  int layers = 1;   // L
  int growth = 0;   // M

  [[nodiscard]] std::size_t num_elements() const { return points.size() - 1; }
  [[nodiscard]] double cutoff() const { return points.back(); }
};

/// Grid with points sigma^{L-l}, l = 1..L+M, M = floor(ln Y / ln(1/sigma)), closed by Y.
inline GeometricGridY build_geometric_grid(double sigma, int L, double Y) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw ParameterError("geometric grid: sigma must lie in (0,1)");
  if (L < 1) throw ParameterError("geometric grid: L must be at least 1");
  const double first = std::pow(sigma, L - 1);
  constexpr double rel = 1e-12;
  if (!(Y > 0.0) || Y < first * (1.0 - rel)) {
    throw MeshError("geometric grid: cutoff Y = " + std::to_string(Y) + " does not exceed sigma^(L-1)");
  }
  GeometricGridY g;
  g.sigma = sigma;
  g.layers = L;
  g.growth = std::max(0, static_cast<int>(std::floor(std::log(Y) / std::log(1.0 / sigma) + rel)));
  g.points.push_back(0.0);
  for (int l = 1; l <= L + g.growth; ++l) {
    const double x = std::pow(sigma, L - l);
    if (x < Y * (1.0 - rel)) g.points.push_back(x);
  }
  g.points.push_back(Y);
  return g;
}

/// Continuous piecewise polynomials of degree p on a GeometricGridY.
/// Dofs: element-endpoint hats first (index = vertex index), then p-1 integrated
/// Legendre bubbles per element.
class HpSpaceY {
 public:
  HpSpaceY(GeometricGridY grid, int degree) : grid_(std::move(grid)), degree_(degree) {
    if (degree < 1) throw ParameterError("HpSpaceY: degree must be at least 1");
  }

  [[nodiscard]] const GeometricGridY& grid() const { return grid_; }
  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] std::size_t num_elements() const { return grid_.num_elements(); }
  [[nodiscard]] std::size_t dim() const { return num_elements() * static_cast<std::size_t>(degree_) + 1; }

  /// Global dof indices of element e, local order: left hat, right hat, bubbles 2..p.
  [[nodiscard]] std::vector<std::size_t> element_dofs(std::size_t e) const {
    std::vector<std::size_t> d{e, e + 1};
    const std::size_t base = num_elements() + 1 + e * static_cast<std::size_t>(degree_ - 1);
    for (int k = 0; k < degree_ - 1; ++k) d.push_back(base + static_cast<std::size_t>(k));
    return d;
  }

  /// Local shape functions and reference derivatives at xi in [-1, 1].
  void shape(double xi, std::vector<double>& val, std::vector<double>& dval) const {
    const auto n = static_cast<std::size_t>(degree_ + 1);
    val.assign(n, 0.0);
    dval.assign(n, 0.0);
    val[0] = 0.5 * (1.0 - xi);
    val[1] = 0.5 * (1.0 + xi);
    dval[0] = -0.5;
    dval[1] = 0.5;
    // Legendre P_0..P_p
    std::vector<double> P(n, 0.0);
    P[0] = 1.0;
    if (degree_ >= 1) P[1] = xi;
    for (int k = 2; k <= degree_; ++k) {
      P[static_cast<std::size_t>(k)] =
          ((2.0 * k - 1.0) * xi * P[static_cast<std::size_t>(k - 1)] - (k - 1.0) * P[static_cast<std::size_t>(k - 2)]) / k;
    }
    for (int k = 2; k <= degree_; ++k) {
      const auto K = static_cast<std::size_t>(k);
      const double c = 1.0 / std::sqrt(2.0 * (2.0 * k - 1.0));
      val[K] = c * (P[K] - P[K - 2]);
      dval[K] = std::sqrt(0.5 * (2.0 * k - 1.0)) * P[K - 1];
    }
  }

  /// Index of the element containing y (right-closed except for the first).
  [[nodiscard]] std::size_t locate(double y) const {
    const auto& pts = grid_.points;
    if (y < 0.0 || y > pts.back()) throw ParameterError("HpSpaceY: y outside [0, Y]");
    auto it = std::upper_bound(pts.begin(), pts.end(), y);
    std::size_t e = static_cast<std::size_t>(std::distance(pts.begin(), it));
    e = (e == 0) ? 0 : e - 1;
    return std::min(e, num_elements() - 1);
  }

  /// Value at y of the function with coefficient vector c.
  template <class Vec>
  [[nodiscard]] double evaluate(const Vec& c, double y) const {
    const std::size_t e = locate(y);
    const double a = grid_.points[e], b = grid_.points[e + 1];
    const double xi = 2.0 * (y - a) / (b - a) - 1.0;
    std::vector<double> v, dv;
    shape(xi, v, dv);
    const auto dofs = element_dofs(e);
    double s = 0.0;
    for (std::size_t k = 0; k < dofs.size(); ++k) s += c[static_cast<Eigen::Index>(dofs[k])] * v[k];
    return s;
  }

 private:
  GeometricGridY grid_;
  int degree_;
};

struct YMatrices {
  Eigen::MatrixXd A;  // weighted stiffness + trace term
  Eigen::MatrixXd B;  // weighted mass
};

/// A_ij = int y^alpha phi_i' phi_j' + s phi_i(0) phi_j(0),  B_ij = int y^alpha phi_i phi_j.
/// The first element uses Gauss-Jacobi for the singular weight; the others Gauss-Legendre
/// with enough extra points that the smooth factor y^alpha is resolved to rounding.
inline YMatrices assemble_y_matrices(const HpSpaceY& space, double alpha, double s) {
  if (!(alpha > -1.0 && alpha < 1.0)) throw ParameterError("assemble_y_matrices: alpha must lie in (-1,1)");
  if (s < 0.0) throw ParameterError("assemble_y_matrices: s must be nonnegative");
  const auto n = static_cast<Eigen::Index>(space.dim());
  YMatrices m{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
  const int p = space.degree();
  const int nq_sing = std::min(64, p + 2);
  const int nq_smooth = std::min(64, p + 12);
  const QuadRule ref = gauss_legendre(nq_smooth);
  const auto& pts = space.grid().points;
  std::vector<double> v, dv;
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    const double a = pts[e], b = pts[e + 1], h = b - a;
    QuadRule q;
    if (e == 0) {
      q = gauss_jacobi(nq_sing, alpha, h);  // weight y^alpha included, a == 0
    } else {
      q = ref.mapped(a, b);
      for (std::size_t k = 0; k < q.size(); ++k) q.weights[k] *= std::pow(q.nodes[k], alpha);
    }
    const auto dofs = space.element_dofs(e);
    const std::size_t nl = dofs.size();
    Eigen::MatrixXd ka = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nl), static_cast<Eigen::Index>(nl));
    Eigen::MatrixXd kb = ka;
    for (std::size_t k = 0; k < q.size(); ++k) {
      const double xi = 2.0 * (q.nodes[k] - a) / h - 1.0;
      space.shape(xi, v, dv);
      const double w = q.weights[k];
      for (std::size_t i = 0; i < nl; ++i) {
        for (std::size_t j = 0; j < nl; ++j) {
          ka(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += w * dv[i] * dv[j] * 4.0 / (h * h);
          kb(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += w * v[i] * v[j];
        }
      }
    }
    for (std::size_t i = 0; i < nl; ++i) {
      for (std::size_t j = 0; j < nl; ++j) {
        const auto I = static_cast<Eigen::Index>(dofs[i]);
        const auto J = static_cast<Eigen::Index>(dofs[j]);
        m.A(I, J) += ka(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        m.B(I, J) += kb(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  m.A(0, 0) += s;
  // Exact symmetry.
  m.A = 0.5 * (m.A + m.A.transpose()).eval();
  m.B = 0.5 * (m.B + m.B.transpose()).eval();
  return m;
}

/// B-orthonormal eigenbasis of (A, B), eigenvalues ascending, phi_j(0) >= 0.
class ModalBasis {
 public:
  ModalBasis(HpSpaceY space, Eigen::VectorXd eigenvalues, Eigen::MatrixXd coefficients)
      : space_(std::move(space)), eigenvalues_(std::move(eigenvalues)), coefficients_(std::move(coefficients)) {
    trace_values_.resize(eigenvalues_.size());
    for (Eigen::Index j = 0; j < eigenvalues_.size(); ++j) trace_values_(j) = coefficients_(0, j);
  }

  [[nodiscard]] const HpSpaceY& space() const { return space_; }
  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(eigenvalues_.size()); }
  [[nodiscard]] const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  [[nodiscard]] const Eigen::VectorXd& trace_values() const { return trace_values_; }
  [[nodiscard]] const Eigen::MatrixXd& coefficients() const { return coefficients_; }
  [[nodiscard]] double eigenvalue(std::size_t j) const { return eigenvalues_(static_cast<Eigen::Index>(j)); }
  [[nodiscard]] double trace_value(std::size_t j) const { return trace_values_(static_cast<Eigen::Index>(j)); }

 private:
  HpSpaceY space_;
  Eigen::VectorXd eigenvalues_;
  Eigen::VectorXd trace_values_;
  Eigen::MatrixXd coefficients_;
};

namespace detail {

// One-sided (Hestenes) Jacobi: rotates the columns of M until they are mutually
// orthogonal, M V = U Sigma. Singular values come out with high relative accuracy
// when M is a well-conditioned matrix times a diagonal column scaling.
inline void one_sided_jacobi(Eigen::MatrixXd& M) {
  const Eigen::Index n = M.cols();
  constexpr double tol = 1e-15;
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double a = M.col(p).squaredNorm();
        const double b = M.col(q).squaredNorm();
        const double g = M.col(p).dot(M.col(q));
        if (std::abs(g) <= tol * std::sqrt(a * b) || g == 0.0) continue;
        rotated = true;
        const double zeta = (b - a) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Eigen::Index i = 0; i < M.rows(); ++i) {
          const double mp = M(i, p), mq = M(i, q);
          M(i, p) = c * mp - s * mq;
          M(i, q) = s * mp + c * mq;
        }
      }
    }
    if (!rotated) return;
  }
  throw SolverError("modal_decomposition: Jacobi sweeps did not converge");
}

// One first-order Rayleigh-Ritz correction in long double. With G = P'AP and
// H = P'BP nearly diagonal, P <- P (I + E) where E_ij = (G_ij - mu_j H_ij) / (mu_j - mu_i)
// off the diagonal and E_jj = (1 - H_jj) / 2. The largest modes otherwise carry
// roundoff amplified by the grading of the grid.
inline void refine_eigenpairs(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, Eigen::MatrixXd& P,
                              Eigen::VectorXd& mu) {
  using LM = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = P.cols();
  const LM Pl = P.cast<long double>();
  const LM G = Pl.transpose() * (A.cast<long double>() * Pl);
  const LM H = Pl.transpose() * (B.cast<long double>() * Pl);
  LM E = LM::Zero(n, n);
  const long double scale = std::abs(static_cast<long double>(mu.cwiseAbs().maxCoeff())) + 1.0L;
  for (Eigen::Index j = 0; j < n; ++j) {
    const long double mj = G(j, j) / H(j, j);
    E(j, j) = 0.5L * (1.0L - H(j, j));
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == j) continue;
      const long double gap = mj - G(i, i) / H(i, i);
      if (std::abs(gap) <= 1e-12L * scale) continue;  // near-degenerate pair: leave as is
      E(i, j) = (G(i, j) - mj * H(i, j)) / gap;
    }
  }
  const LM Pn = Pl + Pl * E;
  P = Pn.cast<double>();
  for (Eigen::Index j = 0; j < n; ++j) mu(j) = static_cast<double>(G(j, j) / H(j, j));
}

}  // namespace detail

/// Solves A phi = mu B phi for symmetric positive semidefinite A and positive definite B.
/// Both matrices are Cholesky-factored after diagonal scaling by diag(B); the
/// generalized eigenpairs are the singular pairs of M = L_B^{-1} L_A, obtained by
/// one-sided Jacobi so that every eigenvalue keeps relative accuracy even on
/// strongly graded grids.
inline ModalBasis modal_decomposition(const HpSpaceY& space, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const Eigen::Index n = A.rows();
  if (B.rows() != n || A.cols() != n || B.cols() != n) throw ParameterError("modal_decomposition: size mismatch");
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(B(i, i) > 0.0)) throw SolverError("modal_decomposition: mass matrix not positive definite (ill-conditioned grid)");
    d(i) = 1.0 / std::sqrt(B(i, i));
  }
  const Eigen::MatrixXd Bs = d.asDiagonal() * B * d.asDiagonal();
  const Eigen::MatrixXd As = d.asDiagonal() * A * d.asDiagonal();
  Eigen::LLT<Eigen::MatrixXd> lb(Bs);
  if (lb.info() != Eigen::Success) throw SolverError("modal_decomposition: mass factorization failed (ill-conditioned grid)");
  Eigen::MatrixXd U(n, n);
  Eigen::VectorXd mu(n);
  Eigen::LLT<Eigen::MatrixXd> la(As);
  if (la.info() == Eigen::Success) {
    Eigen::MatrixXd M = la.matrixL();
    lb.matrixL().solveInPlace(M);
    detail::one_sided_jacobi(M);
    std::vector<std::pair<double, Eigen::Index>> order;
    order.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) order.emplace_back(M.col(j).squaredNorm(), j);
    std::sort(order.begin(), order.end());
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto [sq, j] = order[static_cast<std::size_t>(k)];
      mu(k) = sq;
      U.col(k) = M.col(j) / std::sqrt(sq);
    }
  } else {
    // Semidefinite A (s = 0): symmetric eigensolve of L_B^{-1} A L_B^{-T}.
    Eigen::MatrixXd C = As;
    lb.matrixL().solveInPlace(C);
    C = C.transpose().eval();
    lb.matrixL().solveInPlace(C);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (C + C.transpose()));
    if (es.info() != Eigen::Success) throw SolverError("modal_decomposition: eigensolver failed");
    mu = es.eigenvalues();
    U = es.eigenvectors();
  }
  Eigen::MatrixXd Phi = lb.matrixU().solve(U);
  Phi = (d.asDiagonal() * Phi).eval();
  detail::refine_eigenpairs(A, B, Phi, mu);
  for (Eigen::Index j = 0; j < n; ++j) {
    // Sign convention: nonnegative trace at y = 0, otherwise first nonzero entry positive.
    double ref = Phi(0, j);
    if (std::abs(ref) < 1e-300) {
      for (Eigen::Index i = 0; i < n; ++i) {
        if (Phi(i, j) != 0.0) { ref = Phi(i, j); break; }
      }
    }
    if (ref < 0.0) Phi.col(j) = -Phi.col(j);
    // Rayleigh quotient of the final vector; second-order accurate in the vector error.
    const Eigen::VectorXd& v = Phi.col(j);
    mu(j) = v.dot(A * v) / v.dot(B * v);
  }
  return ModalBasis(space, std::move(mu), std::move(Phi));
}

inline ModalBasis modal_decomposition(const HpSpaceY& space, const YMatrices& m) {
  return modal_decomposition(space, m.A, m.B);
}

/// phi_j(y) for 0 <= y <= Y.
inline double eval_modal_basis(const ModalBasis& basis, std::size_t j, double y) {
  if (j >= basis.size()) throw ParameterError("eval_modal_basis: mode index out of range");
  if (y == 0.0) return basis.trace_value(j);
  return basis.space().evaluate(basis.coefficients().col(static_cast<Eigen::Index>(j)), y);
}

/// Convenience: grid + space + matrices + decomposition, with trace coefficient s_trace.
inline ModalBasis build_modal_basis(double sigma, int degree, int layers, double Y, double alpha, double s_trace) {
  HpSpaceY space(build_geometric_grid(sigma, layers, Y), degree);
  return modal_decomposition(space, assemble_y_matrices(space, alpha, s_trace));
}

}  // namespace fracext
