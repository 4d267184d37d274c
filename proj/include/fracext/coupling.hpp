#pragma once

// Per-mode symmetric FEM-BEM coupling. For each y-mode j with eigenvalue mu_j the
// interior field u_j and the boundary flux lambda_j solve
//
//   (A grad u, grad v) + mu_j (u, v) + <W g, g_v> + <(-1/2 + K') lambda, g_v> = d_beta phi_j(0) (f, v)
//   <(1/2 - K) g, xi> + <V lambda, xi> = 0,          g = trace of u,
//
// with boundary operators of the Yukawa kernel at wavenumber sqrt(mu_j). lambda is
// eliminated through V, and the remaining SPD system is factored directly.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "fracext/bem2d.hpp"
#include "fracext/core_params.hpp"
#include "fracext/errors.hpp"
#include "fracext/fem2d.hpp"
#include "fracext/ydisc.hpp"

namespace fracext {

/// Everything on the x side that does not depend on the mode.
struct FemBemSetup {
  P1Space space;
  TraceMap trace;
  BoundaryMesh boundary;
  StiffnessMass km;
  Eigen::VectorXd load;  // (f, hat_i), unscaled

  FemBemSetup(TriMesh mesh, const CoefficientField& coeff, const SourceTerm& f)
      : space(std::move(mesh)),
        trace(space.mesh()),
        boundary(build_boundary_mesh(space.mesh())),
        km(assemble_stiffness_mass(space, coeff)),
        load(assemble_load(space, f, 1.0)) {}
};

struct ModeProblem {
  std::size_t j = 0;
  double mu = 0.0;
  SparseMatrix A;  // K_A + mu M
  BemOperators ops;
  Eigen::VectorXd rhs;
  const FemBemSetup* setup = nullptr;

  /// C = 1/2 M - K, the coupling block acting on boundary traces.
  [[nodiscard]] Eigen::MatrixXd coupling_block() const { return 0.5 * ops.M - ops.K; }
};

inline ModeProblem assemble_mode_system(std::size_t j, const ModalBasis& basis, const FemBemSetup& setup,
                                        const FracParams& params) {
  if (j >= basis.size()) throw ParameterError("assemble_mode_system: mode index out of range");
  const double mu = basis.eigenvalue(j);
  if (!(mu > 0.0)) throw SolverError("assemble_mode_system: nonpositive eigenvalue at mode " + std::to_string(j));
  ModeProblem p;
  p.j = j;
  p.mu = mu;
  p.A = setup.km.K + mu * setup.km.M;
  p.ops = assemble_operators(setup.boundary, std::sqrt(mu));
  p.rhs = (params.d_beta() * basis.trace_value(j)) * setup.load;
  p.setup = &setup;
  return p;
}

/// Dense coupled matrix [[A + T'WT, T'(-1/2 M + K)'], [(-1/2 M + K) T, -V]]
/// (second row negated). Only for small meshes.
inline Eigen::MatrixXd block_matrix(const ModeProblem& p) {
  const Eigen::Index n = p.A.rows();
  const Eigen::Index nb = p.ops.V.rows();
  const Eigen::MatrixXd T = Eigen::MatrixXd(p.setup->trace.matrix());
  const Eigen::MatrixXd C = p.coupling_block();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n + nb, n + nb);
  B.topLeftCorner(n, n) = Eigen::MatrixXd(p.A) + T.transpose() * p.ops.W * T;
  B.topRightCorner(n, nb) = -T.transpose() * C.transpose();
  B.bottomLeftCorner(nb, n) = -C * T;
  B.bottomRightCorner(nb, nb) = -p.ops.V;
  return B;
}

/// Dense Schur complement A + T'(W + C'V^{-1}C)T. Only for small meshes.
inline Eigen::MatrixXd schur_complement(const ModeProblem& p) {
  const Eigen::MatrixXd T = Eigen::MatrixXd(p.setup->trace.matrix());
  const Eigen::MatrixXd C = p.coupling_block();
  Eigen::LLT<Eigen::MatrixXd> vl(p.ops.V);
  if (vl.info() != Eigen::Success) throw SolverError("single layer matrix not positive definite");
  const Eigen::MatrixXd G = p.ops.W + C.transpose() * vl.solve(C);
  return Eigen::MatrixXd(p.A) + T.transpose() * G * T;
}

struct ModeSolution {
  Eigen::VectorXd u;
  Eigen::VectorXd lambda;
  double residual = 0.0;  // max of both equation residuals / (|rhs| + 1)
};

/// Residuals of both coupled equations relative to |rhs| + 1.
inline double mode_residual(const ModeProblem& p, const ModeSolution& s) {
  const Eigen::VectorXd g = p.setup->trace.apply(s.u);
  const Eigen::MatrixXd C = p.coupling_block();
  const Eigen::VectorXd r1 =
      p.A * s.u + p.setup->trace.apply_transpose(p.ops.W * g - C.transpose() * s.lambda) - p.rhs;
  const Eigen::VectorXd r2 = C * g + p.ops.V * s.lambda;
  return std::max(r1.norm(), r2.norm()) / (p.rhs.norm() + 1.0);
}

/// Sparse Cholesky of the Schur complement. The symbolic analysis depends only on
/// the mesh and is done once.
class ModeSolver {
 public:
  explicit ModeSolver(const FemBemSetup& setup) : setup_(&setup) {
    const auto& K = setup.km.K;
    for (int c = 0; c < K.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(K, c); it; ++it) base_.emplace_back(static_cast<int>(it.row()), c, 0.0);
    }
    const auto& idx = setup.trace.indices();
    for (int a : idx) {
      for (int b : idx) base_.emplace_back(a, b, 0.0);
    }
    SparseMatrix S(K.rows(), K.cols());
    S.setFromTriplets(base_.begin(), base_.end());
    llt_.analyzePattern(S);
  }

  [[nodiscard]] ModeSolution solve(const ModeProblem& p) {
    const auto& idx = setup_->trace.indices();
    const auto nb = static_cast<Eigen::Index>(idx.size());
    const Eigen::MatrixXd C = p.coupling_block();
    Eigen::LLT<Eigen::MatrixXd> vl(p.ops.V);
    if (vl.info() != Eigen::Success) {
      throw SolverError("single layer matrix not positive definite at mode " + std::to_string(p.j));
    }
    const Eigen::MatrixXd Y = vl.solve(C);  // V^{-1} C
    Eigen::MatrixXd G = p.ops.W + C.transpose() * Y;
    G = 0.5 * (G + G.transpose()).eval();

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(p.A.nonZeros() + nb * nb));
    for (int c = 0; c < p.A.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(p.A, c); it; ++it) trip.emplace_back(static_cast<int>(it.row()), c, it.value());
    }
    for (Eigen::Index a = 0; a < nb; ++a) {
      for (Eigen::Index b = 0; b < nb; ++b) {
        trip.emplace_back(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)], G(a, b));
      }
    }
    SparseMatrix S(p.A.rows(), p.A.cols());
    S.setFromTriplets(trip.begin(), trip.end());
    llt_.factorize(S);
    if (llt_.info() != Eigen::Success) {
      throw SolverError("Schur complement not positive definite at mode " + std::to_string(p.j) +
                        " (coercivity violated)");
    }
    ModeSolution sol;
    sol.u = llt_.solve(p.rhs);
    // One step of iterative refinement.
    const Eigen::VectorXd r = p.rhs - S * sol.u;
    sol.u += llt_.solve(r);
    sol.lambda = -Y * setup_->trace.apply(sol.u);
    sol.residual = mode_residual(p, sol);
    return sol;
  }

 private:
  const FemBemSetup* setup_;
  std::vector<Eigen::Triplet<double>> base_;
  Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> llt_;
};

inline ModeSolution solve_mode(const ModeProblem& p) {
  ModeSolver solver(*p.setup);
  return solver.solve(p);
}

/// Modal solution of the truncated extension problem.
struct ExtensionSolution {
  std::vector<ModeSolution> modes;
  std::shared_ptr<const ModalBasis> basis;
  std::shared_ptr<const FemBemSetup> setup;
  FracParams params{0.5, 1.0};
  Eigen::VectorXd trace_field;  // sum_j phi_j(0) u_j
  std::shared_ptr<const PointLocator> locator;
};

inline ExtensionSolution solve_fractional(const FracParams& params, std::shared_ptr<const FemBemSetup> setup,
                                          std::shared_ptr<const ModalBasis> basis) {
  ExtensionSolution sol;
  sol.params = params;
  sol.basis = basis;
  sol.setup = setup;
  sol.trace_field = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(setup->space.dim()));
  ModeSolver solver(*setup);
  sol.modes.reserve(basis->size());
  for (std::size_t j = 0; j < basis->size(); ++j) {
    try {
      const ModeProblem p = assemble_mode_system(j, *basis, *setup, params);
      sol.modes.push_back(solver.solve(p));
    } catch (const Error& e) {
      throw SolverError("mode " + std::to_string(j) + ": " + e.what());
    }
    sol.trace_field += basis->trace_value(j) * sol.modes.back().u;
  }
  sol.locator = std::make_shared<PointLocator>(setup->space.mesh());
  return sol;
}

/// u(x) = sum_j phi_j(0) u_j(x) for x in the closed domain.
inline double evaluate_trace(const ExtensionSolution& sol, Point x) {
  const auto loc = sol.locator->locate(x);
  if (!loc) throw DomainError("evaluate_trace: point outside the domain (use evaluate_extension)");
  return evaluate_p1(sol.setup->space.mesh(), sol.trace_field, *loc);
}

/// Extension U(x, y): interior modal sum, or the exterior representation
/// sum_j phi_j(y) (K~ g_j - V~ lambda_j)(x) outside the domain.
inline double evaluate_extension(const ExtensionSolution& sol, Point x, double y) {
  const double Y = sol.basis->space().grid().cutoff();
  if (!(y >= 0.0 && y <= Y)) throw DomainError("evaluate_extension: y outside [0, Y]");
  const auto loc = sol.locator->locate(x);
  const TriMesh& mesh = sol.setup->space.mesh();
  double sum = 0.0;
  if (loc) {
    for (std::size_t j = 0; j < sol.modes.size(); ++j) {
      sum += eval_modal_basis(*sol.basis, j, y) * evaluate_p1(mesh, sol.modes[j].u, *loc);
    }
    return sum;
  }
  for (std::size_t j = 0; j < sol.modes.size(); ++j) {
    const double phi = eval_modal_basis(*sol.basis, j, y);
    if (phi == 0.0) continue;
    const Eigen::VectorXd g = sol.setup->trace.apply(sol.modes[j].u);
    sum -= phi * eval_potentials(sol.setup->boundary, sol.modes[j].lambda, g, std::sqrt(sol.basis->eigenvalue(j)), x);
  }
  return sum;
}

/// F(U_h) = d_beta (f, tr U_h) = sum_j rhs_j . u_j.
inline double energy_value(const ExtensionSolution& sol) {
  return sol.params.d_beta() * sol.setup->load.dot(sol.trace_field);
}

/// Writes <prefix>_modes.csv (j, mu_j, phi_j(0)) and <prefix>_coefficients.txt
/// (per mode: u_j then lambda_j, one line each).
inline void export_solution(const ExtensionSolution& sol, const std::string& prefix) {
  std::ofstream modes(prefix + "_modes.csv");
  std::ofstream coef(prefix + "_coefficients.txt");
  if (!modes || !coef) throw ParameterError("cannot write solution files with prefix " + prefix);
  char buf[96];
  modes << "j,mu,phi0\n";
  for (std::size_t j = 0; j < sol.modes.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%zu,%.16e,%.16e\n", j, sol.basis->eigenvalue(j), sol.basis->trace_value(j));
    modes << buf;
    for (const auto* v : {&sol.modes[j].u, &sol.modes[j].lambda}) {
      for (Eigen::Index i = 0; i < v->size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.16e", i ? " " : "", (*v)(i));
        coef << buf;
      }
      coef << "\n";
    }
  }
}

}  // namespace fracext
