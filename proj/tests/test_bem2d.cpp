#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fracext/analysis.hpp"
#include "fracext/bem2d.hpp"
#include "fracext/fem2d.hpp"
#include "fracext/specfun.hpp"

using namespace fracext;

namespace {

BoundaryMesh square_boundary(int n) { return build_boundary_mesh(mesh_square(4.0, n)); }

std::vector<Point> interior_samples() {
  return {{0, 0}, {1, 0.5}, {-1.5, 1.2}, {0.3, -1.6}, {1.7, 1.7}, {-0.8, -0.4}};
}

}  // namespace

TEST(BoundaryMesh, FromSquareMesh) {
  const auto bm = square_boundary(8);
  ASSERT_EQ(bm.size(), 32u);
  EXPECT_NEAR(bm.perimeter(), 16.0, 1e-13);
  ASSERT_EQ(bm.fem_vertices.size(), 32u);
  for (std::size_t i = 0; i < bm.size(); ++i) {
    // Outward: the normal points away from the centre.
    EXPECT_GT(dot(bm.normals[i], bm.midpoint(i)), 0.0);
    EXPECT_NEAR(dot(bm.normals[i], bm.tangents[i]), 0.0, 1e-15);
  }
  EXPECT_THROW(boundary_mesh_from_points({{0, 0}, {0, 1}, {1, 0}}), MeshError);
  EXPECT_THROW(boundary_mesh_from_points({{0, 0}, {1, 0}}), MeshError);
}

TEST(BoundaryMesh, MixedMass) {
  const auto bm = circle_boundary(1.0, 16);
  const auto M = mixed_mass(bm);
  EXPECT_NEAR(M.sum(), bm.perimeter(), 1e-13);
}

TEST(BemOperators, Symmetry) {
  const auto bm = square_boundary(8);
  for (double k : {0.3, 1.0, 5.0}) {
    const auto op = assemble_operators(bm, k);
    const double vs = op.V.cwiseAbs().maxCoeff(), ws = op.W.cwiseAbs().maxCoeff();
    EXPECT_LE((op.V - op.V.transpose()).cwiseAbs().maxCoeff(), 1e-12 * vs) << k;
    EXPECT_LE((op.W - op.W.transpose()).cwiseAbs().maxCoeff(), 1e-12 * ws) << k;
    EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(op.V).info(), Eigen::Success) << k;
    EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(op.W).info(), Eigen::Success) << k;
    EXPECT_EQ(op.k, k);
  }
  EXPECT_THROW(assemble_operators(bm, 0.0), DomainError);
}

TEST(BemOperators, SplitAssemblersAgree) {
  const auto bm = circle_boundary(1.0, 24);
  const auto op = assemble_operators(bm, 2.0);
  EXPECT_EQ((assemble_V(bm, 2.0) - op.V).norm(), 0.0);
  EXPECT_EQ((assemble_K(bm, 2.0) - op.K).norm(), 0.0);
  EXPECT_EQ((assemble_W(bm, 2.0) - op.W).norm(), 0.0);
}

TEST(BemOperators, CircleSymbols) {
  const auto bm = circle_boundary(1.0, 256);
  const auto op = assemble_operators(bm, 1.0);
  const auto q0 = mode_quotients(bm, op, 0);
  EXPECT_NEAR(q0.V / (bessel_I(0, 1.0) * bessel_K(0, 1.0)), 1.0, 1e-3);
  for (int n = 0; n <= 4; ++n) {
    const auto q = mode_quotients(bm, op, n);
    const auto e = circle_symbols(1.0, 1.0, n);
    EXPECT_NEAR(q.V / e.V, 1.0, 1e-2) << n;
    EXPECT_NEAR(q.W / e.W, 1.0, 1e-2) << n;
  }
}

TEST(BemOperators, DoubleLayerOfConstant) {
  // K~1 = -1 inside for the Laplace kernel; for Yukawa |K 1| stays below 1/2 M 1.
  const auto bm = circle_boundary(1.0, 128);
  const auto op = assemble_operators(bm, 0.5);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(128);
  const Eigen::VectorXd k1 = op.K * one, m1 = op.M * one;
  for (Eigen::Index i = 0; i < 128; ++i) EXPECT_LT(std::abs(k1(i)), 0.5 * m1(i));
}

TEST(Potentials, ExteriorDecayAndEquation) {
  const auto bm = square_boundary(8);
  const double k = 1.5;
  Eigen::VectorXd lambda(32), phi(32);
  for (Eigen::Index i = 0; i < 32; ++i) {
    lambda(i) = std::cos(0.3 * static_cast<double>(i));
    phi(i) = 1.0 + 0.1 * static_cast<double>(i % 5);
  }
  const double a = std::abs(eval_potentials(bm, lambda, phi, k, {4, 0}));
  const double b = std::abs(eval_potentials(bm, lambda, phi, k, {8, 0}));
  const double c = std::abs(eval_potentials(bm, lambda, phi, k, {16, 0}));
  EXPECT_LT(b, a);
  EXPECT_LT(c, b);
  EXPECT_LT(c, 1e-5 * a);

  // -Lap w + k^2 w = 0 away from the boundary, by central differences.
  const double h = 1e-3;
  for (Point x : {Point{3.0, 0.4}, Point{-2.6, 2.9}, Point{0.1, -3.5}}) {
    auto w = [&](Point p) { return eval_potentials(bm, lambda, phi, k, p); };
    const double w0 = w(x);
    const double lap = (w({x.x + h, x.y}) + w({x.x - h, x.y}) + w({x.x, x.y + h}) + w({x.x, x.y - h}) - 4 * w0) / (h * h);
    EXPECT_LE(std::abs(lap - k * k * w0), 1e-3 * k * k * std::abs(w0));
  }
  EXPECT_THROW(eval_potentials(bm, lambda, phi, 0.0, {5, 0}), DomainError);
}

TEST(Potentials, GreensIdentity) {
  for (double mu : {0.5, 1.0, 4.0}) {
    const double k = std::sqrt(mu);
    const double r64 = greens_residual(square_boundary(16), k, {1, 0.5}, interior_samples());
    const double r128 = greens_residual(square_boundary(32), k, {1, 0.5}, interior_samples());
    EXPECT_LE(r128, 1e-2) << mu;
    EXPECT_LT(r128, r64) << mu;
  }
}
