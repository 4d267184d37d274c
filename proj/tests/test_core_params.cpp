#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include "fracext/core_params.hpp"

using namespace fracext;

TEST(DeriveConstants, Examples) {
  const auto h = derive_constants(0.5);
  EXPECT_EQ(h.alpha, 0.0);
  EXPECT_NEAR(h.d_beta, 1.0, 1e-15);
  EXPECT_EQ(derive_constants(0.25).alpha, 0.5);
  // 50-digit reference values (mpmath).
  EXPECT_NEAR(derive_constants(0.3).d_beta / 0.57254045856831173310334101623863275429041159527123, 1.0, 1e-13);
  EXPECT_NEAR(derive_constants(0.25).d_beta / 0.47798879748612499536382000199511752350962095757512, 1.0, 1e-13);
  EXPECT_NEAR(derive_constants(0.7).d_beta / 1.7466014585250251399086626104981496592094324792368, 1.0, 1e-13);
}

TEST(DeriveConstants, RangeAndAffineAlpha) {
  EXPECT_THROW(derive_constants(0.0), ParameterError);
  EXPECT_THROW(derive_constants(1.0), ParameterError);
  EXPECT_THROW(derive_constants(std::nan("")), ParameterError);
  double prev = 2.0;
  for (double b = 0.01; b < 1.0; b += 0.01) {
    const double a = derive_constants(b).alpha;
    EXPECT_GT(a, -1.0);
    EXPECT_LT(a, 1.0);
    EXPECT_LT(a, prev);
    EXPECT_EQ(a, 1.0 - 2.0 * b);
    prev = a;
  }
}

TEST(RieszConstant, Values) {
  EXPECT_NEAR(riesz_constant(3, 0.5) / 0.050660591821168885721939731604863819452179387336123, 1.0, 1e-13);
  EXPECT_NEAR(riesz_constant(3, 0.5), 1.0 / (2.0 * std::numbers::pi * std::numbers::pi), 1e-15);
  EXPECT_NEAR(riesz_constant(3, 0.3) / 0.03636475575326764459333617687595677976747344316752, 1.0, 1e-13);
  EXPECT_NEAR(riesz_constant(2, 0.3) / 0.091122644101247313169699142114012444281553188275674, 1.0, 1e-13);
  EXPECT_GT(riesz_constant(3, 0.9), 0.0);
  EXPECT_THROW(riesz_constant(2, 1.0), ParameterError);
}

TEST(FracParams, RequiresPositiveS) {
  EXPECT_THROW(FracParams(0.5, 0.0), ParameterError);
  EXPECT_THROW(FracParams(1.5, 1.0), ParameterError);
  const FracParams p(0.3, 2.0);
  EXPECT_EQ(p.alpha(), 1.0 - 2.0 * 0.3);
  EXPECT_EQ(p.s(), 2.0);
}

TEST(CoefficientField, EllipticAndIdentityOutside) {
  const auto c = CoefficientField::paper_radial();
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 1000; ++k) {
    const Point x{u(gen), u(gen)};
    const Sym2 a = c(x);
    EXPECT_GE(a.min_eigenvalue(), c.ellipticity - 1e-14);
    if (norm(x) > c.support_radius) {
      EXPECT_EQ(a.xx, 1.0);
      EXPECT_EQ(a.xy, 0.0);
      EXPECT_EQ(a.yy, 1.0);
    }
  }
  EXPECT_NEAR(c({0.5, 0.0}).xx, 1.25, 1e-15);
}

TEST(SourceTerm, SupportedInDisk) {
  const auto f = SourceTerm::paper_radial();
  EXPECT_EQ(f({1.5, 0.0}), 0.0);
  EXPECT_NEAR(f({0.5, 0.0}), 0.25, 1e-15);
  const auto b = SourceTerm::bump();
  EXPECT_EQ(b({0.0, 1.2}), 0.0);
  EXPECT_NEAR(b({0.0, 0.0}), 1.0, 1e-15);
  EXPECT_NEAR(b.scaled(2.0)({0.5, 0.0}), 2.0 * 0.5625, 1e-15);
  EXPECT_NEAR(b.fourier(0.0), std::numbers::pi / 3.0, 1e-15);
}

TEST(DomainSpec, SquareAndNormals) {
  const auto d = DomainSpec::square(4.0);
  EXPECT_NEAR(d.signed_area(), 16.0, 1e-14);
  const Point n = d.edge_normal(1);  // right edge
  EXPECT_NEAR(n.x, 1.0, 1e-15);
  EXPECT_NEAR(n.y, 0.0, 1e-15);
  EXPECT_TRUE(d.contains({0.0, 0.0}));
  EXPECT_FALSE(d.contains({3.0, 0.0}));
}

TEST(DomainSpec, RejectsBadPolygons) {
  EXPECT_THROW(DomainSpec({{0, 0}, {1, 0}}), MeshError);
  EXPECT_THROW(DomainSpec({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), MeshError);  // clockwise
  EXPECT_THROW(DomainSpec({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), MeshError);  // bow tie
}

TEST(DomainSpec, LoadsVertexFile) {
  const std::string path = ::testing::TempDir() + "lshape.txt";
  {
    std::ofstream out(path);
    out << "# L-shape\n0 0\n2 0\n2 1\n1 1\n1 2\n0 2\n";
  }
  const auto d = DomainSpec::load(path);
  EXPECT_EQ(d.vertices().size(), 6u);
  EXPECT_NEAR(d.signed_area(), 3.0, 1e-14);
  std::remove(path.c_str());
  EXPECT_THROW(DomainSpec::load(path), ParameterError);
}
