#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fracext/study.hpp"

using namespace fracext;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tmp(const std::string& name) { return (std::filesystem::path(::testing::TempDir()) / name).string(); }

StudyConfig small_config() {
  StudyConfig c;
  c.max_level = 2;
  c.base_n = 4;
  return c;
}

}  // namespace

TEST(SelectParameters, Examples) {
  const FracParams half(0.5, 1.0);
  EXPECT_EQ(select_parameters(0, 0.5, half).p, 1);
  EXPECT_EQ(select_parameters(1, 0.5, half).p, 1);
  EXPECT_EQ(select_parameters(3, 0.5, half).p, 8);
  EXPECT_EQ(select_parameters(3, 0.5, half).L, 8);
  EXPECT_DOUBLE_EQ(select_parameters(2, 1.0 / 8.0, half).Y, 64.0);
  EXPECT_EQ(select_parameters(0, 1.0, half).Y, 2.0);
  // beta = 0.3 and 0.7 share mu = 1 + |alpha| = 1.4.
  const double y3 = select_parameters(2, 0.1, FracParams(0.3, 1.0)).Y;
  const double y7 = select_parameters(2, 0.1, FracParams(0.7, 1.0)).Y;
  EXPECT_DOUBLE_EQ(y3, y7);
  EXPECT_NEAR(y3, std::pow(0.1, -2.0 / 1.4), 1e-12);
  EXPECT_THROW(select_parameters(-1, 0.5, half), ParameterError);
  EXPECT_THROW(select_parameters(1, 0.0, half), ParameterError);
}

TEST(StudyConfig, Validation) {
  StudyConfig c;
  EXPECT_NO_THROW(c.validate());
  c.beta = 1.0;
  EXPECT_THROW(c.validate(), ParameterError);
  c = StudyConfig{};
  c.sigma = 1.0;
  EXPECT_THROW(c.validate(), ParameterError);
  c = StudyConfig{};
  c.max_level = -1;
  EXPECT_THROW(c.validate(), ParameterError);
  c = StudyConfig{};
  c.p_override = 0;
  EXPECT_THROW(c.validate(), ParameterError);
  c = StudyConfig{};
  c.Y_override = 0.5;
  EXPECT_THROW(c.validate(), ParameterError);
  EXPECT_THROW(study_mesh("square:abc", 8, 0), ParameterError);
  EXPECT_THROW(study_mesh("square:-1", 8, 0), ParameterError);
}

TEST(StudyMesh, SquareAndPolygon) {
  const auto sq = study_mesh("square:4", 8, 1);
  EXPECT_EQ(sq.num_vertices(), 17u * 17u);
  const std::string poly = tmp("study_l.txt");
  std::ofstream(poly) << "# L shape\n-2 -2\n2 -2\n2 0\n0 0\n0 2\n-2 2\n";
  const auto m0 = study_mesh(poly, 8, 0);
  const auto m1 = study_mesh(poly, 8, 1);
  EXPECT_LE(m0.h, 4.0 * std::sqrt(2.0) / 8.0 + 1e-12);
  EXPECT_EQ(m1.num_triangles(), 4 * m0.num_triangles());
}

TEST(ConvergenceStudy, SingleLevel) {
  StudyConfig c = small_config();
  c.max_level = 0;
  const auto r = run_convergence_study(c);
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_TRUE(std::isnan(r.records[0].eoc_energy));
  EXPECT_TRUE(std::isnan(r.records[0].eoc_l2));
  EXPECT_GT(r.records[0].energy, 0.0);
}

TEST(ConvergenceStudy, RecordsAndCsv) {
  StudyConfig c = small_config();
  c.output = tmp("study_a.csv");
  c.samples = {{0, 0}, {0.5, 0}};
  const auto r = run_convergence_study(c);
  ASSERT_EQ(r.records.size(), 3u);
  for (std::size_t m = 0; m < 3; ++m) {
    const auto& rec = r.records[m];
    EXPECT_EQ(rec.level, static_cast<int>(m));
    EXPECT_EQ(rec.ndof_fem, static_cast<std::size_t>((4 * (1 << m) + 1) * (4 * (1 << m) + 1)));
    EXPECT_EQ(rec.ndof_bem, static_cast<std::size_t>(16 * (1 << m)));
    EXPECT_GE(rec.n_modes, static_cast<std::size_t>(rec.p + 1));
    EXPECT_EQ((rec.n_modes - 1) % static_cast<std::size_t>(rec.p), 0u);
    if (m > 0) EXPECT_GE(rec.energy, r.records[m - 1].energy - 1e-12);
  }
  EXPECT_EQ(r.records.back().l2_err, 0.0);
  EXPECT_EQ(r.samples.size(), 6u);

  const std::string text = slurp(c.output);
  EXPECT_EQ(text, format_csv(r.records));
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "level,h,p,L,Y,n_modes,ndof_fem,ndof_bem,energy,energy_err,l2_err,eoc_energy,eoc_l2");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
  const std::string pts = slurp(samples_path(c.output));
  EXPECT_EQ(pts.substr(0, pts.find('\n')), "level,x,y,u,u_ref,abs_err");

  // Byte-identical on rerun.
  StudyConfig c2 = c;
  c2.output = tmp("study_b.csv");
  run_convergence_study(c2);
  EXPECT_EQ(slurp(c2.output), text);
  EXPECT_EQ(slurp(samples_path(c2.output)), pts);
}

TEST(ConvergenceStudy, Overrides) {
  StudyConfig c = small_config();
  c.max_level = 1;
  c.p_override = 3;
  c.Y_override = 5.0;
  const auto r = run_convergence_study(c);
  for (const auto& rec : r.records) {
    EXPECT_EQ(rec.p, 3);
    EXPECT_EQ(rec.Y, 5.0);
  }
}

TEST(Helpers, SamplesPathAndPoints) {
  EXPECT_EQ(samples_path("out.csv"), "out_points.csv");
  EXPECT_EQ(samples_path("dir/out"), "dir/out_points.csv");
  const std::string p = tmp("pts.txt");
  std::ofstream(p) << "0 0\n# comment\n0.5 -1\n";
  const auto pts = load_points(p);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[1].y, -1.0);
  EXPECT_THROW(load_points(tmp("missing.txt")), ParameterError);
}
