#pragma once

// Problem definition for  L^beta u + s u = f  on R^2 with L = -div(A grad .).

#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fracext/errors.hpp"
#include "fracext/point.hpp"
#include "fracext/specfun.hpp"

namespace fracext {

/// Symmetric 2x2 matrix stored as (xx, xy, yy).
struct Sym2 {
  double xx = 1.0;
  double xy = 0.0;
  double yy = 1.0;

  [[nodiscard]] double min_eigenvalue() const {
    const double mean = 0.5 * (xx + yy);
    const double dev = std::hypot(0.5 * (xx - yy), xy);
    return mean - dev;
  }
  [[nodiscard]] Point apply(Point v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
};

/// alpha = 1 - 2 beta and d_beta = 2^{1-2beta} Gamma(1-beta) / Gamma(beta).
struct DerivedConstants {
  double alpha;
  double d_beta;
};

inline DerivedConstants derive_constants(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw ParameterError("beta must lie in (0,1), got " + std::to_string(beta));
  }
  const double alpha = 1.0 - 2.0 * beta;
  const double log_d = alpha * std::numbers::ln2 + log_gamma(1.0 - beta) - log_gamma(beta);
  return {alpha, std::exp(log_d)};
}

/// Constant of the fundamental solution C_{d,beta} / |x|^{d-2beta} of the fractional Laplacian.
inline double riesz_constant(int d, double beta) {
  if (d != 2 && d != 3) throw ParameterError("riesz_constant: dimension must be 2 or 3");
  if (!(beta > 0.0)) throw ParameterError("riesz_constant: beta must be positive");
  const double a = 0.5 * d - beta;
  if (std::abs(a) < 1e-14) throw ParameterError("riesz_constant: singular parameters d = 2 beta");
  if (a < 0.0) throw ParameterError("riesz_constant: requires d > 2 beta");
  const double log_c = log_gamma(a) - 2.0 * beta * std::numbers::ln2 -
                      0.5 * d * std::log(std::numbers::pi) - log_gamma(beta);
  return std::exp(log_c);
}

/// Fractional parameters of the problem. Immutable once built.
class FracParams {
 public:
  FracParams(double beta, double s) : beta_(beta), s_(s) {
    const auto c = derive_constants(beta);
    alpha_ = c.alpha;
    d_beta_ = c.d_beta;
    // The solver works in d = 2, where a positive reaction term is needed for well-posedness.
    if (!(s > 0.0)) throw ParameterError("s must be positive for the two-dimensional solver");
  }

  [[nodiscard]] double beta() const { return beta_; }
  [[nodiscard]] double s() const { return s_; }
  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] double d_beta() const { return d_beta_; }

 private:
  double beta_;
  double s_;
  double alpha_ = 0.0;
  double d_beta_ = 1.0;
};

/// Diffusion coefficient A(x). Equals the identity for |x| > support_radius.
struct CoefficientField {
  std::function<Sym2(Point)> evaluate;
  double support_radius = 0.0;
  double ellipticity = 1.0;
  bool constant = false;  // A == I everywhere

  [[nodiscard]] Sym2 operator()(Point x) const {
    if (constant || norm(x) > support_radius) return {};
    return evaluate(x);
  }

  static CoefficientField identity() {
    return {[](Point) { return Sym2{}; }, 0.0, 1.0, true};
  }

  /// Scalar field c(|x|) I on the disk |x| < radius, identity outside.
  static CoefficientField radial_scalar(std::function<double(double)> c, double radius,
                                        double ellipticity) {
    auto eval = [c = std::move(c)](Point x) {
      const double v = c(norm(x));
      return Sym2{v, 0.0, v};
    };
    return {std::move(eval), radius, ellipticity, false};
  }

  /// 1 + |x|(1 - |x|) inside the unit disk.
  static CoefficientField paper_radial() {
    return radial_scalar([](double r) { return 1.0 + r * (1.0 - r); }, 1.0, 1.0);
  }
};

/// Source term f supported in the disk of radius support_radius about the origin.
struct SourceTerm {
  std::function<double(Point)> evaluate;
  double support_radius = 0.0;
  // Radial profile r -> f(r) when the source is radially symmetric.
  std::function<double(double)> radial_profile;
  // Closed-form 2D Fourier transform rho -> f^(rho) of a radial source, if known.
  std::function<double(double)> fourier;

  [[nodiscard]] double operator()(Point x) const {
    if (norm(x) >= support_radius) return 0.0;
    return evaluate(x);
  }
  [[nodiscard]] bool is_radial() const { return static_cast<bool>(radial_profile); }

  static SourceTerm radial(std::function<double(double)> profile, double radius) {
    auto eval = [profile](Point x) { return profile(norm(x)); };
    return {std::move(eval), radius, std::move(profile)};
  }

  /// (1 - |x|^2)^2 on the unit disk, with f^(rho) = 16 pi J_3(rho) / rho^3.
  static SourceTerm bump() {
    SourceTerm f = radial([](double r) {
      const double t = 1.0 - r * r;
      return t * t;
    }, 1.0);
    f.fourier = [](double rho) {
      if (rho < 1e-3) return std::numbers::pi / 3.0 * (1.0 - rho * rho / 16.0);
      return 16.0 * std::numbers::pi * bessel_J(3, rho) / (rho * rho * rho);
    };
    return f;
  }

  /// |x| (1 - |x|) on the unit disk.
  static SourceTerm paper_radial() {
    return radial([](double r) { return r * (1.0 - r); }, 1.0);
  }

  static SourceTerm zero() {
    return radial([](double) { return 0.0; }, 0.0);
  }

  [[nodiscard]] SourceTerm scaled(double c) const {
    SourceTerm out = *this;
    auto e = evaluate;
    out.evaluate = [e, c](Point x) { return c * e(x); };
    if (radial_profile) {
      auto p = radial_profile;
      out.radial_profile = [p, c](double r) { return c * p(r); };
    }
    if (fourier) {
      auto t = fourier;
      out.fourier = [t, c](double rho) { return c * t(rho); };
    }
    return out;
  }
};

/// Counterclockwise simple polygon.
class DomainSpec {
 public:
  explicit DomainSpec(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 3) throw MeshError("polygon needs at least three vertices");
    if (signed_area() <= 0.0) throw MeshError("polygon must be counterclockwise with positive area");
    if (!is_simple()) throw MeshError("polygon is not simple");
  }

  static DomainSpec square(double side) {
    const double a = 0.5 * side;
    return DomainSpec({{-a, -a}, {a, -a}, {a, a}, {-a, a}});
  }

  /// Plain-text vertex list, one "x y" pair per line; '#' starts a comment.
  static DomainSpec load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open polygon file " + path);
    std::vector<Point> pts;
    std::string line;
    while (std::getline(in, line)) {
      if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
      std::istringstream ls(line);
      Point p;
      if (ls >> p.x >> p.y) pts.push_back(p);
    }
    return DomainSpec(std::move(pts));
  }

  [[nodiscard]] const std::vector<Point>& vertices() const { return vertices_; }

  [[nodiscard]] double signed_area() const {
    double a = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      a += cross(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
    }
    return 0.5 * a;
  }

  /// Outward unit normal of edge i (from vertex i to i+1).
  [[nodiscard]] Point edge_normal(std::size_t i) const {
    const Point d = vertices_[(i + 1) % vertices_.size()] - vertices_[i];
    const double l = norm(d);
    return {d.y / l, -d.x / l};
  }

  [[nodiscard]] bool contains(Point p) const {
    bool inside = false;
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Point a = vertices_[i];
      const Point b = vertices_[j];
      if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
        inside = !inside;
      }
    }
    return inside;
  }

 private:
  [[nodiscard]] bool is_simple() const {
    const std::size_t n = vertices_.size();
    auto orient = [](Point a, Point b, Point c) { return cross(b - a, c - a); };
    for (std::size_t i = 0; i < n; ++i) {
      const Point a = vertices_[i], b = vertices_[(i + 1) % n];
      for (std::size_t j = i + 1; j < n; ++j) {
        if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
        const Point c = vertices_[j], d = vertices_[(j + 1) % n];
        const double o1 = orient(a, b, c), o2 = orient(a, b, d);
        const double o3 = orient(c, d, a), o4 = orient(c, d, b);
        if (o1 * o2 < 0.0 && o3 * o4 < 0.0) return false;
      }
    }
    return true;
  }

  std::vector<Point> vertices_;
};

}  // namespace fracext
