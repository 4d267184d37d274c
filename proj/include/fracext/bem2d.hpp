#pragma once

// Galerkin boundary elements for the Yukawa kernel G(r) = K0(k r) / 2pi on a closed
// polygonal curve: single layer V (piecewise constants), double layer K (constants
// x P1 traces), hypersingular W (P1 x P1), and point evaluation of the potentials.
//
// The double layer uses the source normal derivative with the outward normal,
//   (K~phi)(x) = int_G dG(x - y)/dn_y phi(y) ds_y,
// so that interior Green's identity reads u = V~ d_n u - K~ u and the interior
// trace of K~ is -1/2 + K.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include "fracext/errors.hpp"
#include "fracext/fem2d.hpp"
#include "fracext/point.hpp"
#include "fracext/quadrature.hpp"
#include "fracext/specfun.hpp"

namespace fracext {

/// Closed counterclockwise loop of straight segments; segment i runs from node i
/// to node i+1 (mod N).
struct BoundaryMesh {
  std::vector<Point> nodes;
  std::vector<double> lengths;
  std::vector<Point> tangents;  // unit, along the loop
  std::vector<Point> normals;   // unit, outward
  std::vector<int> fem_vertices;  // TriMesh vertex of each node, empty if standalone

  [[nodiscard]] std::size_t size() const { return nodes.size(); }
  [[nodiscard]] Point start(std::size_t i) const { return nodes[i]; }
  [[nodiscard]] Point end(std::size_t i) const { return nodes[(i + 1) % nodes.size()]; }
  [[nodiscard]] Point midpoint(std::size_t i) const { return 0.5 * (start(i) + end(i)); }
  [[nodiscard]] Point at(std::size_t i, double s) const { return start(i) + s * (end(i) - start(i)); }
  [[nodiscard]] double perimeter() const {
    double p = 0.0;
    for (double l : lengths) p += l;
    return p;
  }
};

/// Loop through the given points in order (counterclockwise).
inline BoundaryMesh boundary_mesh_from_points(std::vector<Point> pts) {
  if (pts.size() < 3) throw MeshError("boundary mesh needs at least three nodes");
  BoundaryMesh bm;
  bm.nodes = std::move(pts);
  const std::size_t n = bm.nodes.size();
  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) area2 += cross(bm.nodes[i], bm.nodes[(i + 1) % n]);
  if (!(area2 > 0.0)) throw MeshError("boundary loop must be counterclockwise");
  for (std::size_t i = 0; i < n; ++i) {
    const Point d = bm.end(i) - bm.start(i);
    const double l = norm(d);
    if (!(l > 0.0)) throw MeshError("zero-length boundary segment");
    bm.lengths.push_back(l);
    bm.tangents.push_back((1.0 / l) * d);
    bm.normals.push_back({d.y / l, -d.x / l});
  }
  return bm;
}

inline BoundaryMesh build_boundary_mesh(const TriMesh& mesh) {
  if (mesh.boundary_edges.empty()) throw MeshError("mesh has no boundary");
  for (std::size_t k = 0; k < mesh.boundary_edges.size(); ++k) {
    if (mesh.boundary_edges[k][1] != mesh.boundary_edges[(k + 1) % mesh.boundary_edges.size()][0]) {
      throw MeshError("boundary must be a single closed loop (unsupported topology)");
    }
  }
  std::vector<Point> pts;
  std::vector<int> ids;
  for (const auto& e : mesh.boundary_edges) {
    pts.push_back(mesh.vertices[e[0]]);
    ids.push_back(e[0]);
  }
  BoundaryMesh bm = boundary_mesh_from_points(std::move(pts));
  bm.fem_vertices = std::move(ids);
  return bm;
}

/// Regular N-gon inscribed in the circle of radius R.
inline BoundaryMesh circle_boundary(double R, std::size_t N) {
  std::vector<Point> pts;
  for (std::size_t k = 0; k < N; ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(N);
    pts.push_back({R * std::cos(t), R * std::sin(t)});
  }
  return boundary_mesh_from_points(std::move(pts));
}

/// Galerkin matrices for one wavenumber k. Rows of K and M index piecewise
/// constants, columns index P1 nodes. K' is K transposed.
struct BemOperators {
  double k = 1.0;
  Eigen::MatrixXd V;
  Eigen::MatrixXd K;
  Eigen::MatrixXd W;
  Eigen::MatrixXd M;
};

/// Mixed mass <phi_b, chi_i>.
inline Eigen::MatrixXd mixed_mass(const BoundaryMesh& bm) {
  const auto n = static_cast<Eigen::Index>(bm.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    M(i, i) += 0.5 * bm.lengths[static_cast<std::size_t>(i)];
    M(i, (i + 1) % n) += 0.5 * bm.lengths[static_cast<std::size_t>(i)];
  }
  return M;
}

namespace detail {

inline double point_segment_distance(Point p, Point a, Point b) {
  const Point d = b - a;
  const double l2 = dot(d, d);
  const double t = l2 > 0.0 ? std::clamp(dot(p - a, d) / l2, 0.0, 1.0) : 0.0;
  return norm(p - (a + t * d));
}

inline double segment_distance(Point a, Point b, Point c, Point d) {
  const double o1 = cross(b - a, c - a), o2 = cross(b - a, d - a);
  const double o3 = cross(d - c, a - c), o4 = cross(d - c, b - c);
  if (o1 * o2 < 0.0 && o3 * o4 < 0.0) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

// Beyond k r = kCutoff the kernel is below 1e-17 and contributions are dropped.
inline constexpr double kCutoff = 40.0;

// Gauss-Legendre rules on (0,1), cached by order.
inline const QuadRule& unit_gauss(int n) {
  static const std::vector<QuadRule> rules = [] {
    std::vector<QuadRule> r;
    for (int q = 1; q <= 16; ++q) r.push_back(gauss_legendre(q).mapped(0.0, 1.0));
    return r;
  }();
  return rules[static_cast<std::size_t>(n - 1)];
}

// Moments of the kernels over a pair of panels (x on panel i with parameter s,
// y on panel j with parameter t, both in [0,1]).
struct PairMoments {
  double g0 = 0.0, gs = 0.0, gt = 0.0, gst = 0.0;  // G * {1, s, t, st}
  double dj0 = 0.0, djt = 0.0;  // dG(x - y)/dn_y * {1, t}
  double di0 = 0.0, dis = 0.0;  // dG(y - x)/dn_x * {1, s}
};

class PairIntegrator {
 public:
  PairIntegrator(const BoundaryMesh& bm, double k) : bm_(bm), k_(k), c_(k * 0.5 * std::numbers::inv_pi) {}

  [[nodiscard]] PairMoments coincident(std::size_t i) const {
    // Reduction to the distance rho = |s - t|:
    //   int int g(|s-t|) m(s,t) = int_0^1 g(rho) Q_m(rho) drho
    // with Q_1 = 2(1-rho), Q_s = Q_t = 1-rho, Q_st = 2((1-rho)^3/3 + rho(1-rho)^2/2).
    const double h = bm_.lengths[i];
    std::array<double, 3> acc{0.0, 0.0, 0.0};
    auto add = [&](double rho, double wg) {
      const double q = 1.0 - rho;
      acc[0] += wg * 2.0 * q;
      acc[1] += wg * q;
      acc[2] += wg * 2.0 * (q * q * q / 3.0 + 0.5 * rho * q * q);
    };
    const double rc = std::min(h, 2.0 / k_);
    // (0, rc): G = a(r)(-ln r) + b(r), a and b smooth.
    static const QuadRule lg = gauss_log(12);
    static const QuadRule gl = gauss_legendre(12).mapped(0.0, 1.0);
    const double lnrc = std::log(rc);
    for (std::size_t q = 0; q < lg.size(); ++q) {
      const double r = rc * lg.nodes[q];
      const auto sp = yukawa_green_smooth_split(k_, r);
      add(r / h, rc * lg.weights[q] * sp.log_coefficient);
    }
    for (std::size_t q = 0; q < gl.size(); ++q) {
      const double r = rc * gl.nodes[q];
      const auto sp = yukawa_green_smooth_split(k_, r);
      add(r / h, rc * gl.weights[q] * (sp.smooth_part - lnrc * sp.log_coefficient));
    }
    // (rc, min(h, cutoff)): smooth, exponentially decaying; panels of width 2/k.
    const double rend = std::min(h, kCutoff / k_);
    const QuadRule& g10 = unit_gauss(10);
    for (double r0 = rc; r0 < rend * (1.0 - 1e-14);) {
      const double r1 = std::min(rend, r0 + 2.0 / k_);
      for (std::size_t q = 0; q < g10.size(); ++q) {
        const double r = r0 + (r1 - r0) * g10.nodes[q];
        add(r / h, (r1 - r0) * g10.weights[q] * detail::bessel_k01(k_ * r).k0 * 0.5 * std::numbers::inv_pi);
      }
      r0 = r1;
    }
    // Change of variables r = h rho: int_0^1 g(h rho) Q drho = (1/h) int_0^h g(r) Q(r/h) dr; times h^2.
    PairMoments m;
    m.g0 = h * acc[0];
    m.gs = m.gt = h * acc[1];
    m.gst = h * acc[2];
    return m;
  }

  /// Panels sharing one node; si, tj give the parameter (0 or 1) of the common node.
  /// Offsets are measured from the shared node so that x - y keeps full relative
  /// precision near the corner.
  [[nodiscard]] PairMoments adjacent(std::size_t i, std::size_t j, double si, double tj) const {
    PairMoments m;
    const double hi = bm_.lengths[i], hj = bm_.lengths[j];
    const Point ei = si == 0.0 ? bm_.tangents[i] : -1.0 * bm_.tangents[i];
    const Point ej = tj == 0.0 ? bm_.tangents[j] : -1.0 * bm_.tangents[j];
    const Point ni = bm_.normals[i], nj = bm_.normals[j];
    auto point = [&](double u, double v, double w) {
      const double s = si == 0.0 ? u : 1.0 - u;
      const double t = tj == 0.0 ? v : 1.0 - v;
      const Point d = (u * hi) * ei - (v * hj) * ej;
      const double r = norm(d);
      const double ww = w * hi * hj;
      if (k_ * r > kCutoff) return;
      const auto kk = bessel_k01(k_ * r);
      const double gv = ww * kk.k0 * 0.5 * std::numbers::inv_pi;
      m.g0 += gv;
      m.gs += gv * s;
      m.gt += gv * t;
      m.gst += gv * s * t;
      const double dfac = ww * c_ * kk.k1 / r;
      const double dj = dfac * dot(d, nj);
      const double di = -dfac * dot(d, ni);
      m.dj0 += dj;
      m.djt += dj * t;
      m.di0 += di;
      m.dis += di * s;
    };
    const QuadRule& g = unit_gauss(8);
    auto square = [&](double u0, double u1, double v0, double v1) {
      const double area = (u1 - u0) * (v1 - v0);
      for (std::size_t p = 0; p < g.size(); ++p) {
        for (std::size_t q = 0; q < g.size(); ++q) {
          point(u0 + (u1 - u0) * g.nodes[p], v0 + (v1 - v0) * g.nodes[q], area * g.weights[p] * g.weights[q]);
        }
      }
    };
    double a = 1.0;
    for (int l = 0; l < 4; ++l) {
      const double b = 0.5 * a;
      square(b, a, 0.0, b);
      square(0.0, b, b, a);
      square(b, a, b, a);
      a = b;
    }
    // [0,a]^2 split along the diagonal; Duffy map u = a xi, v = a xi eta, with
    // xi = w^3 to resolve the xi log(xi) behaviour at the corner.
    for (int half = 0; half < 2; ++half) {
      for (std::size_t p = 0; p < g.size(); ++p) {
        const double w = g.nodes[p];
        const double xi = w * w * w;
        for (std::size_t q = 0; q < g.size(); ++q) {
          double u = a * xi, v = a * xi * g.nodes[q];
          if (half == 1) std::swap(u, v);
          point(u, v, a * a * xi * 3.0 * w * w * g.weights[p] * g.weights[q]);
        }
      }
    }
    return m;
  }

  [[nodiscard]] PairMoments disjoint(std::size_t i, std::size_t j) const {
    PairMoments m;
    recurse(i, j, 0.0, 1.0, 0.0, 1.0, 0, m);
    return m;
  }

 private:
  void recurse(std::size_t i, std::size_t j, double s0, double s1, double t0, double t1, int depth,
               PairMoments& m) const {
    const Point xa = bm_.at(i, s0), xb = bm_.at(i, s1), ya = bm_.at(j, t0), yb = bm_.at(j, t1);
    const double dist = segment_distance(xa, xb, ya, yb);
    if (k_ * dist > kCutoff) return;
    const double lx = (s1 - s0) * bm_.lengths[i], ly = (t1 - t0) * bm_.lengths[j];
    const double size = std::max(lx, ly);
    if ((size > 2.0 * dist || k_ * size > 4.0) && depth < 40) {
      if (lx >= ly) {
        const double sm = 0.5 * (s0 + s1);
        recurse(i, j, s0, sm, t0, t1, depth + 1, m);
        recurse(i, j, sm, s1, t0, t1, depth + 1, m);
      } else {
        const double tm = 0.5 * (t0 + t1);
        recurse(i, j, s0, s1, t0, tm, depth + 1, m);
        recurse(i, j, s0, s1, tm, t1, depth + 1, m);
      }
      return;
    }
    const double ratio = dist / size;
    const int order = ratio >= 8.0 ? 3 : ratio >= 3.0 ? 5 : ratio >= 1.0 ? 8 : 10;
    integrate_box(i, j, s0, s1, t0, t1, order, m);
  }

  // Tensor Gauss over [s0,s1] x [t0,t1]; skipped if the kernel is negligible there.
  void integrate_box(std::size_t i, std::size_t j, double s0, double s1, double t0, double t1, int order,
                     PairMoments& m) const {
    const Point xa = bm_.at(i, s0), xb = bm_.at(i, s1), ya = bm_.at(j, t0), yb = bm_.at(j, t1);
    if (k_ * segment_distance(xa, xb, ya, yb) > kCutoff) return;
    const QuadRule& g = unit_gauss(order);
    const double hi = bm_.lengths[i], hj = bm_.lengths[j];
    const Point ni = bm_.normals[i], nj = bm_.normals[j];
    const double jac = (s1 - s0) * (t1 - t0) * hi * hj;
    for (std::size_t p = 0; p < g.size(); ++p) {
      const double s = s0 + (s1 - s0) * g.nodes[p];
      const Point x = bm_.at(i, s);
      for (std::size_t q = 0; q < g.size(); ++q) {
        const double t = t0 + (t1 - t0) * g.nodes[q];
        const Point d = x - bm_.at(j, t);
        const double r = norm(d);
        const double w = jac * g.weights[p] * g.weights[q];
        const auto kk = bessel_k01(k_ * r);
        const double gv = w * kk.k0 * 0.5 * std::numbers::inv_pi;
        m.g0 += gv;
        m.gs += gv * s;
        m.gt += gv * t;
        m.gst += gv * s * t;
        const double dfac = w * c_ * kk.k1 / r;
        const double dj = dfac * dot(d, nj);
        const double di = -dfac * dot(d, ni);
        m.dj0 += dj;
        m.djt += dj * t;
        m.di0 += di;
        m.dis += di * s;
      }
    }
  }

  const BoundaryMesh& bm_;
  double k_;
  double c_;
};

}  // namespace detail

/// V, K, W and the mixed mass for wavenumber k, assembled together so that kernel
/// evaluations are shared.
inline BemOperators assemble_operators(const BoundaryMesh& bm, double k) {
  if (!(k > 0.0)) throw DomainError("BEM assembly: wavenumber must be positive");
  const std::size_t n = bm.size();
  const auto N = static_cast<Eigen::Index>(n);
  BemOperators op;
  op.k = k;
  op.V = Eigen::MatrixXd::Zero(N, N);
  op.K = Eigen::MatrixXd::Zero(N, N);
  op.W = Eigen::MatrixXd::Zero(N, N);
  op.M = mixed_mass(bm);
  const detail::PairIntegrator integ(bm, k);
  const double k2 = k * k;

  // W contribution of a panel pair from the G-moments.
  auto add_w = [&](std::size_t i, std::size_t j, const detail::PairMoments& m, bool both) {
    const std::array<Eigen::Index, 2> ai = {static_cast<Eigen::Index>(i), static_cast<Eigen::Index>((i + 1) % n)};
    const std::array<Eigen::Index, 2> bj = {static_cast<Eigen::Index>(j), static_cast<Eigen::Index>((j + 1) % n)};
    const std::array<double, 2> di = {-1.0 / bm.lengths[i], 1.0 / bm.lengths[i]};
    const std::array<double, 2> dj = {-1.0 / bm.lengths[j], 1.0 / bm.lengths[j]};
    // int int G phi_a(s) psi_b(t) with phi = {1-s, s}, psi = {1-t, t}
    const double mm[2][2] = {{m.g0 - m.gs - m.gt + m.gst, m.gt - m.gst}, {m.gs - m.gst, m.gst}};
    const double nn = dot(bm.normals[i], bm.normals[j]);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        const double w = di[a] * dj[b] * m.g0 + k2 * nn * mm[a][b];
        op.W(ai[a], bj[b]) += w;
        if (both) op.W(bj[b], ai[a]) += w;
      }
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    const auto I = static_cast<Eigen::Index>(i);
    {
      const auto m = integ.coincident(i);
      op.V(I, I) = m.g0;
      add_w(i, i, m, false);
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto J = static_cast<Eigen::Index>(j);
      detail::PairMoments m;
      if (j == i + 1) {
        m = integ.adjacent(i, j, 1.0, 0.0);
      } else if (i == 0 && j == n - 1) {
        m = integ.adjacent(i, j, 0.0, 1.0);
      } else {
        m = integ.disjoint(i, j);
      }
      op.V(I, J) = op.V(J, I) = m.g0;
      op.K(I, J) += m.dj0 - m.djt;
      op.K(I, static_cast<Eigen::Index>((j + 1) % n)) += m.djt;
      op.K(J, I) += m.di0 - m.dis;
      op.K(J, static_cast<Eigen::Index>((i + 1) % n)) += m.dis;
      add_w(i, j, m, true);
    }
  }
  return op;
}

inline Eigen::MatrixXd assemble_V(const BoundaryMesh& bm, double k) { return assemble_operators(bm, k).V; }
inline Eigen::MatrixXd assemble_K(const BoundaryMesh& bm, double k) { return assemble_operators(bm, k).K; }
inline Eigen::MatrixXd assemble_W(const BoundaryMesh& bm, double k) { return assemble_operators(bm, k).W; }

namespace detail {

template <class Acc>
void potential_segment(const BoundaryMesh& bm, double k, Point x, std::size_t j, double t0, double t1, int depth,
                       Acc& acc) {
  const Point a = bm.at(j, t0), b = bm.at(j, t1);
  const double dist = point_segment_distance(x, a, b);
  if (!(dist > 0.0)) throw DomainError("potential evaluation point lies on the boundary");
  if (k * dist > kCutoff) return;
  const double len = (t1 - t0) * bm.lengths[j];
  if ((len > dist || k * len > 4.0) && depth < 60) {
    const double tm = 0.5 * (t0 + t1);
    potential_segment(bm, k, x, j, t0, tm, depth + 1, acc);
    potential_segment(bm, k, x, j, tm, t1, depth + 1, acc);
    return;
  }
  const double ratio = dist / len;
  const QuadRule& g = unit_gauss(ratio >= 4.0 ? 6 : ratio >= 2.0 ? 10 : 16);
  for (std::size_t q = 0; q < g.size(); ++q) {
    const double t = t0 + (t1 - t0) * g.nodes[q];
    acc(t, len * g.weights[q]);
  }
}

}  // namespace detail

/// (V~ lambda)(x) - (K~ phi)(x) with lambda piecewise constant and phi given by its
/// nodal P1 values.
inline double eval_potentials(const BoundaryMesh& bm, const Eigen::VectorXd& lambda, const Eigen::VectorXd& phi,
                              double k, Point x) {
  if (!(k > 0.0)) throw DomainError("eval_potentials: wavenumber must be positive");
  const std::size_t n = bm.size();
  const double c = 0.5 * std::numbers::inv_pi;
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double lam = lambda(static_cast<Eigen::Index>(j));
    const double p0 = phi(static_cast<Eigen::Index>(j)), p1 = phi(static_cast<Eigen::Index>((j + 1) % n));
    if (lam == 0.0 && p0 == 0.0 && p1 == 0.0) {
      // Still reject evaluation on the boundary.
      if (!(detail::point_segment_distance(x, bm.start(j), bm.end(j)) > 0.0)) {
        throw DomainError("potential evaluation point lies on the boundary");
      }
      continue;
    }
    const Point nj = bm.normals[j];
    auto acc = [&](double t, double w) {
      const Point d = x - bm.at(j, t);
      const double r = norm(d);
      const auto kk = detail::bessel_k01(k * r);
      const double dn = k * kk.k1 * dot(d, nj) / r;  // 2pi * dG(x-y)/dn_y
      sum += w * c * (kk.k0 * lam - dn * ((1.0 - t) * p0 + t * p1));
    };
    detail::potential_segment(bm, k, x, j, 0.0, 1.0, 0, acc);
  }
  return sum;
}

}  // namespace fracext
