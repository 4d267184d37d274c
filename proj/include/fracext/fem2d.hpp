#pragma once

// Interior discretization: triangle meshes of a polygon, the P1 space, stiffness,
// mass and load assembly, the boundary trace map and P1 point evaluation.

#include <Eigen/Sparse>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracext/core_params.hpp"
#include "fracext/errors.hpp"
#include "fracext/point.hpp"

namespace fracext {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triangle = std::array<int, 3>;
using Edge = std::array<int, 2>;

/// Conforming triangulation. Triangles are counterclockwise; boundary_edges trace
/// the single boundary loop counterclockwise, edge k ending where edge k+1 starts.
struct TriMesh {
  std::vector<Point> vertices;
  std::vector<Triangle> triangles;
  std::vector<Edge> boundary_edges;
  double h = 0.0;

  [[nodiscard]] std::size_t num_vertices() const { return vertices.size(); }
  [[nodiscard]] std::size_t num_triangles() const { return triangles.size(); }

  [[nodiscard]] double area(std::size_t t) const {
    const auto& tr = triangles[t];
    return 0.5 * cross(vertices[tr[1]] - vertices[tr[0]], vertices[tr[2]] - vertices[tr[0]]);
  }

  /// Boundary vertices in loop order (vertex k starts boundary edge k).
  [[nodiscard]] std::vector<int> boundary_vertices() const {
    std::vector<int> v;
    v.reserve(boundary_edges.size());
    for (const auto& e : boundary_edges) v.push_back(e[0]);
    return v;
  }
};

namespace detail {

inline double max_edge_length(const TriMesh& m) {
  double h = 0.0;
  for (const auto& t : m.triangles) {
    for (int k = 0; k < 3; ++k) h = std::max(h, norm(m.vertices[t[(k + 1) % 3]] - m.vertices[t[k]]));
  }
  return h;
}

inline std::pair<int, int> edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

// Boundary edges from the triangle list, chained into one counterclockwise loop.
inline std::vector<Edge> extract_boundary_loop(const std::vector<Triangle>& tris) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : tris) {
    for (int k = 0; k < 3; ++k) ++count[edge_key(t[k], t[(k + 1) % 3])];
  }
  std::map<int, int> next;
  for (const auto& t : tris) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      if (count[edge_key(a, b)] == 1) {
        if (next.count(a)) throw MeshError("boundary is not a simple loop");
        next[a] = b;
      }
    }
  }
  if (next.empty()) throw MeshError("mesh has no boundary");
  std::vector<Edge> loop;
  const int start = next.begin()->first;
  int v = start;
  do {
    const auto it = next.find(v);
    if (it == next.end()) throw MeshError("boundary loop is open");
    loop.push_back({v, it->second});
    v = it->second;
    if (loop.size() > next.size()) throw MeshError("boundary loop is not closed");
  } while (v != start);
  if (loop.size() != next.size()) throw MeshError("boundary has more than one loop");
  return loop;
}

inline void validate(const TriMesh& m) {
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    for (int k : m.triangles[t]) {
      if (k < 0 || static_cast<std::size_t>(k) >= m.num_vertices()) throw MeshError("triangle index out of range");
    }
    if (!(m.area(t) > 0.0)) throw MeshError("degenerate or clockwise triangle " + std::to_string(t));
  }
}

}  // namespace detail

/// Square [-side/2, side/2]^2 cut into n x n cells, each split along the same
/// diagonal, so that uniform refinement n -> 2n nests.
inline TriMesh mesh_square(double side, int n) {
  if (n < 1) throw ParameterError("mesh_square: n must be at least 1");
  if (!(side > 0.0)) throw ParameterError("mesh_square: side must be positive");
  TriMesh m;
  const double a = 0.5 * side;
  const double step = side / n;
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      // Exact end values so that the boundary sits on +-a.
      const double x = (i == n) ? a : -a + i * step;
      const double y = (j == n) ? a : -a + j * step;
      m.vertices.push_back({x, y});
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
      m.triangles.push_back({v00, v10, v11});
      m.triangles.push_back({v00, v11, v01});
    }
  }
  for (int i = 0; i < n; ++i) m.boundary_edges.push_back({id(i, 0), id(i + 1, 0)});
  for (int j = 0; j < n; ++j) m.boundary_edges.push_back({id(n, j), id(n, j + 1)});
  for (int i = n; i > 0; --i) m.boundary_edges.push_back({id(i, n), id(i - 1, n)});
  for (int j = n; j > 0; --j) m.boundary_edges.push_back({id(0, j), id(0, j - 1)});
  m.h = side * std::sqrt(2.0) / n;
  return m;
}

/// Red refinement: every triangle splits into four similar children.
inline TriMesh refine_uniform(const TriMesh& coarse) {
  TriMesh m;
  m.vertices = coarse.vertices;
  std::map<std::pair<int, int>, int> mid;
  auto midpoint = [&](int a, int b) {
    const auto key = detail::edge_key(a, b);
    const auto it = mid.find(key);
    if (it != mid.end()) return it->second;
    const int id = static_cast<int>(m.vertices.size());
    m.vertices.push_back(0.5 * (coarse.vertices[a] + coarse.vertices[b]));
    mid.emplace(key, id);
    return id;
  };
  m.triangles.reserve(4 * coarse.num_triangles());
  for (const auto& t : coarse.triangles) {
    const int m01 = midpoint(t[0], t[1]), m12 = midpoint(t[1], t[2]), m20 = midpoint(t[2], t[0]);
    m.triangles.push_back({t[0], m01, m20});
    m.triangles.push_back({m01, t[1], m12});
    m.triangles.push_back({m20, m12, t[2]});
    m.triangles.push_back({m01, m12, m20});
  }
  for (const auto& e : coarse.boundary_edges) {
    const int c = midpoint(e[0], e[1]);
    m.boundary_edges.push_back({e[0], c});
    m.boundary_edges.push_back({c, e[1]});
  }
  m.h = detail::max_edge_length(m);
  return m;
}

/// Ear-clipping triangulation of a counterclockwise simple polygon.
inline TriMesh triangulate_polygon(const DomainSpec& domain) {
  TriMesh m;
  m.vertices = domain.vertices();
  std::vector<int> ring(m.vertices.size());
  for (std::size_t i = 0; i < ring.size(); ++i) ring[i] = static_cast<int>(i);
  auto inside_tri = [](Point p, Point a, Point b, Point c) {
    return cross(b - a, p - a) >= 0.0 && cross(c - b, p - b) >= 0.0 && cross(a - c, p - c) >= 0.0;
  };
  while (ring.size() > 3) {
    const std::size_t n = ring.size();
    // Among the valid ears pick the one with the largest minimum angle proxy.
    std::optional<std::size_t> best;
    double best_q = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Point a = m.vertices[ring[(i + n - 1) % n]], b = m.vertices[ring[i]], c = m.vertices[ring[(i + 1) % n]];
      const double area2 = cross(b - a, c - a);
      if (area2 <= 0.0) continue;
      bool blocked = false;
      for (std::size_t k = 0; k < n && !blocked; ++k) {
        if (k == i || k == (i + n - 1) % n || k == (i + 1) % n) continue;
        blocked = inside_tri(m.vertices[ring[k]], a, b, c);
      }
      if (blocked) continue;
      const double l2 = std::max({dot(b - a, b - a), dot(c - b, c - b), dot(a - c, a - c)});
      const double q = area2 / l2;
      if (q > best_q) {
        best_q = q;
        best = i;
      }
    }
    if (!best) throw MeshError("ear clipping failed (polygon not simple?)");
    const std::size_t i = *best;
    m.triangles.push_back({ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]});
    ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
  }
  m.triangles.push_back({ring[0], ring[1], ring[2]});
  const std::size_t nv = m.vertices.size();
  for (std::size_t i = 0; i < nv; ++i) m.boundary_edges.push_back({static_cast<int>(i), static_cast<int>((i + 1) % nv)});
  detail::validate(m);
  m.h = detail::max_edge_length(m);
  return m;
}

/// Polygon mesh refined uniformly until h <= target_h.
inline TriMesh mesh_polygon(const DomainSpec& domain, double target_h) {
  if (!(target_h > 0.0)) throw ParameterError("mesh_polygon: target h must be positive");
  TriMesh m = triangulate_polygon(domain);
  while (m.h > target_h) m = refine_uniform(m);
  return m;
}

/// Plain text: vertex count, "x y" lines, triangle count, "i j k" lines.
inline void write_mesh(const TriMesh& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot write mesh file " + path);
  out.precision(17);
  out << m.num_vertices() << "\n";
  for (const auto& v : m.vertices) out << v.x << " " << v.y << "\n";
  out << m.num_triangles() << "\n";
  for (const auto& t : m.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
}

inline TriMesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open mesh file " + path);
  TriMesh m;
  std::size_t nv = 0, nt = 0;
  if (!(in >> nv)) throw MeshError("mesh file: missing vertex count");
  m.vertices.resize(nv);
  for (auto& v : m.vertices) {
    if (!(in >> v.x >> v.y)) throw MeshError("mesh file: truncated vertex list");
  }
  if (!(in >> nt)) throw MeshError("mesh file: missing triangle count");
  m.triangles.resize(nt);
  for (auto& t : m.triangles) {
    if (!(in >> t[0] >> t[1] >> t[2])) throw MeshError("mesh file: truncated triangle list");
  }
  detail::validate(m);
  m.boundary_edges = detail::extract_boundary_loop(m.triangles);
  m.h = detail::max_edge_length(m);
  return m;
}

/// Continuous piecewise linears on a TriMesh; dof i is the hat at vertex i.
class P1Space {
 public:
  explicit P1Space(TriMesh mesh) : mesh_(std::move(mesh)) { detail::validate(mesh_); }

  [[nodiscard]] const TriMesh& mesh() const { return mesh_; }
  [[nodiscard]] std::size_t dim() const { return mesh_.num_vertices(); }

 private:
  TriMesh mesh_;
};

// Triangle quadrature ---------------------------------------------------------

struct TriQuadPoint {
  std::array<double, 3> bary;
  double weight;  // sums to 1 over the rule
};

/// Symmetric 6-point rule, exact for degree 4.
inline const std::array<TriQuadPoint, 6>& triangle_rule_deg4() {
  static const std::array<TriQuadPoint, 6> rule = [] {
    const double a = 0.44594849091596488631832925388305, wa = 0.22338158967801146569500700843312;
    const double b = 0.091576213509770743459571463402202, wb = 0.10995174365532186763832632490021;
    return std::array<TriQuadPoint, 6>{{{{1 - 2 * a, a, a}, wa},
                                        {{a, 1 - 2 * a, a}, wa},
                                        {{a, a, 1 - 2 * a}, wa},
                                        {{1 - 2 * b, b, b}, wb},
                                        {{b, 1 - 2 * b, b}, wb},
                                        {{b, b, 1 - 2 * b}, wb}}};
  }();
  return rule;
}

// Assembly ----------------------------------------------------------------------

struct StiffnessMass {
  SparseMatrix K;
  SparseMatrix M;
};

/// P1 stiffness (coefficient at the centroid) and consistent mass.
inline StiffnessMass assemble_stiffness_mass(const P1Space& space, const CoefficientField& coeff) {
  const TriMesh& m = space.mesh();
  std::vector<Eigen::Triplet<double>> tk, tm;
  tk.reserve(9 * m.num_triangles());
  tm.reserve(9 * m.num_triangles());
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& tr = m.triangles[t];
    const Point p0 = m.vertices[tr[0]], p1 = m.vertices[tr[1]], p2 = m.vertices[tr[2]];
    const double area = m.area(t);
    if (!(area > 0.0)) throw MeshError("degenerate triangle " + std::to_string(t));
    // grad of hat k = rot(opposite edge) / (2 area)
    const std::array<Point, 3> g = {Point{p1.y - p2.y, p2.x - p1.x}, Point{p2.y - p0.y, p0.x - p2.x},
                                    Point{p0.y - p1.y, p1.x - p0.x}};
    const Sym2 A = coeff((1.0 / 3.0) * (p0 + p1 + p2));
    const double s = 1.0 / (4.0 * area);
    for (int a = 0; a < 3; ++a) {
      const Point Ag = A.apply(g[a]);
      for (int b = 0; b < 3; ++b) {
        tk.emplace_back(tr[a], tr[b], s * dot(Ag, g[b]));
        tm.emplace_back(tr[a], tr[b], area * (a == b ? 1.0 / 6.0 : 1.0 / 12.0));
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(space.dim());
  StiffnessMass out{SparseMatrix(n, n), SparseMatrix(n, n)};
  out.K.setFromTriplets(tk.begin(), tk.end());
  out.M.setFromTriplets(tm.begin(), tm.end());
  return out;
}

namespace detail {

inline double segment_distance_to_origin(Point a, Point b) {
  const Point d = b - a;
  const double l2 = dot(d, d);
  const double t = l2 > 0.0 ? std::clamp(-dot(a, d) / l2, 0.0, 1.0) : 0.0;
  return norm(a + t * d);
}

// Whether the circle |x| = R passes through the triangle.
inline bool straddles_circle(const std::array<Point, 3>& p, double R) {
  const double rmax = std::max({norm(p[0]), norm(p[1]), norm(p[2])});
  if (rmax <= R) return false;
  const Point o{0.0, 0.0};
  const bool contains_origin = cross(p[1] - p[0], o - p[0]) >= 0.0 && cross(p[2] - p[1], o - p[1]) >= 0.0 &&
                               cross(p[0] - p[2], o - p[2]) >= 0.0;
  if (contains_origin) return true;
  const double rmin = std::min({segment_distance_to_origin(p[0], p[1]), segment_distance_to_origin(p[1], p[2]),
                                segment_distance_to_origin(p[2], p[0])});
  return rmin < R;
}

// Integrates f * (lambda_0, lambda_1, lambda_2) over the sub-triangle with parent
// barycentric corners c. Sub-triangles cut by the support circle are split down to
// a fixed depth; elsewhere splitting stops once the children agree with the parent.
template <class F>
std::array<double, 3> adaptive_load(const F& f, double R, const std::array<Point, 3>& parent,
                                    const std::array<std::array<double, 3>, 3>& c, double area, int depth) {
  constexpr int kMaxDepth = 14;
  constexpr double kLeafSize = 2e-4;  // relative to R, for pieces cut by the circle
  auto to_x = [&](const std::array<double, 3>& lam) { return lam[0] * parent[0] + lam[1] * parent[1] + lam[2] * parent[2]; };
  auto single = [&](const std::array<std::array<double, 3>, 3>& cc, double ar) {
    std::array<double, 3> r{0.0, 0.0, 0.0};
    for (const auto& q : triangle_rule_deg4()) {
      std::array<double, 3> lam{};
      for (int k = 0; k < 3; ++k) lam[k] = q.bary[0] * cc[0][k] + q.bary[1] * cc[1][k] + q.bary[2] * cc[2][k];
      const double fx = f(to_x(lam)) * q.weight * ar;
      for (int k = 0; k < 3; ++k) r[k] += fx * lam[k];
    }
    return r;
  };
  auto mid = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return std::array<double, 3>{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
  };
  const auto m01 = mid(c[0], c[1]), m12 = mid(c[1], c[2]), m20 = mid(c[2], c[0]);
  const std::array<std::array<std::array<double, 3>, 3>, 4> kids = {
      {{c[0], m01, m20}, {m01, c[1], m12}, {m20, m12, c[2]}, {m01, m12, m20}}};
  const std::array<Point, 3> corners = {to_x(c[0]), to_x(c[1]), to_x(c[2])};
  const bool cut = straddles_circle(corners, R);
  const double diam = std::max({norm(corners[1] - corners[0]), norm(corners[2] - corners[1]), norm(corners[0] - corners[2])});
  if (depth >= kMaxDepth || (cut && diam <= kLeafSize * R)) return single(c, area);
  if (!cut) {
    const auto whole = single(c, area);
    std::array<double, 3> split{0.0, 0.0, 0.0};
    for (const auto& k : kids) {
      const auto r = single(k, 0.25 * area);
      for (int i = 0; i < 3; ++i) split[i] += r[i];
    }
    double diff = 0.0, mag = 0.0;
    for (int i = 0; i < 3; ++i) {
      diff = std::max(diff, std::abs(split[i] - whole[i]));
      mag = std::max(mag, std::abs(split[i]));
    }
    if (diff <= 1e-13 * std::max(mag, area) || depth >= 6) return split;
  }
  std::array<double, 3> out{0.0, 0.0, 0.0};
  for (const auto& k : kids) {
    const auto r = adaptive_load(f, R, parent, k, 0.25 * area, depth + 1);
    for (int i = 0; i < 3; ++i) out[i] += r[i];
  }
  return out;
}

}  // namespace detail

/// Load vector scale * (f, hat_i). Degree-4 rule; triangles meeting the support
/// of f are refined adaptively so kinks at the support edge are resolved.
inline Eigen::VectorXd assemble_load(const P1Space& space, const SourceTerm& f, double scale = 1.0) {
  const TriMesh& m = space.mesh();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.dim()));
  if (!f.evaluate || !(f.support_radius > 0.0)) return b;
  static constexpr std::array<std::array<double, 3>, 3> id = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& tr = m.triangles[t];
    const std::array<Point, 3> p = {m.vertices[tr[0]], m.vertices[tr[1]], m.vertices[tr[2]]};
    const double rmin = std::min({detail::segment_distance_to_origin(p[0], p[1]),
                                  detail::segment_distance_to_origin(p[1], p[2]),
                                  detail::segment_distance_to_origin(p[2], p[0])});
    if (rmin >= f.support_radius && !detail::straddles_circle(p, f.support_radius)) continue;
    const auto r = detail::adaptive_load([&](Point x) { return f(x); }, f.support_radius, p, id, m.area(t), 0);
    for (int k = 0; k < 3; ++k) b(tr[k]) += scale * r[k];
  }
  return b;
}

/// Restriction of P1 coefficients to the boundary vertices, in loop order.
class TraceMap {
 public:
  explicit TraceMap(const TriMesh& mesh) : indices_(mesh.boundary_vertices()), n_(mesh.num_vertices()) {}

  [[nodiscard]] const std::vector<int>& indices() const { return indices_; }
  [[nodiscard]] std::size_t rows() const { return indices_.size(); }
  [[nodiscard]] std::size_t cols() const { return n_; }

  [[nodiscard]] Eigen::VectorXd apply(const Eigen::VectorXd& u) const {
    Eigen::VectorXd g(static_cast<Eigen::Index>(indices_.size()));
    for (std::size_t i = 0; i < indices_.size(); ++i) g(static_cast<Eigen::Index>(i)) = u(indices_[i]);
    return g;
  }
  /// Adjoint: scatter boundary values into a full-length vector.
  [[nodiscard]] Eigen::VectorXd apply_transpose(const Eigen::VectorXd& g) const {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < indices_.size(); ++i) u(indices_[i]) += g(static_cast<Eigen::Index>(i));
    return u;
  }
  [[nodiscard]] SparseMatrix matrix() const {
    SparseMatrix T(static_cast<Eigen::Index>(indices_.size()), static_cast<Eigen::Index>(n_));
    std::vector<Eigen::Triplet<double>> tr;
    for (std::size_t i = 0; i < indices_.size(); ++i) tr.emplace_back(static_cast<int>(i), indices_[i], 1.0);
    T.setFromTriplets(tr.begin(), tr.end());
    return T;
  }

 private:
  std::vector<int> indices_;
  std::size_t n_;
};

inline TraceMap boundary_trace_map(const P1Space& space) { return TraceMap(space.mesh()); }

// Point location --------------------------------------------------------------

struct Location {
  std::size_t triangle;
  std::array<double, 3> bary;
};

/// Bucket grid over the mesh bounding box.
class PointLocator {
 public:
  explicit PointLocator(const TriMesh& mesh) : mesh_(&mesh) {
    lo_ = hi_ = mesh.vertices.front();
    for (const auto& v : mesh.vertices) {
      lo_ = {std::min(lo_.x, v.x), std::min(lo_.y, v.y)};
      hi_ = {std::max(hi_.x, v.x), std::max(hi_.y, v.y)};
    }
    n_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(mesh.num_triangles()) / 2.0)));
    cells_.assign(n_ * n_, {});
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      Point a = mesh.vertices[mesh.triangles[t][0]], b = a;
      for (int k : mesh.triangles[t]) {
        const Point v = mesh.vertices[k];
        a = {std::min(a.x, v.x), std::min(a.y, v.y)};
        b = {std::max(b.x, v.x), std::max(b.y, v.y)};
      }
      const auto [i0, j0] = cell(a);
      const auto [i1, j1] = cell(b);
      for (std::size_t j = j0; j <= j1; ++j) {
        for (std::size_t i = i0; i <= i1; ++i) cells_[j * n_ + i].push_back(t);
      }
    }
  }

  /// Containing triangle (closed, with a small tolerance), or nullopt outside.
  [[nodiscard]] std::optional<Location> locate(Point p) const {
    constexpr double tol = 1e-12;
    if (p.x < lo_.x - tol || p.y < lo_.y - tol || p.x > hi_.x + tol || p.y > hi_.y + tol) return std::nullopt;
    const auto [i, j] = cell(p);
    std::optional<Location> best;
    double best_min = -1e300;
    for (std::size_t t : cells_[j * n_ + i]) {
      const auto lam = barycentric(t, p);
      const double mn = std::min({lam[0], lam[1], lam[2]});
      if (mn >= -tol && mn > best_min) {
        best_min = mn;
        best = Location{t, lam};
        if (mn >= 0.0) break;
      }
    }
    return best;
  }

  [[nodiscard]] std::array<double, 3> barycentric(std::size_t t, Point p) const {
    const auto& tr = mesh_->triangles[t];
    const Point a = mesh_->vertices[tr[0]], b = mesh_->vertices[tr[1]], c = mesh_->vertices[tr[2]];
    const double det = cross(b - a, c - a);
    const double l1 = cross(p - a, c - a) / det;
    const double l2 = cross(b - a, p - a) / det;
    return {1.0 - l1 - l2, l1, l2};
  }

 private:
  [[nodiscard]] std::pair<std::size_t, std::size_t> cell(Point p) const {
    auto idx = [this](double v, double lo, double hi) {
      const double t = (v - lo) / std::max(hi - lo, 1e-300) * static_cast<double>(n_);
      return static_cast<std::size_t>(std::clamp(t, 0.0, static_cast<double>(n_ - 1)));
    };
    return {idx(p.x, lo_.x, hi_.x), idx(p.y, lo_.y, hi_.y)};
  }

  const TriMesh* mesh_;
  Point lo_, hi_;
  std::size_t n_ = 1;
  std::vector<std::vector<std::size_t>> cells_;
};

/// P1 interpolant value at a located point.
inline double evaluate_p1(const TriMesh& mesh, const Eigen::VectorXd& u, const Location& loc) {
  const auto& tr = mesh.triangles[loc.triangle];
  return loc.bary[0] * u(tr[0]) + loc.bary[1] * u(tr[1]) + loc.bary[2] * u(tr[2]);
}

}  // namespace fracext
