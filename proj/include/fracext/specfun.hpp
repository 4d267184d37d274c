#pragma once

// Special functions: log-Gamma, modified Bessel I_n / K_n, Bessel J_0 and the
// Yukawa (modified Helmholtz) Green's functions.
//
// K_n for real positive argument uses three regimes:
//   z <= 2        power series (A&S 9.6.11 / 9.6.13)
//   2 < z <= 25   Steed's continued fraction for K_0, K_1 (Temme's method),
//                 tabulated once as piecewise Chebyshev in 1/z for speed
//   z > 25        Hankel asymptotic expansion
// and upward recurrence in n, which is stable for K.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include "fracext/point.hpp"
#include "fracext/errors.hpp"

namespace fracext {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// ln Gamma(x) for x > 0 (Lanczos, g = 7, with reflection below 1/2).
inline double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
  static constexpr std::array<double, 9> c = {
      0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    const double pi = std::numbers::pi;
    return std::log(pi / std::sin(pi * x)) - log_gamma(1.0 - x);
  }
  const double z = x - 1.0;
  double a = c[0];
  const double t = z + 7.5;
  for (int i = 1; i < 9; ++i) a += c[i] / (z + i);
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

namespace detail {

struct K01 {
  double k0;
  double k1;
};

// Series for z <= 2. Also returns I0 and the smooth part of K0 used by the log split.
struct SmallSeries {
  double i0;
  double k0;
  double k1;
  double k0_regular;  // K0(z) + ln(z/2) I0(z) = sum (psi(k+1)) t^k/(k!)^2
};

inline SmallSeries k_small_series(double z) {
  const double t = 0.25 * z * z;
  double term0 = 1.0;        // t^k/(k!)^2
  double term1 = 1.0;        // t^k/(k!(k+1)!)
  double harm = 0.0;         // H_k
  double i0 = 1.0, i1s = 1.0;
  double reg0 = -kEulerGamma;
  double psi_sum1 = (-kEulerGamma) + (1.0 - kEulerGamma);  // psi(1) + psi(2)
  double s1 = psi_sum1;
  for (int k = 1; k < 60; ++k) {
    term0 *= t / (static_cast<double>(k) * k);
    term1 *= t / (static_cast<double>(k) * (k + 1));
    harm += 1.0 / k;
    i0 += term0;
    i1s += term1;
    reg0 += term0 * (harm - kEulerGamma);
    const double psi_k1 = harm - kEulerGamma;
    const double psi_k2 = psi_k1 + 1.0 / (k + 1);
    s1 += term1 * (psi_k1 + psi_k2);
    if (term0 < 1e-18 * i0 && term1 < 1e-18 * i1s) break;
  }
  const double l = std::log(0.5 * z);
  const double i1 = 0.5 * z * i1s;
  SmallSeries out{};
  out.i0 = i0;
  out.k0_regular = reg0;
  out.k0 = -l * i0 + reg0;
  out.k1 = 1.0 / z + l * i1 - 0.25 * z * s1;
  return out;
}

inline K01 k_continued_fraction(double x) {
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25;
  double q = a1, c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i <= 10000; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < 1e-17) break;
  }
  h = a1 * h;
  const double k0 = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
  const double k1 = k0 * (x + 0.5 - h) / x;
  return {k0, k1};
}

// sqrt(pi/2z) e^{-z} sum_k a_k(nu) / z^k
inline double k_asymptotic(int nu, double z) {
  const double m = 4.0 * nu * nu;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double next = term * (m - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * z);
    if (std::abs(next) > std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z) * sum;
}

// e^z sqrt(z) K_{0,1}(z) on 2 <= z <= 25, piecewise Chebyshev in w = 1/z.
class KScaledTable {
 public:
  static constexpr int kPieces = 48;
  static constexpr int kDegree = 14;
  static constexpr double kW0 = 1.0 / 25.0, kW1 = 0.5;

  KScaledTable() {
    constexpr int n = kDegree + 1;
    const double pi = std::numbers::pi;
    for (int p = 0; p < kPieces; ++p) {
      const double a = kW0 + (kW1 - kW0) * p / kPieces, b = kW0 + (kW1 - kW0) * (p + 1) / kPieces;
      std::array<double, n> f0{}, f1{};
      for (int j = 0; j < n; ++j) {
        const double x = std::cos(pi * (j + 0.5) / n);
        const double z = 1.0 / (0.5 * (a + b) + 0.5 * (b - a) * x);
        const K01 k = k_continued_fraction(z);
        const double sc = std::exp(z) * std::sqrt(z);
        f0[j] = k.k0 * sc;
        f1[j] = k.k1 * sc;
      }
      for (int m = 0; m < n; ++m) {
        double c0 = 0.0, c1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double t = std::cos(pi * m * (j + 0.5) / n);
          c0 += f0[j] * t;
          c1 += f1[j] * t;
        }
        c0_[p][m] = 2.0 * c0 / n;
        c1_[p][m] = 2.0 * c1 / n;
      }
    }
  }

  [[nodiscard]] K01 operator()(double z) const {
    const double w = 1.0 / z;
    int p = static_cast<int>((w - kW0) / (kW1 - kW0) * kPieces);
    p = std::clamp(p, 0, kPieces - 1);
    const double a = kW0 + (kW1 - kW0) * p / kPieces, b = kW0 + (kW1 - kW0) * (p + 1) / kPieces;
    const double x = (2.0 * w - a - b) / (b - a);
    // Clenshaw
    double b0 = 0.0, b1 = 0.0, d0 = 0.0, d1 = 0.0;
    for (int m = kDegree; m >= 1; --m) {
      const double t0 = 2.0 * x * b0 - b1 + c0_[p][m];
      b1 = b0;
      b0 = t0;
      const double t1 = 2.0 * x * d0 - d1 + c1_[p][m];
      d1 = d0;
      d0 = t1;
    }
    const double v0 = x * b0 - b1 + 0.5 * c0_[p][0];
    const double v1 = x * d0 - d1 + 0.5 * c1_[p][0];
    const double sc = std::exp(-z) / std::sqrt(z);
    return {v0 * sc, v1 * sc};
  }

 private:
  std::array<std::array<double, kDegree + 1>, kPieces> c0_{}, c1_{};
};

inline K01 bessel_k01(double z) {
  if (z <= 2.0) {
    const auto s = k_small_series(z);
    return {s.k0, s.k1};
  }
  if (z <= 25.0) {
    static const KScaledTable table;
    return table(z);
  }
  return {k_asymptotic(0, z), k_asymptotic(1, z)};
}

}  // namespace detail

/// Modified Bessel function of the second kind K_n(z), z > 0.
inline double bessel_K(int n, double z) {
  if (n < 0) throw DomainError("bessel_K: order must be nonnegative");
  if (!(z > 0.0)) throw DomainError("bessel_K: argument must be positive");
  const auto [k0, k1] = detail::bessel_k01(z);
  if (n == 0) return k0;
  double km = k0, k = k1;
  for (int j = 1; j < n; ++j) {
    const double kp = km + (2.0 * j / z) * k;
    km = k;
    k = kp;
  }
  return k;
}

/// Modified Bessel function of the first kind I_n(z), z >= 0.
inline double bessel_I(int n, double z) {
  if (n < 0) throw DomainError("bessel_I: order must be nonnegative");
  if (!(z >= 0.0)) throw DomainError("bessel_I: argument must be nonnegative");
  if (z > 700.0) throw DomainError("bessel_I: argument too large (overflow)");
  if (z == 0.0) return n == 0 ? 1.0 : 0.0;
  const double t = 0.25 * z * z;
  // (z/2)^n / n!
  double lead = 1.0;
  for (int j = 1; j <= n; ++j) lead *= 0.5 * z / j;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 2000; ++k) {
    term *= t / (static_cast<double>(k) * (k + n));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return lead * sum;
}

/// Bessel function J_0(z), z >= 0.
inline double bessel_J0(double z) {
  if (!(z >= 0.0)) throw DomainError("bessel_J0: argument must be nonnegative");
  if (z <= 17.0) {
    const long double t = -0.25L * static_cast<long double>(z) * z;
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k < 200; ++k) {
      term *= t / (static_cast<long double>(k) * k);
      sum += term;
      if (std::abs(term) < 1e-21L) break;
    }
    return static_cast<double>(sum);
  }
  // Hankel expansion: J0 = sqrt(2/(pi z)) (P cos chi - Q sin chi).
  double p = 0.0, q = 0.0;
  double a = 1.0;  // a_k(0) / z^k
  double prev = 2.0;
  for (int k = 0; k < 60; ++k) {
    if (k > 0) a *= -(2.0 * k - 1) * (2.0 * k - 1) / (k * 8.0 * z);
    if (std::abs(a) > prev) break;
    prev = std::abs(a);
    switch (k % 4) {
      case 0: p += a; break;
      case 1: q += a; break;
      case 2: p -= a; break;
      case 3: q -= a; break;
    }
    if (std::abs(a) < 1e-18) break;
  }
  const double chi = z - 0.25 * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * z)) * (p * std::cos(chi) - q * std::sin(chi));
}

/// Bessel function J_n(z) of integer order n >= 0, z >= 0.
inline double bessel_J(int n, double z) {
  if (n < 0) throw DomainError("bessel_J: order must be nonnegative");
  if (!(z >= 0.0)) throw DomainError("bessel_J: argument must be nonnegative");
  if (n == 0) return bessel_J0(z);
  if (z == 0.0) return 0.0;
  if (z <= 17.0 + n) {
    const long double t = -0.25L * static_cast<long double>(z) * z;
    long double lead = 1.0L;
    for (int j = 1; j <= n; ++j) lead *= 0.5L * z / j;
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k < 300; ++k) {
      term *= t / (static_cast<long double>(k) * (k + n));
      sum += term;
      if (std::abs(term) < 1e-21L * std::abs(sum) && k > 0.5 * z) break;
    }
    return static_cast<double>(lead * sum);
  }
  const double mu = 4.0 * n * n;
  double p = 0.0, q = 0.0;
  double a = 1.0;
  double prev = 1e300;
  for (int k = 0; k < 80; ++k) {
    if (k > 0) a *= (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * z);
    if (k > n && std::abs(a) > prev) break;
    prev = std::abs(a);
    switch (k % 4) {
      case 0: p += a; break;
      case 1: q += a; break;
      case 2: p -= a; break;
      case 3: q -= a; break;
    }
    if (std::abs(a) < 1e-18) break;
  }
  const double chi = z - (0.5 * n + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * z)) * (p * std::cos(chi) - q * std::sin(chi));
}

/// Free-space kernel parameters.
struct KernelSpec {
  double mu = 1.0;  // wavenumber
  int dim = 2;
};

/// G(r; mu): (1/2pi) K0(mu r) in 2D, e^{-mu r}/(4 pi r) in 3D.
inline double yukawa_green(const KernelSpec& spec, double r) {
  if (!(r > 0.0)) throw DomainError("yukawa_green: distance must be positive");
  if (spec.mu < 0.0) throw DomainError("yukawa_green: negative wavenumber");
  if (spec.dim == 3) return std::exp(-spec.mu * r) / (4.0 * std::numbers::pi * r);
  if (spec.dim != 2) throw DomainError("yukawa_green: dimension must be 2 or 3");
  if (!(spec.mu > 0.0)) throw DomainError("yukawa_green: the 2D kernel requires mu > 0");
  return detail::bessel_k01(spec.mu * r).k0 / (2.0 * std::numbers::pi);
}

/// Decomposition (1/2pi) K0(mu r) = log_coefficient * (-ln r) + smooth_part.
struct LogSplit {
  double log_coefficient;
  double smooth_part;
};

inline LogSplit yukawa_green_smooth_split(double mu, double r) {
  if (!(mu > 0.0)) throw DomainError("yukawa_green_smooth_split: mu must be positive");
  if (!(r >= 0.0)) throw DomainError("yukawa_green_smooth_split: r must be nonnegative");
  constexpr double inv2pi = 0.5 * std::numbers::inv_pi;
  const double z = mu * r;
  if (z <= 2.0) {
    // K0(z) = -ln(z/2) I0 + reg  =>  -ln r I0 + [(ln 2 - ln mu) I0 + reg]
    double i0 = 1.0, reg = -kEulerGamma;
    if (z > 0.0) {
      const auto s = detail::k_small_series(z);
      i0 = s.i0;
      reg = s.k0_regular;
    }
    return {inv2pi * i0, inv2pi * ((std::numbers::ln2 - std::log(mu)) * i0 + reg)};
  }
  const double i0 = bessel_I(0, z);
  const double k0 = detail::bessel_k01(z).k0;
  return {inv2pi * i0, inv2pi * (k0 + std::log(r) * i0)};
}

/// Directional derivative n . grad_x G(x - y; mu) of the 2D kernel.
/// The double-layer kernel d/dn_y G(x - y) is the negative of this value.
inline double yukawa_normal_derivative(const KernelSpec& spec, Point x, Point y, Point normal_at_y) {
  const Point d = x - y;
  const double r = norm(d);
  if (!(r > 0.0)) throw DomainError("yukawa_normal_derivative: coincident points");
  if (!(spec.mu > 0.0)) throw DomainError("yukawa_normal_derivative: mu must be positive");
  if (spec.dim != 2) throw DomainError("yukawa_normal_derivative: only the 2D kernel is supported");
  const double k1 = detail::bessel_k01(spec.mu * r).k1;
  return -(spec.mu * 0.5 * std::numbers::inv_pi) * k1 * dot(d, normal_at_y) / r;
}

}  // namespace fracext
