#ifndef PDMTORUS_TESTS_ORACLES_HPP
#define PDMTORUS_TESTS_ORACLES_HPP

// Test-only reference implementations. Nothing here shares code with the
// library paths it is used to check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

/// Cyclic Jacobi rotations on a dense symmetric matrix; returns sorted eigenvalues.
inline std::vector<double> jacobi_eigenvalues(Dense a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// Explicit Hermite polynomials H_0..H_5.
inline double hermite_explicit(int n, double x) {
  switch (n) {
    case 0: return 1.0;
    case 1: return 2.0 * x;
    case 2: return 4.0 * x * x - 2.0;
    case 3: return 8.0 * x * x * x - 12.0 * x;
    case 4: return 16.0 * std::pow(x, 4) - 48.0 * x * x + 12.0;
    case 5: return 32.0 * std::pow(x, 5) - 160.0 * std::pow(x, 3) + 120.0 * x;
    default: return std::nan("");
  }
}

/// Explicit Legendre polynomials P_0..P_5 at complex argument.
inline std::complex<double> legendre_explicit(int n, std::complex<double> z) {
  const auto z2 = z * z;
  switch (n) {
    case 0: return 1.0;
    case 1: return z;
    case 2: return (3.0 * z2 - 1.0) / 2.0;
    case 3: return (5.0 * z2 * z - 3.0 * z) / 2.0;
    case 4: return (35.0 * z2 * z2 - 30.0 * z2 + 3.0) / 8.0;
    case 5: return (63.0 * z2 * z2 * z - 70.0 * z2 * z + 15.0 * z) / 8.0;
    default: return std::nan("");
  }
}

/// Five-point central derivative, used where a second-opinion derivative of a
/// smooth function is needed.
template <typename F>
auto five_point(F&& f, double x, double h) {
  return (-f(x + 2 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
}

inline std::mt19937_64 rng(unsigned long long seed = 20261016ull) { return std::mt19937_64(seed); }

}  // namespace oracle

#endif  // PDMTORUS_TESTS_ORACLES_HPP
