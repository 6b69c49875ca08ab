#ifndef PDMTORUS_SPECFUN_HPP
#define PDMTORUS_SPECFUN_HPP

#include <complex>

#include "pdmtorus/errors.hpp"

namespace pdmtorus::specfun {

using cplx = std::complex<double>;

inline constexpr int max_order = 200;

/// A polynomial value with its first two derivatives.
struct PolyEval {
  cplx value;
  cplx d1;
  cplx d2;
};

/// Physicists' Hermite polynomial H_n(xi) and derivatives.
inline PolyEval hermite(int n, double xi) {
  if (n < 0 || n > max_order) throw RangeError("hermite order out of range", 0, max_order);
  // hn, hm1, hm2 end up as H_n, H_{n-1}, H_{n-2}.
  double hn = 1.0, hm1 = 0.0, hm2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double next = 2.0 * xi * hn - 2.0 * k * hm1;
    hm2 = hm1;
    hm1 = hn;
    hn = next;
  }
  return {hn, 2.0 * n * hm1, 4.0 * n * (n - 1.0) * hm2};
}

/// Legendre polynomial P_nu(z) for complex z. Derivatives come from the
/// differentiated three-term recurrence, so z = +-1 is not special.
inline PolyEval legendre(int nu, cplx z) {
  if (nu < 0 || nu > max_order) throw RangeError("legendre order out of range", 0, max_order);
  cplx p0 = 1.0, p1 = z;
  cplx d0 = 0.0, d1 = 1.0;
  cplx s0 = 0.0, s1 = 0.0;
  if (nu == 0) return {p0, d0, s0};
  for (int k = 1; k < nu; ++k) {
    const double a = 2.0 * k + 1.0;
    const double inv = 1.0 / (k + 1.0);
    const cplx p2 = (a * z * p1 - double(k) * p0) * inv;
    const cplx d2 = (a * (p1 + z * d1) - double(k) * d0) * inv;
    const cplx s2 = (a * (2.0 * d1 + z * s1) - double(k) * s0) * inv;
    p0 = p1, p1 = p2;
    d0 = d1, d1 = d2;
    s0 = s1, s1 = s2;
  }
  return {p1, d1, s1};
}

/// arccos w = -i log(w + i sqrt(1 - w^2)) with principal sqrt and log.
inline cplx principal_arccos(cplx w) {
  const cplx i(0.0, 1.0);
  // Complex one keeps the imaginary part of 1 - w^2 at +0 for real w.
  return -i * std::log(w + i * std::sqrt(cplx(1.0, 0.0) - w * w));
}

}  // namespace pdmtorus::specfun

#endif  // PDMTORUS_SPECFUN_HPP
