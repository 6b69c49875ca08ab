#ifndef PDMTORUS_NUMERICS_QUADRATURE_HPP
#define PDMTORUS_NUMERICS_QUADRATURE_HPP

#include <cmath>
#include <concepts>

#include "pdmtorus/errors.hpp"

namespace pdmtorus::numerics {

namespace detail {

template <typename F>
double checked_eval(F& fn, double x) {
  const double v = fn(x);
  if (!std::isfinite(v)) throw DomainError("integrand is not finite", x);
  return v;
}

}  // namespace detail

/// Composite Simpson rule with `n` (even, >= 2) subintervals.
template <typename F>
  requires std::invocable<F&, double>
double quadrature(F&& fn, double a, double b, int n) {
  if (n < 2 || n % 2 != 0) throw InvalidArgument("simpson: n must be even and >= 2");
  if (a == b) return 0.0;
  const double h = (b - a) / n;
  double odd = 0.0;
  double even = 0.0;
  for (int i = 1; i < n; ++i) {
    const double v = detail::checked_eval(fn, a + h * i);
    (i % 2 ? odd : even) += v;
  }
  const double ends = detail::checked_eval(fn, a) + detail::checked_eval(fn, b);
  return h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
}

/// Simpson with repeated interval halving until two successive estimates agree
/// to `tol * (1 + |I|)`. Returns the finer estimate.
template <typename F>
  requires std::invocable<F&, double>
double adaptive_quadrature(F&& fn, double a, double b, double tol = 1e-10, int n0 = 2,
                           int n_max = 1 << 20) {
  if (a == b) return 0.0;
  int n = n0 < 2 ? 2 : n0 + (n0 % 2);
  double prev = quadrature(fn, a, b, n);
  while (n < n_max) {
    n *= 2;
    const double next = quadrature(fn, a, b, n);
    if (std::abs(next - prev) <= tol * (1.0 + std::abs(next))) return next;
    prev = next;
  }
  return prev;
}

}  // namespace pdmtorus::numerics

#endif  // PDMTORUS_NUMERICS_QUADRATURE_HPP
