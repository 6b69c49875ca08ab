#ifndef PDMTORUS_NUMERICS_DIFFERENTIATE_HPP
#define PDMTORUS_NUMERICS_DIFFERENTIATE_HPP

#include <cmath>
#include <complex>
#include <concepts>
#include <type_traits>

#include "pdmtorus/errors.hpp"

namespace pdmtorus::numerics {

namespace detail {

inline bool all_finite(double v) { return std::isfinite(v); }
inline bool all_finite(const std::complex<double>& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

}  // namespace detail

/// Central difference of order 1 or 2 for real- or complex-valued maps.
template <typename F>
  requires std::invocable<F&, double>
auto central_diff(F&& fn, double x, double h, int order) {
  using R = std::decay_t<std::invoke_result_t<F&, double>>;
  if (!(h > 0.0)) throw InvalidArgument("central_diff: h must be positive");
  const R fp = fn(x + h);
  const R fm = fn(x - h);
  if (!detail::all_finite(fp) || !detail::all_finite(fm))
    throw DomainError("central_diff: non-finite evaluation", x);
  if (order == 1) return R((fp - fm) / (2.0 * h));
  if (order == 2) {
    const R f0 = fn(x);
    if (!detail::all_finite(f0)) throw DomainError("central_diff: non-finite evaluation", x);
    return R((fp - 2.0 * f0 + fm) / (h * h));
  }
  throw InvalidArgument("central_diff: order must be 1 or 2");
}

}  // namespace pdmtorus::numerics

#endif  // PDMTORUS_NUMERICS_DIFFERENTIATE_HPP
