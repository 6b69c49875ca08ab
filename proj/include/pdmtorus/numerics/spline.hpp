#ifndef PDMTORUS_NUMERICS_SPLINE_HPP
#define PDMTORUS_NUMERICS_SPLINE_HPP

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "pdmtorus/errors.hpp"

namespace pdmtorus::numerics {

/// Natural cubic spline through (x_i, y_i) with strictly increasing x.
class CubicSpline {
 public:
  CubicSpline(std::span<const double> x, std::span<const double> y) : x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
    const std::size_t n = x_.size();
    if (n < 3 || y_.size() != n) throw InvalidArgument("spline needs >= 3 matching samples");
    for (std::size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1])) throw InvalidArgument("spline abscissae must be strictly increasing");

    // Second derivatives from the standard tridiagonal system, M_0 = M_{n-1} = 0.
    m_.assign(n, 0.0);
    std::vector<double> c(n, 0.0), r(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1];
      const double h1 = x_[i + 1] - x_[i];
      const double a = h0 / 6.0;
      const double b = (h0 + h1) / 3.0;
      const double up = h1 / 6.0;
      const double rhs = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
      const double denom = b - a * c[i - 1];
      c[i] = up / denom;
      r[i] = (rhs - a * r[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 1;) m_[i] = r[i] - c[i] * m_[i + 1];
  }

  double operator()(double t) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    if (i + 1 >= x_.size()) i = x_.size() - 2;
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h;
    const double b = (t - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
  }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;
};

}  // namespace pdmtorus::numerics

#endif  // PDMTORUS_NUMERICS_SPLINE_HPP
