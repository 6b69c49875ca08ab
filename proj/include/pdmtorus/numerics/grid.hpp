#ifndef PDMTORUS_NUMERICS_GRID_HPP
#define PDMTORUS_NUMERICS_GRID_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "pdmtorus/errors.hpp"

namespace pdmtorus::numerics {

/// Strictly increasing set of abscissae. `spacing()` is non-zero only for
/// uniform grids.
class Grid {
 public:
  explicit Grid(std::vector<double> nodes, double spacing = 0.0)
      : nodes_(std::move(nodes)), spacing_(spacing) {
    if (nodes_.size() < 3) throw InvalidArgument("grid needs at least 3 nodes");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!std::isfinite(nodes_[i])) throw InvalidArgument("grid node is not finite");
      if (i > 0 && !(nodes_[i] > nodes_[i - 1]))
        throw InvalidArgument("grid nodes must be strictly increasing");
    }
    if (spacing_ != 0.0) {
      for (std::size_t i = 1; i < nodes_.size(); ++i) {
        // Node rounding contributes a few ulps of |x| to every difference.
        const double ulps = 4.0 * std::numeric_limits<double>::epsilon() *
                            std::max(std::abs(nodes_[i]), std::abs(nodes_[i - 1]));
        if (std::abs((nodes_[i] - nodes_[i - 1]) - spacing_) > 1e-12 * spacing_ + ulps)
          throw InvalidArgument("grid is not uniform with the declared spacing");
      }
    }
  }

  /// `n` nodes on [lo, hi], both endpoints included.
  static Grid uniform(double lo, double hi, std::size_t n) {
    if (n < 3 || !(hi > lo)) throw InvalidArgument("uniform grid needs n >= 3 and hi > lo");
    const double h = (hi - lo) / static_cast<double>(n - 1);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = lo + h * static_cast<double>(i);
    x.back() = hi;
    return Grid(std::move(x), h);
  }

  /// `n` nodes covering one period starting at `lo`; the node at lo + period
  /// is omitted because it coincides with `lo`.
  static Grid periodic(double lo, double period, std::size_t n) {
    if (n < 3 || !(period > 0.0)) throw InvalidArgument("periodic grid needs n >= 3 and period > 0");
    const double h = period / static_cast<double>(n);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = lo + h * static_cast<double>(i);
    return Grid(std::move(x), h);
  }

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  double operator[](std::size_t i) const { return nodes_[i]; }
  double front() const { return nodes_.front(); }
  double back() const { return nodes_.back(); }
  double spacing() const noexcept { return spacing_; }
  bool is_uniform() const noexcept { return spacing_ != 0.0; }

 private:
  std::vector<double> nodes_;
  double spacing_;
};

}  // namespace pdmtorus::numerics

#endif  // PDMTORUS_NUMERICS_GRID_HPP
