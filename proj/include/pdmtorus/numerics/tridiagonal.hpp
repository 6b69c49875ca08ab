#ifndef PDMTORUS_NUMERICS_TRIDIAGONAL_HPP
#define PDMTORUS_NUMERICS_TRIDIAGONAL_HPP

// Symmetric tridiagonal (and cyclic tridiagonal) eigensolver: bisection on
// inertia counts for the eigenvalues, inverse iteration for the vectors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "pdmtorus/errors.hpp"

namespace pdmtorus::numerics {

struct TridiagSym {
  std::vector<double> diag;     // length N
  std::vector<double> offdiag;  // length N-1, entry (i, i+1)

  std::size_t size() const noexcept { return diag.size(); }

  void validate() const {
    if (diag.size() < 2) throw InvalidArgument("tridiagonal matrix needs N >= 2");
    if (offdiag.size() + 1 != diag.size()) throw InvalidArgument("offdiag must have length N-1");
    for (double v : diag)
      if (!std::isfinite(v)) throw InvalidArgument("tridiagonal diag entry not finite");
    for (double v : offdiag)
      if (!std::isfinite(v)) throw InvalidArgument("tridiagonal offdiag entry not finite");
  }

  double norm_inf() const {
    const std::size_t n = size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = std::abs(diag[i]);
      if (i > 0) row += std::abs(offdiag[i - 1]);
      if (i + 1 < n) row += std::abs(offdiag[i]);
      worst = std::max(worst, row);
    }
    return worst;
  }

  void multiply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
      double s = diag[i] * x[i];
      if (i > 0) s += offdiag[i - 1] * x[i - 1];
      if (i + 1 < n) s += offdiag[i] * x[i + 1];
      y[i] = s;
    }
  }
};

/// Tridiagonal plus the wrap-around pair (0, N-1) = (N-1, 0) = corner.
struct CyclicSym {
  std::vector<double> diag;
  std::vector<double> offdiag;
  double corner = 0.0;

  std::size_t size() const noexcept { return diag.size(); }

  void validate() const {
    if (diag.size() < 3) throw InvalidArgument("cyclic matrix needs N >= 3");
    if (offdiag.size() + 1 != diag.size()) throw InvalidArgument("offdiag must have length N-1");
    for (double v : diag)
      if (!std::isfinite(v)) throw InvalidArgument("cyclic diag entry not finite");
    for (double v : offdiag)
      if (!std::isfinite(v)) throw InvalidArgument("cyclic offdiag entry not finite");
    if (!std::isfinite(corner)) throw InvalidArgument("cyclic corner not finite");
  }

  double norm_inf() const {
    const std::size_t n = size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = std::abs(diag[i]);
      if (i > 0) row += std::abs(offdiag[i - 1]);
      if (i + 1 < n) row += std::abs(offdiag[i]);
      if (i == 0 || i + 1 == n) row += std::abs(corner);
      worst = std::max(worst, row);
    }
    return worst;
  }

  void multiply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
      double s = diag[i] * x[i];
      if (i > 0) s += offdiag[i - 1] * x[i - 1];
      if (i + 1 < n) s += offdiag[i] * x[i + 1];
      y[i] = s;
    }
    y[0] += corner * x[n - 1];
    y[n - 1] += corner * x[0];
  }
};

/// k lowest eigenpairs. Vectors have max-norm 1 with their largest-magnitude
/// entry positive; `residuals[i]` is ||M v - lambda v||_inf.
struct EigenResult {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
  std::vector<double> residuals;
  double norm = 0.0;  // ||M||_inf
};

namespace detail {

inline double pivot_floor(double norm) {
  return std::numeric_limits<double>::min() * std::max(1.0, norm * norm);
}

/// Number of eigenvalues of m strictly below sigma (Sturm sequence).
inline std::size_t count_below(const TridiagSym& m, double sigma, double pivmin) {
  const std::size_t n = m.size();
  std::size_t count = 0;
  double q = m.diag[0] - sigma;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < n; ++i) {
    q = (m.diag[i] - sigma) - m.offdiag[i - 1] * m.offdiag[i - 1] / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

/// Inertia of (m - sigma) via LDL^T with the last row carried as a border.
inline std::size_t count_below(const CyclicSym& m, double sigma, double pivmin) {
  const std::size_t n = m.size();
  std::size_t count = 0;
  double piv = m.diag[0] - sigma;
  double border = m.corner;            // entry (n-1, i) after eliminating columns < i
  double last = m.diag[n - 1] - sigma;  // running Schur complement of (n-1, n-1)
  for (std::size_t i = 0; i + 2 < n; ++i) {
    if (std::abs(piv) < pivmin) piv = -pivmin;
    if (piv < 0.0) ++count;
    const double b = m.offdiag[i];
    const double next = (m.diag[i + 1] - sigma) - b * b / piv;
    last -= border * border / piv;
    border = (i + 2 == n - 1 ? m.offdiag[n - 2] : 0.0) - border * b / piv;
    piv = next;
  }
  if (std::abs(piv) < pivmin) piv = -pivmin;
  if (piv < 0.0) ++count;
  last -= border * border / piv;
  if (std::abs(last) < pivmin) last = -pivmin;
  if (last < 0.0) ++count;
  return count;
}

template <typename Matrix>
std::pair<double, double> gershgorin(const Matrix& m) {
  const std::size_t n = m.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(m.offdiag[i - 1]);
    if (i + 1 < n) r += std::abs(m.offdiag[i]);
    if constexpr (std::is_same_v<Matrix, CyclicSym>) {
      if (i == 0 || i + 1 == n) r += std::abs(m.corner);
    }
    lo = std::min(lo, m.diag[i] - r);
    hi = std::max(hi, m.diag[i] + r);
  }
  const double pad = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  return {lo - pad, hi + pad};
}

template <typename Matrix>
std::vector<double> bisect_lowest(const Matrix& m, std::size_t k) {
  const double norm = m.norm_inf();
  const double pivmin = pivot_floor(norm);
  auto [lo, hi] = gershgorin(m);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  std::vector<double> values;
  values.reserve(k);
  double floor = lo;
  for (std::size_t j = 0; j < k; ++j) {
    double a = floor;
    double b = hi;
    for (int it = 0; it < 400; ++it) {
      const double mid = 0.5 * (a + b);
      if (b - a <= 2.0 * eps * std::max(std::abs(a), std::abs(b)) + pivmin) break;
      if (mid <= a || mid >= b) break;
      if (count_below(m, mid, pivmin) > j)
        b = mid;
      else
        a = mid;
    }
    const double lambda = 0.5 * (a + b);
    values.push_back(lambda);
    floor = a;
  }
  return values;
}

/// LU with partial pivoting of a general tridiagonal matrix, LAPACK gttrf style.
class TridiagLU {
 public:
  TridiagLU(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper, double tiny)
      : dl_(std::move(lower)), d_(std::move(diag)), du_(std::move(upper)) {
    const std::size_t n = d_.size();
    du2_.assign(n > 2 ? n - 2 : 0, 0.0);
    ipiv_.assign(n, 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d_[i]) >= std::abs(dl_[i])) {
        if (d_[i] == 0.0) d_[i] = tiny;
        const double fact = dl_[i] / d_[i];
        dl_[i] = fact;
        d_[i + 1] -= fact * du_[i];
        ipiv_[i] = 0;
      } else {
        const double fact = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = fact;
        const double temp = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = temp - fact * d_[i + 1];
        if (i + 2 < n) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -fact * du_[i + 1];
        }
        ipiv_[i] = 1;
      }
    }
    if (d_[n - 1] == 0.0) d_[n - 1] = tiny;
  }

  void solve(std::span<double> b) const {
    const std::size_t n = d_.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (ipiv_[i] == 0) {
        b[i + 1] -= dl_[i] * b[i];
      } else {
        const double t = b[i];
        b[i] = b[i + 1];
        b[i + 1] = t - dl_[i] * b[i];
      }
    }
    b[n - 1] /= d_[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du_[n - 2] * b[n - 1]) / d_[n - 2];
    for (std::size_t ii = n >= 2 ? n - 2 : 0; ii-- > 0;) {
      b[ii] = (b[ii] - du_[ii] * b[ii + 1] - du2_[ii] * b[ii + 2]) / d_[ii];
    }
  }

 private:
  std::vector<double> dl_, d_, du_, du2_;
  std::vector<int> ipiv_;
};

/// Solves (m - shift) x = b in place.
class ShiftedSolver {
 public:
  ShiftedSolver(const TridiagSym& m, double shift, double tiny)
      : lu_(m.offdiag, shifted(m.diag, shift), m.offdiag, tiny) {}

  void solve(std::span<double> b) const { lu_.solve(b); }

 private:
  static std::vector<double> shifted(const std::vector<double>& d, double s) {
    std::vector<double> out(d);
    for (double& v : out) v -= s;
    return out;
  }
  TridiagLU lu_;
};

/// Cyclic system solved by bordering: the leading (N-1) block is tridiagonal,
/// the last unknown is eliminated through a scalar Schur complement.
class CyclicShiftedSolver {
 public:
  CyclicShiftedSolver(const CyclicSym& m, double shift, double tiny)
      : n_(m.size()),
        lu_(std::vector<double>(m.offdiag.begin(), m.offdiag.end() - 1),
            leading_diag(m, shift),
            std::vector<double>(m.offdiag.begin(), m.offdiag.end() - 1), tiny),
        corner_(m.corner),
        coupling_(m.offdiag[n_ - 2]),
        tiny_(tiny) {
    border_.assign(n_ - 1, 0.0);
    border_[0] += corner_;
    border_[n_ - 2] += coupling_;
    z_ = border_;
    lu_.solve(z_);
    schur_ = (m.diag[n_ - 1] - shift);
    for (std::size_t i = 0; i + 1 < n_; ++i) schur_ -= border_[i] * z_[i];
    if (schur_ == 0.0) schur_ = tiny_;
  }

  void solve(std::span<double> b) const {
    std::span<double> head = b.first(n_ - 1);
    lu_.solve(head);
    double dot = 0.0;
    for (std::size_t i = 0; i + 1 < n_; ++i) dot += border_[i] * head[i];
    const double xi = (b[n_ - 1] - dot) / schur_;
    for (std::size_t i = 0; i + 1 < n_; ++i) head[i] -= xi * z_[i];
    b[n_ - 1] = xi;
  }

 private:
  static std::vector<double> leading_diag(const CyclicSym& m, double shift) {
    std::vector<double> d(m.diag.begin(), m.diag.end() - 1);
    for (double& v : d) v -= shift;
    return d;
  }

  std::size_t n_;
  TridiagLU lu_;
  double corner_;
  double coupling_;
  double tiny_;
  std::vector<double> border_;
  std::vector<double> z_;
  double schur_ = 0.0;
};

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline void normalize_max(std::vector<double>& v) {
  std::size_t arg = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
  const double s = v[arg];
  if (s == 0.0) return;
  for (double& x : v) x /= s;
}

template <typename Matrix, typename Solver>
EigenResult inverse_iteration(const Matrix& m, std::vector<double> values) {
  const std::size_t n = m.size();
  const double norm = m.norm_inf();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double tiny = eps * std::max(norm, std::numeric_limits<double>::min());
  const double target = 1e-10 * std::max(norm, std::numeric_limits<double>::min());
  const double cluster = 1e-3 * std::max(norm, 1.0);

  EigenResult out;
  out.norm = norm;
  out.values = values;
  std::vector<double> mv(n);

  for (std::size_t j = 0; j < values.size(); ++j) {
    const double lambda = values[j];
    // Deterministic start vector with components of both signs.
    std::vector<double> x(n);
    std::uint64_t state = 0x9E3779B97F4A7C15ull + 7919ull * j;
    for (std::size_t i = 0; i < n; ++i) {
      state = state * 6364136223846793005ull + 1442695040888963407ull;
      x[i] = static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
    }

    bool converged = false;
    double residual = 0.0;
    double shift = lambda;
    for (int attempt = 0; attempt < 3 && !converged; ++attempt) {
      Solver solver(m, shift, tiny);
      for (int it = 0; it < 8; ++it) {
        solver.solve(x);
        // Keep the iterate orthogonal to earlier vectors of the same cluster.
        for (std::size_t p = 0; p < j; ++p) {
          if (std::abs(out.values[p] - lambda) > cluster) continue;
          const auto& v = out.vectors[p];
          double dot = 0.0, vv = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            dot += v[i] * x[i];
            vv += v[i] * v[i];
          }
          for (std::size_t i = 0; i < n; ++i) x[i] -= dot / vv * v[i];
        }
        const double scale = max_abs(x);
        if (!(scale > 0.0) || !std::isfinite(scale)) break;
        for (double& v : x) v /= scale;
        m.multiply(x, mv);
        residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, std::abs(mv[i] - lambda * x[i]));
        if (it >= 1 && residual <= target) {
          converged = true;
          break;
        }
      }
      // Nudge the shift if the factorization was unlucky.
      shift = lambda + (attempt + 1) * 16.0 * eps * std::max(norm, 1.0);
    }
    if (!converged) throw SolverError("inverse iteration did not converge", j);
    normalize_max(x);
    out.vectors.push_back(std::move(x));
    out.residuals.push_back(residual);
  }
  return out;
}

}  // namespace detail

/// k smallest eigenvalues (ascending) and eigenvectors of a symmetric tridiagonal matrix.
inline EigenResult tridiag_eigs(const TridiagSym& m, std::size_t k) {
  m.validate();
  if (k == 0 || k > m.size()) throw InvalidArgument("tridiag_eigs: need 1 <= k <= N");
  auto values = detail::bisect_lowest(m, k);
  return detail::inverse_iteration<TridiagSym, detail::ShiftedSolver>(m, std::move(values));
}

inline std::vector<double> tridiag_eigenvalues(const TridiagSym& m, std::size_t k) {
  m.validate();
  if (k == 0 || k > m.size()) throw InvalidArgument("tridiag_eigenvalues: need 1 <= k <= N");
  return detail::bisect_lowest(m, k);
}

inline EigenResult cyclic_eigs(const CyclicSym& m, std::size_t k) {
  m.validate();
  if (k == 0 || k > m.size()) throw InvalidArgument("cyclic_eigs: need 1 <= k <= N");
  auto values = detail::bisect_lowest(m, k);
  return detail::inverse_iteration<CyclicSym, detail::CyclicShiftedSolver>(m, std::move(values));
}

inline std::vector<double> cyclic_eigenvalues(const CyclicSym& m, std::size_t k) {
  m.validate();
  if (k == 0 || k > m.size()) throw InvalidArgument("cyclic_eigenvalues: need 1 <= k <= N");
  return detail::bisect_lowest(m, k);
}

/// Number of eigenvalues strictly below sigma.
inline std::size_t eigenvalue_count(const TridiagSym& m, double sigma) {
  m.validate();
  return detail::count_below(m, sigma, detail::pivot_floor(m.norm_inf()));
}

inline std::size_t eigenvalue_count(const CyclicSym& m, double sigma) {
  m.validate();
  return detail::count_below(m, sigma, detail::pivot_floor(m.norm_inf()));
}

}  // namespace pdmtorus::numerics

#endif  // PDMTORUS_NUMERICS_TRIDIAGONAL_HPP
