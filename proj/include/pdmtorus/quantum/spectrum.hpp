#ifndef PDMTORUS_QUANTUM_SPECTRUM_HPP
#define PDMTORUS_QUANTUM_SPECTRUM_HPP

// Symmetrization, finite-difference discretization and numeric spectra of
// Operator1D, plus analytic residuals.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pdmtorus/errors.hpp"
#include "pdmtorus/numerics/grid.hpp"
#include "pdmtorus/numerics/quadrature.hpp"
#include "pdmtorus/numerics/tridiagonal.hpp"
#include "pdmtorus/quantum/analytic.hpp"
#include "pdmtorus/quantum/operator.hpp"

namespace pdmtorus::quantum {

using numerics::Grid;

/// H = (1/w) ( -(p psi')' ) + a0 with p = -a2 w and q = a0 w.
struct Symmetrized {
  RealMap weight;
  RealMap p;
  RealMap q;
};

namespace detail {

/// (ln w)' = (a1 - a2') / a2.
inline double log_weight_slope(const Operator1D& op, double x) {
  const double a2 = op.a2(x);
  if (!(a2 < 0.0)) throw DomainError(op.name + ": leading coefficient must be negative", x);
  const double v = (op.a1(x) - op.a2_prime(x)) / a2;
  if (!std::isfinite(v)) throw DomainError(op.name + ": weight is singular", x);
  return v;
}

}  // namespace detail

/// Weight normalized to w(midpoint of the domain) = 1.
inline Symmetrized symmetrize(const Operator1D& op) {
  detail::log_weight_slope(op, op.midpoint());
  auto weight = [op](double x) {
    auto slope = [&op](double s) { return detail::log_weight_slope(op, s); };
    return std::exp(numerics::adaptive_quadrature(slope, op.midpoint(), x, 1e-13, 8));
  };
  Symmetrized s;
  s.weight = weight;
  s.p = [op, weight](double x) { return -op.a2(x) * weight(x); };
  s.q = [op, weight](double x) { return op.a0(x) * weight(x); };
  return s;
}

/// Flux-form discretization on a uniform grid. Dirichlet drops both end nodes;
/// periodic keeps every node and couples the last to the first.
struct Discretization {
  bool periodic = false;
  double h = 0.0;
  std::vector<double> x;       // unknown nodes
  std::vector<double> w;       // weight at unknowns
  std::vector<double> p_half;  // p between unknowns j and j+1 (periodic: last entry wraps)
  std::vector<double> a0;
  numerics::TridiagSym tri;
  numerics::CyclicSym cyc;
};

inline void check_grid(const Operator1D& op, const Grid& grid) {
  if (!grid.is_uniform()) throw InvalidArgument("solve_spectrum needs a uniform grid");
  const double tol = 1e-9 * (op.hi - op.lo);
  if (op.boundary.kind == BoundaryKind::periodic) {
    if (std::abs(grid.front() - op.lo) > tol ||
        std::abs(grid.spacing() * static_cast<double>(grid.size()) - op.boundary.period) > tol)
      throw InvalidArgument("periodic grid must start at the domain start and cover one period");
  } else if (std::abs(grid.front() - op.lo) > tol || std::abs(grid.back() - op.hi) > tol) {
    throw InvalidArgument("grid must span the operator domain");
  }
}

inline Discretization discretize(const Operator1D& op, const Grid& grid) {
  check_grid(op, grid);
  const bool periodic = op.boundary.kind == BoundaryKind::periodic;
  const std::size_t M = grid.size();
  const double h = grid.spacing();
  // Cells to integrate ln w over: M-1 for Dirichlet, M for periodic (reaching x_0 + period).
  const std::size_t cells = periodic ? M : M - 1;
  std::vector<double> lnw_node(cells + 1, 0.0), lnw_mid(cells, 0.0);
  auto slope = [&op](double s) { return detail::log_weight_slope(op, s); };
  double prev = slope(grid[0]);
  for (std::size_t j = 0; j < cells; ++j) {
    const double x0 = grid[0] + h * static_cast<double>(j);
    const double q1 = slope(x0 + 0.25 * h);
    const double mid = slope(x0 + 0.5 * h);
    const double q3 = slope(x0 + 0.75 * h);
    const double next = slope(x0 + h);
    lnw_mid[j] = lnw_node[j] + h / 12.0 * (prev + 4.0 * q1 + mid);
    lnw_node[j + 1] = lnw_mid[j] + h / 12.0 * (mid + 4.0 * q3 + next);
    prev = next;
  }
  if (periodic && std::abs(lnw_node[M] - lnw_node[0]) > 1e-8)
    throw DomainError(op.name + ": weight is not periodic", grid[0]);
  // Normalize at the node nearest the domain midpoint.
  const double shift = lnw_node[std::min<std::size_t>(cells, cells / 2)];

  Discretization d;
  d.periodic = periodic;
  d.h = h;
  const std::size_t first = periodic ? 0 : 1;
  const std::size_t last = periodic ? M - 1 : M - 2;  // inclusive
  if (last < first + 1) throw InvalidArgument("grid too small");
  const std::size_t n = last - first + 1;
  d.x.resize(n);
  d.w.resize(n);
  d.a0.resize(n);
  d.p_half.resize(periodic ? n : n - 1);
  auto p_at_mid = [&](std::size_t cell) {
    const double xm = grid[0] + h * (static_cast<double>(cell) + 0.5);
    return -op.a2(xm) * std::exp(lnw_mid[cell] - shift);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = first + i;
    d.x[i] = grid[j];
    d.w[i] = std::exp(lnw_node[j] - shift);
    d.a0[i] = op.a0(grid[j]);
  }
  for (std::size_t i = 0; i < d.p_half.size(); ++i) d.p_half[i] = p_at_mid(first + i);
  const double pl = periodic ? d.p_half.back() : p_at_mid(0);
  const double pr_end = periodic ? d.p_half.back() : p_at_mid(M - 2);

  const double h2 = h * h;
  std::vector<double> diag(n), off(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i == 0 ? pl : d.p_half[i - 1];
    const double right = i + 1 == n ? pr_end : d.p_half[i];
    diag[i] = (left + right) / (h2 * d.w[i]) + d.a0[i];
  }
  for (std::size_t i = 0; i + 1 < n; ++i) off[i] = -d.p_half[i] / (h2 * std::sqrt(d.w[i] * d.w[i + 1]));
  if (periodic) {
    d.cyc = {diag, off, -d.p_half.back() / (h2 * std::sqrt(d.w[n - 1] * d.w[0]))};
  } else {
    d.tri = {diag, off};
  }
  return d;
}

/// Max |S_ij - S_ji| / ||S||_inf of the discretized operator. With
/// `symmetrized` the non-symmetric W^-1 K form is scaled by W^{1/2}; without it
/// the raw stencil a2 D2 + a1 D1 + a0 is measured.
inline double hermiticity_check(const Operator1D& op, const Grid& grid, bool symmetrized = true) {
  check_grid(op, grid);
  const bool periodic = op.boundary.kind == BoundaryKind::periodic;
  const double h = grid.spacing(), h2 = h * h;
  std::vector<double> up, down, diag;  // S(i, i+1), S(i+1, i), S(i, i); wrap pair appended for periodic
  std::size_t n = 0;
  if (symmetrized) {
    const Discretization d = discretize(op, grid);
    n = d.x.size();
    diag.resize(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = d.periodic ? d.cyc.diag[i] : d.tri.diag[i];
    for (std::size_t i = 0; i < d.p_half.size(); ++i) {
      const std::size_t a = i, b = (i + 1) % n;
      const double A_ab = -d.p_half[i] / (h2 * d.w[a]);
      const double A_ba = -d.p_half[i] / (h2 * d.w[b]);
      up.push_back(A_ab * std::sqrt(d.w[a]) / std::sqrt(d.w[b]));
      down.push_back(A_ba * std::sqrt(d.w[b]) / std::sqrt(d.w[a]));
    }
  } else {
    const std::size_t first = periodic ? 0 : 1;
    n = periodic ? grid.size() : grid.size() - 2;
    std::vector<double> a2(n), a1(n);
    diag.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = grid[first + i];
      a2[i] = op.a2(x);
      a1[i] = op.a1(x);
      diag[i] = -2.0 * a2[i] / h2 + op.a0(x);
    }
    const std::size_t pairs = periodic ? n : n - 1;
    for (std::size_t i = 0; i < pairs; ++i) {
      const std::size_t b = (i + 1) % n;
      up.push_back(a2[i] / h2 + a1[i] / (2.0 * h));
      down.push_back(a2[b] / h2 - a1[b] / (2.0 * h));
    }
  }
  std::vector<double> row(n, 0.0);
  double asym = 0.0;
  for (std::size_t i = 0; i < n; ++i) row[i] += std::abs(diag[i]);
  for (std::size_t i = 0; i < up.size(); ++i) {
    const std::size_t b = (i + 1) % n;
    row[i] += std::abs(up[i]);
    row[b] += std::abs(down[i]);
    asym = std::max(asym, std::abs(up[i] - down[i]));
  }
  const double norm = *std::max_element(row.begin(), row.end());
  return norm > 0.0 ? asym / norm : asym;
}

enum class Source { numeric, analytic_paper, analytic_audited };

inline const char* to_string(Source s) {
  switch (s) {
    case Source::numeric: return "numeric";
    case Source::analytic_paper: return "analytic_paper";
    default: return "analytic_audited";
  }
}

struct EigenPair {
  double energy = 0.0;
  std::vector<cplx> function;  // on SpectrumReport::nodes, max-norm 1
  double residual = 0.0;
  Source source = Source::numeric;
};

struct SpectrumReport {
  std::string model;
  std::vector<EigenPair> pairs;
  std::vector<double> raw_energies;     // second-order energies on the fine grid
  std::vector<double> coarse_energies;  // second-order energies on the coarse grid (if extrapolated)
  bool extrapolated = false;
  std::vector<double> nodes;  // fine grid
  double spacing = 0.0;
  double coarse_spacing = 0.0;
  std::string boundary;
  std::map<std::string, std::vector<double>> references;  // analytic energies by source
  std::map<std::string, std::vector<double>> deltas;      // |E_numeric - E_reference|

  std::vector<double> energies() const {
    std::vector<double> e;
    for (const auto& p : pairs) e.push_back(p.energy);
    return e;
  }

  void add_reference(const std::string& name, std::vector<double> values) {
    std::vector<double> d(std::min(values.size(), pairs.size()));
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::abs(pairs[i].energy - values[i]);
    references[name] = std::move(values);
    deltas[name] = std::move(d);
  }
};

struct SolveOptions {
  bool richardson = true;  // two-grid extrapolation of the energies
};

namespace detail {

inline std::vector<double> lowest_values(const Discretization& d, std::size_t k) {
  return d.periodic ? numerics::cyclic_eigenvalues(d.cyc, k) : numerics::tridiag_eigenvalues(d.tri, k);
}

inline Grid coarse_grid(const Operator1D& op, const Grid& fine) {
  if (op.boundary.kind == BoundaryKind::periodic) return Grid::periodic(op.lo, op.boundary.period, (fine.size() + 1) / 2);
  const std::size_t intervals = fine.size() - 1;
  return Grid::uniform(fine.front(), fine.back(), (intervals + 1) / 2 + 1);
}

}  // namespace detail

/// k lowest eigenpairs of op on `grid`. Energies are Richardson-extrapolated
/// from this grid and one with about half the nodes unless disabled.
inline SpectrumReport solve_spectrum(const Operator1D& op, const Grid& grid, std::size_t k, SolveOptions opt = {}) {
  const Discretization d = discretize(op, grid);
  if (k == 0 || k + 2 > grid.size()) throw InvalidArgument("solve_spectrum: need 1 <= k <= grid size - 2");
  const auto eig = d.periodic ? numerics::cyclic_eigs(d.cyc, k) : numerics::tridiag_eigs(d.tri, k);

  SpectrumReport rep;
  rep.model = op.name;
  rep.nodes.assign(grid.nodes().begin(), grid.nodes().end());
  rep.spacing = grid.spacing();
  rep.boundary = d.periodic ? "periodic" : "dirichlet";
  rep.raw_energies = eig.values;

  std::vector<double> energies = eig.values;
  if (opt.richardson) {
    const Grid cg = detail::coarse_grid(op, grid);
    const Discretization dc = discretize(op, cg);
    if (k > dc.x.size()) throw InvalidArgument("solve_spectrum: grid too coarse for extrapolation");
    rep.coarse_energies = detail::lowest_values(dc, k);
    rep.coarse_spacing = cg.spacing();
    const double hf2 = grid.spacing() * grid.spacing();
    const double hc2 = cg.spacing() * cg.spacing();
    for (std::size_t i = 0; i < k; ++i) energies[i] = (hc2 * eig.values[i] - hf2 * rep.coarse_energies[i]) / (hc2 - hf2);
    rep.extrapolated = true;
  }

  const std::size_t offset = d.periodic ? 0 : 1;
  for (std::size_t i = 0; i < k; ++i) {
    EigenPair pair;
    pair.energy = energies[i];
    pair.residual = eig.residuals[i];
    pair.source = Source::numeric;
    pair.function.assign(grid.size(), cplx(0.0));
    double peak = 0.0;
    std::size_t arg = 0;
    std::vector<double> psi(eig.vectors[i].size());
    for (std::size_t j = 0; j < psi.size(); ++j) {
      psi[j] = eig.vectors[i][j] / std::sqrt(d.w[j]);
      if (std::abs(psi[j]) > peak) {
        peak = std::abs(psi[j]);
        arg = j;
      }
    }
    const double s = psi[arg];
    for (std::size_t j = 0; j < psi.size(); ++j) pair.function[offset + j] = psi[j] / s;
    rep.pairs.push_back(std::move(pair));
  }
  return rep;
}

/// max |a2 psi'' + a1 psi' + a0 psi - E psi| / (1 + max |psi|) over xs.
inline double residual(const Operator1D& op, const JetMap& psi, double E, std::span<const double> xs) {
  double worst = 0.0, peak = 0.0;
  for (double x : xs) {
    const Jet j = psi(x);
    const cplx r = op.a2(x) * j.d2 + op.a1(x) * j.d1 + (op.a0(x) - E) * j.value;
    worst = std::max(worst, std::abs(r));
    peak = std::max(peak, std::abs(j.value));
  }
  return worst / (1.0 + peak);
}

/// Interior sign changes of a real eigenfunction, ignoring entries below
/// `floor` times its max-norm.
inline int sign_changes(const std::vector<cplx>& f, double floor = 1e-8) {
  int count = 0;
  int last = 0;
  for (const cplx& v : f) {
    if (std::abs(v.real()) <= floor) continue;
    const int s = v.real() > 0 ? 1 : -1;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

/// Max deviation from even or odd symmetry about x = 0 on a periodic grid
/// x_j = -pi + j h (node j pairs with node N - j).
inline double parity_defect(const std::vector<cplx>& f) {
  const std::size_t n = f.size();
  double even = 0.0, odd = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const cplx a = f[j], b = f[(n - j) % n];
    even = std::max(even, std::abs(a - b));
    odd = std::max(odd, std::abs(a + b));
  }
  return std::min(even, odd);
}

}  // namespace pdmtorus::quantum

#endif  // PDMTORUS_QUANTUM_SPECTRUM_HPP
