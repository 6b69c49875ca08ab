#ifndef PDMTORUS_QUANTUM_ANALYTIC_HPP
#define PDMTORUS_QUANTUM_ANALYTIC_HPP

// Closed-form spectra and eigenfunctions of the two oscillators.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>

#include "pdmtorus/errors.hpp"
#include "pdmtorus/pdm/system.hpp"
#include "pdmtorus/specfun.hpp"

namespace pdmtorus::quantum {

using cplx = std::complex<double>;
using specfun::PolyEval;
using Jet = specfun::PolyEval;  // value, first and second derivative
using JetMap = std::function<Jet(double)>;

/// z = x / (1 + lambda x), the antiderivative of (1 + lambda x)^-2 vanishing at 0.
inline double z_of_x(double x, double lambda) {
  const double s = 1.0 + lambda * x;
  if (s == 0.0) throw DomainError("z_of_x: 1 + lambda x vanishes", x);
  return x / s;
}

inline double x_of_z(double z, double lambda) {
  const double s = 1.0 - lambda * z;
  if (s == 0.0) throw DomainError("x_of_z: 1 - lambda z vanishes", z);
  return z / s;
}

/// E-independent part of the transformed equation. Unshifted argument is z,
/// shifted argument is zeta = z + 1/(2 lambda).
inline double quadratic_schrodinger_potential(double arg, const pdm::QuadraticParams& p, bool shifted) {
  const double k = p.C1 * p.C1 * p.alpha * p.alpha;
  if (shifted) return 2.0 * p.C1 * p.C2 + k * arg * arg - k / (4.0 * p.lambda * p.lambda);
  return 2.0 * p.C1 * p.C2 + k * arg * arg + (k / p.lambda) * arg;
}

enum class EnergyFormula { paper, audited };

inline const char* to_string(EnergyFormula f) { return f == EnergyFormula::paper ? "paper" : "audited"; }

/// paper:   alpha (n + 1/2) + 2 C2 - C1 alpha^2 / (4 lambda^2)
/// audited: alpha (n + 1/2) + C2 - C1 alpha^2 / (8 lambda^2)
inline double quadratic_energy(int n, const pdm::QuadraticParams& p, EnergyFormula formula) {
  if (n < 0) throw InvalidArgument("level index must be non-negative");
  const double base = p.alpha * (n + 0.5);
  const double k = p.C1 * p.alpha * p.alpha / (p.lambda * p.lambda);
  return formula == EnergyFormula::paper ? base + 2.0 * p.C2 - k / 4.0 : base + p.C2 - k / 8.0;
}

/// max over real xi of |exp(-xi^2/2) H_n(xi)|.
inline double hermite_function_peak(int n) {
  auto h = [](int k, double xi) { return k < 0 ? 0.0 : specfun::hermite(k, xi).value.real(); };
  auto value = [&](double xi) { return std::abs(std::exp(-0.5 * xi * xi) * h(n, xi)); };
  // Critical points solve H_n' - xi H_n = 2n H_{n-1} - xi H_n = 0.
  auto g = [&](double xi) { return 2.0 * n * h(n - 1, xi) - xi * h(n, xi); };
  double best = value(0.0);
  const double top = std::sqrt(2.0 * n + 1.0) + 3.0;
  const int steps = 400 + 40 * n;
  double prev_x = 0.0, prev_g = g(0.0);
  for (int i = 1; i <= steps; ++i) {
    const double x = top * i / steps;
    const double gx = g(x);
    if ((gx < 0) != (prev_g < 0)) {
      double lo = prev_x, hi = x, glo = prev_g;
      for (int k = 0; k < 80; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm < 0) == (glo < 0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      best = std::max(best, value(0.5 * (lo + hi)));
    }
    prev_x = x;
    prev_g = gx;
  }
  return best;
}

/// psi_n(z) = exp(-xi^2/2) H_n(xi) / peak, xi = sqrt(C1 alpha) (z + 1/(2 lambda));
/// derivatives are with respect to z.
inline Jet quadratic_wavefunction(int n, double z, const pdm::QuadraticParams& p, double peak) {
  const double k = std::sqrt(p.C1 * p.alpha);
  const double xi = k * (z + 0.5 / p.lambda);
  const auto H = specfun::hermite(n, xi);
  const double e = std::exp(-0.5 * xi * xi) / peak;
  const double h = H.value.real(), h1 = H.d1.real(), h2 = H.d2.real();
  return {e * h, k * e * (h1 - xi * h), k * k * e * (h2 - 2.0 * xi * h1 + (xi * xi - 1.0) * h)};
}

inline Jet quadratic_wavefunction(int n, double z, const pdm::QuadraticParams& p) {
  return quadratic_wavefunction(n, z, p, hermite_function_peak(n));
}

struct OmegaConstraint {
  cplx plus;
  cplx minus;
  double omega2 = 0.0;
  bool degenerate = false;  // lambda == 0
};

/// omega = +- i lambda / (2 C1), so omega^2 = -lambda^2 / (4 C1^2).
inline OmegaConstraint ml_omega_constraint(double lambda, double C1) {
  if (C1 == 0.0) throw InvalidArgument("ml_omega_constraint: C1 must be non-zero");
  OmegaConstraint r;
  r.plus = cplx(0.0, lambda / (2.0 * C1));
  r.minus = -r.plus;
  r.omega2 = -lambda * lambda / (4.0 * C1 * C1);
  r.degenerate = lambda == 0.0;
  return r;
}

/// E_nu = C2 - lambda (2 nu + 1)^2 / (8 C1).
inline double ml_energy(int nu, const pdm::MLParams& p) {
  if (nu < 0) throw InvalidArgument("level index must be non-negative");
  const double E = p.C2 - p.lambda * (2.0 * nu + 1.0) * (2.0 * nu + 1.0) / (8.0 * p.C1);
  const double lhs = nu * (nu + 1.0) + 0.25;
  const double rhs = 2.0 * p.C1 * (p.C2 - E) / p.lambda;
  const double scale = std::max(lhs, 2.0 * p.C1 * (std::abs(p.C2) + std::abs(E)) / std::abs(p.lambda));
  if (std::abs(lhs - rhs) > 1e-12 * scale)
    throw Error("ml_energy: separation-constant identity violated");
  return E;
}

/// psi_nu(x) = (1 + lambda x^2)^{1/4} P_nu(-i sqrt(lambda) x), derivatives in x.
inline Jet ml_wavefunction(int nu, double x, double lambda) {
  if (lambda == 0.0) throw InvalidArgument("ml_wavefunction: lambda must be non-zero");
  if (lambda < 0 && !(std::abs(x) < 1.0 / std::sqrt(-lambda)))
    throw DomainError("ml_wavefunction: |x| must stay below 1/sqrt(-lambda)", x);
  const double u = 1.0 + lambda * x * x;
  const cplx kappa = -cplx(0.0, 1.0) * std::sqrt(cplx(lambda, 0.0));
  const auto P = specfun::legendre(nu, kappa * x);
  const double A = std::pow(u, 0.25);
  const double A1 = 0.5 * lambda * x * std::pow(u, -0.75);
  const double A2 = 0.5 * lambda * std::pow(u, -0.75) - 0.75 * lambda * lambda * x * x * std::pow(u, -1.75);
  return {A * P.value, A1 * P.value + A * kappa * P.d1,
          A2 * P.value + 2.0 * A1 * kappa * P.d1 + A * kappa * kappa * P.d2};
}

}  // namespace pdmtorus::quantum

#endif  // PDMTORUS_QUANTUM_ANALYTIC_HPP
