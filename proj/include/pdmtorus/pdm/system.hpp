#ifndef PDMTORUS_PDM_SYSTEM_HPP
#define PDMTORUS_PDM_SYSTEM_HPP

// Position-dependent-mass Lienard systems and the nonlocal maps q(x), tau(t).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pdmtorus/errors.hpp"
#include "pdmtorus/numerics/differentiate.hpp"
#include "pdmtorus/numerics/quadrature.hpp"
#include "pdmtorus/numerics/rk4.hpp"
#include "pdmtorus/numerics/spline.hpp"
#include "pdmtorus/numerics/trajectory.hpp"

namespace pdmtorus::pdm {

using numerics::Trajectory;
using RealMap = std::function<double(double)>;
using cplx = std::complex<double>;

inline constexpr double inf = std::numeric_limits<double>::infinity();

/// Open interval (lo, hi); infinite ends allowed.
struct Interval {
  double lo = -inf;
  double hi = inf;

  bool contains(double x) const { return x > lo && x < hi; }
};

struct QuadraticParams {
  double lambda = 1.0;
  double alpha = 1.0;
  double C1 = 1.0;
  double C2 = 0.0;

  void validate() const {
    if (!(lambda != 0.0) || !std::isfinite(lambda)) throw InvalidArgument("quadratic case needs lambda != 0");
    if (!(alpha > 0.0)) throw InvalidArgument("quadratic case needs alpha > 0");
    if (!(C1 > 0.0)) throw InvalidArgument("quadratic case needs C1 > 0");
    if (!std::isfinite(C2)) throw InvalidArgument("C2 must be finite");
  }

  /// Side of the pole x = -1/lambda that contains the origin.
  Interval domain() const { return lambda > 0 ? Interval{-1.0 / lambda, inf} : Interval{-inf, -1.0 / lambda}; }
};

struct MLParams {
  double lambda = 1.0;
  cplx omega = 1.0;
  double C1 = 1.0;
  double C2 = 0.0;

  void validate() const {
    if (!(lambda != 0.0) || !std::isfinite(lambda)) throw InvalidArgument("ML case needs lambda != 0");
    if (!(C1 > 0.0)) throw InvalidArgument("ML case needs C1 > 0");
    if (!std::isfinite(C2)) throw InvalidArgument("C2 must be finite");
  }

  cplx omega2() const { return omega * omega; }

  /// omega^2 as a real number; throws unless it is real (omega real or purely imaginary).
  double real_omega2() const {
    const cplx w2 = omega2();
    if (std::abs(w2.imag()) > 1e-14 * std::max(1.0, std::abs(w2)))
      throw InvalidArgument("omega^2 must be real (omega real or purely imaginary)");
    return w2.real();
  }

  Interval domain() const {
    if (lambda > 0) return {};
    const double r = 1.0 / std::sqrt(-lambda);
    return {-r, r};
  }
};

/// Lienard system x'' + (m'/2m) x'^2 + (f^2/g) V'(x) = 0 with the nonlocal map
/// dq/dx = sqrt(g), dtau/dt = f.
struct PdmSystem {
  std::string name;
  RealMap mass;
  RealMap potential;
  RealMap time_scale;        // f
  RealMap coordinate_scale;  // g
  RealMap mass_derivative;       // optional
  RealMap potential_derivative;  // optional
  RealMap coordinate;            // optional closed-form q(x)
  double C1 = 1.0;
  Interval domain;
  double coordinate_origin = 0.0;  // q(coordinate_origin) = 0 when q is built by quadrature

  void check(double x) const {
    if (!domain.contains(x)) throw DomainError(name + ": outside the system domain", x);
  }

  double m(double x) const { return mass(x); }
  double V(double x) const { return potential(x); }
  double f(double x) const { return time_scale(x); }
  double g(double x) const { return coordinate_scale(x); }

  double dm(double x) const {
    if (mass_derivative) return mass_derivative(x);
    return numerics::central_diff(mass, x, 1e-6 * (1.0 + std::abs(x)), 1);
  }

  double dV(double x) const {
    if (potential_derivative) return potential_derivative(x);
    return numerics::central_diff(potential, x, 1e-6 * (1.0 + std::abs(x)), 1);
  }

  /// Absolute q(x): closed form if supplied, else the integral from coordinate_origin.
  double q(double x) const;
};

/// m(x) = C1 (g/f^2)(x) / (g/f^2)(x_ref), the solution of m'/m = g'/g - 2f'/f
/// pinned by m(x_ref) = C1.
inline RealMap mass_from_fg(RealMap g, RealMap f, double C1, double x_ref) {
  auto ratio = [g, f](double x) {
    const double fx = f(x);
    const double gx = g(x);
    if (fx == 0.0 || !std::isfinite(fx)) throw DomainError("mass_from_fg: f vanishes", x);
    if (!(gx > 0.0)) throw DomainError("mass_from_fg: g must be positive", x);
    return gx / (fx * fx);
  };
  const double ref = ratio(x_ref);
  return [ratio, ref, C1](double x) { return C1 * ratio(x) / ref; };
}

inline double lienard_accel(double x, double dx, const PdmSystem& sys) {
  sys.check(x);
  const double m = sys.m(x);
  const double f = sys.f(x);
  return -0.5 * (sys.dm(x) / m) * dx * dx - (f * f / sys.g(x)) * sys.dV(x);
}

inline double case_energy(double x, double dx, const PdmSystem& sys) {
  sys.check(x);
  return 0.5 * sys.m(x) * dx * dx + sys.V(x);
}

/// Max relative variation of m f^2 / g over n points of [lo, hi].
inline double gauge_consistency(const PdmSystem& sys, double lo, double hi, int n = 101) {
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * i / (n - 1);
    const double f = sys.f(x);
    r[i] = sys.m(x) * f * f / sys.g(x);
  }
  const auto [lo_it, hi_it] = std::minmax_element(r.begin(), r.end());
  return (*hi_it - *lo_it) / std::abs(r.front());
}

/// The quadratic (Eqs. 16-18 family) oscillator: m = C1 (1+lambda x)^-4,
/// V = C2 - C1 alpha^2 (1+2 lambda x) / (2 lambda^2 (1+lambda x)^2), f = 1, g = m.
inline PdmSystem quadratic_system(const QuadraticParams& p) {
  p.validate();
  PdmSystem s;
  s.name = "quadratic";
  s.C1 = p.C1;
  s.domain = p.domain();
  const double l = p.lambda, a2 = p.alpha * p.alpha, C1 = p.C1, C2 = p.C2;
  s.mass = [=](double x) { return C1 / std::pow(1.0 + l * x, 4); };
  s.mass_derivative = [=](double x) { return -4.0 * l * C1 / std::pow(1.0 + l * x, 5); };
  s.potential = [=](double x) {
    const double u = 1.0 + l * x;
    return C2 - C1 * a2 * (1.0 + 2.0 * l * x) / (2.0 * l * l * u * u);
  };
  s.potential_derivative = [=](double x) { return C1 * a2 * x / std::pow(1.0 + l * x, 3); };
  s.time_scale = [](double) { return 1.0; };
  s.coordinate_scale = s.mass;
  s.coordinate = [=](double x) { return std::sqrt(C1) * x / (1.0 + l * x); };
  return s;
}

/// The Mathews-Lakshmanan oscillator: m = C1/(1+lambda x^2),
/// V = -C1 omega^2 / (2 lambda (1+lambda x^2)) + C2, f = 1, g = m.
inline PdmSystem ml_system(const MLParams& p) {
  p.validate();
  PdmSystem s;
  s.name = "ml";
  s.C1 = p.C1;
  s.domain = p.domain();
  const double l = p.lambda, w2 = p.real_omega2(), C1 = p.C1, C2 = p.C2;
  s.mass = [=](double x) { return C1 / (1.0 + l * x * x); };
  s.mass_derivative = [=](double x) {
    const double u = 1.0 + l * x * x;
    return -2.0 * l * C1 * x / (u * u);
  };
  s.potential = [=](double x) { return -C1 * w2 / (2.0 * l * (1.0 + l * x * x)) + C2; };
  s.potential_derivative = [=](double x) {
    const double u = 1.0 + l * x * x;
    return C1 * w2 * x / (u * u);
  };
  s.time_scale = [](double) { return 1.0; };
  s.coordinate_scale = s.mass;
  s.coordinate = [=](double x) {
    const double r = std::sqrt(std::abs(l));
    return l > 0 ? std::sqrt(C1) * std::asinh(r * x) / r : std::sqrt(C1) * std::asin(r * x) / r;
  };
  return s;
}

/// q(x) - q(x0) = integral of sqrt(m) f from x0 to x.
inline double q_of_x(const PdmSystem& sys, double x0, double x) {
  sys.check(x0);
  sys.check(x);
  auto integrand = [&sys](double s) { return std::sqrt(sys.m(s)) * sys.f(s); };
  return numerics::adaptive_quadrature(integrand, x0, x, 1e-12, 2);
}

inline double PdmSystem::q(double x) const {
  if (coordinate) return coordinate(x);
  return q_of_x(*this, coordinate_origin, x);
}

/// RK4 integration of the Lienard equation; state (x, dx), diagnostic "energy".
inline Trajectory integrate_lienard(const PdmSystem& sys, double x0, double dx0, double t1, double dt) {
  sys.check(x0);
  const std::array<double, 2> y0{x0, dx0};
  auto rhs = [&sys](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = lienard_accel(y[0], y[1], sys);
  };
  Trajectory traj = numerics::rk4_integrate(rhs, y0, 0.0, t1, dt);
  std::vector<double> e(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) e[i] = case_energy(traj.state(i)[0], traj.state(i)[1], sys);
  traj.set_diagnostic("energy", std::move(e));
  return traj;
}

/// tau(t) by the cumulative trapezoid rule on f(x(t)), tau(t0) = 0.
inline std::vector<double> tau_of_t(const Trajectory& traj, const RealMap& f) {
  const auto t = traj.times();
  std::vector<double> tau(traj.size(), 0.0);
  double f_prev = f(traj.state(0)[0]);
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double f_cur = f(traj.state(i)[0]);
    tau[i] = tau[i - 1] + 0.5 * (f_prev + f_cur) * (t[i] - t[i - 1]);
    f_prev = f_cur;
  }
  return tau;
}

/// q along a trajectory: closed-form coordinate if present, otherwise
/// cumulative quadrature between consecutive samples.
inline std::vector<double> q_along(const Trajectory& traj, const PdmSystem& sys) {
  std::vector<double> q(traj.size());
  if (sys.coordinate) {
    for (std::size_t i = 0; i < traj.size(); ++i) q[i] = sys.coordinate(traj.state(i)[0]);
    return q;
  }
  q[0] = sys.q(traj.state(0)[0]);
  for (std::size_t i = 1; i < traj.size(); ++i)
    q[i] = q[i - 1] + q_of_x(sys, traj.state(i - 1)[0], traj.state(i)[0]);
  return q;
}

/// V as a function of q: inverts q(x) by safeguarded Newton and evaluates V(x).
inline RealMap potential_in_q(const PdmSystem& sys) {
  return [sys](double q) {
    const double x0 = sys.coordinate_origin;
    auto F = [&](double x) { return sys.q(x) - q; };
    // Bracket the root by stepping away from the origin, never leaving the domain.
    double lo = x0, hi = x0;
    double flo = F(lo);
    const double dir = flo < 0 ? 1.0 : -1.0;
    double step = 0.1;
    double x = x0, fx = flo;
    for (int k = 0; k < 200 && (fx < 0) == (flo < 0) && fx != 0.0; ++k) {
      double nx = x + dir * step;
      const double edge = dir > 0 ? sys.domain.hi : sys.domain.lo;
      if (std::isfinite(edge) && (dir > 0 ? nx >= edge : nx <= edge)) nx = 0.5 * (x + edge);
      lo = x;
      x = nx;
      fx = F(x);
      step *= 2.0;
    }
    if (fx != 0.0 && (fx < 0) == (flo < 0)) throw RangeError("potential_in_q: q outside the image of x", q, q);
    hi = x;
    if (lo > hi) std::swap(lo, hi);
    double flo_b = F(lo);
    x = 0.5 * (lo + hi);
    for (int k = 0; k < 200; ++k) {
      const double fv = F(x);
      if (fv == 0.0) break;
      if ((fv < 0) == (flo_b < 0)) {
        lo = x;
        flo_b = fv;
      } else {
        hi = x;
      }
      const double slope = std::sqrt(sys.m(x)) * sys.f(x);
      double nx = x - fv / slope;
      if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
      if (std::abs(nx - x) <= 1e-16 * (1.0 + std::abs(x))) {
        x = nx;
        break;
      }
      x = nx;
    }
    return sys.V(x);
  };
}

struct PullbackOptions {
  double resample_factor = 10.0;  // uniform tau step as a multiple of the mean sample step
  std::size_t trim = 3;           // resampled points dropped at each end
};

/// Max interior |d^2q/dtau^2 + dV/dq| along a Lienard trajectory mapped to (q, tau).
inline double pullback_residual(const Trajectory& traj, const PdmSystem& sys, const RealMap& V_of_q,
                                PullbackOptions opt = {}) {
  const std::size_t n = traj.size();
  if (n < 2 * opt.trim + 5) throw InvalidArgument("pullback_residual: trajectory too short");
  const auto tau = tau_of_t(traj, sys.time_scale);
  for (std::size_t i = 1; i < n; ++i)
    if (!(tau[i] > tau[i - 1])) throw DomainError("pullback_residual: tau is not strictly increasing", traj.time(i));
  const auto q = q_along(traj, sys);

  // A constant trajectory has nothing to resample.
  if (numerics::peak_to_peak(q) == 0.0) {
    const double h = 1e-6 * (1.0 + std::abs(q[0]));
    return std::abs(numerics::central_diff(V_of_q, q[0], h, 1));
  }

  const numerics::CubicSpline spline(tau, q);
  const double span = tau.back() - tau.front();
  const double dtau = opt.resample_factor * span / static_cast<double>(n - 1);
  const std::size_t m = static_cast<std::size_t>(std::floor(span / dtau)) + 1;
  if (m < 2 * opt.trim + 3) throw InvalidArgument("pullback_residual: too few resampled points");
  std::vector<double> qs(m);
  for (std::size_t j = 0; j < m; ++j) qs[j] = spline(tau.front() + dtau * static_cast<double>(j));

  double worst = 0.0;
  for (std::size_t j = std::max<std::size_t>(opt.trim, 1); j + std::max<std::size_t>(opt.trim, 1) < m; ++j) {
    const double qdd = (qs[j + 1] - 2.0 * qs[j] + qs[j - 1]) / (dtau * dtau);
    const double h = 1e-6 * (1.0 + std::abs(qs[j]));
    const double dV = numerics::central_diff(V_of_q, qs[j], h, 1);
    worst = std::max(worst, std::abs(qdd + dV));
  }
  return worst;
}

}  // namespace pdmtorus::pdm

#endif  // PDMTORUS_PDM_SYSTEM_HPP
