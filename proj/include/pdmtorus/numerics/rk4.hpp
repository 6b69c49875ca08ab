#ifndef PDMTORUS_NUMERICS_RK4_HPP
#define PDMTORUS_NUMERICS_RK4_HPP

#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

#include "pdmtorus/errors.hpp"
#include "pdmtorus/numerics/trajectory.hpp"

namespace pdmtorus::numerics {

/// Vector field signature: rhs(t, y, dydt) writes dy/dt into `dydt`.
template <typename F>
concept VectorField = std::invocable<F&, double, std::span<const double>, std::span<double>>;

/// Classical fixed-step fourth-order Runge-Kutta from t0 to t1. Every step is
/// recorded; the last step is shortened so the final sample lands on t1.
template <VectorField Rhs>
Trajectory rk4_integrate(Rhs&& rhs, std::span<const double> y0, double t0, double t1, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("rk4: dt must be positive and finite");
  if (!(t1 > t0)) throw InvalidArgument("rk4: t1 must exceed t0");
  if (y0.empty()) throw InvalidArgument("rk4: empty initial state");

  const std::size_t n = y0.size();
  // Tolerate rounding in (t1 - t0)/dt so an exact multiple does not grow a
  // sliver step at the end.
  const double span = t1 - t0;
  auto steps = static_cast<std::size_t>(std::ceil(span / dt * (1.0 - 1e-12)));
  if (steps == 0) steps = 1;

  Trajectory traj(n);
  traj.reserve(steps + 1);

  std::vector<double> y(y0.begin(), y0.end());
  for (double v : y)
    if (!std::isfinite(v)) throw IntegrationDiverged("rk4: non-finite initial state", t0);
  traj.push_back(t0, y);

  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  double t = t0;
  for (std::size_t s = 1; s <= steps; ++s) {
    const double t_next = (s == steps) ? t1 : t0 + dt * static_cast<double>(s);
    const double h = t_next - t;

    rhs(t, std::span<const double>(y), std::span<double>(k1));
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    rhs(t + 0.5 * h, std::span<const double>(tmp), std::span<double>(k2));
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    rhs(t + 0.5 * h, std::span<const double>(tmp), std::span<double>(k3));
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    rhs(t + h, std::span<const double>(tmp), std::span<double>(k4));

    for (std::size_t i = 0; i < n; ++i) {
      tmp[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(tmp[i])) throw IntegrationDiverged("rk4: state became non-finite", t);
    }
    y.swap(tmp);
    t = t_next;
    traj.push_back(t, y);
  }
  return traj;
}

}  // namespace pdmtorus::numerics

#endif  // PDMTORUS_NUMERICS_RK4_HPP
