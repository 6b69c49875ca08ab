#ifndef PDMTORUS_TORUS_HPP
#define PDMTORUS_TORUS_HPP

// Geodesic motion on a ring torus with metric (c + a cos v)^2 du^2 + a^2 dv^2.

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "pdmtorus/errors.hpp"
#include "pdmtorus/numerics/rk4.hpp"
#include "pdmtorus/numerics/trajectory.hpp"

namespace pdmtorus::torus {

using numerics::Trajectory;

/// Ring torus geometry: minor radius a, major radius c > a > 0.
struct TorusParams {
  double a = 1.0;
  double c = 2.0;

  void validate() const {
    if (!(a > 0.0) || !(c > a) || !std::isfinite(c))
      throw InvalidArgument("torus needs 0 < a < c (ring torus)");
  }

  /// c + a cos v; strictly positive for a ring torus.
  double radius(double v) const { return c + a * std::cos(v); }
};

struct FullState {
  double u = 0.0;
  double v = 0.0;
  double du = 0.0;
  double dv = 0.0;
};

/// Which combination of dv^2 and q1^2/(a^2 (c + a cos v)^2) is treated as the
/// second constant of motion. `energy` adds the terms (what conservation of the
/// Lagrangian implies), `paper` subtracts them (the printed form).
enum class Q2Convention { paper, energy };

struct MotionConstants {
  double q1 = 0.0;
  double q2 = 0.0;
  Q2Convention convention = Q2Convention::energy;
};

inline double metric_coefficient(double v, const TorusParams& p) {
  const double r = p.radius(v);
  return r * r;
}

/// (c + a cos v)^2 du^2 + a^2 dv^2. Equal to the conserved energy along geodesics.
inline double lagrangian_value(const FullState& s, const TorusParams& p) {
  return metric_coefficient(s.v, p) * s.du * s.du + p.a * p.a * s.dv * s.dv;
}

/// Second derivatives (u'', v'') from the Euler-Lagrange equations.
inline std::array<double, 2> full_accel(const FullState& s, const TorusParams& p) {
  const double r = p.radius(s.v);
  const double sv = std::sin(s.v);
  return {2.0 * p.a * sv * s.du * s.dv / r, -(1.0 / p.a) * r * sv * s.du * s.du};
}

inline double q1_of(const FullState& s, const TorusParams& p) { return s.du * metric_coefficient(s.v, p); }

inline double q2_of(const FullState& s, const TorusParams& p, Q2Convention convention) {
  const double q1 = q1_of(s, p);
  const double centrifugal = q1 * q1 / (p.a * p.a * metric_coefficient(s.v, p));
  return convention == Q2Convention::energy ? s.dv * s.dv + centrifugal : s.dv * s.dv - centrifugal;
}

inline MotionConstants motion_constants(const FullState& s, const TorusParams& p,
                                        Q2Convention convention = Q2Convention::energy) {
  return {q1_of(s, p), q2_of(s, p, convention), convention};
}

/// v'' of the one-dimensional radial equation with u eliminated through q1.
inline double reduced_accel(double v, double q1, const TorusParams& p) {
  const double r = p.radius(v);
  return -(q1 * q1 / p.a) * std::sin(v) / (r * r * r);
}

/// RK4 integration of the full system. Diagnostics: q1, q2_energy, q2_paper,
/// lagrangian.
inline Trajectory integrate_full(const FullState& s0, const TorusParams& p, double t1, double dt) {
  p.validate();
  const std::array<double, 4> y0{s0.u, s0.v, s0.du, s0.dv};
  auto rhs = [&p](double, std::span<const double> y, std::span<double> dy) {
    const FullState s{y[0], y[1], y[2], y[3]};
    const auto acc = full_accel(s, p);
    dy[0] = s.du;
    dy[1] = s.dv;
    dy[2] = acc[0];
    dy[3] = acc[1];
  };
  Trajectory traj = numerics::rk4_integrate(rhs, y0, 0.0, t1, dt);

  const std::size_t n = traj.size();
  std::vector<double> q1(n), q2e(n), q2p(n), lag(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto y = traj.state(i);
    const FullState s{y[0], y[1], y[2], y[3]};
    q1[i] = q1_of(s, p);
    q2e[i] = q2_of(s, p, Q2Convention::energy);
    q2p[i] = q2_of(s, p, Q2Convention::paper);
    lag[i] = lagrangian_value(s, p);
  }
  traj.set_diagnostic("q1", std::move(q1));
  traj.set_diagnostic("q2_energy", std::move(q2e));
  traj.set_diagnostic("q2_paper", std::move(q2p));
  traj.set_diagnostic("lagrangian", std::move(lag));
  return traj;
}

/// RK4 integration of the reduced radial equation; state (v, dv), diagnostic q2_energy.
inline Trajectory integrate_reduced(double v0, double dv0, double q1, const TorusParams& p, double t1, double dt) {
  p.validate();
  const std::array<double, 2> y0{v0, dv0};
  auto rhs = [&p, q1](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = reduced_accel(y[0], q1, p);
  };
  Trajectory traj = numerics::rk4_integrate(rhs, y0, 0.0, t1, dt);
  std::vector<double> q2(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto y = traj.state(i);
    q2[i] = y[1] * y[1] + q1 * q1 / (p.a * p.a * metric_coefficient(y[0], p));
  }
  traj.set_diagnostic("q2_energy", std::move(q2));
  return traj;
}

enum class SignVerdict { energy, paper, inconclusive };

inline const char* to_string(SignVerdict v) {
  switch (v) {
    case SignVerdict::energy: return "energy";
    case SignVerdict::paper: return "paper";
    default: return "inconclusive";
  }
}

struct SignAuditResult {
  double plus_drift = 0.0;   // peak-to-peak of dv^2 + q1^2/(a^2 r^2)
  double minus_drift = 0.0;  // peak-to-peak of dv^2 - q1^2/(a^2 r^2)
  SignVerdict conserved = SignVerdict::inconclusive;
  std::string note;
};

/// Decides empirically which q2 combination is a constant of motion along a
/// trajectory from integrate_full. A convention wins when its variation is at
/// most 1e-6 while the other's exceeds 1e-3.
inline SignAuditResult sign_audit(const Trajectory& traj) {
  SignAuditResult r;
  r.plus_drift = numerics::peak_to_peak(traj.diagnostic("q2_energy"));
  r.minus_drift = numerics::peak_to_peak(traj.diagnostic("q2_paper"));
  constexpr double conserved_tol = 1e-6;
  constexpr double varying_tol = 1e-3;
  if (r.plus_drift <= conserved_tol && r.minus_drift > varying_tol)
    r.conserved = SignVerdict::energy;
  else if (r.minus_drift <= conserved_tol && r.plus_drift > varying_tol)
    r.conserved = SignVerdict::paper;
  else
    r.conserved = SignVerdict::inconclusive;

  // The u'' = 2 q1^2 sin v / r^4 shortcut needs dv^2 = q1^2/(a^2 r^2), i.e. a
  // vanishing paper-convention q2 along the whole orbit.
  const auto& q2p = traj.diagnostic("q2_paper");
  std::ostringstream os;
  os.precision(6);
  os << "paper-convention q2 spans [" << *std::min_element(q2p.begin(), q2p.end()) << ", "
     << *std::max_element(q2p.begin(), q2p.end()) << "]; the q2 = 0 shortcut u'' = 2 q1^2 sin v/(c + a cos v)^4 ";
  if (r.conserved == SignVerdict::energy)
    os << "is not available on this orbit because that combination is not conserved";
  else
    os << "applies only where that combination vanishes identically";
  r.note = os.str();
  return r;
}

}  // namespace pdmtorus::torus

#endif  // PDMTORUS_TORUS_HPP
