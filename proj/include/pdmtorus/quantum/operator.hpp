#ifndef PDMTORUS_QUANTUM_OPERATOR_HPP
#define PDMTORUS_QUANTUM_OPERATOR_HPP

// Second-order operators H = a2 d^2/dx^2 + a1 d/dx + a0 (hbar = 1).

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "pdmtorus/errors.hpp"
#include "pdmtorus/pdm/system.hpp"
#include "pdmtorus/torus.hpp"

namespace pdmtorus::quantum {

using RealMap = std::function<double(double)>;
using pdm::MLParams;
using pdm::QuadraticParams;
using torus::TorusParams;

enum class BoundaryKind { dirichlet, periodic };

struct Boundary {
  BoundaryKind kind = BoundaryKind::dirichlet;
  double period = 0.0;  // periodic only

  static Boundary dirichlet() { return {}; }
  static Boundary periodic(double period) { return {BoundaryKind::periodic, period}; }
};

struct Operator1D {
  std::string name;
  RealMap a2;
  RealMap a1;
  RealMap a0;
  RealMap da2;  // optional analytic a2'
  double lo = 0.0;
  double hi = 1.0;
  Boundary boundary;

  double midpoint() const { return 0.5 * (lo + hi); }

  double a2_prime(double x) const {
    if (da2) return da2(x);
    const double h = 1e-5 * (1.0 + std::abs(x));
    return (a2(x + h) - a2(x - h)) / (2.0 * h);
  }

  /// Returns a copy on another truncation interval (Dirichlet operators only).
  Operator1D on_interval(double new_lo, double new_hi) const {
    if (boundary.kind == BoundaryKind::periodic) throw InvalidArgument("cannot truncate a periodic operator");
    if (!(new_hi > new_lo)) throw InvalidArgument("empty interval");
    Operator1D out = *this;
    out.lo = new_lo;
    out.hi = new_hi;
    return out;
  }
};

/// Reduced torus Hamiltonian on the angle x = v with periodic boundary.
inline Operator1D torus_hamiltonian(const TorusParams& p, double q1, double q2) {
  p.validate();
  const double a = p.a, c = p.c;
  Operator1D op;
  op.name = "torus";
  op.a2 = [=](double x) {
    const double r = c + a * std::cos(x);
    return -1.0 / (2.0 * r * r);
  };
  op.da2 = [=](double x) {
    const double r = c + a * std::cos(x);
    return -a * std::sin(x) / (r * r * r);
  };
  op.a1 = [=](double x) {
    const double r = c + a * std::cos(x);
    return -a * std::sin(x) / (2.0 * r * r * r);
  };
  op.a0 = [=](double x) {
    const double r = c + a * std::cos(x);
    return q1 * q1 / (2.0 * a * a) + 0.5 * q2 * r * r;
  };
  op.lo = -std::numbers::pi;
  op.hi = std::numbers::pi;
  op.boundary = Boundary::periodic(2.0 * std::numbers::pi);
  return op;
}

/// Quadratic-oscillator Hamiltonian in the original coordinate x. The default
/// truncation covers z = x/(1+lambda x) in [-10, 10]/sqrt(C1 alpha), clipped
/// short of the image boundary z = 1/lambda.
inline Operator1D quadratic_hamiltonian(const QuadraticParams& p) {
  p.validate();
  const double l = p.lambda, C1 = p.C1, al2 = p.alpha * p.alpha, C2 = p.C2;
  Operator1D op;
  op.name = "quadratic";
  op.a2 = [=](double x) { return -std::pow(1.0 + l * x, 4) / (2.0 * C1); };
  op.da2 = [=](double x) { return -2.0 * l * std::pow(1.0 + l * x, 3) / C1; };
  op.a1 = [=](double x) { return -l * std::pow(1.0 + l * x, 3) / C1; };
  op.a0 = [=](double x) {
    const double s = 1.0 + l * x;
    return C2 - C1 * al2 * (1.0 + 2.0 * l * x) / (2.0 * l * l * s * s);
  };
  const double width = 10.0 / std::sqrt(C1 * p.alpha);
  const double edge = 0.9 / std::abs(l);
  double zlo = -width, zhi = width;
  if (l > 0) zhi = std::min(zhi, edge);
  if (l < 0) zlo = std::max(zlo, -edge);
  op.lo = zlo / (1.0 - l * zlo);
  op.hi = zhi / (1.0 - l * zhi);
  return op;
}

/// Shifted harmonic form in zeta = z + 1/(2 lambda), with E as eigenvalue:
/// -psi''/(2 C1) + (C1 alpha^2 zeta^2 / 2 + C2 - C1 alpha^2/(8 lambda^2)) psi.
inline Operator1D quadratic_zeta_hamiltonian(const QuadraticParams& p, double lo = -12.0, double hi = 12.0) {
  p.validate();
  const double l = p.lambda, C1 = p.C1, al2 = p.alpha * p.alpha, C2 = p.C2;
  Operator1D op;
  op.name = "quadratic-zeta";
  op.a2 = [=](double) { return -1.0 / (2.0 * C1); };
  op.da2 = [](double) { return 0.0; };
  op.a1 = [](double) { return 0.0; };
  op.a0 = [=](double zeta) { return 0.5 * C1 * al2 * zeta * zeta + C2 - C1 * al2 / (8.0 * l * l); };
  op.lo = lo;
  op.hi = hi;
  return op;
}

inline Operator1D ml_hamiltonian(const MLParams& p, double lo = -30.0, double hi = 30.0) {
  p.validate();
  const double l = p.lambda, C1 = p.C1, C2 = p.C2;
  double w2 = 0.0;
  try {
    w2 = p.real_omega2();
  } catch (const InvalidArgument&) {
    throw InvalidArgument("ML Hamiltonian: unsupported parameter, omega^2 is not real");
  }
  Operator1D op;
  op.name = "ml";
  op.a2 = [=](double x) { return -(1.0 + l * x * x) / (2.0 * C1); };
  op.da2 = [=](double x) { return -l * x / C1; };
  op.a1 = [=](double x) { return -l * x / (2.0 * C1); };
  op.a0 = [=](double x) { return -C1 * w2 / (2.0 * l * (1.0 + l * x * x)) + C2; };
  if (l < 0) {
    const double r = 0.999 / std::sqrt(-l);
    lo = std::max(lo, -r);
    hi = std::min(hi, r);
  }
  op.lo = lo;
  op.hi = hi;
  return op;
}

/// -psi'' + x^2 psi, spectrum 2n + 1 on the full line.
inline Operator1D harmonic_operator(double lo = -10.0, double hi = 10.0) {
  Operator1D op;
  op.name = "harmonic";
  op.a2 = [](double) { return -1.0; };
  op.da2 = [](double) { return 0.0; };
  op.a1 = [](double) { return 0.0; };
  op.a0 = [](double x) { return x * x; };
  op.lo = lo;
  op.hi = hi;
  return op;
}

}  // namespace pdmtorus::quantum

#endif  // PDMTORUS_QUANTUM_OPERATOR_HPP
