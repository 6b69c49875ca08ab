#ifndef PDMTORUS_PDM_MATCHING_HPP
#define PDMTORUS_PDM_MATCHING_HPP

// Matching the oscillator potentials to the torus radial potential
// V(q) = q1^2 / (2 a^2 (c + a cos q)^2): closed-form branch maps evaluated
// verbatim, and a root-finding oracle.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "pdmtorus/errors.hpp"
#include "pdmtorus/pdm/system.hpp"
#include "pdmtorus/specfun.hpp"
#include "pdmtorus/torus.hpp"

namespace pdmtorus::pdm {

using torus::TorusParams;
using CaseParams = std::variant<QuadraticParams, MLParams>;

enum class Case { quadratic, ml };

inline Case case_of(const CaseParams& p) { return std::holds_alternative<QuadraticParams>(p) ? Case::quadratic : Case::ml; }

inline const char* to_string(Case c) { return c == Case::quadratic ? "quadratic" : "ml"; }

inline PdmSystem case_system(const CaseParams& p) {
  return std::visit(
      [](const auto& v) -> PdmSystem {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, QuadraticParams>)
          return quadratic_system(v);
        else
          return ml_system(v);
      },
      p);
}

/// Quadratic case: index 1..4. ML case: sign pair (outer, inner), each +1 or -1.
struct BranchId {
  int index = 1;
  int outer = 1;
  int inner = 1;

  static BranchId quadratic(int i) {
    if (i < 1 || i > 4) throw InvalidArgument("quadratic branch index must be 1..4");
    return {i, 1, 1};
  }
  static BranchId ml(int outer, int inner) {
    if (std::abs(outer) != 1 || std::abs(inner) != 1) throw InvalidArgument("ML branch signs must be +1 or -1");
    return {0, outer, inner};
  }

  std::string label() const {
    if (index > 0) return std::to_string(index);
    return std::string(outer > 0 ? "+" : "-") + (inner > 0 ? "+" : "-");
  }

  bool operator==(const BranchId&) const = default;
};

/// Parses "1".."4" for the quadratic case and "++", "+-", "-+", "--" for ML.
inline BranchId parse_branch(Case c, const std::string& s) {
  if (c == Case::quadratic) {
    if (s.size() == 1 && s[0] >= '1' && s[0] <= '4') return BranchId::quadratic(s[0] - '0');
  } else if (s.size() == 2 && (s[0] == '+' || s[0] == '-') && (s[1] == '+' || s[1] == '-')) {
    return BranchId::ml(s[0] == '+' ? 1 : -1, s[1] == '+' ? 1 : -1);
  }
  throw InvalidArgument("unknown branch '" + s + "' for case " + to_string(c));
}

inline std::vector<BranchId> all_branches(Case c) {
  if (c == Case::quadratic) return {BranchId::quadratic(1), BranchId::quadratic(2), BranchId::quadratic(3), BranchId::quadratic(4)};
  return {BranchId::ml(1, 1), BranchId::ml(1, -1), BranchId::ml(-1, 1), BranchId::ml(-1, -1)};
}

inline double torus_target_potential(double q, double a, double c, double q1) {
  const double r = c + a * std::cos(q);
  return q1 * q1 / (2.0 * a * a * r * r);
}

inline double torus_target_potential(double q, const TorusParams& t, double q1) {
  return torus_target_potential(q, t.a, t.c, q1);
}

struct PaperMap {
  cplx q;
  cplx f;
  cplx m;
};

namespace detail {

inline cplx csqrt(cplx z) { return std::sqrt(z); }

inline void require_finite(const PaperMap& r, double x) {
  for (cplx v : {r.q, r.f, r.m})
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw SingularityError("closed-form map is not finite", x);
}

}  // namespace detail

/// Closed-form q, f, m of the quadratic case, evaluated as printed with
/// principal complex branches.
inline PaperMap match_paper(const QuadraticParams& p, double x, BranchId b, const TorusParams& tp, double q1) {
  p.validate();
  tp.validate();
  if (b.index < 1 || b.index > 4) throw InvalidArgument("quadratic branch index must be 1..4");
  if (q1 == 0.0) throw InvalidArgument("matching needs q1 != 0");
  const double l = p.lambda, al = p.alpha, al2 = al * al, C1 = p.C1, a = tp.a, c = tp.c;
  const double s = 1.0 + l * x;
  const double t = 1.0 + 2.0 * l * x;
  if (s == 0.0) throw SingularityError("1 + lambda x vanishes", x);
  if (t == 0.0) throw SingularityError("1 + 2 lambda x vanishes", x);
  const cplx i(0.0, 1.0);

  const cplx R = detail::csqrt(cplx(-a * a * C1 * al2 * t / (q1 * q1 * l * l * s * s), 0.0));
  const cplx F = -1.0 + 2.0 * c * R;

  PaperMap r;
  const int q_sign = (b.index == 1 || b.index == 3) ? 1 : -1;
  if (b.index <= 2) {
    const cplx arg = -c / a + (i * l * q1 / (al * a * a)) * s / detail::csqrt(cplx(-C1 * t, 0.0));
    r.q = double(q_sign) * specfun::principal_arccos(arg);
    const cplx rad = a * a * (a * a - c * c) * C1 * al2 * t - q1 * q1 * l * l * F;
    r.f = double(q_sign) * q1 * l * l * l * x * std::pow(s, 4) / (C1 * al2 * t) / detail::csqrt(rad);
  } else {
    const cplx num = -a * a * c * C1 * al2 * t + q1 * q1 * l * l * s * s * R;
    r.q = double(q_sign) * specfun::principal_arccos(num / (a * a * a * al2 * (C1 + 2.0 * C1 * l * x)));
    const cplx rad = -a * a * (a * a - c * c) * C1 * al2 * t - q1 * q1 * l * l * s * s * (F + 2.0);
    r.f = -double(q_sign) * a * x * l * l * al2 * std::pow(s, 3) / detail::csqrt(rad);
  }

  const cplx rad_m = a * a * (a * a - c * c) * C1 * al2 * t - q1 * q1 * l * l * F;
  const cplx inner = -c / a + (i * q1 * l * s / (a * a * al)) * detail::csqrt(cplx(-C1 * t, 0.0));
  r.m = C1 / (std::pow(a, 4) * t * std::pow(s, -8)) / detail::csqrt(rad_m) / (1.0 - inner * inner);
  detail::require_finite(r, x);
  return r;
}

/// Closed-form q, f, m of the ML case. The outer sign multiplies arccos in q and
/// enters f with the opposite sign; the inner sign selects the +- inside both.
inline PaperMap match_paper(const MLParams& p, double x, BranchId b, const TorusParams& tp, double q1) {
  p.validate();
  tp.validate();
  if (b.index != 0) throw InvalidArgument("ML branches are sign pairs");
  if (q1 == 0.0) throw InvalidArgument("matching needs q1 != 0");
  const double l = p.lambda, C1 = p.C1, a = tp.a, c = tp.c;
  const cplx w = p.omega;
  if (w == cplx(0.0)) throw SingularityError("omega vanishes", x);
  const double u = 1.0 + l * x * x;
  if (u == 0.0) throw SingularityError("1 + lambda x^2 vanishes", x);
  const cplx w2 = w * w;

  PaperMap r;
  const cplx arg = -c / a + double(b.inner) * detail::csqrt(cplx(l / C1, 0.0)) * q1 / (a * a * w) *
                                detail::csqrt(cplx(u, 0.0));
  r.q = double(b.outer) * specfun::principal_arccos(arg);

  const cplx rad = -1.0 / (a * a) + C1 * w2 * (c * c - a * a) / (q1 * q1 * l * u) +
                   double(b.inner) * (2.0 * c / (a * a)) * detail::csqrt(-a * a * C1 * w2 / (q1 * q1 * l * u));
  r.f = -double(b.outer) * l * x * detail::csqrt(cplx(C1 / u, 0.0)) / (C1 * a) / detail::csqrt(rad);

  const cplx num = -1.0 / (a * a) + C1 * w2 * (c * c - a * a) / (q1 * q1 * l * u) +
                   (2.0 * c * w / q1) * detail::csqrt(cplx(-C1 / (l * u), 0.0));
  const cplx inner = -c / a + (q1 / (a * a * w)) * detail::csqrt(cplx(l * u / C1, 0.0));
  r.m = (q1 * q1 * l / (a * a * w2)) * num / (1.0 - inner * inner);
  detail::require_finite(r, x);
  return r;
}

inline PaperMap match_paper(const CaseParams& p, double x, BranchId b, const TorusParams& tp, double q1) {
  return std::visit([&](const auto& v) { return match_paper(v, x, b, tp, q1); }, p);
}

struct NumericMatch {
  double q = 0.0;
  double dq_dx = 0.0;
  double f = 0.0;
  double potential_residual = 0.0;  // |V_torus(q) - V_case(x) - C_offset|
  double c_offset = 0.0;
};

struct MatchOptions {
  double q_seed = std::numbers::pi / 2;
  double x_ref = 0.0;
  double h = 1e-6;  // step of the central difference for dq/dx
};

namespace detail {

/// Root of V_torus(q) = target on (1e-9, pi - 1e-9), where V_torus increases.
inline double solve_torus_potential(double target, const TorusParams& tp, double q1) {
  constexpr double eps = 1e-9;
  double lo = eps, hi = std::numbers::pi - eps;
  const double vlo = torus_target_potential(lo, tp, q1);
  const double vhi = torus_target_potential(hi, tp, q1);
  if (!(target >= vlo && target <= vhi)) throw RangeError("no real matching root in (0, pi)", vlo, vhi);

  double q = 0.5 * (lo + hi);
  for (int k = 0; k < 60; ++k) {
    (torus_target_potential(q, tp, q1) < target ? lo : hi) = q;
    q = 0.5 * (lo + hi);
  }
  // Newton polish.
  for (int k = 0; k < 4; ++k) {
    const double r = tp.c + tp.a * std::cos(q);
    const double slope = q1 * q1 * std::sin(q) / (tp.a * r * r * r);
    if (slope == 0.0) break;
    const double step = (torus_target_potential(q, tp, q1) - target) / slope;
    const double nq = q - step;
    if (!(nq > eps && nq < std::numbers::pi - eps)) break;
    q = nq;
    if (std::abs(step) <= 1e-16 * q) break;
  }
  return q;
}

}  // namespace detail

/// Numeric matching oracle: q(x) solves V_torus(q) = V_case(x) + C_offset with
/// C_offset = V_torus(q_seed) - V_case(x_ref); f = (dq/dx) / sqrt(m).
inline NumericMatch match_numeric(const CaseParams& cp, double x, const TorusParams& tp, double q1,
                                  MatchOptions opt = {}) {
  tp.validate();
  if (!(opt.q_seed > 0.0 && opt.q_seed < std::numbers::pi)) throw InvalidArgument("q_seed must lie in (0, pi)");
  const PdmSystem sys = case_system(cp);
  sys.check(x);
  sys.check(opt.x_ref);

  NumericMatch r;
  r.c_offset = torus_target_potential(opt.q_seed, tp, q1) - sys.V(opt.x_ref);
  auto root = [&](double xx) {
    sys.check(xx);
    return detail::solve_torus_potential(sys.V(xx) + r.c_offset, tp, q1);
  };
  r.q = x == opt.x_ref ? opt.q_seed : root(x);
  r.potential_residual = std::abs(torus_target_potential(r.q, tp, q1) - sys.V(x) - r.c_offset);
  r.dq_dx = (root(x + opt.h) - root(x - opt.h)) / (2.0 * opt.h);
  r.f = r.dq_dx / std::sqrt(sys.m(x));
  return r;
}

/// The oscillator re-expressed with the oracle maps: coordinate q(x),
/// f = q'/sqrt(m), g = q'^2. Lienard dynamics are unchanged (f^2/g = 1/m).
struct MatchedSystem {
  PdmSystem system;
  RealMap V_of_q;  // V_torus(q) - C_offset
  double c_offset = 0.0;
};

inline MatchedSystem matched_system(const CaseParams& cp, const TorusParams& tp, double q1, MatchOptions opt = {}) {
  MatchedSystem out;
  out.system = case_system(cp);
  out.system.name += "+torus-match";
  out.c_offset = match_numeric(cp, opt.x_ref, tp, q1, opt).c_offset;
  out.system.coordinate = [cp, tp, q1, opt](double x) { return match_numeric(cp, x, tp, q1, opt).q; };
  out.system.time_scale = [cp, tp, q1, opt](double x) { return match_numeric(cp, x, tp, q1, opt).f; };
  out.system.coordinate_scale = [cp, tp, q1, opt](double x) {
    const double d = match_numeric(cp, x, tp, q1, opt).dq_dx;
    return d * d;
  };
  const double off = out.c_offset;
  out.V_of_q = [tp, q1, off](double q) { return torus_target_potential(q, tp, q1) - off; };
  return out;
}

enum class RowStatus { physical, complex_valued, non_physical, singular };

inline const char* to_string(RowStatus s) {
  switch (s) {
    case RowStatus::physical: return "physical";
    case RowStatus::complex_valued: return "complex";
    case RowStatus::non_physical: return "non-physical";
    default: return "singular";
  }
}

struct MatchRow {
  double x = 0.0;
  BranchId branch;
  cplx q{std::nan(""), std::nan("")};
  cplx f{std::nan(""), std::nan("")};
  cplx m{std::nan(""), std::nan("")};
  double identity_residual = std::nan("");  // |dq/dx - sqrt(m) f| for the closed-form branch
  double oracle_q = std::nan("");
  double oracle_f = std::nan("");
  double potential_residual = std::nan("");
  double q_distance = std::nan("");  // closed-form vs oracle q, modulo sign and 2 pi
  RowStatus status = RowStatus::singular;
};

struct BranchSummary {
  BranchId branch;
  double max_q_distance = std::nan("");
  double max_identity_residual = std::nan("");
  int physical_rows = 0;
  int complex_rows = 0;
  int non_physical_rows = 0;
  int singular_rows = 0;
  std::string classification;  // "non-physical branch" when every finite row is imaginary
};

struct MatchReport {
  Case which = Case::quadratic;
  std::vector<MatchRow> rows;  // branch-major
  std::vector<BranchSummary> branches;
  double oracle_identity_residual = 0.0;  // max |q' - sqrt(m) f| for the oracle triple
  double oracle_potential_residual = 0.0;
  std::string best_branch;
  std::string oracle_error;  // set when the oracle could not be evaluated somewhere
};

namespace detail {

inline double q_distance(cplx qp, double qn) {
  double best = std::numeric_limits<double>::infinity();
  for (double sgn : {1.0, -1.0}) {
    const cplx s = sgn * qp;
    const double k = std::round((s.real() - qn) / (2.0 * std::numbers::pi));
    best = std::min(best, std::abs(s - cplx(qn + 2.0 * std::numbers::pi * k, 0.0)));
  }
  return best;
}

inline RowStatus classify(cplx q) {
  const double re = std::abs(q.real()), im = std::abs(q.imag());
  if (im <= 1e-9 * std::max(1.0, re)) return RowStatus::physical;
  if (re <= 1e-12) return RowStatus::non_physical;
  return RowStatus::complex_valued;
}

}  // namespace detail

/// Informational comparison of every closed-form branch against the oracle.
inline MatchReport compare_match(const CaseParams& cp, std::span<const double> xs, const TorusParams& tp, double q1,
                                 MatchOptions opt = {}) {
  MatchReport rep;
  rep.which = case_of(cp);
  const PdmSystem sys = case_system(cp);

  std::vector<NumericMatch> oracle(xs.size());
  std::vector<bool> oracle_ok(xs.size(), false);
  for (std::size_t j = 0; j < xs.size(); ++j) {
    try {
      oracle[j] = match_numeric(cp, xs[j], tp, q1, opt);
      oracle_ok[j] = true;
      // Independent derivative: wider complex-arithmetic stencil on the root curve.
      const double h = 1e-5;
      auto qc = [&](double xx) { return cplx(match_numeric(cp, xx, tp, q1, opt).q, 0.0); };
      const cplx dq = numerics::central_diff(qc, xs[j], h, 1);
      const double res = std::abs(dq - std::sqrt(sys.m(xs[j])) * oracle[j].f);
      rep.oracle_identity_residual = std::max(rep.oracle_identity_residual, res);
      rep.oracle_potential_residual = std::max(rep.oracle_potential_residual, oracle[j].potential_residual);
    } catch (const Error& e) {
      if (rep.oracle_error.empty()) rep.oracle_error = e.what();
    }
  }

  double best_score = std::numeric_limits<double>::infinity();
  for (const BranchId& b : all_branches(rep.which)) {
    BranchSummary sum;
    sum.branch = b;
    double max_dist = 0.0, max_id = 0.0;
    bool any_finite = false;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      MatchRow row;
      row.x = xs[j];
      row.branch = b;
      if (oracle_ok[j]) {
        row.oracle_q = oracle[j].q;
        row.oracle_f = oracle[j].f;
        row.potential_residual = oracle[j].potential_residual;
      }
      try {
        const PaperMap pm = match_paper(cp, xs[j], b, tp, q1);
        row.q = pm.q;
        row.f = pm.f;
        row.m = pm.m;
        row.status = detail::classify(pm.q);
        auto qfun = [&](double xx) { return match_paper(cp, xx, b, tp, q1).q; };
        const cplx dq = numerics::central_diff(qfun, xs[j], 1e-5, 1);
        row.identity_residual = std::abs(dq - std::sqrt(pm.m) * pm.f);
        if (oracle_ok[j]) row.q_distance = detail::q_distance(pm.q, oracle[j].q);
      } catch (const Error&) {
        // Fields not reached stay NaN; a failed evaluation of q keeps the row singular.
      }
      switch (row.status) {
        case RowStatus::physical: ++sum.physical_rows; break;
        case RowStatus::complex_valued: ++sum.complex_rows; break;
        case RowStatus::non_physical: ++sum.non_physical_rows; break;
        default: ++sum.singular_rows; break;
      }
      if (std::isfinite(row.q_distance)) {
        max_dist = std::max(max_dist, row.q_distance);
        any_finite = true;
      }
      if (std::isfinite(row.identity_residual)) max_id = std::max(max_id, row.identity_residual);
      rep.rows.push_back(row);
    }
    if (any_finite) {
      sum.max_q_distance = max_dist;
      sum.max_identity_residual = max_id;
    }
    const int finite_rows = sum.physical_rows + sum.complex_rows + sum.non_physical_rows;
    if (finite_rows == 0)
      sum.classification = "singular branch";
    else if (sum.non_physical_rows == finite_rows)
      sum.classification = "non-physical branch";
    else if (sum.physical_rows == finite_rows)
      sum.classification = "real branch";
    else
      sum.classification = "complex branch";
    const double score = any_finite && sum.singular_rows == 0 ? max_dist : std::numeric_limits<double>::infinity();
    if (score < best_score) {
      best_score = score;
      rep.best_branch = b.label();
    }
    rep.branches.push_back(sum);
  }
  if (rep.best_branch.empty()) rep.best_branch = "none";
  return rep;
}

}  // namespace pdmtorus::pdm

#endif  // PDMTORUS_PDM_MATCHING_HPP
