#ifndef PDMTORUS_VERIFY_HPP
#define PDMTORUS_VERIFY_HPP

// The acceptance suite: eleven numbered checks grouped into four suites.
// Each check returns a record instead of asserting, so the CLI and the
// acceptance binary can print a table and pick an exit code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <future>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "pdmtorus/errors.hpp"
#include "pdmtorus/numerics.hpp"
#include "pdmtorus/pdm/matching.hpp"
#include "pdmtorus/pdm/system.hpp"
#include "pdmtorus/quantum/analytic.hpp"
#include "pdmtorus/quantum/operator.hpp"
#include "pdmtorus/quantum/spectrum.hpp"
#include "pdmtorus/specfun.hpp"
#include "pdmtorus/torus.hpp"

namespace pdmtorus::verify {

struct CheckResult {
  int id = 0;
  std::string name;
  std::string suite;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget = 0.0;  // wall-clock limit in seconds
};

enum class Suite { all, classical, pdm, quantum, specfun };

inline Suite parse_suite(const std::string& s) {
  if (s == "all") return Suite::all;
  if (s == "classical") return Suite::classical;
  if (s == "pdm") return Suite::pdm;
  if (s == "quantum") return Suite::quantum;
  if (s == "specfun") return Suite::specfun;
  throw InvalidArgument("unknown suite '" + s + "'");
}

inline const char* to_string(Suite s) {
  switch (s) {
    case Suite::classical: return "classical";
    case Suite::pdm: return "pdm";
    case Suite::quantum: return "quantum";
    case Suite::specfun: return "specfun";
    default: return "all";
  }
}

namespace detail {

using std::numbers::pi;

// Collects measured values for the detail string and tracks the verdict.
class Ledger {
 public:
  Ledger() { os_.precision(3); }

  void require(const std::string& label, double value, double limit, bool at_most = true) {
    const bool ok = std::isfinite(value) && (at_most ? value <= limit : value >= limit);
    ok_ = ok_ && ok;
    sep();
    os_ << label << '=' << std::scientific << value << (at_most ? " (<= " : " (>= ") << limit << ')';
    if (!ok) os_ << " FAIL";
  }

  void require(const std::string& label, bool ok) {
    ok_ = ok_ && ok;
    sep();
    os_ << label << (ok ? " ok" : " FAIL");
  }

  void note(const std::string& label, double value) {
    sep();
    os_ << label << '=' << std::scientific << value;
  }

  void note(const std::string& text) {
    sep();
    os_ << text;
  }

  bool ok() const { return ok_; }
  std::string str() const { return os_.str(); }

 private:
  void sep() {
    if (!first_) os_ << "; ";
    first_ = false;
  }
  std::ostringstream os_;
  bool ok_ = true;
  bool first_ = true;
};

inline const torus::TorusParams torus_ref{1.0, 2.0};
inline const torus::FullState torus_ic{0.0, 0.5, 0.3, 0.1};
inline const pdm::QuadraticParams quad_pdm{0.1, 1.0, 1.0, 0.0};
inline const pdm::MLParams ml_pdm{1.0, pdm::cplx(1.0, 0.0), 1.0, 0.0};

inline void conservation(Ledger& L) {
  const auto traj = torus::integrate_full(torus_ic, torus_ref, 100.0, 1e-3);
  L.require("q1 drift", numerics::relative_drift(traj.diagnostic("q1")), 1e-8);
  L.require("lagrangian drift", numerics::relative_drift(traj.diagnostic("lagrangian")), 1e-8);
}

inline void sign(Ledger& L) {
  const auto audit = torus::sign_audit(torus::integrate_full(torus_ic, torus_ref, 100.0, 1e-3));
  L.require("plus variation", audit.plus_drift, 1e-8);
  L.require("minus variation", audit.minus_drift, 1e-2, false);
  L.require(std::string("verdict ") + torus::to_string(audit.conserved), audit.conserved == torus::SignVerdict::energy);
}

inline void reduced(Ledger& L) {
  const double t1 = 10.0, dt = 1e-4;
  const auto full = torus::integrate_full(torus_ic, torus_ref, t1, dt);
  const auto red = torus::integrate_reduced(torus_ic.v, torus_ic.dv, torus::q1_of(torus_ic, torus_ref), torus_ref, t1, dt);
  if (full.size() != red.size()) throw Error("reduced and full runs have different sample counts");
  double worst = 0.0;
  for (std::size_t i = 0; i < full.size(); ++i) worst = std::max(worst, std::abs(full.state(i)[1] - red.state(i)[0]));
  L.require("max |v_full - v_reduced|", worst, 1e-6);
}

inline void pullback(Ledger& L) {
  auto one = [&L](const std::string& tag, const pdm::PdmSystem& sys, double x0) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto traj = pdm::integrate_lienard(sys, x0, 0.0, 20.0, 1e-3);
    L.require(tag + " residual", pdm::pullback_residual(traj, sys, pdm::potential_in_q(sys)), 1e-4);
    L.require(tag + " seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 10.0);
  };
  one("quadratic", pdm::quadratic_system(quad_pdm), 0.2);
  one("ml", pdm::ml_system(ml_pdm), 0.3);
}

inline void lienard_energy(Ledger& L) {
  const auto qs = pdm::quadratic_system(quad_pdm);
  const auto ms = pdm::ml_system(ml_pdm);
  L.require("quadratic drift",
            numerics::relative_drift(pdm::integrate_lienard(qs, 0.2, 0.0, 50.0, 1e-4).diagnostic("energy")), 1e-8);
  L.require("ml drift", numerics::relative_drift(pdm::integrate_lienard(ms, 0.3, 0.0, 50.0, 1e-4).diagnostic("energy")),
            1e-8);
}

inline void matching(Ledger& L) {
  std::vector<double> xs(101);
  for (int i = 0; i <= 100; ++i) xs[i] = -0.5 + 0.01 * i;
  const double q1 = 1.0;
  for (const pdm::CaseParams& cp : {pdm::CaseParams{quad_pdm}, pdm::CaseParams{ml_pdm}}) {
    const std::string tag = pdm::to_string(pdm::case_of(cp));
    double worst = 0.0;
    for (double x : xs) worst = std::max(worst, pdm::match_numeric(cp, x, torus_ref, q1).potential_residual);
    L.require(tag + " potential residual", worst, 1e-10);
    const auto rep = pdm::compare_match(cp, xs, torus_ref, q1);
    L.require(tag + " oracle identity", rep.oracle_identity_residual, 1e-6);
    std::string classes;
    for (const auto& b : rep.branches) classes += (classes.empty() ? "" : ",") + b.branch.label() + ":" + b.classification;
    L.note(tag + " closed-form branches [" + classes + "] closest " + rep.best_branch);
  }
}

inline void quadratic_audit(Ledger& L) {
  const pdm::QuadraticParams p{1.0, 1.0, 1.0, 0.0};
  const auto op = quantum::quadratic_zeta_hamiltonian(p, -12.0, 12.0);
  const auto rep = quantum::solve_spectrum(op, numerics::Grid::uniform(-12.0, 12.0, 8001), 6);
  double audited = 0.0, raw = 0.0, spacing = 0.0, paper_min = 1e300, paper_max = 0.0;
  bool nodes_ok = true;
  for (int n = 0; n < 6; ++n) {
    const double Ea = quantum::quadratic_energy(n, p, quantum::EnergyFormula::audited);
    const double Ep = quantum::quadratic_energy(n, p, quantum::EnergyFormula::paper);
    audited = std::max(audited, std::abs(rep.pairs[n].energy - Ea));
    raw = std::max(raw, std::abs(rep.raw_energies[n] - Ea));
    paper_min = std::min(paper_min, rep.pairs[n].energy - Ep);
    paper_max = std::max(paper_max, rep.pairs[n].energy - Ep);
    if (n > 0) spacing = std::max(spacing, std::abs(rep.pairs[n].energy - rep.pairs[n - 1].energy - p.alpha));
    nodes_ok = nodes_ok && quantum::sign_changes(rep.pairs[n].function) == n;
  }
  L.require("max |E - audited|", audited, 1e-5);
  L.require("max |spacing - alpha|", spacing, 1e-5);
  L.require("node counts", nodes_ok);
  L.note("unextrapolated max delta", raw);
  L.note("E - paper formula in", paper_min);
  L.note("to", paper_max);

  const auto xs = numerics::Grid::uniform(-8.0, 8.0, 1001);
  double res = 0.0;
  for (int n = 0; n < 6; ++n) {
    const double peak = quantum::hermite_function_peak(n);
    auto psi = [&](double zeta) { return quantum::quadratic_wavefunction(n, zeta - 0.5 / p.lambda, p, peak); };
    res = std::max(res, quantum::residual(op, psi, quantum::quadratic_energy(n, p, quantum::EnergyFormula::audited),
                                          xs.nodes()));
  }
  L.require("eigenfunction residual", res, 1e-10);
}

inline void half_line(Ledger& L) {
  const pdm::QuadraticParams p{1.0, 50.0, 1.0, 0.0};
  const auto op = quantum::quadratic_zeta_hamiltonian(p, -12.0, 12.0);
  // z = 1/lambda sits at zeta = 1/lambda + 1/(2 lambda); keep the full-grid spacing.
  const double edge = 1.5 / p.lambda;
  const auto full = quantum::solve_spectrum(op, numerics::Grid::uniform(-12.0, 12.0, 8001), 4);
  const std::size_t n_half = static_cast<std::size_t>(std::lround((edge + 12.0) / full.spacing)) + 1;
  const auto half = quantum::solve_spectrum(op.on_interval(-12.0, edge), numerics::Grid::uniform(-12.0, edge, n_half), 4);
  double worst = 0.0;
  for (int n = 0; n < 4; ++n) worst = std::max(worst, std::abs(half.pairs[n].energy - full.pairs[n].energy));
  L.require("max shift", worst, 1e-6);
}

inline void ml_chain(Ledger& L) {
  const auto c = quantum::ml_omega_constraint(1.0, 1.0);
  L.require("omega^2 = -1/4", c.omega2 == -0.25);
  const pdm::MLParams p{1.0, c.plus, 1.0, 0.0};
  L.require("E0 = -1/8", quantum::ml_energy(0, p) == -0.125);
  L.require("E1 = -9/8", quantum::ml_energy(1, p) == -1.125);
  L.require("E2 = -25/8", quantum::ml_energy(2, p) == -3.125);
  const auto op = quantum::ml_hamiltonian(p);
  const auto xs = numerics::Grid::uniform(-5.0, 5.0, 1001);
  double worst = 0.0;
  for (int nu = 0; nu <= 6; ++nu) {
    auto psi = [nu](double x) { return quantum::ml_wavefunction(nu, x, 1.0); };
    worst = std::max(worst, quantum::residual(op, psi, quantum::ml_energy(nu, p), xs.nodes()));
  }
  L.require("max residual", worst, 1e-10);
}

inline void torus_spectrum(Ledger& L) {
  const auto op = quantum::torus_hamiltonian(torus_ref, 1.0, 1.0);
  const auto g2000 = numerics::Grid::periodic(-pi, 2.0 * pi, 2000);
  L.require("asymmetry", quantum::hermiticity_check(op, g2000), 1e-12);
  L.note("unsymmetrized asymmetry", quantum::hermiticity_check(op, g2000, false));
  const auto a = quantum::solve_spectrum(op, g2000, 6);
  const auto b = quantum::solve_spectrum(op, numerics::Grid::periodic(-pi, 2.0 * pi, 4000), 6);
  double refine = 0.0, raw = 0.0, parity = 0.0;
  for (int k = 0; k < 6; ++k) {
    refine = std::max(refine, std::abs(a.pairs[k].energy - b.pairs[k].energy));
    raw = std::max(raw, std::abs(a.raw_energies[k] - b.raw_energies[k]));
    parity = std::max({parity, quantum::parity_defect(a.pairs[k].function), quantum::parity_defect(b.pairs[k].function)});
  }
  L.require("max |E(2000) - E(4000)|", refine, 1e-6);
  L.note("unextrapolated", raw);
  L.require("parity defect", parity, 1e-8);
}

inline double rel(specfun::cplx a, specfun::cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

inline double hermite_closed(int n, double x) {
  switch (n) {
    case 0: return 1.0;
    case 1: return 2.0 * x;
    case 2: return 4.0 * x * x - 2.0;
    case 3: return 8.0 * x * x * x - 12.0 * x;
    case 4: return 16.0 * std::pow(x, 4) - 48.0 * x * x + 12.0;
    default: return 32.0 * std::pow(x, 5) - 160.0 * x * x * x + 120.0 * x;
  }
}

inline specfun::cplx legendre_closed(int n, specfun::cplx z) {
  switch (n) {
    case 0: return 1.0;
    case 1: return z;
    case 2: return (3.0 * z * z - 1.0) / 2.0;
    case 3: return (5.0 * z * z * z - 3.0 * z) / 2.0;
    case 4: return (35.0 * std::pow(z, 4) - 30.0 * z * z + 3.0) / 8.0;
    default: return (63.0 * std::pow(z, 5) - 70.0 * z * z * z + 15.0 * z) / 8.0;
  }
}

inline void special_functions(Ledger& L) {
  using specfun::cplx;
  const auto reals = numerics::Grid::uniform(-3.0, 3.0, 61);
  std::vector<cplx> zs;
  const auto unit = numerics::Grid::uniform(-1.0, 1.0, 21);
  for (double x : unit.nodes()) zs.emplace_back(x, 0.0);
  for (double y : {-2.0, -0.5, 0.7, 1.5}) zs.emplace_back(0.0, y);
  zs.emplace_back(0.4, 0.9);
  zs.emplace_back(-1.2, 0.3);

  double closed = 0.0;
  for (int n = 0; n <= 5; ++n) {
    for (double x : reals.nodes()) closed = std::max(closed, rel(specfun::hermite(n, x).value, hermite_closed(n, x)));
    for (cplx z : zs) closed = std::max(closed, rel(specfun::legendre(n, z).value, legendre_closed(n, z)));
  }
  L.require("recurrence vs closed form", closed, 1e-12);

  double ode = 0.0;
  for (int n = 0; n <= 10; ++n) {
    for (double x : reals.nodes()) {
      const auto h = specfun::hermite(n, x);
      ode = std::max(ode, std::abs(h.d2 - 2.0 * x * h.d1 + 2.0 * n * h.value) / (1.0 + std::abs(h.value)));
    }
    for (cplx z : zs) {
      const auto P = specfun::legendre(n, z);
      const cplx r = (1.0 - z * z) * P.d2 - 2.0 * z * P.d1 + double(n * (n + 1)) * P.value;
      ode = std::max(ode, std::abs(r) / (1.0 + std::abs(P.value)));
    }
  }
  L.require("ODE residual", ode, 1e-10);

  double trip = 0.0;
  const auto square = numerics::Grid::uniform(-10.0, 10.0, 41);
  for (double re : square.nodes())
    for (double im : square.nodes()) {
      const cplx w(re, im);
      if (std::abs(w) > 10.0) continue;
      trip = std::max(trip, std::abs(std::cos(specfun::principal_arccos(w)) - w));
    }
  L.require("cos(arccos w) - w", trip, 1e-12);
}

struct Spec {
  int id;
  const char* name;
  Suite suite;
  double budget;
  void (*body)(Ledger&);
};

inline const std::vector<Spec>& registry() {
  static const std::vector<Spec> all{
      {1, "classical conservation", Suite::classical, 5.0, conservation},
      {2, "sign audit", Suite::classical, 5.0, sign},
      {3, "reduced/full equivalence", Suite::classical, 5.0, reduced},
      {4, "PDM pullback invariance", Suite::pdm, 20.0, pullback},
      {5, "Lienard energy conservation", Suite::pdm, 5.0, lienard_energy},
      {6, "matching oracle", Suite::pdm, 5.0, matching},
      {7, "quadratic quantum audit", Suite::quantum, 20.0, quadratic_audit},
      {8, "half-line irrelevance", Suite::quantum, 20.0, half_line},
      {9, "ML quantum chain", Suite::quantum, 1.0, ml_chain},
      {10, "torus Hamiltonian properties", Suite::quantum, 30.0, torus_spectrum},
      {11, "special functions", Suite::specfun, 1.0, special_functions},
  };
  return all;
}

inline CheckResult run_one(const Spec& s) {
  CheckResult r;
  r.id = s.id;
  r.name = s.name;
  r.suite = to_string(s.suite);
  r.budget = s.budget;
  Ledger L;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    s.body(L);
  } catch (const std::exception& e) {
    L.require(std::string("exception: ") + e.what(), false);
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  L.require("seconds", r.seconds, r.budget);
  r.passed = L.ok();
  r.detail = L.str();
  return r;
}

}  // namespace detail

/// Runs the checks of `suite` in id order. With `parallel` each check gets its
/// own task; the checks share no state.
inline std::vector<CheckResult> run_suite(Suite suite, bool parallel = true) {
  std::vector<const detail::Spec*> chosen;
  for (const auto& s : detail::registry())
    if (suite == Suite::all || s.suite == suite) chosen.push_back(&s);
  std::vector<CheckResult> out;
  if (!parallel) {
    for (const auto* s : chosen) out.push_back(detail::run_one(*s));
    return out;
  }
  std::vector<std::future<CheckResult>> jobs;
  for (const auto* s : chosen) jobs.push_back(std::async(std::launch::async, [s] { return detail::run_one(*s); }));
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

inline bool all_passed(const std::vector<CheckResult>& rs) {
  return std::all_of(rs.begin(), rs.end(), [](const CheckResult& r) { return r.passed; });
}

}  // namespace pdmtorus::verify

#endif  // PDMTORUS_VERIFY_HPP
