#ifndef PDMTORUS_TOOLS_CLI_HPP
#define PDMTORUS_TOOLS_CLI_HPP

// Command-line front end. run() parses argv, dispatches to a subcommand and
// returns the process exit code: 0 success, 1 verification failure, 2 bad input.

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pdmtorus/errors.hpp"
#include "pdmtorus/numerics.hpp"
#include "pdmtorus/pdm/matching.hpp"
#include "pdmtorus/pdm/system.hpp"
#include "pdmtorus/quantum/analytic.hpp"
#include "pdmtorus/quantum/operator.hpp"
#include "pdmtorus/quantum/spectrum.hpp"
#include "pdmtorus/torus.hpp"
#include "pdmtorus/verify.hpp"

namespace pdmtorus::cli {

inline constexpr const char* version = "1.0.0";

// Documented tolerances behind exit code 1.
inline constexpr double pullback_tol = 1e-4;
inline constexpr double identity_tol = 1e-6;
inline constexpr double potential_tol = 1e-10;
inline constexpr double residual_tol = 1e-10;

using json = nlohmann::ordered_json;
using cplx = std::complex<double>;

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

/// Everything a command produces. The table feeds CSV; the four JSON
/// sections feed JSON and, for CSV, the trailing metadata lines.
struct Output {
  std::string command;
  json params = json::object();
  json results = json::object();
  json residuals = json::object();
  json verdicts = json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const {
    std::ostringstream os;
    os << "# pdmtorus " << version << '\n' << "# command: " << command << '\n';
    for (const auto& [k, v] : params.items()) os << "# " << k << '=' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
      os << '\n';
    }
    for (const auto& [k, v] : residuals.items()) os << "# residual " << k << '=' << v.dump() << '\n';
    for (const auto& [k, v] : verdicts.items()) os << "# verdict " << k << '=' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    return os.str();
  }

  std::string json_text() const {
    json j = json::object();
    j["params"] = params;
    j["results"] = results;
    j["residuals"] = residuals;
    j["verdicts"] = verdicts;
    return j.dump(2) + "\n";
  }
};

/// Temp file in the target directory, then rename over the target.
inline void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidArgument("cannot open output file '" + path + "'");
    f << content;
    f.flush();
    if (!f) throw Error("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot move output into place at '" + path + "'");
  }
}

// Parsed flags, shared by all subcommands. Unset numeric flags stay empty.
struct Flags {
  std::optional<double> a, c, u0, v0, du0, dv0, t_end, dt;
  std::optional<double> lambda, alpha, omega2, c1, c2, x0, dx0, q1, q2;
  std::optional<double> x_min, x_max, domain_lo, domain_hi;
  std::optional<int> n, levels, grid_n;
  std::string case_name, branch = "all", model, formula, suite = "all";
  std::string out, format = "csv";
};

namespace detail {

inline double need(const std::optional<double>& v, const char* flag) {
  if (!v) throw InvalidArgument(std::string("missing required flag ") + flag);
  return *v;
}

inline void forbid(const std::optional<double>& v, const char* flag, const std::string& why) {
  if (v) throw InvalidArgument(std::string(flag) + " " + why);
}

inline const CLI::Validator& finite() {
  static const CLI::Validator v(
      [](std::string& s) -> std::string {
        std::size_t pos = 0;
        double x = 0.0;
        try {
          x = std::stod(s, &pos);
        } catch (const std::exception&) {
          return "not a number: " + s;
        }
        if (pos != s.size()) return "not a number: " + s;
        if (!std::isfinite(x)) return "must be finite: " + s;
        return {};
      },
      "FINITE");
  return v;
}

template <typename T>
CLI::Option* num(CLI::App* app, const std::string& name, std::optional<T>& target, const std::string& desc) {
  return app->add_option(name, target, desc)->check(finite());
}

inline void out_flags(CLI::App* app, Flags& f) {
  app->add_option("--out", f.out, "output file (stdout when omitted)");
  app->add_option("--format", f.format, "output format")->check(CLI::IsMember({"csv", "json"}));
}

inline pdm::CaseParams case_params(const Flags& f) {
  const double lambda = need(f.lambda, "--lambda");
  const double c1 = need(f.c1, "--c1");
  const double c2 = need(f.c2, "--c2");
  if (f.case_name == "quadratic") {
    forbid(f.omega2, "--omega2", "applies to --case ml only");
    pdm::QuadraticParams p{lambda, need(f.alpha, "--alpha"), c1, c2};
    p.validate();
    return p;
  }
  forbid(f.alpha, "--alpha", "applies to --case quadratic only");
  pdm::MLParams p{lambda, std::sqrt(cplx(need(f.omega2, "--omega2"), 0.0)), c1, c2};
  p.validate();
  return p;
}

inline void echo_case(json& params, const pdm::CaseParams& cp) {
  params["case"] = pdm::to_string(pdm::case_of(cp));
  if (const auto* q = std::get_if<pdm::QuadraticParams>(&cp)) {
    params["lambda"] = q->lambda;
    params["alpha"] = q->alpha;
    params["c1"] = q->C1;
    params["c2"] = q->C2;
  } else {
    const auto& m = std::get<pdm::MLParams>(cp);
    params["lambda"] = m.lambda;
    params["omega2"] = m.omega2().real();
    params["c1"] = m.C1;
    params["c2"] = m.C2;
  }
}

inline void emit(const Output& o, const Flags& f, std::ostream& out, bool data_to_stdout) {
  const std::string text = f.format == "json" ? o.json_text() : o.csv();
  if (!f.out.empty())
    write_atomic(f.out, text);
  else if (data_to_stdout)
    out << text;
}

// ---- torus ----------------------------------------------------------------

struct TorusRun {
  torus::TorusParams p;
  torus::FullState s0;
  double t_end, dt;
};

inline TorusRun torus_run(const Flags& f, Output& o) {
  TorusRun r{{need(f.a, "--a"), need(f.c, "--c")},
             {need(f.u0, "--u0"), need(f.v0, "--v0"), need(f.du0, "--du0"), need(f.dv0, "--dv0")},
             need(f.t_end, "--t-end"),
             need(f.dt, "--dt")};
  r.p.validate();
  o.params["a"] = r.p.a;
  o.params["c"] = r.p.c;
  o.params["u0"] = r.s0.u;
  o.params["v0"] = r.s0.v;
  o.params["du0"] = r.s0.du;
  o.params["dv0"] = r.s0.dv;
  o.params["t_end"] = r.t_end;
  o.params["dt"] = r.dt;
  return r;
}

inline int torus_simulate(const Flags& f, std::ostream& out) {
  Output o;
  o.command = "torus simulate";
  const auto r = torus_run(f, o);
  const auto traj = torus::integrate_full(r.s0, r.p, r.t_end, r.dt);
  o.columns = {"t", "u", "v", "du", "dv", "q1", "q2_energy", "q2_paper", "lagrangian"};
  const auto& q1 = traj.diagnostic("q1");
  const auto& q2e = traj.diagnostic("q2_energy");
  const auto& q2p = traj.diagnostic("q2_paper");
  const auto& lag = traj.diagnostic("lagrangian");
  std::vector<std::vector<double>> cols(o.columns.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto s = traj.state(i);
    const double row[] = {traj.time(i), s[0], s[1], s[2], s[3], q1[i], q2e[i], q2p[i], lag[i]};
    std::vector<std::string> cells;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      cols[k].push_back(row[k]);
      cells.push_back(fmt17(row[k]));
    }
    o.rows.push_back(std::move(cells));
  }
  for (std::size_t k = 0; k < cols.size(); ++k) o.results[o.columns[k]] = cols[k];
  o.residuals["q1_drift"] = numerics::relative_drift(q1);
  o.residuals["lagrangian_drift"] = numerics::relative_drift(lag);
  emit(o, f, out, true);
  return 0;
}

inline bool is_reference(const TorusRun& r) {
  return r.p.a == 1.0 && r.p.c == 2.0 && r.s0.u == 0.0 && r.s0.v == 0.5 && r.s0.du == 0.3 && r.s0.dv == 0.1;
}

inline int torus_audit(const Flags& f, std::ostream& out) {
  Output o;
  o.command = "torus audit-sign";
  const auto r = torus_run(f, o);
  const auto audit = torus::sign_audit(torus::integrate_full(r.s0, r.p, r.t_end, r.dt));
  const bool reference = is_reference(r);
  o.results["plus_variation"] = audit.plus_drift;
  o.results["minus_variation"] = audit.minus_drift;
  o.verdicts["conserved"] = torus::to_string(audit.conserved);
  o.verdicts["reference_configuration"] = reference;
  o.verdicts["note"] = audit.note;
  o.columns = {"verdict", "plus_variation", "minus_variation"};
  o.rows.push_back({torus::to_string(audit.conserved), fmt17(audit.plus_drift), fmt17(audit.minus_drift)});
  out << "verdict: " << torus::to_string(audit.conserved) << '\n'
      << "plus_variation: " << fmt17(audit.plus_drift) << '\n'
      << "minus_variation: " << fmt17(audit.minus_drift) << '\n'
      << "note: " << audit.note << '\n';
  emit(o, f, out, false);
  return reference && audit.conserved == torus::SignVerdict::inconclusive ? 1 : 0;
}

// ---- pdm ------------------------------------------------------------------

inline int pdm_map(const Flags& f, std::ostream& out) {
  Output o;
  o.command = "pdm map";
  const auto cp = case_params(f);
  echo_case(o.params, cp);
  const double x0 = need(f.x0, "--x0"), dx0 = need(f.dx0, "--dx0");
  const double t_end = need(f.t_end, "--t-end"), dt = need(f.dt, "--dt");
  o.params["x0"] = x0;
  o.params["dx0"] = dx0;
  o.params["t_end"] = t_end;
  o.params["dt"] = dt;

  const auto sys = pdm::case_system(cp);
  const auto traj = pdm::integrate_lienard(sys, x0, dx0, t_end, dt);
  const auto tau = pdm::tau_of_t(traj, sys.time_scale);
  const auto q = pdm::q_along(traj, sys);
  const auto& energy = traj.diagnostic("energy");
  o.columns = {"t", "x", "dx", "tau", "q", "energy"};
  std::vector<std::vector<double>> cols(o.columns.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto s = traj.state(i);
    const double row[] = {traj.time(i), s[0], s[1], tau[i], q[i], energy[i]};
    std::vector<std::string> cells;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      cols[k].push_back(row[k]);
      cells.push_back(fmt17(row[k]));
    }
    o.rows.push_back(std::move(cells));
  }
  for (std::size_t k = 0; k < cols.size(); ++k) o.results[o.columns[k]] = cols[k];

  double res = std::nan("");
  try {
    res = pdm::pullback_residual(traj, sys, pdm::potential_in_q(sys));
  } catch (const Error& e) {
    o.verdicts["pullback_error"] = e.what();
  }
  o.residuals["pullback"] = res;
  o.residuals["energy_drift"] = numerics::relative_drift(energy);
  const bool ok = std::isfinite(res) && res <= pullback_tol;
  o.verdicts["pullback_within_tolerance"] = ok;
  emit(o, f, out, true);
  if (!f.out.empty()) out << "pullback_residual: " << fmt17(res) << '\n';
  return ok ? 0 : 1;
}

inline int pdm_match(const Flags& f, std::ostream& out) {
  Output o;
  o.command = "pdm match";
  const auto cp = case_params(f);
  echo_case(o.params, cp);
  const torus::TorusParams tp{need(f.a, "--a"), need(f.c, "--c")};
  tp.validate();
  const double q1 = need(f.q1, "--q1");
  const double lo = need(f.x_min, "--x-min"), hi = need(f.x_max, "--x-max");
  if (!f.n) throw InvalidArgument("missing required flag --n");
  const int n = *f.n;
  if (n < 1) throw InvalidArgument("--n must be positive");
  if (n > 1 && !(hi > lo)) throw InvalidArgument("--x-max must exceed --x-min");
  o.params["a"] = tp.a;
  o.params["c"] = tp.c;
  o.params["q1"] = q1;
  o.params["x_min"] = lo;
  o.params["x_max"] = hi;
  o.params["n"] = n;
  o.params["branch"] = f.branch;

  std::optional<pdm::BranchId> only;
  if (f.branch != "all") only = pdm::parse_branch(pdm::case_of(cp), f.branch);
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  const auto rep = pdm::compare_match(cp, xs, tp, q1);

  o.columns = {"x",    "branch", "q_re", "q_im", "f_re",     "f_im",     "m_re",
               "m_im", "identity_residual", "oracle_q", "oracle_f", "potential_residual"};
  json rows = json::array();
  for (const auto& r : rep.rows) {
    if (only && !(r.branch == *only)) continue;
    o.rows.push_back({fmt17(r.x), r.branch.label(), fmt17(r.q.real()), fmt17(r.q.imag()), fmt17(r.f.real()),
                      fmt17(r.f.imag()), fmt17(r.m.real()), fmt17(r.m.imag()), fmt17(r.identity_residual),
                      fmt17(r.oracle_q), fmt17(r.oracle_f), fmt17(r.potential_residual)});
    rows.push_back({{"x", r.x},
                    {"branch", r.branch.label()},
                    {"q", cjson(r.q)},
                    {"f", cjson(r.f)},
                    {"m", cjson(r.m)},
                    {"identity_residual", r.identity_residual},
                    {"oracle_q", r.oracle_q},
                    {"oracle_f", r.oracle_f},
                    {"potential_residual", r.potential_residual},
                    {"status", pdm::to_string(r.status)}});
  }
  o.results["rows"] = rows;
  json branches = json::array();
  for (const auto& b : rep.branches) {
    if (only && !(b.branch == *only)) continue;
    branches.push_back({{"branch", b.branch.label()},
                        {"classification", b.classification},
                        {"max_q_distance", b.max_q_distance},
                        {"max_identity_residual", b.max_identity_residual},
                        {"physical_rows", b.physical_rows},
                        {"complex_rows", b.complex_rows},
                        {"non_physical_rows", b.non_physical_rows},
                        {"singular_rows", b.singular_rows}});
    o.verdicts["branch " + b.branch.label()] = b.classification;
  }
  o.results["branches"] = branches;
  o.residuals["oracle_identity"] = rep.oracle_identity_residual;
  o.residuals["oracle_potential"] = rep.oracle_potential_residual;
  o.verdicts["best_branch"] = rep.best_branch;
  if (!rep.oracle_error.empty()) o.verdicts["oracle_error"] = rep.oracle_error;
  const bool ok = rep.oracle_error.empty() && rep.oracle_identity_residual <= identity_tol &&
                  rep.oracle_potential_residual <= potential_tol;
  o.verdicts["oracle_within_tolerance"] = ok;
  emit(o, f, out, true);
  return ok ? 0 : 1;
}

// ---- quantum --------------------------------------------------------------

inline int quantum_spectrum(const Flags& f, std::ostream& out) {
  using std::numbers::pi;
  Output o;
  o.command = "quantum spectrum";
  const int levels = f.levels.value_or(6);
  if (levels < 1) throw InvalidArgument("--levels must be positive");
  const std::string formula = f.formula.empty() ? "both" : f.formula;
  o.params["model"] = f.model;
  o.params["levels"] = levels;

  quantum::Operator1D op;
  std::optional<numerics::Grid> grid;
  std::vector<std::pair<std::string, std::vector<double>>> refs;

  if (f.model == "torus") {
    const torus::TorusParams tp{need(f.a, "--a"), need(f.c, "--c")};
    const double q1 = need(f.q1, "--q1"), q2 = need(f.q2, "--q2");
    op = quantum::torus_hamiltonian(tp, q1, q2);
    const double lo = f.domain_lo.value_or(-pi), hi = f.domain_hi.value_or(lo + 2.0 * pi);
    if (std::abs((hi - lo) - 2.0 * pi) > 1e-9) throw InvalidArgument("torus domain must span one period 2 pi");
    const int n = f.grid_n.value_or(2000);
    if (n < 3) throw InvalidArgument("--grid-n must be at least 3");
    o.params.update({{"a", tp.a}, {"c", tp.c}, {"q1", q1}, {"q2", q2}, {"grid_n", n}, {"domain_lo", lo}, {"domain_hi", hi}});
    op.lo = lo;
    op.hi = hi;
    grid = numerics::Grid::periodic(lo, 2.0 * pi, n);
    o.verdicts["analytic"] = "none: no closed-form spectrum";
  } else if (f.model == "quadratic") {
    forbid(f.omega2, "--omega2", "applies to --model ml only");
    const pdm::QuadraticParams p{need(f.lambda, "--lambda"), need(f.alpha, "--alpha"), need(f.c1, "--c1"), need(f.c2, "--c2")};
    p.validate();
    const double half = std::max(12.0, (std::sqrt(2.0 * levels + 1.0) + 8.0) / std::sqrt(p.C1 * p.alpha));
    const double lo = f.domain_lo.value_or(-half), hi = f.domain_hi.value_or(half);
    if (!(hi > lo)) throw InvalidArgument("--domain-hi must exceed --domain-lo");
    const int n = f.grid_n.value_or(8000);
    if (n < 2) throw InvalidArgument("--grid-n must be at least 2");
    o.params.update({{"lambda", p.lambda}, {"alpha", p.alpha}, {"c1", p.C1}, {"c2", p.C2}, {"grid_n", n},
                     {"domain_lo", lo}, {"domain_hi", hi}, {"formula", formula}, {"coordinate", "zeta"}});
    op = quantum::quadratic_zeta_hamiltonian(p, lo, hi);
    grid = numerics::Grid::uniform(lo, hi, static_cast<std::size_t>(n) + 1);
    for (auto [name, which] : {std::pair{"analytic_paper", quantum::EnergyFormula::paper},
                               std::pair{"analytic_audited", quantum::EnergyFormula::audited}}) {
      if (formula != "both" && formula != quantum::to_string(which)) continue;
      std::vector<double> e;
      for (int k = 0; k < levels; ++k) e.push_back(quantum::quadratic_energy(k, p, which));
      refs.emplace_back(name, std::move(e));
    }
  } else {
    forbid(f.alpha, "--alpha", "applies to --model quadratic only");
    const pdm::MLParams p{need(f.lambda, "--lambda"), std::sqrt(cplx(need(f.omega2, "--omega2"), 0.0)), need(f.c1, "--c1"),
                          need(f.c2, "--c2")};
    p.validate();
    const double lo = f.domain_lo.value_or(-30.0), hi = f.domain_hi.value_or(30.0);
    if (!(hi > lo)) throw InvalidArgument("--domain-hi must exceed --domain-lo");
    const int n = f.grid_n.value_or(8000);
    if (n < 2) throw InvalidArgument("--grid-n must be at least 2");
    op = quantum::ml_hamiltonian(p, lo, hi);
    o.params.update({{"lambda", p.lambda}, {"omega2", p.omega2().real()}, {"c1", p.C1}, {"c2", p.C2}, {"grid_n", n},
                     {"domain_lo", op.lo}, {"domain_hi", op.hi}});
    grid = numerics::Grid::uniform(op.lo, op.hi, static_cast<std::size_t>(n) + 1);
    const auto cons = quantum::ml_omega_constraint(p.lambda, p.C1);
    if (std::abs(p.omega2().real() - cons.omega2) <= 1e-12 * std::abs(cons.omega2)) {
      std::vector<double> e;
      for (int k = 0; k < levels; ++k) e.push_back(quantum::ml_energy(k, p));
      refs.emplace_back("analytic_paper", std::move(e));
      o.verdicts["analytic"] =
          "closed-form levels satisfy H psi = E psi but the eigenfunctions are not square-integrable; deltas are "
          "informational";
    } else {
      o.verdicts["analytic"] = "none: omega^2 violates the constraint omega^2 = -lambda^2/(4 C1^2)";
    }
  }

  auto rep = quantum::solve_spectrum(op, *grid, static_cast<std::size_t>(levels));
  for (auto& [name, e] : refs) rep.add_reference(name, e);

  o.results["energies"] = rep.energies();
  o.results["raw_energies"] = rep.raw_energies;
  o.results["coarse_energies"] = rep.coarse_energies;
  o.results["references"] = rep.references;
  o.results["deltas"] = rep.deltas;
  o.results["grid"] = {{"nodes", rep.nodes.size()},
                       {"spacing", rep.spacing},
                       {"coarse_spacing", rep.coarse_spacing},
                       {"boundary", rep.boundary},
                       {"extrapolated", rep.extrapolated}};
  std::vector<double> pair_res;
  for (const auto& pr : rep.pairs) pair_res.push_back(pr.residual);
  o.residuals["eigenpair"] = pair_res;
  o.residuals["asymmetry"] = quantum::hermiticity_check(op, *grid);

  o.columns = {"level", "energy", "raw_energy"};
  for (const auto& [name, e] : refs) o.columns.push_back(name);
  for (const auto& [name, e] : refs) o.columns.push_back("delta_" + name);
  o.columns.push_back("residual");
  for (int k = 0; k < levels; ++k) {
    std::vector<std::string> row{std::to_string(k), fmt17(rep.pairs[k].energy), fmt17(rep.raw_energies[k])};
    for (const auto& [name, e] : refs) row.push_back(fmt17(e[k]));
    for (const auto& [name, e] : refs) row.push_back(fmt17(rep.deltas[name][k]));
    row.push_back(fmt17(rep.pairs[k].residual));
    o.rows.push_back(std::move(row));
  }
  emit(o, f, out, true);
  return 0;
}

inline int quantum_residual(const Flags& f, std::ostream& out) {
  Output o;
  o.command = "quantum residual";
  if (!f.n) throw InvalidArgument("missing required flag --n (or --nu)");
  const int n = *f.n;
  if (n < 0) throw InvalidArgument("level index must be non-negative");
  o.params["model"] = f.model;
  o.params["n"] = n;
  double res = 0.0, energy = 0.0;
  if (f.model == "quadratic") {
    forbid(f.omega2, "--omega2", "applies to --model ml only");
    const pdm::QuadraticParams p{need(f.lambda, "--lambda"), need(f.alpha, "--alpha"), need(f.c1, "--c1"), need(f.c2, "--c2")};
    p.validate();
    const std::string formula = f.formula.empty() ? "audited" : f.formula;
    if (formula == "both") throw InvalidArgument("--formula must be paper or audited here");
    const auto which = formula == "paper" ? quantum::EnergyFormula::paper : quantum::EnergyFormula::audited;
    o.params.update({{"lambda", p.lambda}, {"alpha", p.alpha}, {"c1", p.C1}, {"c2", p.C2}, {"formula", formula}});
    const auto op = quantum::quadratic_zeta_hamiltonian(p);
    const double half = (std::sqrt(2.0 * n + 1.0) + 6.0) / std::sqrt(p.C1 * p.alpha);
    const auto xs = numerics::Grid::uniform(-half, half, 1001);
    const double peak = quantum::hermite_function_peak(n);
    energy = quantum::quadratic_energy(n, p, which);
    res = quantum::residual(
        op, [&](double zeta) { return quantum::quadratic_wavefunction(n, zeta - 0.5 / p.lambda, p, peak); }, energy,
        xs.nodes());
  } else {
    forbid(f.alpha, "--alpha", "applies to --model ml only");
    const double lambda = need(f.lambda, "--lambda"), c1 = need(f.c1, "--c1");
    const auto cons = quantum::ml_omega_constraint(lambda, c1);
    const pdm::MLParams p{lambda, std::sqrt(cplx(f.omega2.value_or(cons.omega2), 0.0)), c1, need(f.c2, "--c2")};
    p.validate();
    o.params.update({{"lambda", p.lambda}, {"omega2", p.omega2().real()}, {"c1", p.C1}, {"c2", p.C2}});
    const auto op = quantum::ml_hamiltonian(p);
    const double half = lambda > 0 ? 5.0 : std::min(5.0, 0.99 / std::sqrt(-lambda));
    const auto xs = numerics::Grid::uniform(-half, half, 1001);
    energy = quantum::ml_energy(n, p);
    res = quantum::residual(op, [&](double x) { return quantum::ml_wavefunction(n, x, lambda); }, energy, xs.nodes());
  }
  const bool ok = res <= residual_tol;
  o.results["energy"] = energy;
  o.residuals["residual"] = res;
  o.verdicts["within_tolerance"] = ok;
  o.columns = {"n", "energy", "residual"};
  o.rows.push_back({std::to_string(n), fmt17(energy), fmt17(res)});
  out << "residual: " << fmt17(res) << (ok ? " (ok)" : " (above 1e-10)") << '\n';
  emit(o, f, out, false);
  return ok ? 0 : 1;
}

// ---- verify ---------------------------------------------------------------

inline int run_verify(const Flags& f, std::ostream& out) {
  Output o;
  o.command = "verify";
  o.params["suite"] = f.suite;
  // Concurrent checks only when there is more than one core to share.
  const auto results = verify::run_suite(verify::parse_suite(f.suite), std::thread::hardware_concurrency() > 1);
  o.columns = {"id", "name", "suite", "passed", "seconds", "detail"};
  json checks = json::array();
  for (const auto& r : results) {
    char line[160];
    std::snprintf(line, sizeof line, "%s %2d %-30s %8.3fs  ", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds);
    out << line << r.detail << '\n';
    std::string detail = r.detail;
    for (char& ch : detail)
      if (ch == ',') ch = ';';
    o.rows.push_back({std::to_string(r.id), r.name, r.suite, r.passed ? "true" : "false", fmt17(r.seconds), detail});
    checks.push_back({{"id", r.id}, {"name", r.name}, {"suite", r.suite}, {"seconds", r.seconds}, {"budget", r.budget}, {"detail", r.detail}});
    o.verdicts[std::to_string(r.id) + " " + r.name] = r.passed ? "PASS" : "FAIL";
  }
  o.results["checks"] = checks;
  const bool ok = verify::all_passed(results);
  o.verdicts["all_passed"] = ok;
  out << (ok ? "ALL PASS" : "SOME CHECKS FAILED") << '\n';
  emit(o, f, out, false);
  return ok ? 0 : 1;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using detail::num;
  Flags f;
  CLI::App app{"pdmtorus: torus dynamics, PDM point transformations and quantization checks", "pdmtorus"};
  app.require_subcommand(1);

  auto* torus_cmd = app.add_subcommand("torus", "geodesic motion on a ring torus")->require_subcommand(1);
  for (auto* sub : {torus_cmd->add_subcommand("simulate", "integrate the full equations of motion"),
                    torus_cmd->add_subcommand("audit-sign", "decide which q2 sign convention is conserved")}) {
    num(sub, "--a", f.a, "tube radius");
    num(sub, "--c", f.c, "distance from axis to tube centre");
    num(sub, "--u0", f.u0, "initial u");
    num(sub, "--v0", f.v0, "initial v");
    num(sub, "--du0", f.du0, "initial du/dt");
    num(sub, "--dv0", f.dv0, "initial dv/dt");
    num(sub, "--t-end", f.t_end, "final time");
    num(sub, "--dt", f.dt, "RK4 step");
    detail::out_flags(sub, f);
  }

  auto* pdm_cmd = app.add_subcommand("pdm", "position-dependent-mass oscillators")->require_subcommand(1);
  auto* map_cmd = pdm_cmd->add_subcommand("map", "integrate a Lienard oscillator and pull it back to q, tau");
  auto* match_cmd = pdm_cmd->add_subcommand("match", "compare closed-form and numeric torus matchings");
  for (auto* sub : {map_cmd, match_cmd}) {
    sub->add_option("--case", f.case_name, "oscillator")->required()->check(CLI::IsMember({"quadratic", "ml"}));
    num(sub, "--lambda", f.lambda, "nonlinearity lambda");
    num(sub, "--alpha", f.alpha, "quadratic case alpha");
    num(sub, "--omega2", f.omega2, "ML case omega^2 (real)");
    num(sub, "--c1", f.c1, "C1");
    num(sub, "--c2", f.c2, "C2");
    detail::out_flags(sub, f);
  }
  num(map_cmd, "--x0", f.x0, "initial x");
  num(map_cmd, "--dx0", f.dx0, "initial dx/dt");
  num(map_cmd, "--t-end", f.t_end, "final time");
  num(map_cmd, "--dt", f.dt, "RK4 step");
  match_cmd->add_option("--branch", f.branch, "closed-form branch (1-4, ++, +-, -+, -- or all)");
  num(match_cmd, "--x-min", f.x_min, "first x");
  num(match_cmd, "--x-max", f.x_max, "last x");
  match_cmd->add_option("--n", f.n, "number of x points");
  num(match_cmd, "--a", f.a, "torus tube radius");
  num(match_cmd, "--c", f.c, "torus centre distance");
  num(match_cmd, "--q1", f.q1, "conserved momentum q1");

  auto* quantum_cmd = app.add_subcommand("quantum", "quantum spectra and eigenfunction residuals")->require_subcommand(1);
  auto* spec_cmd = quantum_cmd->add_subcommand("spectrum", "finite-difference spectrum with analytic comparison");
  auto* res_cmd = quantum_cmd->add_subcommand("residual", "residual of a closed-form eigenpair");
  spec_cmd->add_option("--model", f.model, "model")->required()->check(CLI::IsMember({"torus", "quadratic", "ml"}));
  res_cmd->add_option("--model", f.model, "model")->required()->check(CLI::IsMember({"quadratic", "ml"}));
  spec_cmd->add_option("--levels", f.levels, "number of levels (default 6)");
  spec_cmd->add_option("--grid-n", f.grid_n, "grid intervals (nodes for torus)");
  num(spec_cmd, "--domain-lo", f.domain_lo, "left end of the domain");
  num(spec_cmd, "--domain-hi", f.domain_hi, "right end of the domain");
  num(spec_cmd, "--a", f.a, "torus tube radius");
  num(spec_cmd, "--c", f.c, "torus centre distance");
  num(spec_cmd, "--q1", f.q1, "q1");
  num(spec_cmd, "--q2", f.q2, "q2");
  res_cmd->add_option("--n,--nu", f.n, "level index");
  for (auto* sub : {spec_cmd, res_cmd}) {
    num(sub, "--lambda", f.lambda, "lambda");
    num(sub, "--alpha", f.alpha, "quadratic alpha");
    num(sub, "--omega2", f.omega2, "ML omega^2");
    num(sub, "--c1", f.c1, "C1");
    num(sub, "--c2", f.c2, "C2");
    sub->add_option("--formula", f.formula, "analytic energy formula")->check(CLI::IsMember({"paper", "audited", "both"}));
    detail::out_flags(sub, f);
  }

  auto* verify_cmd = app.add_subcommand("verify", "run the acceptance suite");
  verify_cmd->add_option("--suite", f.suite, "suite")->check(CLI::IsMember({"all", "classical", "pdm", "quantum", "specfun"}));
  detail::out_flags(verify_cmd, f);

  std::vector<const char*> argv{"pdmtorus"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (torus_cmd->got_subcommand("simulate")) return detail::torus_simulate(f, out);
    if (torus_cmd->got_subcommand("audit-sign")) return detail::torus_audit(f, out);
    if (map_cmd->parsed()) return detail::pdm_map(f, out);
    if (match_cmd->parsed()) return detail::pdm_match(f, out);
    if (spec_cmd->parsed()) return detail::quantum_spectrum(f, out);
    if (res_cmd->parsed()) return detail::quantum_residual(f, out);
    if (verify_cmd->parsed()) return detail::run_verify(f, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  err << app.help();
  return 2;
}

}  // namespace pdmtorus::cli

#endif  // PDMTORUS_TOOLS_CLI_HPP
