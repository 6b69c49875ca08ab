#include "pdmtorus/pdm/matching.hpp"
#include "pdmtorus/pdm/system.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace pdmtorus::pdm {
namespace {

using std::numbers::pi;

const QuadraticParams quad_unit{1.0, 1.0, 1.0, 0.0};
const QuadraticParams quad_ref{0.1, 1.0, 1.0, 0.0};
const MLParams ml_ref{1.0, 1.0, 1.0, 0.0};
const TorusParams torus_ref{1.0, 2.0};

double rel(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

// Right-hand sides of the two oscillator equations written out directly.
double quadratic_rhs(double x, double dx, const QuadraticParams& p) {
  return 2.0 * p.lambda * dx * dx / (1.0 + p.lambda * x) - p.alpha * p.alpha * x * (1.0 + p.lambda * x);
}
double ml_rhs(double x, double dx, double lambda, double w2) {
  return lambda * x * dx * dx / (1.0 + lambda * x * x) - w2 * x / (1.0 + lambda * x * x);
}

TEST(MassFromFgTest, Examples) {
  const double l = 0.3;
  auto m1 = mass_from_fg([l](double x) { return std::pow(1 + l * x, -4); }, [](double) { return 1.0; }, 1.0, 0.0);
  auto m2 = mass_from_fg([](double x) { return 4.0 * x * x + 1.0; }, [](double x) { return std::sqrt(4.0 * x * x + 1.0); },
                         2.5, 0.0);
  auto m3 = mass_from_fg([l](double x) { return 1.0 / (1 + l * x * x); }, [](double) { return 1.0; }, 1.0, 0.0);
  for (double x : {-0.5, 0.0, 0.7, 2.0}) {
    EXPECT_NEAR(m1(x), std::pow(1 + l * x, -4), 1e-14);
    EXPECT_NEAR(m2(x), 2.5, 1e-14);
    EXPECT_NEAR(m3(x), 1.0 / (1 + l * x * x), 1e-14);
  }
}

TEST(MassFromFgTest, Errors) {
  auto bad_f = mass_from_fg([](double) { return 1.0; }, [](double x) { return x - 1.0; }, 1.0, 0.0);
  EXPECT_THROW(bad_f(1.0), DomainError);
  EXPECT_THROW(mass_from_fg([](double) { return -1.0; }, [](double) { return 1.0; }, 1.0, 0.0), DomainError);
}

TEST(LienardTest, QuadraticExamples) {
  const auto sys = quadratic_system(quad_unit);
  EXPECT_EQ(lienard_accel(0.0, 0.0, sys), 0.0);
  EXPECT_NEAR(lienard_accel(1.0, 0.0, sys), -2.0, 1e-14);
  EXPECT_NEAR(lienard_accel(0.5, 1.0, sys), 7.0 / 12.0, 1e-14);
  EXPECT_DOUBLE_EQ(sys.m(0.0), 1.0);
  EXPECT_DOUBLE_EQ(sys.V(0.0), -0.5);
  EXPECT_THROW(lienard_accel(-1.0, 0.0, sys), DomainError);
}

TEST(LienardTest, MlExamples) {
  const auto sys = ml_system(ml_ref);
  EXPECT_NEAR(lienard_accel(1.0, 1.0, sys), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(sys.m(0.0), 1.0);
  EXPECT_DOUBLE_EQ(sys.V(0.0), -0.5);
  EXPECT_NEAR(sys.V(1e8), 0.0, 1e-15);
}

TEST(LienardTest, MlRejectsGenuinelyComplexOmega) {
  EXPECT_THROW(ml_system(MLParams{1.0, cplx(1.0, 1.0), 1.0, 0.0}), InvalidArgument);
  EXPECT_NO_THROW(ml_system(MLParams{1.0, cplx(0.0, 0.5), 1.0, 0.0}));
}

TEST(LienardTest, ReproducesOscillatorEquationsOnGrid) {
  auto gen = oracle::rng(31);
  std::uniform_real_distribution<double> lam(-0.5, 1.5), alpha(0.2, 3.0), c1(0.2, 4.0), vel(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    QuadraticParams qp{lam(gen), alpha(gen), c1(gen), vel(gen)};
    if (std::abs(qp.lambda) < 1e-3) qp.lambda = 0.3;
    const auto qs = quadratic_system(qp);
    const double w2 = alpha(gen);
    MLParams mp{lam(gen), std::sqrt(w2), c1(gen), 0.0};
    if (std::abs(mp.lambda) < 1e-3) mp.lambda = 0.7;
    const auto ms = ml_system(mp);
    for (int i = 0; i <= 100; ++i) {
      const double x = -0.5 + 0.01 * i;
      const double dx = vel(gen);
      EXPECT_LE(rel(lienard_accel(x, dx, qs), quadratic_rhs(x, dx, qp)), 1e-12);
      if (ms.domain.contains(x)) {
        EXPECT_LE(rel(lienard_accel(x, dx, ms), ml_rhs(x, dx, mp.lambda, w2)), 1e-12);
      }
    }
  }
}

TEST(PdmSystemTest, GaugeConsistency) {
  EXPECT_LE(gauge_consistency(quadratic_system(quad_ref), -0.5, 0.5), 1e-10);
  EXPECT_LE(gauge_consistency(ml_system(ml_ref), -3.0, 3.0), 1e-10);

  PdmSystem custom;
  custom.time_scale = [](double x) { return 1.0 + 0.2 * x * x; };
  custom.coordinate_scale = [](double x) { return std::exp(x); };
  custom.mass = mass_from_fg(custom.coordinate_scale, custom.time_scale, 2.0, 0.0);
  EXPECT_LE(gauge_consistency(custom, -2.0, 2.0), 1e-10);
}

TEST(PdmSystemTest, NumericDerivativesFallback) {
  auto sys = quadratic_system(quad_ref);
  auto bare = sys;
  bare.mass_derivative = nullptr;
  bare.potential_derivative = nullptr;
  for (double x : {-0.4, 0.1, 0.9}) EXPECT_NEAR(lienard_accel(x, 0.3, bare), lienard_accel(x, 0.3, sys), 1e-8);
}

TEST(CaseEnergyTest, Examples) {
  const auto sys = quadratic_system(quad_unit);
  EXPECT_DOUBLE_EQ(case_energy(0.4, 0.0, sys), sys.V(0.4));
  EXPECT_NEAR(case_energy(0.0, 1.0, sys), 0.0, 1e-15);
}

TEST(CaseEnergyTest, ConservedAlongTrajectories) {
  auto tq = integrate_lienard(quadratic_system(quad_ref), 0.2, 0.0, 50.0, 1e-4);
  auto tm = integrate_lienard(ml_system(ml_ref), 0.3, 0.0, 50.0, 1e-4);
  EXPECT_LE(numerics::relative_drift(tq.diagnostic("energy")), 1e-8);
  EXPECT_LE(numerics::relative_drift(tm.diagnostic("energy")), 1e-8);
}

TEST(QOfXTest, Examples) {
  auto qs = quadratic_system(quad_unit);
  auto ms = ml_system(ml_ref);
  EXPECT_NEAR(q_of_x(qs, 0.0, 1.0), 0.5, 1e-10);
  EXPECT_EQ(q_of_x(qs, 0.7, 0.7), 0.0);
  EXPECT_NEAR(q_of_x(ms, 0.0, 1.0), 0.881373587, 1e-9);
  EXPECT_THROW(q_of_x(qs, 0.0, -2.0), DomainError);
}

TEST(QOfXTest, MatchesClosedFormAndIncreasesProperty) {
  auto gen = oracle::rng(32);
  std::uniform_real_distribution<double> pick(-0.8, 3.0);
  for (const PdmSystem& sys : {quadratic_system(quad_unit), ml_system(MLParams{-0.1, 1.0, 2.0, 0.0})}) {
    for (int trial = 0; trial < 50; ++trial) {
      double x0 = pick(gen), x1 = pick(gen);
      if (!sys.domain.contains(x0) || !sys.domain.contains(x1)) continue;
      if (x0 > x1) std::swap(x0, x1);
      const double qv = q_of_x(sys, x0, x1);
      EXPECT_NEAR(qv, sys.coordinate(x1) - sys.coordinate(x0), 1e-10);
      if (x1 > x0) {
        EXPECT_GT(qv, 0.0);
      }
    }
  }
}

TEST(TauTest, ConstantScales) {
  auto traj = integrate_lienard(ml_system(ml_ref), 0.3, 0.0, 1.0, 0.1);
  const auto tau1 = tau_of_t(traj, [](double) { return 1.0; });
  const auto tau2 = tau_of_t(traj, [](double) { return 2.0; });
  for (std::size_t i = 0; i < traj.size(); ++i) {
    EXPECT_DOUBLE_EQ(tau1[i], traj.time(i));
    EXPECT_DOUBLE_EQ(tau2[i], 2.0 * traj.time(i));
  }
  const auto sys = quadratic_system(quad_ref);
  auto tq = integrate_lienard(sys, 0.2, 0.0, 20.0, 1e-3);
  const auto tau = tau_of_t(tq, sys.time_scale);
  for (std::size_t i = 1; i < tau.size(); ++i) EXPECT_GT(tau[i], tau[i - 1]);
}

TEST(PotentialInQTest, InvertsCoordinate) {
  for (const PdmSystem& sys : {quadratic_system(quad_ref), ml_system(ml_ref)}) {
    const auto vq = potential_in_q(sys);
    for (double x : {-0.9, -0.2, 0.0, 0.4, 3.0}) EXPECT_NEAR(vq(sys.coordinate(x)), sys.V(x), 1e-13);
  }
  EXPECT_THROW(potential_in_q(quadratic_system(quad_unit))(1.5), RangeError);
}

TEST(PullbackTest, ReferenceRunsSatisfyTransformedEquation) {
  const auto qs = quadratic_system(quad_ref);
  const auto ms = ml_system(ml_ref);
  auto tq = integrate_lienard(qs, 0.2, 0.0, 20.0, 1e-3);
  auto tm = integrate_lienard(ms, 0.3, 0.0, 20.0, 1e-3);
  // Independent V(q): invert the closed-form coordinates analytically.
  auto vq_quad = [&](double q) { return qs.V(q / (1.0 - 0.1 * q)); };
  auto vq_ml = [&](double q) { return ms.V(std::sinh(q)); };
  EXPECT_LE(pullback_residual(tq, qs, vq_quad), 1e-4);
  EXPECT_LE(pullback_residual(tm, ms, vq_ml), 1e-4);
  EXPECT_LE(pullback_residual(tq, qs, potential_in_q(qs)), 1e-4);

  // Same check with q built by quadrature instead of the closed form.
  auto qs_num = qs;
  qs_num.coordinate = nullptr;
  EXPECT_LE(pullback_residual(tq, qs_num, vq_quad), 1e-4);
}

TEST(PullbackTest, EquilibriumIsExact) {
  // C2 cancels the potential offset so rounding in V stays small.
  const auto qs = quadratic_system(QuadraticParams{1.0, 1.0, 1.0, 0.5});
  auto traj = integrate_lienard(qs, 0.0, 0.0, 2.0, 1e-2);
  EXPECT_LE(pullback_residual(traj, qs, potential_in_q(qs)), 1e-10);
}

TEST(PullbackTest, NonMonotoneTauThrows) {
  auto sys = ml_system(ml_ref);
  sys.time_scale = [](double x) { return x; };
  auto traj = integrate_lienard(ml_system(ml_ref), 0.3, 0.0, 5.0, 1e-2);
  EXPECT_THROW(pullback_residual(traj, sys, potential_in_q(ml_system(ml_ref))), DomainError);
}

TEST(TorusTargetTest, Examples) {
  EXPECT_DOUBLE_EQ(torus_target_potential(0.0, 1.0, 2.0, 3.0), 0.5);
  EXPECT_EQ(torus_target_potential(1.1, 1.0, 2.0, 0.0), 0.0);
  EXPECT_NEAR(torus_target_potential(pi, 1.0, 2.0, 3.0), 4.5, 1e-13);
}

TEST(MatchPaperTest, QuadraticSingularities) {
  const QuadraticParams p{0.5, 1.0, 1.0, 0.0};
  EXPECT_THROW(match_paper(p, -1.0, BranchId::quadratic(1), torus_ref, 1.0), SingularityError);
  EXPECT_THROW(match_paper(p, -2.0, BranchId::quadratic(3), torus_ref, 1.0), SingularityError);
  EXPECT_THROW(BranchId::quadratic(5), InvalidArgument);
}

TEST(MatchPaperTest, MlInnerArgumentAtOrigin) {
  const MLParams p{1.0, 1.5, 1.0, 0.0};
  const double q1 = 0.7;
  const auto r = match_paper(p, 0.0, BranchId::ml(1, 1), torus_ref, q1);
  // cos q recovers -c/a + q1/(a^2 omega).
  EXPECT_LE(std::abs(std::cos(r.q) - cplx(-2.0 + q1 / 1.5)), 1e-12);
  const auto rm = match_paper(p, 0.0, BranchId::ml(-1, 1), torus_ref, q1);
  EXPECT_LE(std::abs(rm.q + r.q), 1e-15);
}

TEST(MatchPaperTest, QuadraticMassAtOrigin) {
  const double l = 0.1, al = 1.0, C1 = 1.0, a = 1.0, c = 2.0, q1 = 1.0;
  const cplx i(0, 1);
  const cplx F = -1.0 + 2.0 * c * std::sqrt(cplx(-a * a * C1 * al * al / (q1 * q1 * l * l)));
  const cplx inner = -c / a + i * q1 * l / (a * a * al) * std::sqrt(cplx(-C1));
  const cplx want = C1 / std::pow(a, 4) / std::sqrt(a * a * (a * a - c * c) * C1 * al * al - q1 * q1 * l * l * F) /
                    (1.0 - inner * inner);
  for (int b = 1; b <= 4; ++b) {
    const auto r = match_paper(quad_ref, 0.0, BranchId::quadratic(b), torus_ref, q1);
    EXPECT_LE(std::abs(r.m - want), 1e-14 * std::abs(want));
    EXPECT_EQ(r.f, cplx(0.0)) << b;  // every printed f carries a factor x
  }
}

TEST(MatchNumericTest, ReferencePointReturnsSeed) {
  for (CaseParams cp : {CaseParams{quad_ref}, CaseParams{ml_ref}}) {
    const auto r = match_numeric(cp, 0.0, torus_ref, 1.0);
    EXPECT_EQ(r.q, pi / 2);
    EXPECT_LE(r.potential_residual, 1e-12);
    EXPECT_NEAR(r.dq_dx, 0.0, 1e-8);
  }
}

TEST(MatchNumericTest, PotentialResidualOnGrid) {
  for (CaseParams cp : {CaseParams{quad_ref}, CaseParams{ml_ref}}) {
    const auto sys = case_system(cp);
    for (int i = 0; i <= 100; ++i) {
      const double x = -0.5 + 0.01 * i;
      const auto r = match_numeric(cp, x, torus_ref, 1.0);
      EXPECT_LE(r.potential_residual, 1e-10);
      EXPECT_GT(r.q, 0.0);
      EXPECT_LT(r.q, pi);
      EXPECT_NEAR(r.f * std::sqrt(sys.m(x)), r.dq_dx, 1e-14);
    }
  }
}

TEST(MatchNumericTest, OutOfRangeReportsInterval) {
  try {
    match_numeric(CaseParams{ml_ref}, 20.0, torus_ref, 1.0);
    FAIL() << "expected RangeError";
  } catch (const RangeError& e) {
    EXPECT_NEAR(e.lo(), 1.0 / 18.0, 1e-8);
    EXPECT_NEAR(e.hi(), 0.5, 1e-8);
  }
  EXPECT_THROW(match_numeric(CaseParams{ml_ref}, 0.1, torus_ref, 1.0, {.q_seed = 4.0}), InvalidArgument);
}

TEST(MatchNumericTest, ChainCheckPullback) {
  // q'(0) = 0, so the trajectories stay on x > 0 where f keeps one sign.
  for (CaseParams cp : {CaseParams{quad_ref}, CaseParams{ml_ref}}) {
    const auto ms = matched_system(cp, torus_ref, 1.0);
    auto traj = integrate_lienard(ms.system, 0.3, 0.3, 2.0, 1e-3);
    for (double x : traj.component(0)) ASSERT_GT(x, 0.0);
    EXPECT_LE(pullback_residual(traj, ms.system, ms.V_of_q), 1e-4) << to_string(case_of(cp));
  }
}

TEST(CompareMatchTest, ShapeAndOracleIdentity) {
  std::vector<double> xs;
  for (int i = 0; i <= 100; ++i) xs.push_back(-0.5 + 0.01 * i);
  for (CaseParams cp : {CaseParams{quad_ref}, CaseParams{ml_ref}}) {
    const auto rep = compare_match(cp, xs, torus_ref, 1.0);
    EXPECT_EQ(rep.rows.size(), 4 * xs.size());
    EXPECT_EQ(rep.branches.size(), 4u);
    EXPECT_LE(rep.oracle_identity_residual, 1e-6);
    EXPECT_LE(rep.oracle_potential_residual, 1e-10);
    EXPECT_TRUE(rep.oracle_error.empty());
    EXPECT_FALSE(rep.best_branch.empty());
  }
}

TEST(CompareMatchTest, FlagsNonPhysicalBranch) {
  // Large q1 pushes the arccos argument of the (+,+) branch above 1.
  const std::vector<double> xs{-0.2, 0.0, 0.3};
  const auto rep = compare_match(CaseParams{ml_ref}, xs, torus_ref, 5.0);
  EXPECT_EQ(rep.rows.size(), 12u);
  EXPECT_EQ(rep.branches[0].classification, "non-physical branch");
  EXPECT_EQ(rep.rows[0].status, RowStatus::non_physical);
}

TEST(BranchTest, ParseAndLabel) {
  EXPECT_EQ(parse_branch(Case::quadratic, "3"), BranchId::quadratic(3));
  EXPECT_EQ(parse_branch(Case::ml, "+-"), BranchId::ml(1, -1));
  EXPECT_EQ(BranchId::ml(-1, 1).label(), "-+");
  EXPECT_THROW(parse_branch(Case::ml, "3"), InvalidArgument);
  EXPECT_THROW(parse_branch(Case::quadratic, "0"), InvalidArgument);
}

}  // namespace
}  // namespace pdmtorus::pdm
