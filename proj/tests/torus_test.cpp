#include "pdmtorus/torus.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace pdmtorus::torus {
namespace {

using std::numbers::pi;
const TorusParams ref{1.0, 2.0};

TEST(TorusParamsTest, RejectsHornAndSpindleTori) {
  EXPECT_THROW((TorusParams{1.0, 1.0}.validate()), InvalidArgument);
  EXPECT_THROW((TorusParams{0.0, 2.0}.validate()), InvalidArgument);
  EXPECT_THROW((TorusParams{2.0, 1.0}.validate()), InvalidArgument);
  EXPECT_NO_THROW(ref.validate());
}

TEST(TorusTest, MetricCoefficient) {
  EXPECT_DOUBLE_EQ(metric_coefficient(0.0, ref), 9.0);
  EXPECT_NEAR(metric_coefficient(pi, ref), 1.0, 1e-15);
  EXPECT_NEAR(metric_coefficient(pi / 2, ref), 4.0, 1e-15);
}

TEST(TorusTest, Lagrangian) {
  EXPECT_DOUBLE_EQ(lagrangian_value({0, 0, 1, 0}, ref), 9.0);
  EXPECT_EQ(lagrangian_value({0.3, 1.2, 0, 0}, ref), 0.0);
  EXPECT_NEAR(lagrangian_value({0, pi, 1, 1}, ref), 2.0, 1e-15);
}

TEST(TorusTest, FullAccel) {
  auto a0 = full_accel({0, 0, 3.0, -2.0}, ref);
  EXPECT_EQ(a0[0], 0.0);
  EXPECT_EQ(a0[1], 0.0);
  auto a1 = full_accel({0, pi / 2, 1, 0}, ref);
  EXPECT_NEAR(a1[0], 0.0, 1e-15);
  EXPECT_NEAR(a1[1], -2.0, 1e-15);
  auto a2 = full_accel({0, pi / 2, 1, 1}, ref);
  EXPECT_NEAR(a2[0], 1.0, 1e-15);
  EXPECT_NEAR(a2[1], -2.0, 1e-15);
}

TEST(TorusTest, MotionConstants) {
  EXPECT_DOUBLE_EQ(q1_of({0, 0, 1, 0}, ref), 9.0);
  EXPECT_EQ(q1_of({0, 0.4, 0, 1}, ref), 0.0);
  EXPECT_NEAR(q1_of({0, pi, 2, 0}, ref), 2.0, 1e-15);

  EXPECT_DOUBLE_EQ(q2_of({0, 0, 1, 0}, ref, Q2Convention::energy), 9.0);
  for (auto conv : {Q2Convention::energy, Q2Convention::paper}) {
    EXPECT_EQ(q2_of({0, 0.7, 0, 0}, ref, conv), 0.0);
    EXPECT_EQ(q2_of({0, 0, 0, 1}, ref, conv), 1.0);
  }
  const auto mc = motion_constants({0, 0, 1, 0}, ref, Q2Convention::paper);
  EXPECT_EQ(mc.convention, Q2Convention::paper);
  EXPECT_DOUBLE_EQ(mc.q2, -9.0);
}

TEST(TorusTest, ReducedAccel) {
  EXPECT_EQ(reduced_accel(0.0, 3.0, ref), 0.0);
  EXPECT_NEAR(reduced_accel(pi / 2, 1.0, ref), -0.125, 1e-15);
  EXPECT_NEAR(reduced_accel(-pi / 2, 1.0, ref), 0.125, 1e-15);
}

TEST(TorusTest, ReducedMatchesFullAccelProperty) {
  auto gen = oracle::rng(21);
  std::uniform_real_distribution<double> ang(-10.0, 10.0), q(-5.0, 5.0), a(0.1, 2.0), gap(0.01, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    const TorusParams p{a(gen), 0.0};
    const TorusParams pp{p.a, p.a + gap(gen)};
    const double v = ang(gen);
    const double q1 = q(gen);
    const FullState s{ang(gen), v, q1 / metric_coefficient(v, pp), q(gen)};
    const double want = full_accel(s, pp)[1];
    const double got = reduced_accel(v, q1, pp);
    EXPECT_LE(std::abs(got - want), 1e-12 * std::max(1.0, std::abs(want)));
    EXPECT_EQ(reduced_accel(-v, q1, pp), -got);
  }
}

TEST(TorusTest, ReducedEquilibriaAreZeroAndPi) {
  // Sign changes of reduced_accel on a fine grid of (-pi, pi] occur only at 0 and pi.
  int zeros = 0;
  double prev = reduced_accel(-pi + 1e-9, 1.0, ref);
  for (int i = 1; i <= 2000; ++i) {
    const double v = -pi + 1e-9 + i * (2 * pi) / 2000.0;
    const double cur = reduced_accel(v, 1.0, ref);
    if ((prev < 0) != (cur < 0)) ++zeros;
    prev = cur;
  }
  EXPECT_EQ(zeros, 2);  // at 0 and at +pi (wrapped endpoint excluded)
}

TEST(TorusIntegrationTest, EquatorialGeodesicStaysOnEquator) {
  auto traj = integrate_full({0, 0, 0.7, 0}, ref, 20.0, 1e-2);
  for (double v : traj.component(1)) EXPECT_LE(std::abs(v), 1e-12);
}

TEST(TorusIntegrationTest, ReferenceRunConservesQ1AndEnergy) {
  auto traj = integrate_full({0, 0.5, 0.3, 0.1}, ref, 100.0, 1e-3);
  EXPECT_DOUBLE_EQ(traj.times().back(), 100.0);
  EXPECT_LE(numerics::relative_drift(traj.diagnostic("q1")), 1e-8);
  EXPECT_LE(numerics::relative_drift(traj.diagnostic("lagrangian")), 1e-8);
}

TEST(TorusIntegrationTest, SignAuditPicksEnergyConvention) {
  auto traj = integrate_full({0, 0.5, 0.3, 0.1}, ref, 100.0, 1e-3);
  const auto audit = sign_audit(traj);
  EXPECT_EQ(audit.conserved, SignVerdict::energy);
  EXPECT_LE(audit.plus_drift, 1e-8);
  EXPECT_GE(audit.minus_drift, 1e-2);
  EXPECT_FALSE(audit.note.empty());
}

TEST(TorusIntegrationTest, SignAuditInconclusiveCases) {
  auto no_spin = integrate_full({0, 0.5, 0.0, 0.1}, ref, 10.0, 1e-3);
  EXPECT_EQ(sign_audit(no_spin).conserved, SignVerdict::inconclusive);
  auto equator = integrate_full({0, 0, 0.3, 0.0}, ref, 10.0, 1e-3);
  EXPECT_EQ(sign_audit(equator).conserved, SignVerdict::inconclusive);
}

TEST(TorusIntegrationTest, ReducedEquilibria) {
  for (double v0 : {0.0, pi}) {
    auto traj = integrate_reduced(v0, 0.0, 2.5, ref, 10.0, 1e-2);
    for (double v : traj.component(0)) EXPECT_LE(std::abs(v - v0), 1e-12);
  }
}

TEST(TorusIntegrationTest, ReducedMatchesFull) {
  const FullState s0{0, 0.5, 0.3, 0.1};
  auto full = integrate_full(s0, ref, 10.0, 1e-4);
  auto red = integrate_reduced(s0.v, s0.dv, q1_of(s0, ref), ref, 10.0, 1e-4);
  ASSERT_EQ(full.size(), red.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < full.size(); ++i) worst = std::max(worst, std::abs(full.state(i)[1] - red.state(i)[0]));
  EXPECT_LE(worst, 1e-6);
  EXPECT_LE(numerics::relative_drift(red.diagnostic("q2_energy")), 1e-8);
}

TEST(TorusIntegrationTest, RejectsInvalidGeometry) {
  EXPECT_THROW(integrate_full({}, TorusParams{1.0, 0.5}, 1.0, 0.1), InvalidArgument);
  EXPECT_THROW(integrate_reduced(0, 0, 1, TorusParams{-1.0, 2.0}, 1.0, 0.1), InvalidArgument);
}

}  // namespace
}  // namespace pdmtorus::torus
