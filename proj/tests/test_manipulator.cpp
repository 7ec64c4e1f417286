#include <gtest/gtest.h>

#include <cmath>

#include "regait/manipulator.hpp"

using namespace regait;
using namespace regait::manipulator;

namespace {

// Unit mass, no bias, constraint qdot_2 = 0.
ManipulatorModel slider() {
  ManipulatorModel m;
  m.n = 2;
  m.inertia = [](const Vec&) { return Mat(Mat::Identity(2, 2)); };
  m.bias = [](const Vec&, const Vec&) { return Vec(Vec::Zero(2)); };
  m.input_map = Mat::Identity(2, 2);
  m.constraint = [](const Vec&) { return Mat(Mat{{0.0, 1.0}}); };
  return m;
}

Vec v2(double a, double b) { return Vec{{a, b}}; }

}  // namespace

TEST(ConstrainedAccel, SliderExamples) {
  ManipulatorModel m = slider();
  Accel a = constrained_accel(m, v2(0, 0), v2(0, 0), v2(1, 0));
  EXPECT_LT((a.qdd - v2(1, 0)).norm(), 1e-15);
  EXPECT_NEAR(a.lambda(0), 0.0, 1e-15);

  Accel b = constrained_accel(m, v2(0, 0), v2(0, 0), v2(0, 1));
  EXPECT_LT(b.qdd.norm(), 1e-15);
  EXPECT_NEAR(b.lambda(0), -1.0, 1e-15);

  EXPECT_LT((force(m, v2(0, 0), v2(0, 0), v2(0, 1))).norm(), 1e-15);
}

TEST(ConstrainedAccel, UnconstrainedIsPlainSolve) {
  ManipulatorModel m = toy_model();
  m.constraint = [](const Vec&) { return Mat(0, 2); };
  m.constraint_drift = {};
  Vec q = v2(0.3, 0.8), qd = v2(-0.2, 0.5), u = v2(1.0, -2.0);
  Accel a = constrained_accel(m, q, qd, u);
  EXPECT_EQ(a.lambda.size(), 0);
  EXPECT_LT((m.inertia(q) * a.qdd - (u - m.bias(q, qd))).norm(), 1e-12);
}

TEST(ConstrainedAccel, MultiplierConsistency) {
  ManipulatorModel m = toy_model();
  Vec q = v2(std::cos(0.4), std::sin(0.4));
  Vec qd = 1.3 * v2(-q(1), q(0));
  Vec u = v2(0.7, -1.1);
  Accel a = constrained_accel(m, q, qd, u);
  Vec lhs = m.inertia(q) * a.qdd + m.bias(q, qd);
  Vec rhs = m.input_map * u + m.constraint(q).transpose() * a.lambda;
  EXPECT_LT((lhs - rhs).norm(), 1e-12);
  // Second derivative of the constraint: A qdd + Adot qd = 0.
  EXPECT_NEAR((m.constraint(q) * a.qdd)(0) + qd.squaredNorm(), 0.0, 1e-12);
}

TEST(ConstrainedAccel, NumericDriftMatchesAnalytic) {
  ManipulatorModel m = perturbed_toy();
  ManipulatorModel fd = m;
  fd.constraint_drift = {};
  Vec q = v2(0.6, 0.8), qd = v2(-0.8, 0.6);
  EXPECT_NEAR(m.drift_term(q, qd)(0), fd.drift_term(q, qd)(0), 1e-8);
}

TEST(ForceSignal, RecordsEta) {
  ManipulatorModel m = toy_model();
  Trajectory tr;
  tr.t = Vec{{0.0, 0.1}};
  tr.x = Mat{{1.0, 0.0, 0.0, 0.5}, {0.0, 1.0, -0.5, 0.0}};
  tr.u = Mat{{0.2, 0.3}, {-0.1, 0.4}};
  Trajectory eta = record_force_signal(m, tr);
  ASSERT_EQ(eta.x.rows(), 2);
  for (int k = 0; k < 2; ++k) {
    Vec s = tr.state(k);
    EXPECT_LT((eta.state(k) - force(m, s.head(2), s.tail(2), tr.u.row(k).transpose())).norm(), 1e-15);
  }
  Trajectory no_u = tr;
  no_u.u.resize(0, 0);
  EXPECT_THROW(record_force_signal(m, no_u), std::exception);
}

TEST(Redesign, NoPerturbationReturnsNominalInput) {
  ManipulatorModel m = toy_model();
  Vec q = v2(std::cos(1.1), std::sin(1.1)), qd = 0.4 * v2(-q(1), q(0));
  Vec ud = v2(1.5, -0.5);
  Vec eta = force(m, q, qd, ud);
  Redesign rd = redesign_input(m, eta, q, qd);
  EXPECT_TRUE(rd.matched);
  // Only the tangential part of u is identifiable from eta.
  EXPECT_LT((force(m, q, qd, rd.u) - eta).norm(), 1e-10);
  Vec tangent = v2(-q(1), q(0));
  EXPECT_NEAR(rd.u.dot(tangent), ud.dot(tangent), 1e-10);
}

TEST(Redesign, GaugeInvariance) {
  ManipulatorModel nom = toy_model(), pert = perturbed_toy();
  TangentialInput in(3);
  Scenario sc = run_scenario(nom, pert, in, v2(1, 0), v2(0, 0), 0.2, default_integrator());
  Trajectory eta = record_force_signal(nom, sc.nominal);
  Mat rot{{std::cos(0.7), -std::sin(0.7)}, {std::sin(0.7), std::cos(0.7)}};
  Mat shear{{1.0, 0.4}, {0.0, 0.5}};
  EXPECT_TRUE(gauge_invariance_check(pert, Mat::Identity(2, 2), sc.nominal, eta));
  EXPECT_TRUE(gauge_invariance_check(pert, 2.0 * Mat::Identity(2, 2), sc.nominal, eta));
  EXPECT_TRUE(gauge_invariance_check(pert, rot, sc.nominal, eta));
  EXPECT_TRUE(gauge_invariance_check(pert, shear, sc.nominal, eta));
  EXPECT_THROW(gauge_invariance_check(pert, Mat::Zero(2, 2), sc.nominal, eta), std::exception);
}

TEST(Scenario, PerturbedRunTracksNominal) {
  TangentialInput in(7);
  Scenario sc = run_scenario(toy_model(), perturbed_toy(), in, v2(1, 0), v2(0, 0), 5.0, default_integrator());
  EXPECT_LT(sc.max_deviation, 1e-6);
  for (Eigen::Index k = 0; k < sc.perturbed.size(); k += 500)
    EXPECT_NEAR(sc.perturbed.state(k).head(2).norm(), 1.0, 1e-10);
  EXPECT_LT(sc.max_match_residual, 1e-2);
}

TEST(Scenario, Deterministic) {
  TangentialInput a(11), b(11);
  Scenario s1 = run_scenario(toy_model(), perturbed_toy(), a, v2(1, 0), v2(0, 0), 0.5, default_integrator());
  Scenario s2 = run_scenario(toy_model(), perturbed_toy(), b, v2(1, 0), v2(0, 0), 0.5, default_integrator());
  EXPECT_EQ(s1.perturbed.x, s2.perturbed.x);
  EXPECT_EQ(s1.max_deviation, s2.max_deviation);
}
