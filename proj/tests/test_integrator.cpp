#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "regait/error.hpp"
#include "regait/integrator.hpp"
#include "regait/trajectory.hpp"

using namespace regait;

namespace {

HolonomicConstraint unit_circle() {
  return {[](double, const Vec& x) { return Vec::Constant(1, x.squaredNorm() - 1.0); },
          [](double, const Vec& x) { return Mat(2.0 * x.transpose()); }};
}

double rk4_error(double dt) {
  IntegratorConfig cfg;
  cfg.dt = dt;
  VectorField f = [](double, const Vec& x) { return x; };
  Trajectory tr = integrate(f, 0.0, Vec::Constant(1, 1.0), 1.0, cfg);
  return std::abs(tr.x(tr.size() - 1, 0) - std::exp(1.0));
}

}  // namespace

TEST(Step, Examples) {
  IntegratorConfig cfg;
  cfg.dt = 0.1;
  Vec x{{1.5, -2.0}};
  EXPECT_EQ(step([](double, const Vec& y) { return Vec(Vec::Zero(y.size())); }, 0.0, x, cfg), x);
  EXPECT_DOUBLE_EQ(step([](double, const Vec&) { return Vec::Constant(1, 1.0); }, 0.0, Vec::Constant(1, 2.0), cfg)(0),
                   2.1);
  EXPECT_NEAR(step([](double, const Vec& y) { return y; }, 0.0, Vec::Constant(1, 1.0), cfg)(0), std::exp(0.1), 1e-7);
  EXPECT_THROW(step([](double, const Vec& y) { return Vec(y / 0.0); }, 0.0, Vec::Constant(1, 1.0), cfg), NumericError);
}

TEST(Step, Rk4ObservedOrder) {
  const double e1 = rk4_error(0.1), e2 = rk4_error(0.05);
  EXPECT_GE(std::log2(e1 / e2), 3.9);
}

TEST(Project, Examples) {
  IntegratorConfig cfg;
  HolonomicConstraint lin{[](double, const Vec& x) { return Vec::Constant(1, x(0)); },
                          [](double, const Vec&) { return Mat{{1.0, 0.0}}; }};
  int iters = -1;
  Vec p = project(lin, 0.0, Vec{{0.5, 3.0}}, cfg, &iters);
  EXPECT_LT((p - Vec{{0.0, 3.0}}).norm(), 1e-15);
  EXPECT_EQ(iters, 1);

  Vec r = project(unit_circle(), 0.0, Vec{{1.1, 0.0}}, cfg);
  EXPECT_LT((r - Vec{{1.0, 0.0}}).norm(), 1e-10);

  Vec feasible{{0.6, 0.8}};
  EXPECT_EQ(project(unit_circle(), 0.0, feasible, cfg, &iters), feasible);
  EXPECT_EQ(iters, 0);

  Vec again = project(unit_circle(), 0.0, r, cfg);
  EXPECT_LT((again - r).norm(), cfg.projection_tol);
}

TEST(Project, FailuresAreReported) {
  IntegratorConfig cfg;
  cfg.max_newton_iters = 1;
  EXPECT_THROW(project(unit_circle(), 0.0, Vec{{3.0, 0.0}}, cfg), NumericError);
  HolonomicConstraint flat{[](double, const Vec&) { return Vec::Constant(1, 1.0); },
                           [](double, const Vec&) { return Mat::Zero(1, 2); }};
  EXPECT_THROW(project(flat, 0.0, Vec::Zero(2), IntegratorConfig{}), NumericError);
}

TEST(IntegrateProjected, ZeroFieldAndCircle) {
  IntegratorConfig cfg;
  cfg.dt = 0.01;
  Vec x0{{1.0, 0.0}};
  Trajectory still = integrate_projected([](double, const Vec& x) { return Vec(Vec::Zero(x.size())); }, unit_circle(),
                                         0.0, x0, 1.0, cfg);
  for (Eigen::Index k = 0; k < still.size(); ++k) EXPECT_EQ(still.state(k), x0);

  Trajectory circ = integrate_projected([](double, const Vec& x) { return Vec{{-x(1), x(0)}}; }, unit_circle(), 0.0, x0,
                                        10.0, cfg);
  EXPECT_EQ(circ.size(), 1001);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < circ.size(); ++k) worst = std::max(worst, std::abs(circ.state(k).norm() - 1.0));
  EXPECT_LT(worst, cfg.projection_tol);
  EXPECT_NEAR(circ.t(circ.size() - 1), 10.0, 1e-12);

  EXPECT_THROW(integrate_projected([](double, const Vec& x) { return x; }, unit_circle(), 0.0, Vec{{2.0, 0.0}}, 1.0, cfg),
               NumericError);
}

TEST(Integrate, ShortLastStepLandsOnEnd) {
  IntegratorConfig cfg;
  cfg.dt = 0.3;
  Trajectory tr = integrate([](double, const Vec&) { return Vec::Constant(1, 1.0); }, 0.0, Vec::Zero(1), 1.0, cfg);
  EXPECT_DOUBLE_EQ(tr.t(tr.size() - 1), 1.0);
  EXPECT_NEAR(tr.x(tr.size() - 1, 0), 1.0, 1e-14);
}

TEST(Trajectory, CentralDifferencesExactOnQuadratic) {
  Vec t = Vec::LinSpaced(11, 0.0, 1.0);
  Mat x(11, 1);
  for (int i = 0; i < 11; ++i) x(i, 0) = t(i) * t(i);
  Mat d = central_differences(t, x);
  for (int i = 0; i < 11; ++i) EXPECT_NEAR(d(i, 0), 2.0 * t(i), 1e-12);
}

TEST(Trajectory, CsvRoundTripIsExact) {
  Trajectory tr;
  tr.t = Vec{{0.0, 0.1, 0.2}};
  tr.x = Mat{{1.0 / 3.0, -2.5e-17}, {std::exp(1.0), 4.0}, {1e300, -0.0}};
  std::stringstream ss;
  write_csv(ss, tr);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "t,q_0,q_1");
  Trajectory back = read_csv(ss);
  EXPECT_EQ(back.t, tr.t);
  EXPECT_EQ(back.x, tr.x);
}

TEST(Trajectory, MalformedCsvReportsLine) {
  std::stringstream ss("t,q_0\n0,1\n0.1,abc\n");
  try {
    read_csv(ss);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 3);
  }
  std::stringstream ragged("t,q_0,q_1\n0,1,2\n0.1,3\n");
  try {
    read_csv(ragged);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 3);
  }
  std::stringstream nohdr("x,y\n");
  EXPECT_THROW(read_csv(nohdr), ParseError);
}
