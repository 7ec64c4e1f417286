#include "regait/manipulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "regait/error.hpp"

namespace regait::manipulator {

Vec ManipulatorModel::drift_term(const Vec& q, const Vec& qd) const {
  if (constraint_drift) return constraint_drift(q, qd);
  const double h = 1e-6;
  Mat adot = (constraint(q + h * qd) - constraint(q - h * qd)) / (2.0 * h);
  return adot * qd;
}

Accel constrained_accel(const ManipulatorModel& m, const Vec& q, const Vec& qd, const Vec& u) {
  Mat mass = m.inertia(q);
  Vec rhs = m.input_map * u - m.bias(q, qd);
  Mat a = m.constraint(q);
  const auto n = q.size(), k = a.rows();
  Accel out;
  if (k == 0) {
    out.qdd = mass.ldlt().solve(rhs);
    out.lambda = Vec(0);
    return out;
  }
  Mat kkt = Mat::Zero(n + k, n + k);
  kkt.topLeftCorner(n, n) = mass;
  kkt.topRightCorner(n, k) = -a.transpose();
  kkt.bottomLeftCorner(k, n) = a;
  Vec b(n + k);
  b.head(n) = rhs;
  b.tail(k) = -m.drift_term(q, qd);
  auto lu = kkt.fullPivLu();
  if (!lu.isInvertible()) throw NumericError("constrained_accel: singular saddle matrix (constraint rank loss?)");
  Vec sol = lu.solve(b);
  out.qdd = sol.head(n);
  out.lambda = sol.tail(k);
  return out;
}

Vec force(const ManipulatorModel& m, const Vec& q, const Vec& qd, const Vec& u) {
  Accel acc = constrained_accel(m, q, qd, u);
  Vec eta = m.input_map * u;
  if (acc.lambda.size()) eta += m.constraint(q).transpose() * acc.lambda;
  return eta;
}

Trajectory record_force_signal(const ManipulatorModel& m, const Trajectory& traj) {
  if (traj.u.rows() != traj.size()) throw Error("record_force_signal: trajectory carries no inputs");
  const int n = m.n;
  Trajectory eta;
  eta.t = traj.t;
  eta.x.resize(traj.size(), n);
  for (Eigen::Index k = 0; k < traj.size(); ++k) {
    Vec s = traj.state(k);
    eta.x.row(k) = force(m, s.head(n), s.tail(n), traj.u.row(k).transpose()).transpose();
  }
  return eta;
}

Redesign redesign_input(const ManipulatorModel& pm, const Vec& eta_d, const Vec& q, const Vec& qd, const Mat& gauge,
                        double tol) {
  const auto r = pm.input_map.cols();
  Vec e0 = force(pm, q, qd, Vec::Zero(r));
  Mat lin(e0.size(), r);
  for (Eigen::Index i = 0; i < r; ++i) lin.col(i) = force(pm, q, qd, Vec::Unit(r, i)) - e0;
  Mat qm = gauge.size() ? gauge : Mat::Identity(e0.size(), e0.size());
  Redesign out;
  out.u = pinv(qm * lin) * (eta_d - qm * e0);
  out.residual = (qm * (lin * out.u + e0) - eta_d).norm();
  out.matched = out.residual < tol * std::max(1.0, eta_d.norm());
  return out;
}

bool gauge_invariance_check(const ManipulatorModel& pm, const Mat& qt, const Trajectory& traj, const Trajectory& eta_d,
                            double tol) {
  if (traj.size() != eta_d.size()) throw DimensionError("gauge_invariance_check: signal length mismatch");
  if (std::abs(qt.determinant()) < 1e-12) throw Error("gauge_invariance_check: Q must be invertible");
  const int n = pm.n;
  for (Eigen::Index k = 0; k < traj.size(); ++k) {
    Vec s = traj.state(k);
    Vec eta = eta_d.state(k);
    Vec u1 = redesign_input(pm, eta, s.head(n), s.tail(n)).u;
    Vec u2 = redesign_input(pm, qt * eta, s.head(n), s.tail(n), qt).u;
    // Transforming the signal and the residual together leaves the argmin fixed.
    if ((u1 - u2).lpNorm<Eigen::Infinity>() > tol) return false;
  }
  return true;
}

namespace {

ManipulatorModel toy_base(const ToyConfig& cfg) {
  ManipulatorModel m;
  m.n = 2;
  m.inertia = [](const Vec& q) {
    Mat mm(2, 2);
    mm << 2.0 + 0.3 * std::cos(q(1)), 0.2 * std::sin(q(0)), 0.2 * std::sin(q(0)), 1.5 + 0.2 * std::sin(q(1));
    return mm;
  };
  m.bias = [g = cfg.gravity, d = cfg.damping](const Vec&, const Vec& qd) {
    Vec c = d * qd;
    c(1) += g;
    return c;
  };
  m.input_map = Mat::Identity(2, 2);
  return m;
}

}  // namespace

ManipulatorModel toy_model(const ToyConfig& cfg) {
  ManipulatorModel m = toy_base(cfg);
  m.constraint = [](const Vec& q) { return Mat(q.transpose()); };
  m.constraint_drift = [](const Vec&, const Vec& qd) { return Vec::Constant(1, qd.squaredNorm()); };
  return m;
}

ManipulatorModel perturbed_toy(const ToyConfig& cfg, double s) {
  ManipulatorModel m = toy_base(cfg);
  m.constraint = [s](const Vec& q) { return Mat((1.0 + s * std::sin(q(0))) * q.transpose()); };
  m.constraint_drift = [s](const Vec& q, const Vec& qd) {
    double c = 1.0 + s * std::sin(q(0)), cdot = s * std::cos(q(0)) * qd(0);
    return Vec::Constant(1, cdot * q.dot(qd) + c * qd.squaredNorm());
  };
  return m;
}

TangentialInput::TangentialInput(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> a(1.0, 3.0), f(0.5, 3.0), p(0.0, 2.0 * std::numbers::pi);
  for (int i = 0; i < 3; ++i) {
    amp[i] = a(rng);
    freq[i] = f(rng);
    phase[i] = p(rng);
  }
}

Vec TangentialInput::operator()(double t, const Vec& q) const {
  double s = 0.0;
  for (int i = 0; i < 3; ++i) s += amp[i] * std::sin(freq[i] * t + phase[i]);
  Vec tangent(2);
  tangent << -q(1), q(0);
  return s * tangent / q.norm();
}

IntegratorConfig default_integrator() {
  IntegratorConfig c;
  c.dt = 1e-3;
  c.projection_tol = 1e-12;
  return c;
}

namespace {

HolonomicConstraint circle_manifold(const ManipulatorModel& m, double radius) {
  const int n = m.n;
  HolonomicConstraint c;
  c.value = [&m, n, radius](double, const Vec& s) {
    Vec q = s.head(n), qd = s.tail(n);
    Mat a = m.constraint(q);
    Vec r(2);
    r << q.squaredNorm() - radius * radius, (a * qd)(0);
    return r;
  };
  c.jacobian = [&m, n](double, const Vec& s) {
    Vec q = s.head(n), qd = s.tail(n);
    const double h = 1e-7;
    Mat j = Mat::Zero(2, 2 * n);
    j.block(0, 0, 1, n) = 2.0 * q.transpose();
    for (int i = 0; i < n; ++i) {
      Vec qp = q, qm = q;
      qp(i) += h;
      qm(i) -= h;
      j(1, i) = ((m.constraint(qp) * qd)(0) - (m.constraint(qm) * qd)(0)) / (2.0 * h);
    }
    j.block(1, n, 1, n) = m.constraint(q);
    return j;
  };
  return c;
}

}  // namespace

Scenario run_scenario(const ManipulatorModel& nominal, const ManipulatorModel& perturbed, const TangentialInput& input,
                      const Vec& q0, const Vec& qd0, double duration, const IntegratorConfig& cfg) {
  const int n = nominal.n;
  const double radius = q0.norm();
  Vec x0(2 * n);
  x0 << q0, qd0;

  // Recording run on the half-step grid so RK4 stage times have eta_d values.
  IntegratorConfig half = cfg;
  half.dt = 0.5 * cfg.dt;
  VectorField fnom = [&](double t, const Vec& s) {
    Vec q = s.head(n), qd = s.tail(n);
    Vec out(2 * n);
    out << qd, constrained_accel(nominal, q, qd, input(t, q)).qdd;
    return out;
  };
  Trajectory fine = integrate_projected(fnom, circle_manifold(nominal, radius), 0.0, x0, duration, half);
  fine.u.resize(fine.size(), nominal.input_map.cols());
  for (Eigen::Index k = 0; k < fine.size(); ++k) fine.u.row(k) = input(fine.t(k), fine.state(k).head(n)).transpose();

  Scenario sc;
  sc.eta_grid = record_force_signal(nominal, fine);
  const Eigen::Index coarse = (fine.size() + 1) / 2;
  sc.nominal.t.resize(coarse);
  sc.nominal.x.resize(coarse, 2 * n);
  sc.nominal.u.resize(coarse, fine.u.cols());
  for (Eigen::Index k = 0; k < coarse; ++k) {
    sc.nominal.t(k) = fine.t(2 * k);
    sc.nominal.x.row(k) = fine.x.row(2 * k);
    sc.nominal.u.row(k) = fine.u.row(2 * k);
  }

  auto eta_at = [&](double t) {
    auto k = static_cast<Eigen::Index>(std::llround(t / half.dt));
    k = std::clamp<Eigen::Index>(k, 0, sc.eta_grid.size() - 1);
    if (std::abs(sc.eta_grid.t(k) - t) > 1e-9 * std::max(1.0, t))
      throw NumericError("run_scenario: eta_d queried off grid at t=" + std::to_string(t));
    return Vec(sc.eta_grid.x.row(k).transpose());
  };
  double worst = 0.0;
  VectorField fpert = [&](double t, const Vec& s) {
    Vec q = s.head(n), qd = s.tail(n);
    Redesign rd = redesign_input(perturbed, eta_at(t), q, qd);
    worst = std::max(worst, rd.residual);
    Vec out(2 * n);
    out << qd, constrained_accel(perturbed, q, qd, rd.u).qdd;
    return out;
  };
  sc.perturbed = integrate_projected(fpert, circle_manifold(perturbed, radius), 0.0, x0, duration, cfg);
  sc.max_match_residual = worst;
  if (sc.perturbed.size() != sc.nominal.size()) throw NumericError("run_scenario: grid mismatch between runs");
  sc.max_deviation = (sc.perturbed.x.leftCols(n) - sc.nominal.x.leftCols(n)).cwiseAbs().maxCoeff();
  return sc;
}

}  // namespace regait::manipulator
