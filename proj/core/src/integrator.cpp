#include "regait/integrator.hpp"

#include <cmath>
#include <sstream>

#include "regait/error.hpp"

namespace regait {

namespace {

std::string snapshot(double t, const Vec& x) {
  std::ostringstream os;
  os << "t=" << t << " x=[";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
  os << "]";
  return os.str();
}

Vec step_h(const VectorField& f, double t, const Vec& x, double h, Method m) {
  Vec out;
  if (m == Method::Euler) {
    out = x + h * f(t, x);
  } else {
    Vec k1 = f(t, x);
    Vec k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
    Vec k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
    Vec k4 = f(t + h, x + h * k3);
    out = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  if (!out.allFinite()) throw NumericError("integrator step produced non-finite state at " + snapshot(t, x));
  return out;
}

template <class Project>
Trajectory run(const VectorField& f, double t0, const Vec& x0, double t1, const IntegratorConfig& cfg, Project proj) {
  if (!(cfg.dt > 0)) throw Error("integrator: dt must be positive");
  if (t1 < t0) throw Error("integrator: t1 < t0");
  const double span = t1 - t0;
  auto nsteps = static_cast<Eigen::Index>(std::ceil(span / cfg.dt - 1e-9));
  Trajectory tr;
  tr.t.resize(nsteps + 1);
  tr.x.resize(nsteps + 1, x0.size());
  tr.t(0) = t0;
  tr.x.row(0) = x0.transpose();
  Vec x = x0;
  for (Eigen::Index i = 1; i <= nsteps; ++i) {
    double ta = t0 + static_cast<double>(i - 1) * cfg.dt;
    double tb = (i == nsteps) ? t1 : t0 + static_cast<double>(i) * cfg.dt;
    x = step_h(f, ta, x, tb - ta, cfg.method);
    x = proj(tb, x);
    tr.t(i) = tb;
    tr.x.row(i) = x.transpose();
  }
  return tr;
}

}  // namespace

Vec step(const VectorField& f, double t, const Vec& x, const IntegratorConfig& cfg) {
  if (!(cfg.dt > 0)) throw Error("step: dt must be positive");
  return step_h(f, t, x, cfg.dt, cfg.method);
}

Vec project(const HolonomicConstraint& c, double t, const Vec& x, const IntegratorConfig& cfg, int* iterations) {
  Vec y = x;
  Vec r = c.value(t, y);
  int it = 0;
  while (r.norm() >= cfg.projection_tol) {
    if (it >= cfg.max_newton_iters)
      throw NumericError("project: no convergence after " + std::to_string(it) + " Newton iterations (|c|=" +
                         std::to_string(r.norm()) + ") at " + snapshot(t, x));
    Mat j = c.jacobian(t, y);
    if (numerical_rank(j) < j.rows()) throw NumericError("project: rank-deficient constraint Jacobian at " + snapshot(t, y));
    y -= pinv(j) * r;
    if (!y.allFinite()) throw NumericError("project: non-finite iterate at " + snapshot(t, x));
    r = c.value(t, y);
    ++it;
  }
  if (iterations) *iterations = it;
  return y;
}

Trajectory integrate_projected(const VectorField& f, const HolonomicConstraint& c, double t0, const Vec& x0, double t1,
                               const IntegratorConfig& cfg) {
  if (c.value(t0, x0).norm() >= cfg.projection_tol)
    throw NumericError("integrate_projected: initial state infeasible (|c|=" + std::to_string(c.value(t0, x0).norm()) + ")");
  return run(f, t0, x0, t1, cfg, [&](double t, const Vec& x) {
    try {
      return project(c, t, x, cfg);
    } catch (const NumericError& e) {
      throw NumericError(std::string("at t=") + std::to_string(t) + ": " + e.what());
    }
  });
}

Trajectory integrate(const VectorField& f, double t0, const Vec& x0, double t1, const IntegratorConfig& cfg) {
  return run(f, t0, x0, t1, cfg, [](double, const Vec& x) { return x; });
}

}  // namespace regait
