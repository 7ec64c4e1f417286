#pragma once

#include <functional>

#include "regait/linalg.hpp"
#include "regait/trajectory.hpp"

namespace regait {

using VectorField = std::function<Vec(double t, const Vec& x)>;

// Holonomic constraint c(t, x) = 0 with Jacobian dc/dx.
struct HolonomicConstraint {
  std::function<Vec(double t, const Vec& x)> value;
  std::function<Mat(double t, const Vec& x)> jacobian;
};

enum class Method { RK4, Euler };

struct IntegratorConfig {
  double dt = 1e-3;
  double projection_tol = 1e-10;
  int max_newton_iters = 50;
  Method method = Method::RK4;
};

Vec step(const VectorField& f, double t, const Vec& x, const IntegratorConfig& cfg);

// Newton iteration x <- x - J^+ c until |c| < projection_tol.
Vec project(const HolonomicConstraint& c, double t, const Vec& x, const IntegratorConfig& cfg, int* iterations = nullptr);

// Samples at t0 + i*dt; the last step is shortened to land on t1.
Trajectory integrate_projected(const VectorField& f, const HolonomicConstraint& c, double t0, const Vec& x0, double t1,
                               const IntegratorConfig& cfg);
Trajectory integrate(const VectorField& f, double t0, const Vec& x0, double t1, const IntegratorConfig& cfg);

}  // namespace regait
