#pragma once

#include <cstdint>
#include <functional>

#include "regait/integrator.hpp"
#include "regait/linalg.hpp"
#include "regait/trajectory.hpp"

namespace regait::manipulator {

// M(q) qdd + C(q, qd) = B u + A(q)^T lambda, with A(q) qd = 0.
struct ManipulatorModel {
  int n = 2;
  std::function<Mat(const Vec& q)> inertia;
  std::function<Vec(const Vec& q, const Vec& qd)> bias;
  Mat input_map;
  std::function<Mat(const Vec& q)> constraint;
  // Adot(q, qd) * qd; estimated by central differences of A along qd when empty.
  std::function<Vec(const Vec& q, const Vec& qd)> constraint_drift;

  Vec drift_term(const Vec& q, const Vec& qd) const;
};

struct Accel {
  Vec qdd;
  Vec lambda;
};

// Solves [M -A^T; A 0] (qdd, lambda) = (B u - C, -Adot qd).
Accel constrained_accel(const ManipulatorModel& m, const Vec& q, const Vec& qd, const Vec& u);

// eta = B u + A(q)^T lambda.
Vec force(const ManipulatorModel& m, const Vec& q, const Vec& qd, const Vec& u);

// traj.x holds (q, qd) per row and traj.u the inputs.
Trajectory record_force_signal(const ManipulatorModel& m, const Trajectory& traj);

struct Redesign {
  Vec u;
  double residual = 0.0;
  bool matched = false;  // residual below tol
};

// Minimum-norm u minimizing |Q (B u + A~^T lambda(u)) - eta_d|, where eta_d is
// given in the gauge Q (identity when empty). eta(u) is affine in u, so the
// problem is a linear least-squares solve.
Redesign redesign_input(const ManipulatorModel& perturbed, const Vec& eta_d, const Vec& q, const Vec& qd,
                        const Mat& gauge = Mat(), double tol = 1e-9);

bool gauge_invariance_check(const ManipulatorModel& perturbed, const Mat& q_transform, const Trajectory& traj,
                            const Trajectory& eta_d, double tol = 1e-9);

// Built-in 2-DOF toy: point mass on the circle |q| = radius with a mildly
// configuration-dependent SPD inertia, gravity and viscous damping.
struct ToyConfig {
  double radius = 1.0;
  double gravity = 9.81;
  double damping = 0.1;
};
ManipulatorModel toy_model(const ToyConfig& cfg = {});
// Constraint rows scaled by c(q) = 1 + 0.5 sin(q1): same annihilated directions.
ManipulatorModel perturbed_toy(const ToyConfig& cfg = {}, double strength = 0.5);

// Tangential input s(t) (-q2, q1)/|q| with s a seeded sum of three sinusoids.
struct TangentialInput {
  explicit TangentialInput(std::uint64_t seed);
  Vec operator()(double t, const Vec& q) const;
  double amp[3], freq[3], phase[3];
};

struct Scenario {
  Trajectory nominal;   // (q, qd) with inputs
  Trajectory eta_grid;  // eta_d sampled at dt/2 for RK4 stages
  Trajectory perturbed;  // closed loop under redesigned input
  double max_deviation = 0.0;
  double max_match_residual = 0.0;
};

IntegratorConfig default_integrator();

Scenario run_scenario(const ManipulatorModel& nominal, const ManipulatorModel& perturbed, const TangentialInput& input,
                      const Vec& q0, const Vec& qd0, double duration, const IntegratorConfig& cfg);

}  // namespace regait::manipulator
