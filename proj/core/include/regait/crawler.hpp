#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "regait/behavior_spec.hpp"
#include "regait/encoding.hpp"
#include "regait/integrator.hpp"
#include "regait/linalg.hpp"
#include "regait/optimizer.hpp"
#include "regait/signal.hpp"
#include "regait/trajectory.hpp"

namespace regait::crawler {

using cplx = std::complex<double>;

// State layout: (x, y, theta0, theta1..theta6).
inline constexpr int kDim = 9;
inline constexpr int kTheta0 = 2;
inline int theta_index(int joint) { return 2 + joint; }

struct CrawlerParams {
  cplx l1{2.5, 2.0};
  cplx l2{-2.5, 2.0};
  cplx h1{1.0, 0.0};
  cplx h2{-1.0, 0.0};
};

struct TemplateOutput {
  double r = 0.0;
  double alpha = 0.0;
};

// Body-frame limb endpoints p1, p2.
std::pair<cplx, cplx> body_endpoints(const CrawlerParams& p, const Vec& state);
// World-frame endpoints f1, f2.
std::pair<cplx, cplx> limb_endpoints(const CrawlerParams& p, const Vec& state);

// (Re f1 - Re l1, Im f1 - Im l1, Re f2 - Re l2, Im f2 - Im l2).
Vec foot_residual(const CrawlerParams& p, const Vec& state);
// 4 x 9 gradient of (Re f1, Im f1, Re f2, Im f2).
Mat foot_jacobian(const CrawlerParams& p, const Vec& state);
ConstraintBlock physical_block(const CrawlerParams& p);

TemplateOutput template_map(const CrawlerParams& p, const Vec& state);
// 2 x 9 Jacobian of (r, alpha); the group columns are zero.
Mat template_jacobian(const CrawlerParams& p, const Vec& state);
EncodingMap template_encoding(const CrawlerParams& p);

// Phi(x) = (x, y, theta0, r, alpha) and its 5 x 9 Jacobian.
Vec template_coordinates(const CrawlerParams& p, const Vec& state);
Mat template_coordinates_jacobian(const CrawlerParams& p, const Vec& state);

// Rows omega1..omega5 in (x, y, theta0, r, alpha) coordinates.
Mat design_forms(const TemplateOutput& tpl, double theta0);
// 3 x 3 block of omega1, omega2, omega5 on the group velocities.
Mat group_block(const TemplateOutput& tpl, double theta0);

struct ReferenceGait;

// Pulled-back omega1..omega5; gamma3 = d/dt alpha0, gamma4 = d/dt r0.
ConstraintBlock design_block(const CrawlerParams& p, const ReferenceGait& ref);

ConstraintRow apply_jam(int joint);

struct GaitProfile {
  double period = 1.0;
  double body_amplitude = 0.2;  // theta0 swing (rad)
  double theta1_amplitude = 0.3;
  double theta4_amplitude = 0.3;
  double theta4_lag = 1.5707963267948966;
};

// Closed-form periodic gait with both feet pinned: the body follows
// theta0 = A cos wt, x = theta0, y = sqrt2 A sin wt. Each shoulder points at its
// foot plus a sinusoidal swing and the two distal joints come from two-link IK.
struct ReferenceGait {
  ReferenceGait(CrawlerParams params, GaitProfile profile = {});

  Vec state(double t) const;
  Vec velocity(double t) const;
  Vec group(double t) const;
  Vec group_velocity(double t) const;
  TemplateOutput template_at(double t) const;
  double r_dot(double t) const;
  double alpha_dot(double t) const;
  double phase(double t) const;  // 2 pi t / period

  Trajectory sample(double duration, double dt) const;

  CrawlerParams params;
  GaitProfile profile;

 private:
  std::pair<cplx, cplx> reach(double t, cplx* d1, cplx* d2) const;
};

// Newton IK on the 4 foot equations from a guess (minimum-norm updates).
Vec solve_ik(const CrawlerParams& p, const Vec& guess, const IntegratorConfig& cfg = {});

// Playback of joint commands with an optional jammed joint (0 = none). Each
// sample fits the pose by Gauss-Newton; when the commanded joints cannot keep
// both feet pinned the configuration is then projected onto the feet + jam
// manifold with minimum-norm Newton steps.
Trajectory playback(const CrawlerParams& p, const Trajectory& commands, int jam, double jam_value,
                    const IntegratorConfig& cfg = {});
Trajectory playback_baseline(const CrawlerParams& p, const Trajectory& reference, int jam,
                             const IntegratorConfig& cfg = {});

struct RecoveryResult {
  Trajectory trajectory;
  Mat template_trace;  // samples x 2: (r, alpha)
  Mat group_trace;     // samples x 3
};

// Integrates the recovery ODE over [0, duration] with projection onto feet,
// jam, template and x - theta0 constraints. jam == 0 replays the reference.
RecoveryResult recover(const CrawlerParams& p, const ReferenceGait& ref, int jam, double duration,
                       const IntegratorConfig& cfg = {});

// Velocity field of the recovery ODE at (t, x).
Vec recovery_velocity(const CrawlerParams& p, const ReferenceGait& ref, int jam, double t, const Vec& x,
                      double tol = kDefaultTol);

Mat template_trace(const CrawlerParams& p, const Trajectory& traj);
Mat group_velocity_trace(const Trajectory& traj);

double template_rms(const Mat& a, const Mat& b);
double rms_error(const Mat& a, const Mat& b);

// Maximum foot residual norm over samples.
double max_foot_residual(const CrawlerParams& p, const Trajectory& traj);

// Phase of a crawler state through a PCA estimator on the group coordinates.
PhaseEstimator train_group_phase(const Trajectory& traj);

LearnedConstraints learn_template_constraints(const CrawlerParams& p, const Trajectory& reference,
                                              const PhaseEstimator& est, int order);

// Stack P (feet [+ jam]), D (design block) and optionally L.
ConstraintStack build_stack(const CrawlerParams& p, const ReferenceGait& ref, int jam,
                            const LearnedConstraints* learned, const PhaseEstimator* est);

// Gait-parameter search with the jam hidden from the solver: 8 triangle-wave
// knots offset theta2 and theta3 by knot_scale * wave(t / period).
struct GaitSearchConfig {
  int jam = 1;
  double knot_scale = 0.5;
  double duration = 1.0;
  double dt = 2e-3;
  int order = 4;
  NMConfig nm;
};

struct GaitSearchResult {
  NMResult nm;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  double initial_designed_residual = 0.0;
  double final_designed_residual = 0.0;
  Trajectory best_trajectory;
};

Trajectory gait_commands(const ReferenceGait& ref, const Vec& mu, double knot_scale, double duration, double dt);
GaitSearchResult optimize_gait(const CrawlerParams& p, const ReferenceGait& ref, const GaitSearchConfig& cfg);

}  // namespace regait::crawler
