#include "regait/crawler.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "regait/error.hpp"

namespace regait::crawler {

namespace {

constexpr cplx kI{0.0, 1.0};

cplx expi(double a) { return std::polar(1.0, a); }

void check_state(const Vec& s) {
  if (s.size() != kDim) throw DimensionError("crawler: state must have 9 entries, got " + std::to_string(s.size()));
}

// Partial derivatives of p1 (joints 1..3) and p2 (joints 4..6) in the body frame.
struct Arms {
  cplx p1, p2;
  cplx dp[6];  // dp[j-1] = d p_arm(j) / d theta_j
};

Arms arms(const CrawlerParams& p, const Vec& s) {
  Arms a;
  cplx e1 = expi(s(3)), e12 = expi(s(3) + s(4)), e123 = expi(s(3) + s(4) + s(5));
  cplx e4 = expi(s(6)), e45 = expi(s(6) + s(7)), e456 = expi(s(6) + s(7) + s(8));
  a.p1 = p.h1 + e1 + e12 + e123;
  a.p2 = p.h2 + e4 + e45 + e456;
  a.dp[0] = kI * (e1 + e12 + e123);
  a.dp[1] = kI * (e12 + e123);
  a.dp[2] = kI * e123;
  a.dp[3] = kI * (e4 + e45 + e456);
  a.dp[4] = kI * (e45 + e456);
  a.dp[5] = kI * e456;
  return a;
}

cplx template_point(const CrawlerParams& p) { return 0.5 * (p.l1 + p.l2); }

}  // namespace

std::pair<cplx, cplx> body_endpoints(const CrawlerParams& p, const Vec& s) {
  check_state(s);
  Arms a = arms(p, s);
  return {a.p1, a.p2};
}

std::pair<cplx, cplx> limb_endpoints(const CrawlerParams& p, const Vec& s) {
  auto [p1, p2] = body_endpoints(p, s);
  cplx z{s(0), s(1)};
  cplx rot = expi(s(2));
  return {z + rot * p1, z + rot * p2};
}

Vec foot_residual(const CrawlerParams& p, const Vec& s) {
  auto [f1, f2] = limb_endpoints(p, s);
  Vec r(4);
  r << f1.real() - p.l1.real(), f1.imag() - p.l1.imag(), f2.real() - p.l2.real(), f2.imag() - p.l2.imag();
  return r;
}

Mat foot_jacobian(const CrawlerParams& p, const Vec& s) {
  check_state(s);
  Arms a = arms(p, s);
  cplx rot = expi(s(2));
  Mat j = Mat::Zero(4, kDim);
  j(0, 0) = 1.0;
  j(1, 1) = 1.0;
  j(2, 0) = 1.0;
  j(3, 1) = 1.0;
  cplx d1 = kI * rot * a.p1, d2 = kI * rot * a.p2;
  j(0, 2) = d1.real();
  j(1, 2) = d1.imag();
  j(2, 2) = d2.real();
  j(3, 2) = d2.imag();
  for (int k = 0; k < 3; ++k) {
    cplx c1 = rot * a.dp[k], c2 = rot * a.dp[k + 3];
    j(0, 3 + k) = c1.real();
    j(1, 3 + k) = c1.imag();
    j(2, 6 + k) = c2.real();
    j(3, 6 + k) = c2.imag();
  }
  return j;
}

ConstraintBlock physical_block(const CrawlerParams& p) {
  ConstraintBlock b;
  b.priority = Priority::Physical;
  b.name = "feet";
  b.rows = [p](double, const Vec& x) { return BlockValue{foot_jacobian(p, x), Vec::Zero(4)}; };
  return b;
}

TemplateOutput template_map(const CrawlerParams& p, const Vec& s) {
  auto [p1, p2] = body_endpoints(p, s);
  cplx m = 0.5 * (p1 + p2);
  if (std::abs(m) < 1e-12) throw NumericError("template_map: limb midpoint at body origin, alpha undefined");
  return {std::abs(m), std::arg(m)};
}

Mat template_jacobian(const CrawlerParams& p, const Vec& s) {
  check_state(s);
  Arms a = arms(p, s);
  cplx m = 0.5 * (a.p1 + a.p2);
  double r = std::abs(m);
  if (r < 1e-12) throw NumericError("template_jacobian: limb midpoint at body origin");
  Mat j = Mat::Zero(2, kDim);
  for (int k = 0; k < 6; ++k) {
    cplx dm = 0.5 * a.dp[k];
    cplx q = std::conj(m) * dm;
    j(0, 3 + k) = q.real() / r;
    j(1, 3 + k) = q.imag() / (r * r);
  }
  return j;
}

EncodingMap template_encoding(const CrawlerParams& p) {
  EncodingMap m;
  m.input_dim = kDim;
  m.output_dim = 2;
  m.outputs = [p](const Vec& x) {
    TemplateOutput t = template_map(p, x);
    return Vec{{t.r, t.alpha}};
  };
  m.jacobian = [p](const Vec& x) { return template_jacobian(p, x); };
  return m;
}

Vec template_coordinates(const CrawlerParams& p, const Vec& s) {
  TemplateOutput t = template_map(p, s);
  Vec y(5);
  y << s(0), s(1), s(2), t.r, t.alpha;
  return y;
}

Mat template_coordinates_jacobian(const CrawlerParams& p, const Vec& s) {
  Mat j = Mat::Zero(5, kDim);
  j(0, 0) = j(1, 1) = j(2, 2) = 1.0;
  j.bottomRows(2) = template_jacobian(p, s);
  return j;
}

Mat design_forms(const TemplateOutput& tpl, double theta0) {
  const double s = std::sin(theta0 + tpl.alpha), c = std::cos(theta0 + tpl.alpha), r = tpl.r;
  Mat w(5, 5);
  // columns: xdot, ydot, theta0dot, rdot, alphadot
  w << 1, 0, -r * s, c, -r * s,
       0, 1, r * c, s, r * c,
       0, 0, 0, 0, 1,
       0, 0, 0, 1, 0,
       1, 0, -1, 0, 0;
  return w;
}

Mat group_block(const TemplateOutput& tpl, double theta0) {
  Mat w = design_forms(tpl, theta0);
  Mat g(3, 3);
  g.row(0) = w.row(0).head(3);
  g.row(1) = w.row(1).head(3);
  g.row(2) = w.row(4).head(3);
  return g;
}

ConstraintBlock design_block(const CrawlerParams& p, const ReferenceGait& ref) {
  ConstraintBlock b;
  b.priority = Priority::Designed;
  b.name = "template";
  b.rows = [p, ref](double t, const Vec& x) {
    TemplateOutput tpl = template_map(p, x);
    BlockValue bv;
    bv.omega = design_forms(tpl, x(2)) * template_coordinates_jacobian(p, x);
    bv.gamma = Vec::Zero(5);
    bv.gamma(2) = ref.alpha_dot(t);
    bv.gamma(3) = ref.r_dot(t);
    return bv;
  };
  return b;
}

ConstraintRow apply_jam(int joint) {
  if (joint < 1 || joint > 6) throw Error("apply_jam: joint must be in 1..6, got " + std::to_string(joint));
  ConstraintRow row;
  row.coefficients = Vec::Zero(kDim);
  row.coefficients(theta_index(joint)) = 1.0;
  row.value = 0.0;
  return row;
}

namespace {

// Two-link IK: e^{i a}(1 + e^{i b}) = u, elbow sign selects the branch.
std::pair<double, double> two_link(cplx u, double elbow_sign, double t) {
  double n = std::abs(u);
  if (!(n < 2.0 - 1e-9) || n < 1e-9)
    throw NumericError("reference_gait: arm out of reach at t=" + std::to_string(t) + " (|u|=" + std::to_string(n) + ")");
  double b = elbow_sign * 2.0 * std::acos(n / 2.0);
  return {std::arg(u) - 0.5 * b, b};
}

}  // namespace

ReferenceGait::ReferenceGait(CrawlerParams p, GaitProfile prof) : params(p), profile(prof) {
  if (!(profile.period > 0)) throw Error("reference_gait: period must be positive");
}

double ReferenceGait::phase(double t) const { return 2.0 * std::numbers::pi * t / profile.period; }

Vec ReferenceGait::group(double t) const {
  const double a = profile.body_amplitude, ph = phase(t);
  Vec g(3);
  g << a * std::cos(ph), std::sqrt(2.0) * a * std::sin(ph), a * std::cos(ph);
  return g;
}

Vec ReferenceGait::group_velocity(double t) const {
  const double a = profile.body_amplitude, ph = phase(t), w = 2.0 * std::numbers::pi / profile.period;
  Vec g(3);
  g << -a * w * std::sin(ph), std::sqrt(2.0) * a * w * std::cos(ph), -a * w * std::sin(ph);
  return g;
}

// Shoulder-to-foot vectors in the body frame and their time derivatives.
std::pair<cplx, cplx> ReferenceGait::reach(double t, cplx* d1, cplx* d2) const {
  Vec g = group(t), gd = group_velocity(t);
  cplx z{g(0), g(1)}, zd{gd(0), gd(1)};
  cplx rot = expi(-g(2));
  cplx w1 = rot * (params.l1 - z) - params.h1;
  cplx w2 = rot * (params.l2 - z) - params.h2;
  if (d1) *d1 = -kI * gd(2) * rot * (params.l1 - z) - rot * zd;
  if (d2) *d2 = -kI * gd(2) * rot * (params.l2 - z) - rot * zd;
  return {w1, w2};
}

Vec ReferenceGait::state(double t) const {
  Vec s(kDim);
  s.head(3) = group(t);
  const double ph = phase(t);
  auto [w1, w2] = reach(t, nullptr, nullptr);
  const double th1 = std::arg(w1) + profile.theta1_amplitude * std::sin(ph);
  const double th4 = std::arg(w2) + profile.theta4_amplitude * std::sin(ph + profile.theta4_lag);
  auto [a2, a3] = two_link(expi(-th1) * w1 - 1.0, 1.0, t);
  auto [a5, a6] = two_link(expi(-th4) * w2 - 1.0, -1.0, t);
  s.tail(6) << th1, a2, a3, th4, a5, a6;
  return s;
}

Vec ReferenceGait::velocity(double t) const {
  Vec s = state(t);
  Vec v = Vec::Zero(kDim);
  const double w = 2.0 * std::numbers::pi / profile.period, ph = phase(t);
  v.head(3) = group_velocity(t);
  cplx d1, d2;
  auto [w1, w2] = reach(t, &d1, &d2);
  v(3) = (std::conj(w1) * d1).imag() / std::norm(w1) + profile.theta1_amplitude * w * std::cos(ph);
  v(6) = (std::conj(w2) * d2).imag() / std::norm(w2) + profile.theta4_amplitude * w * std::cos(ph + profile.theta4_lag);
  Mat j = foot_jacobian(params, s);
  // Each arm: the two distal joint rates follow from its pinned foot.
  for (int arm = 0; arm < 2; ++arm) {
    const int r0 = 2 * arm, c0 = 3 + 3 * arm;
    Eigen::Vector2d known = j.block(r0, 0, 2, 3) * v.head(3) + j.block(r0, c0, 2, 1) * v(c0);
    Eigen::Matrix2d a = j.block(r0, c0 + 1, 2, 2);
    v.segment(c0 + 1, 2) = a.partialPivLu().solve(-known);
  }
  return v;
}

TemplateOutput ReferenceGait::template_at(double t) const { return template_map(params, state(t)); }

double ReferenceGait::r_dot(double t) const {
  Vec g = group(t), gd = group_velocity(t);
  cplx w = template_point(params) - cplx{g(0), g(1)};
  cplx wd = -cplx{gd(0), gd(1)};
  return (std::conj(w) * wd).real() / std::abs(w);
}

double ReferenceGait::alpha_dot(double t) const {
  Vec g = group(t), gd = group_velocity(t);
  cplx w = template_point(params) - cplx{g(0), g(1)};
  cplx wd = -cplx{gd(0), gd(1)};
  return (std::conj(w) * wd).imag() / std::norm(w) - gd(2);
}

Trajectory ReferenceGait::sample(double duration, double dt) const {
  if (!(dt > 0) || duration < 0) throw Error("reference_gait: bad sampling");
  auto n = static_cast<Eigen::Index>(std::llround(duration / dt)) + 1;
  Trajectory tr;
  tr.t.resize(n);
  tr.x.resize(n, kDim);
  tr.v.resize(n, kDim);
  for (Eigen::Index k = 0; k < n; ++k) {
    double t = static_cast<double>(k) * dt;
    tr.t(k) = t;
    tr.x.row(k) = state(t).transpose();
    tr.v.row(k) = velocity(t).transpose();
  }
  return tr;
}

Vec solve_ik(const CrawlerParams& p, const Vec& guess, const IntegratorConfig& cfg) {
  HolonomicConstraint c{[p](double, const Vec& x) { return foot_residual(p, x); },
                        [p](double, const Vec& x) { return foot_jacobian(p, x); }};
  return project(c, 0.0, guess, cfg);
}

Trajectory playback(const CrawlerParams& p, const Trajectory& commands, int jam, double jam_value,
                    const IntegratorConfig& cfg) {
  if (commands.dim() != kDim) throw DimensionError("playback: commands must have 9 columns");
  if (jam < 0 || jam > 6) throw Error("playback: jam must be in 0..6");
  HolonomicConstraint c;
  c.value = [&](double, const Vec& x) {
    Vec r(jam ? 5 : 4);
    r.head(4) = foot_residual(p, x);
    if (jam) r(4) = x(theta_index(jam)) - jam_value;
    return r;
  };
  c.jacobian = [&](double, const Vec& x) {
    Mat j = Mat::Zero(jam ? 5 : 4, kDim);
    j.topRows(4) = foot_jacobian(p, x);
    if (jam) j(4, theta_index(jam)) = 1.0;
    return j;
  };

  Trajectory out;
  out.t = commands.t;
  out.x.resize(commands.size(), kDim);
  Vec g = commands.state(0).head(3);
  for (Eigen::Index k = 0; k < commands.size(); ++k) {
    Vec x = commands.state(k);
    if (jam) x(theta_index(jam)) = jam_value;
    x.head(3) = g;
    // Gauss-Newton on the pose only.
    for (int it = 0; it < cfg.max_newton_iters; ++it) {
      Vec r = foot_residual(p, x);
      if (r.norm() < 0.01 * cfg.projection_tol) break;
      Mat jg = foot_jacobian(p, x).leftCols(3);
      Vec d = jg.colPivHouseholderQr().solve(-r);
      x.head(3) += d;
      if (d.norm() < 1e-15) break;
    }
    if (!x.allFinite()) throw NumericError("playback: pose fit diverged at t=" + std::to_string(commands.t(k)));
    if (c.value(out.t(k), x).norm() >= cfg.projection_tol) {
      try {
        x = project(c, out.t(k), x, cfg);
      } catch (const NumericError& e) {
        throw NumericError("playback: at t=" + std::to_string(commands.t(k)) + ": " + e.what());
      }
    }
    g = x.head(3);
    out.x.row(k) = x.transpose();
  }
  return out;
}

Trajectory playback_baseline(const CrawlerParams& p, const Trajectory& reference, int jam, const IntegratorConfig& cfg) {
  double jam_value = jam ? reference.x(0, theta_index(jam)) : 0.0;
  return playback(p, reference, jam, jam_value, cfg);
}

Vec recovery_velocity(const CrawlerParams& p, const ReferenceGait& ref, int jam, double t, const Vec& x, double tol) {
  TemplateOutput tpl = template_map(p, x);
  Mat wg = group_block(tpl, x(2));
  Mat w = design_forms(tpl, x(2));
  Mat wra(3, 2);
  wra.row(0) = w.row(0).tail(2);
  wra.row(1) = w.row(1).tail(2);
  wra.row(2) = w.row(4).tail(2);
  Eigen::Vector2d rate{ref.r_dot(t), ref.alpha_dot(t)};

  auto lu = wg.fullPivLu();
  if (std::abs(wg.determinant()) < tol * std::max(1.0, wg.norm()))
    throw NumericError("recover: group block lost rank at t=" + std::to_string(t));
  Vec gdot = -lu.solve(wra * rate);

  Mat jf = foot_jacobian(p, x);
  Mat dphi = template_jacobian(p, x).rightCols(6);
  const int rows = 6 + (jam ? 1 : 0);
  Mat a = Mat::Zero(rows, 6);
  Vec b = Vec::Zero(rows);
  a.topRows(4) = jf.rightCols(6);
  b.head(4) = -jf.leftCols(3) * gdot;
  a.middleRows(4, 2) = dphi;
  b.segment(4, 2) = rate;
  if (jam) a(6, jam - 1) = 1.0;

  Vec v(kDim);
  v.head(3) = gdot;
  v.tail(6) = pinv(a, tol) * b;
  return v;
}

RecoveryResult recover(const CrawlerParams& p, const ReferenceGait& ref, int jam, double duration,
                       const IntegratorConfig& cfg) {
  if (jam < 0 || jam > 6) throw Error("recover: jam must be in 0..6");
  RecoveryResult res;
  if (jam == 0) {
    res.trajectory = ref.sample(duration, cfg.dt);
  } else {
    Vec x0 = ref.state(0.0);
    const double jam_value = x0(theta_index(jam));
    const double offset = x0(0) - x0(2);
    HolonomicConstraint c;
    c.value = [&](double t, const Vec& x) {
      Vec r(8);
      r.head(4) = foot_residual(p, x);
      r(4) = x(theta_index(jam)) - jam_value;
      TemplateOutput now = template_map(p, x), want = ref.template_at(t);
      r(5) = now.r - want.r;
      r(6) = wrap_to_pi(now.alpha - want.alpha);
      r(7) = x(0) - x(2) - offset;
      return r;
    };
    c.jacobian = [&](double, const Vec& x) {
      Mat j = Mat::Zero(8, kDim);
      j.topRows(4) = foot_jacobian(p, x);
      j(4, theta_index(jam)) = 1.0;
      j.middleRows(5, 2) = template_jacobian(p, x);
      j(7, 0) = 1.0;
      j(7, 2) = -1.0;
      return j;
    };
    VectorField f = [&](double t, const Vec& x) { return recovery_velocity(p, ref, jam, t, x); };
    res.trajectory = integrate_projected(f, c, 0.0, x0, duration, cfg);
  }
  res.template_trace = template_trace(p, res.trajectory);
  res.group_trace = res.trajectory.x.leftCols(3);
  return res;
}

Mat template_trace(const CrawlerParams& p, const Trajectory& traj) {
  Mat out(traj.size(), 2);
  for (Eigen::Index k = 0; k < traj.size(); ++k) {
    TemplateOutput t = template_map(p, traj.state(k));
    out(k, 0) = t.r;
    out(k, 1) = t.alpha;
  }
  return out;
}

Mat group_velocity_trace(const Trajectory& traj) { return central_differences(traj.t, traj.x.leftCols(3)); }

double template_rms(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != 2 || b.cols() != 2) throw DimensionError("template_rms: shape mismatch");
  double s = 0.0;
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    double dr = a(k, 0) - b(k, 0), da = wrap_to_pi(a(k, 1) - b(k, 1));
    s += dr * dr + da * da;
  }
  return std::sqrt(s / static_cast<double>(a.rows()));
}

double rms_error(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("rms_error: shape mismatch");
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.rows()));
}

double max_foot_residual(const CrawlerParams& p, const Trajectory& traj) {
  double m = 0.0;
  for (Eigen::Index k = 0; k < traj.size(); ++k) {
    Vec r = foot_residual(p, traj.state(k));
    m = std::max({m, r.head(2).norm(), r.tail(2).norm()});
  }
  return m;
}

PhaseEstimator train_group_phase(const Trajectory& traj) { return PhaseEstimator::train(traj.x.leftCols(3)); }

LearnedConstraints learn_template_constraints(const CrawlerParams& p, const Trajectory& reference,
                                              const PhaseEstimator& est, int order) {
  std::vector<TemplateForm> forms{TemplateForm::fixed(Vec{{1.0, 0.0}}), TemplateForm::fixed(Vec{{0.0, 1.0}})};
  Vec phases = est.unwrapped(reference.x.leftCols(3));
  return learn_constraints(template_encoding(p), forms, reference, phases, order, est.to_json());
}

ConstraintStack build_stack(const CrawlerParams& p, const ReferenceGait& ref, int jam, const LearnedConstraints* learned,
                            const PhaseEstimator* est) {
  ConstraintStack stack(kDim);
  stack.add(physical_block(p));
  if (jam) stack.add(ConstraintBlock::single(Priority::Physical, apply_jam(jam), "jam"));
  stack.add(design_block(p, ref));
  if (learned) {
    if (!est) throw Error("build_stack: learned rows need a phase estimator");
    PhaseEstimator e = *est;
    stack.add(learned_block(template_encoding(p), *learned,
                            [e](double, const Vec& x) { return e.phase_unchecked(x.head(3)); }));
  }
  return stack;
}

Trajectory gait_commands(const ReferenceGait& ref, const Vec& mu, double knot_scale, double duration, double dt) {
  if (mu.size() != 8) throw DimensionError("gait_commands: expected 8 knot values");
  Trajectory cmd = ref.sample(duration, dt);
  cmd.v.resize(0, 0);
  TriangleWave w2{{mu(0), mu(1), mu(2), mu(3)}};
  TriangleWave w3{{mu(4), mu(5), mu(6), mu(7)}};
  for (Eigen::Index k = 0; k < cmd.size(); ++k) {
    double s = cmd.t(k) / ref.profile.period;
    cmd.x(k, theta_index(2)) += knot_scale * w2.eval(s);
    cmd.x(k, theta_index(3)) += knot_scale * w3.eval(s);
  }
  return cmd;
}

GaitSearchResult optimize_gait(const CrawlerParams& p, const ReferenceGait& ref, const GaitSearchConfig& cfg) {
  Trajectory reference = ref.sample(cfg.duration, cfg.dt);
  PhaseEstimator est = train_group_phase(ref.sample(ref.profile.period, cfg.dt));
  LearnedConstraints lc = learn_template_constraints(p, ref.sample(ref.profile.period, cfg.dt), est, cfg.order);
  // The solver's stack has no jam row: the damage is unknown to it.
  ConstraintStack stack = build_stack(p, ref, 0, &lc, &est);
  const double jam_value = reference.x(0, theta_index(cfg.jam));

  auto plant = [&](const Vec& mu) {
    return playback(p, gait_commands(ref, mu, cfg.knot_scale, cfg.duration, cfg.dt), cfg.jam, jam_value);
  };
  ViolationCostConfig vc;
  Objective cost = constraint_violation_cost(stack, plant, vc);
  ViolationCostConfig designed_only;
  designed_only.classes = {Priority::Designed};

  NMConfig nm = cfg.nm;
  if (!nm.bounds) nm.bounds = std::vector<std::pair<double, double>>(8, {-1.0, 1.0});

  GaitSearchResult res;
  Vec mu0 = Vec::Zero(8);
  res.initial_cost = cost(mu0);
  res.initial_designed_residual = violation_integral(stack, plant(mu0), designed_only);
  res.nm = nelder_mead(cost, mu0, nm);
  res.final_cost = res.nm.f;
  res.best_trajectory = plant(res.nm.x);
  res.final_designed_residual = violation_integral(stack, res.best_trajectory, designed_only);
  return res;
}

}  // namespace regait::crawler
