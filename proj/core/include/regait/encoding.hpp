#pragma once

#include <functional>
#include <string>
#include <vector>

#include "regait/behavior_spec.hpp"
#include "regait/linalg.hpp"
#include "regait/signal.hpp"
#include "regait/trajectory.hpp"

namespace regait {

// Output map phi: R^n -> R^p. Without an analytic Jacobian, central
// differences with h = 1e-6 * max(1, |x|) are used.
struct EncodingMap {
  int input_dim = 0;
  int output_dim = 0;
  std::function<Vec(const Vec&)> outputs;
  std::function<Mat(const Vec&)> jacobian;

  Vec operator()(const Vec& x) const { return outputs(x); }
  Mat jac(const Vec& x) const;
};

Mat finite_difference_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x);

// A template 1-form, constant or depending on the template point phi(x).
struct TemplateForm {
  Vec constant;
  std::function<Vec(const Vec& y)> field;

  Vec at(const Vec& y) const { return field ? field(y) : constant; }
  static TemplateForm fixed(Vec w) { return {std::move(w), {}}; }
};

// omega^T * Dphi(x).
Vec pullback(const EncodingMap& map, const Vec& omega, const Vec& x);

// eta(k, j) = omega_j(phi(x_k)) . Dphi(x_k) . xdot_k, xdot by central differences.
Mat record_eta(const EncodingMap& map, const std::vector<TemplateForm>& forms, const Trajectory& traj);

struct LearnedConstraints {
  std::vector<TemplateForm> forms;
  std::vector<FourierSeries> eta_models;
  std::string phase_model;  // serialized PhaseEstimator or a named convention

  Vec gamma(double phase) const;
  std::string to_json() const;
  static LearnedConstraints from_json(const std::string& text);
};

// phases: unwrapped phase per trajectory sample (strictly monotone).
LearnedConstraints learn_constraints(const EncodingMap& map, const std::vector<TemplateForm>& forms,
                                     const Trajectory& traj, const Vec& phases, int order,
                                     std::string phase_model = {});

Vec learned_gamma(const LearnedConstraints& lc, double phase);

// Learned block for a stack: rows omega_j(phi(x)) Dphi(x), values eta_j(phase(t, x)).
ConstraintBlock learned_block(const EncodingMap& map, const LearnedConstraints& lc,
                              std::function<double(double t, const Vec& x)> phase, std::string name = "learned");

}  // namespace regait
