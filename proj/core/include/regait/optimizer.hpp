#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "regait/behavior_spec.hpp"
#include "regait/linalg.hpp"
#include "regait/trajectory.hpp"

namespace regait {

using Objective = std::function<double(const Vec&)>;

struct NMConfig {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  Vec initial_step;  // size 1 broadcasts; empty means 0.1 * range (or 0.1 unbounded)
  int max_iters = 500;
  double f_tol = 1e-14;
  double x_tol = 1e-14;
  std::optional<std::vector<std::pair<double, double>>> bounds;
};

struct TraceEntry {
  int iter = 0;
  Vec candidate;  // last point evaluated in this iteration
  double cost = 0.0;
  double best = 0.0;
};

struct NMResult {
  Vec x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  std::vector<TraceEntry> trace;  // entry 0 is the start point
};

NMResult nelder_mead(const Objective& f, const Vec& x0, const NMConfig& cfg = {});

void write_cost_trace(const std::string& path, const std::vector<TraceEntry>& trace);

double trapezoid(const Vec& t, const Vec& y);

struct ViolationCostConfig {
  double lambda = 1.0;
  std::function<double(const Vec& params)> input_cost;  // R, zero when empty
  std::vector<Priority> classes{Priority::Designed, Priority::Learned};
  double failure_penalty = 1e6;
  double stride_period = 0.0;  // > 0 enables per-stride windowing
  int window = 0;
  std::function<void(const std::string&)> on_failure;  // receives the provider error
};

// Integrand |Omega_{D,L} xdot - gamma_{D,L}|^2 per sample, xdot by central differences.
Vec violation_integrand(const ConstraintStack& stack, const Trajectory& traj,
                        const std::vector<Priority>& classes = {Priority::Designed, Priority::Learned});

// lambda * integral of the integrand (trapezoid), or with windowing the mean
// of the last `window` per-stride integrals.
double violation_integral(const ConstraintStack& stack, const Trajectory& traj, const ViolationCostConfig& cfg);

Objective constraint_violation_cost(ConstraintStack stack, std::function<Trajectory(const Vec&)> provider,
                                    ViolationCostConfig cfg = {});

}  // namespace regait
