#include "regait/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "regait/error.hpp"
#include "regait/signal.hpp"

namespace regait {

namespace {

Vec clip(const Vec& x, const NMConfig& cfg) {
  if (!cfg.bounds) return x;
  Vec y = x;
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = std::clamp(y(i), (*cfg.bounds)[i].first, (*cfg.bounds)[i].second);
  return y;
}

}  // namespace

NMResult nelder_mead(const Objective& f, const Vec& x0, const NMConfig& cfg) {
  const auto n = x0.size();
  if (n == 0) throw Error("nelder_mead: empty parameter vector");
  if (!(cfg.reflection > 0) || !(cfg.expansion > 1) || !(cfg.contraction > 0 && cfg.contraction < 1) ||
      !(cfg.shrink > 0 && cfg.shrink < 1))
    throw Error("nelder_mead: coefficients out of range");
  if (cfg.bounds && static_cast<Eigen::Index>(cfg.bounds->size()) != n) throw DimensionError("nelder_mead: bounds size != dim");

  Vec step(n);
  if (cfg.initial_step.size() == 1) {
    step.setConstant(cfg.initial_step(0));
  } else if (cfg.initial_step.size() == n) {
    step = cfg.initial_step;
  } else if (cfg.initial_step.size() == 0) {
    for (Eigen::Index i = 0; i < n; ++i) step(i) = cfg.bounds ? 0.1 * ((*cfg.bounds)[i].second - (*cfg.bounds)[i].first) : 0.1;
  } else {
    throw DimensionError("nelder_mead: initial_step size must be 0, 1 or dim");
  }

  NMResult res;
  auto eval = [&](const Vec& x) {
    ++res.evaluations;
    double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<Vec> simplex(n + 1);
  std::vector<double> fv(n + 1);
  simplex[0] = clip(x0, cfg);
  fv[0] = eval(simplex[0]);
  if (!std::isfinite(fv[0])) throw NumericError("nelder_mead: objective not finite at x0");
  double best = fv[0];
  res.trace.push_back({0, simplex[0], fv[0], best});
  Vec last;
  double last_f = fv[0];
  auto track = [&](const Vec& x, double v) {
    last = x;
    last_f = v;
    best = std::min(best, v);
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    Vec x = simplex[0];
    x(i) += step(i);
    if (cfg.bounds && x(i) > (*cfg.bounds)[i].second) x(i) = simplex[0](i) - step(i);
    simplex[i + 1] = clip(x, cfg);
    fv[i + 1] = eval(simplex[i + 1]);
    track(simplex[i + 1], fv[i + 1]);
  }

  std::vector<int> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    std::vector<Vec> s2(n + 1);
    std::vector<double> f2(n + 1);
    for (Eigen::Index i = 0; i <= n; ++i) {
      s2[i] = simplex[order[i]];
      f2[i] = fv[order[i]];
    }
    simplex = std::move(s2);
    fv = std::move(f2);
  };

  sort_simplex();
  for (int it = 1; it <= cfg.max_iters; ++it) {
    double fspread = std::abs(fv[n] - fv[0]);
    double xspread = 0.0;
    for (Eigen::Index i = 1; i <= n; ++i) xspread = std::max(xspread, (simplex[i] - simplex[0]).lpNorm<Eigen::Infinity>());
    if (fspread <= cfg.f_tol && xspread <= cfg.x_tol) break;

    Vec centroid = Vec::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) centroid += simplex[i];
    centroid /= static_cast<double>(n);

    Vec xr = clip(centroid + cfg.reflection * (centroid - simplex[n]), cfg);
    double fr = eval(xr);
    track(xr, fr);
    if (fr < fv[0]) {
      Vec xe = clip(centroid + cfg.expansion * (xr - centroid), cfg);
      double fe = eval(xe);
      track(xe, fe);
      if (fe < fr) {
        simplex[n] = xe;
        fv[n] = fe;
      } else {
        simplex[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      simplex[n] = xr;
      fv[n] = fr;
    } else {
      bool outside = fr < fv[n];
      Vec xc = outside ? clip(centroid + cfg.contraction * (xr - centroid), cfg)
                       : clip(centroid + cfg.contraction * (simplex[n] - centroid), cfg);
      double fc = eval(xc);
      track(xc, fc);
      if (fc < (outside ? fr : fv[n])) {
        simplex[n] = xc;
        fv[n] = fc;
      } else {
        for (Eigen::Index i = 1; i <= n; ++i) {
          simplex[i] = clip(simplex[0] + cfg.shrink * (simplex[i] - simplex[0]), cfg);
          fv[i] = eval(simplex[i]);
          track(simplex[i], fv[i]);
        }
      }
    }
    sort_simplex();
    res.iterations = it;
    res.trace.push_back({it, last, last_f, best});
  }
  res.x = simplex[0];
  res.f = fv[0];
  return res;
}

void write_cost_trace(const std::string& path, const std::vector<TraceEntry>& trace) {
  std::ofstream os(path);
  if (!os) throw std::ios_base::failure("cannot open " + path + " for writing");
  os << "iter,cost,best\n";
  for (const auto& e : trace) os << e.iter << ',' << format_double(e.cost) << ',' << format_double(e.best) << '\n';
  if (!os) throw std::ios_base::failure("write failed: " + path);
}

double trapezoid(const Vec& t, const Vec& y) {
  if (t.size() != y.size()) throw DimensionError("trapezoid: length mismatch");
  double s = 0.0;
  for (Eigen::Index i = 1; i < t.size(); ++i) s += 0.5 * (t(i) - t(i - 1)) * (y(i) + y(i - 1));
  return s;
}

Vec violation_integrand(const ConstraintStack& stack, const Trajectory& traj, const std::vector<Priority>& classes) {
  Mat v = velocities(traj);
  Vec out(traj.size());
  for (Eigen::Index k = 0; k < traj.size(); ++k)
    out(k) = residual(stack, traj.t(k), traj.state(k), v.row(k).transpose(), classes).squaredNorm();
  return out;
}

double violation_integral(const ConstraintStack& stack, const Trajectory& traj, const ViolationCostConfig& cfg) {
  Vec integrand = violation_integrand(stack, traj, cfg.classes);
  if (cfg.stride_period <= 0.0 || cfg.window <= 0) return cfg.lambda * trapezoid(traj.t, integrand);

  std::vector<double> per_stride;
  const double t0 = traj.t(0);
  Eigen::Index start = 0;
  for (Eigen::Index k = 1; k < traj.size(); ++k) {
    int stride_a = static_cast<int>(std::floor((traj.t(start) - t0) / cfg.stride_period + 1e-9));
    int stride_b = static_cast<int>(std::floor((traj.t(k) - t0) / cfg.stride_period + 1e-9));
    if (stride_b != stride_a || k + 1 == traj.size()) {
      auto len = k - start + 1;
      per_stride.push_back(cfg.lambda * trapezoid(traj.t.segment(start, len), integrand.segment(start, len)));
      start = k;
    }
  }
  return windowed_mean(per_stride, cfg.window);
}

Objective constraint_violation_cost(ConstraintStack stack, std::function<Trajectory(const Vec&)> provider,
                                    ViolationCostConfig cfg) {
  return [stack = std::move(stack), provider = std::move(provider), cfg = std::move(cfg)](const Vec& p) {
    double r = cfg.input_cost ? cfg.input_cost(p) : 0.0;
    try {
      double j = violation_integral(stack, provider(p), cfg);
      return std::isfinite(j) ? r + j : cfg.failure_penalty;
    } catch (const Error& e) {
      if (cfg.on_failure) cfg.on_failure(e.what());
      return cfg.failure_penalty;
    }
  };
}

}  // namespace regait
