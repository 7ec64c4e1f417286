#include "regait/behavior_spec.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <json.hpp>

#include "regait/error.hpp"

namespace regait {

using nlohmann::json;

const char* to_string(Priority p) {
  switch (p) {
    case Priority::Physical: return "physical";
    case Priority::Designed: return "designed";
    case Priority::Learned: return "learned";
  }
  return "?";
}

Priority priority_from_string(const std::string& s) {
  if (s == "physical") return Priority::Physical;
  if (s == "designed") return Priority::Designed;
  if (s == "learned") return Priority::Learned;
  throw ParseError("unknown constraint class '" + s + "'", 0);
}

ConstraintBlock ConstraintBlock::constant(Priority p, Mat omega, Vec gamma, std::string name) {
  if (omega.rows() != gamma.size()) throw DimensionError("constant block '" + name + "': omega rows != gamma size");
  ConstraintBlock b;
  b.priority = p;
  b.name = std::move(name);
  b.constant_rows = BlockValue{omega, gamma};
  b.rows = [v = BlockValue{std::move(omega), std::move(gamma)}](double, const Vec&) { return v; };
  return b;
}

ConstraintBlock ConstraintBlock::fourier_in_time(Priority p, Mat omega, std::vector<FourierSeries> eta, double period,
                                                 std::string name) {
  if (omega.rows() != static_cast<Eigen::Index>(eta.size()))
    throw DimensionError("fourier block '" + name + "': omega rows != series count");
  if (!(period > 0)) throw Error("fourier block '" + name + "': period must be positive");
  ConstraintBlock b;
  b.priority = p;
  b.name = std::move(name);
  b.series_rows = SeriesRows{omega, eta, period};
  b.rows = [s = *b.series_rows](double t, const Vec&) {
    double phase = wrap_to_2pi(2.0 * std::numbers::pi * t / s.period);
    Vec g(s.eta.size());
    for (size_t i = 0; i < s.eta.size(); ++i) g(i) = s.eta[i].eval(phase);
    return BlockValue{s.omega, g};
  };
  return b;
}

ConstraintBlock ConstraintBlock::single(Priority p, const ConstraintRow& row, std::string name) {
  return constant(p, row.coefficients.transpose(), Vec::Constant(1, row.value), std::move(name));
}

void ConstraintStack::add(ConstraintBlock block) {
  auto pos = std::upper_bound(blocks_.begin(), blocks_.end(), block.priority,
                              [](Priority p, const ConstraintBlock& b) { return p < b.priority; });
  blocks_.insert(pos, std::move(block));
}

Evaluation evaluate(const ConstraintStack& stack, double t, const Vec& x) {
  const int n = stack.ambient_dim();
  if (x.size() != n) throw DimensionError("evaluate: state has " + std::to_string(x.size()) + " entries, stack expects " + std::to_string(n));
  std::vector<BlockValue> parts;
  parts.reserve(stack.blocks().size());
  Eigen::Index m = 0;
  for (const auto& b : stack.blocks()) {
    BlockValue bv = b.rows(t, x);
    if (bv.omega.rows() > 0 && bv.omega.cols() != n)
      throw DimensionError("block '" + b.name + "' has " + std::to_string(bv.omega.cols()) + " columns, expected " + std::to_string(n));
    if (bv.omega.rows() != bv.gamma.size()) throw DimensionError("block '" + b.name + "': omega rows != gamma size");
    m += bv.omega.rows();
    parts.push_back(std::move(bv));
  }
  Evaluation ev;
  ev.omega.resize(m, n);
  ev.gamma.resize(m);
  ev.row_class.reserve(m);
  Eigen::Index r = 0;
  for (size_t i = 0; i < parts.size(); ++i) {
    const auto k = parts[i].omega.rows();
    if (k == 0) continue;
    ev.omega.middleRows(r, k) = parts[i].omega;
    ev.gamma.segment(r, k) = parts[i].gamma;
    for (Eigen::Index j = 0; j < k; ++j) ev.row_class.push_back(stack.blocks()[i].priority);
    r += k;
  }
  return ev;
}

Vec residual(const ConstraintStack& stack, double t, const Vec& x, const Vec& v, const std::vector<Priority>& classes) {
  if (v.size() != stack.ambient_dim()) throw DimensionError("residual: velocity dimension mismatch");
  Evaluation ev = evaluate(stack, t, x);
  std::vector<Eigen::Index> keep;
  for (size_t i = 0; i < ev.row_class.size(); ++i)
    if (std::find(classes.begin(), classes.end(), ev.row_class[i]) != classes.end()) keep.push_back(static_cast<Eigen::Index>(i));
  Vec r(keep.size());
  for (size_t i = 0; i < keep.size(); ++i) r(i) = ev.omega.row(keep[i]).dot(v) - ev.gamma(keep[i]);
  return r;
}

std::vector<int> select_active_rows(const Evaluation& ev, int n, double tol) {
  std::vector<int> active;
  Mat kept(0, n);
  int rank = 0;
  for (Eigen::Index i = 0; i < ev.omega.rows() && rank < n; ++i) {
    Mat trial(kept.rows() + 1, n);
    trial.topRows(kept.rows()) = kept;
    trial.row(kept.rows()) = ev.omega.row(i);
    int r = numerical_rank(trial, tol);
    if (r > rank) {
      kept = std::move(trial);
      rank = r;
      active.push_back(static_cast<int>(i));
    }
  }
  return active;
}

std::vector<int> select_active_rows(const ConstraintStack& stack, double t, const Vec& x, double tol) {
  return select_active_rows(evaluate(stack, t, x), stack.ambient_dim(), tol);
}

namespace {

Mat rows_of_class(const Evaluation& ev, Priority p) {
  std::vector<Eigen::Index> idx;
  for (size_t i = 0; i < ev.row_class.size(); ++i)
    if (ev.row_class[i] == p) idx.push_back(static_cast<Eigen::Index>(i));
  Mat m(idx.size(), ev.omega.cols());
  for (size_t i = 0; i < idx.size(); ++i) m.row(i) = ev.omega.row(idx[i]);
  return m;
}

Mat take_rows(const Mat& a, const std::vector<int>& idx) {
  Mat m(idx.size(), a.cols());
  for (size_t i = 0; i < idx.size(); ++i) m.row(i) = a.row(idx[i]);
  return m;
}

RankReport report_from(const Evaluation& ev, int n, const std::vector<int>& active, double tol) {
  RankReport rep;
  rep.rank_physical = numerical_rank(rows_of_class(ev, Priority::Physical), tol);
  rep.rank_designed = numerical_rank(rows_of_class(ev, Priority::Designed), tol);
  rep.rank_learned = numerical_rank(rows_of_class(ev, Priority::Learned), tol);
  rep.condition_number = condition_number(take_rows(ev.omega, active), tol);
  rep.damage_condition_holds = completion_check(n, rep.rank_physical, rep.rank_designed, rep.rank_learned);
  return rep;
}

}  // namespace

RankReport rank_report(const ConstraintStack& stack, double t, const Vec& x, double tol) {
  Evaluation ev = evaluate(stack, t, x);
  return report_from(ev, stack.ambient_dim(), select_active_rows(ev, stack.ambient_dim(), tol), tol);
}

VelocitySolution solve_velocity(const ConstraintStack& stack, double t, const Vec& x, double tol,
                                bool allow_underdetermined) {
  const int n = stack.ambient_dim();
  Evaluation ev = evaluate(stack, t, x);
  VelocitySolution sol;
  sol.active = select_active_rows(ev, n, tol);
  sol.report = report_from(ev, n, sol.active, tol);
  Mat a = take_rows(ev.omega, sol.active);
  Vec g(sol.active.size());
  for (size_t i = 0; i < sol.active.size(); ++i) g(i) = ev.gamma(sol.active[i]);

  if (static_cast<int>(sol.active.size()) < n) {
    if (!allow_underdetermined)
      throw RankDeficientError("solve_velocity: " + std::to_string(sol.active.size()) + " independent rows for " +
                                   std::to_string(n) + " unknowns",
                               sol.report);
    sol.underdetermined = true;
    sol.v = pinv(a, tol) * g;
  } else {
    sol.v = a.fullPivLu().solve(g);
  }
  sol.ill_conditioned = sol.report.condition_number > 1.0 / tol;
  return sol;
}

bool completion_check(int n, int rp, int rd, int rl) {
  if (n < 0 || rp < 0 || rd < 0 || rl < 0) throw Error("completion_check: arguments must be non-negative");
  return n - rl <= rp + rd && rp + rd <= n;
}

BlockValue control_affine_to_spec(const Vec& f, const Mat& g, double tol) {
  if (g.rows() != f.size()) throw DimensionError("control_affine_to_spec: G rows != dim f");
  const auto n = f.size();
  Mat omega = Mat::Identity(n, n) - g * pinv(g, tol);
  return {omega, omega * f};
}

double rank_gain_rate(const std::function<Mat(const Vec&)>& a, const std::vector<Vec>& samples,
                      const std::function<Mat(const Vec&)>& extra_rows, double tol) {
  if (samples.empty()) throw Error("rank_gain_rate: no samples");
  const auto n = samples.front().size();
  int hits = 0;
  for (const auto& x : samples) {
    Mat base = a(x);
    if (base.rows() > 0 && base.cols() != n) throw DimensionError("rank_gain_rate: A has wrong column count");
    int k = numerical_rank(base, tol);
    if (k >= n) throw Error("rank_gain_rate: rank A = " + std::to_string(k) + " leaves no room to augment in dimension " + std::to_string(n));
    Mat extra = extra_rows(x);
    Mat stacked(base.rows() + extra.rows(), n);
    stacked << base, extra;
    if (numerical_rank(stacked, tol) >= k + 1) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

std::function<Mat(const Vec&)> random_smooth_gradients(int n, int count, std::uint64_t seed, int features) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * std::numbers::pi);
  struct Feature {
    double c;
    Vec w;
    double b;
  };
  std::vector<std::vector<Feature>> fns(count);
  for (auto& fn : fns) {
    for (int f = 0; f < features; ++f) {
      Feature ft;
      ft.c = normal(rng);
      ft.w.resize(n);
      for (int i = 0; i < n; ++i) ft.w(i) = normal(rng);
      ft.b = unif(rng);
      fn.push_back(std::move(ft));
    }
  }
  return [fns, n](const Vec& x) {
    Mat rows = Mat::Zero(fns.size(), n);
    for (size_t j = 0; j < fns.size(); ++j)
      for (const auto& ft : fns[j]) rows.row(j) -= ft.c * std::sin(ft.w.dot(x) + ft.b) * ft.w.transpose();
    return rows;
  };
}

double augment_random_rank(const std::function<Mat(const Vec&)>& a, const std::vector<Vec>& samples, int count,
                           std::uint64_t seed, double tol) {
  if (count < 1) throw Error("augment_random_rank: need at least one extra row");
  if (samples.empty()) throw Error("augment_random_rank: no samples");
  const int n = static_cast<int>(samples.front().size());
  return rank_gain_rate(a, samples, random_smooth_gradients(n, count, seed), tol);
}

int transversality_bound(int n, int k) {
  if (k < 0 || k >= n) throw Error("transversality_bound: need 0 <= k < n");
  return n / (n - k) + 1;
}

TransversalityStudy transversality_study(int n, int k, int count, int trials, std::uint64_t seed, double tol) {
  if (n < 1 || k < 1 || k >= n) throw Error("transversality_study: need 1 <= k < n");
  if (trials < 1) throw Error("transversality_study: need at least one trial");
  TransversalityStudy st{n, k, count, trials, 0};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < trials; ++i) {
    const std::uint64_t base_seed = rng(), extra_seed = rng();
    Vec x(n);
    for (int j = 0; j < n; ++j) x(j) = normal(rng);
    auto base = random_smooth_gradients(n, k, base_seed);
    // A degenerate base draw is not a failure of augmentation; redraw the point.
    for (int retry = 0; retry < 16 && numerical_rank(base(x), tol) < k; ++retry)
      for (int j = 0; j < n; ++j) x(j) = normal(rng);
    if (augment_random_rank(base, {x}, count, extra_seed, tol) >= 1.0) ++st.successes;
  }
  return st;
}

std::string ConstraintStack::to_json() const {
  json j;
  j["ambient_dim"] = n_;
  j["blocks"] = json::array();
  for (const auto& b : blocks_) {
    json jb;
    jb["class"] = to_string(b.priority);
    if (!b.name.empty()) jb["name"] = b.name;
    json rows = json::array();
    if (b.constant_rows) {
      for (Eigen::Index i = 0; i < b.constant_rows->omega.rows(); ++i) {
        Vec r = b.constant_rows->omega.row(i).transpose();
        rows.push_back({{"coefficients", std::vector<double>(r.data(), r.data() + r.size())}, {"value", b.constant_rows->gamma(i)}});
      }
    } else if (b.series_rows) {
      jb["period"] = b.series_rows->period;
      for (Eigen::Index i = 0; i < b.series_rows->omega.rows(); ++i) {
        Vec r = b.series_rows->omega.row(i).transpose();
        rows.push_back({{"coefficients", std::vector<double>(r.data(), r.data() + r.size())},
                        {"eta", json::parse(b.series_rows->eta[i].to_json())}});
      }
    } else {
      throw Error("stack to_json: block '" + b.name + "' is not serializable (function-valued rows)");
    }
    jb["rows"] = std::move(rows);
    j["blocks"].push_back(std::move(jb));
  }
  return j.dump(2);
}

ConstraintStack ConstraintStack::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), 0);
  }
  try {
    const int n = j.at("ambient_dim").get<int>();
    ConstraintStack stack(n);
    for (const auto& jb : j.at("blocks")) {
      Priority p = priority_from_string(jb.at("class").get<std::string>());
      std::string name = jb.value("name", std::string{});
      const auto& rows = jb.at("rows");
      Mat omega(rows.size(), n);
      bool series = jb.contains("period");
      Vec gamma(rows.size());
      std::vector<FourierSeries> eta;
      for (size_t i = 0; i < rows.size(); ++i) {
        auto c = rows[i].at("coefficients").get<std::vector<double>>();
        if (static_cast<int>(c.size()) != n)
          throw ParseError("block '" + name + "' row " + std::to_string(i) + " has " + std::to_string(c.size()) + " coefficients", 0);
        for (int k = 0; k < n; ++k) omega(i, k) = c[k];
        if (series)
          eta.push_back(FourierSeries::from_json(rows[i].at("eta").dump()));
        else
          gamma(i) = rows[i].at("value").get<double>();
      }
      if (series)
        stack.add(ConstraintBlock::fourier_in_time(p, omega, std::move(eta), jb.at("period").get<double>(), name));
      else
        stack.add(ConstraintBlock::constant(p, omega, gamma, name));
    }
    return stack;
  } catch (const json::exception& e) {
    throw ParseError(std::string("constraint stack: ") + e.what(), 0);
  }
}

}  // namespace regait
