#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

#include <json.hpp>

#include "regait/behavior_spec.hpp"
#include "regait/crawler.hpp"
#include "regait/ctslip.hpp"
#include "regait/error.hpp"
#include "regait/manipulator.hpp"
#include "regait/trajectory.hpp"
#include "report.hpp"

namespace regait::tools {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g_stage = "startup";

void stage(const char* name) { g_stage = name; }

std::string out_dir(const CommonOptions& c, const std::string& fallback) {
  std::string dir = c.out.empty() ? fallback : c.out;
  ensure_dir(dir);
  return dir;
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto end = text.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(e.byte, text.size()));
    const int line = 1 + static_cast<int>(std::count(text.begin(), end, '\n'));
    throw ParseError(what + ": " + e.what(), line);
  }
}

crawler::cplx read_complex(const json& j, const char* key, crawler::cplx fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 2) throw ParseError(std::string("crawler params: '") + key + "' must be [re, im]", 0);
  return {v[0].get<double>(), v[1].get<double>()};
}

crawler::CrawlerParams crawler_params(const std::string& path) {
  crawler::CrawlerParams p;
  if (path.empty()) return p;
  json j = parse_json(read_text(path), path);
  try {
    p.l1 = read_complex(j, "l1", p.l1);
    p.l2 = read_complex(j, "l2", p.l2);
    p.h1 = read_complex(j, "h1", p.h1);
    p.h2 = read_complex(j, "h2", p.h2);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
  return p;
}

json crawler_params_json(const crawler::CrawlerParams& p) {
  auto c = [](crawler::cplx z) { return json::array({z.real(), z.imag()}); };
  return {{"l1", c(p.l1)}, {"l2", c(p.l2)}, {"h1", c(p.h1)}, {"h2", c(p.h2)}};
}

json common_json(const CommonOptions& c) {
  json j;
  if (c.dt) j["dt"] = *c.dt;
  if (c.tol) j["tol"] = *c.tol;
  if (c.order) j["order"] = *c.order;
  if (c.iters) j["iters"] = *c.iters;
  return j;
}

Vec column(const Mat& m, Eigen::Index c) { return m.col(c); }

// Per-form RMS of recorded eta against the learned series on the same samples.
std::vector<double> self_residuals(const crawler::CrawlerParams& p, const LearnedConstraints& lc, const Trajectory& traj,
                                   const PhaseEstimator& est) {
  Mat eta = record_eta(crawler::template_encoding(p), lc.forms, traj);
  Vec phases = est.unwrapped(traj.x.leftCols(3));
  std::vector<double> out;
  for (Eigen::Index j = 0; j < eta.cols(); ++j) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < eta.rows(); ++k) {
      double d = eta(k, j) - lc.gamma(phases(k))(j);
      s += d * d;
    }
    out.push_back(std::sqrt(s / static_cast<double>(eta.rows())));
  }
  return out;
}

}  // namespace

const std::string& current_stage() { return g_stage; }

int cmd_crawler(const CrawlerOptions& o) {
  using namespace crawler;
  stage("setup");
  const std::string dir = out_dir(o.common, "out/crawler");
  Manifest manifest("crawler", dir);
  manifest.set_seed(o.common.seed);
  manifest.set_params_file(o.common.params);
  manifest.options() = common_json(o.common);
  manifest.options()["jam"] = o.jam;
  manifest.options()["duration"] = o.duration;
  manifest.options()["search"] = o.search;

  CrawlerParams p = crawler_params(o.common.params);
  IntegratorConfig icfg;
  icfg.dt = o.common.dt.value_or(1e-3);
  if (o.common.tol) icfg.projection_tol = *o.common.tol;
  const int order = o.common.order.value_or(4);

  stage("reference");
  ReferenceGait ref(p);
  Trajectory reference = ref.sample(o.duration, icfg.dt);
  Trajectory one_cycle = ref.sample(ref.profile.period, icfg.dt);

  stage("learn");
  PhaseEstimator est = train_group_phase(one_cycle);
  LearnedConstraints lc = learn_template_constraints(p, one_cycle, est, order);
  std::vector<double> self_res = self_residuals(p, lc, one_cycle, est);

  stage("baseline");
  Trajectory baseline = playback_baseline(p, reference, o.jam, icfg);

  stage("recover");
  RecoveryResult rec = recover(p, ref, o.jam, o.duration, icfg);

  stage("metrics");
  Mat tpl_ref = template_trace(p, reference);
  Mat desired(reference.size(), 3);
  for (Eigen::Index k = 0; k < reference.size(); ++k) desired.row(k) = ref.group_velocity(reference.t(k)).transpose();
  Mat gv_base = group_velocity_trace(baseline), gv_rec = group_velocity_trace(rec.trajectory);
  const double err_base = rms_error(gv_base, desired), err_rec = rms_error(gv_rec, desired);

  double jam_dev = 0.0;
  if (o.jam) {
    const Eigen::Index c = theta_index(o.jam);
    jam_dev = (rec.trajectory.x.col(c).array() - rec.trajectory.x(0, c)).abs().maxCoeff();
  }
  ConstraintStack stack = build_stack(p, ref, o.jam, nullptr, nullptr);
  double designed = 0.0;
  for (Eigen::Index k = 0; k < rec.trajectory.size(); ++k) {
    const double t = rec.trajectory.t(k);
    Vec x = rec.trajectory.state(k);
    designed = std::max(designed, residual(stack, t, x, recovery_velocity(p, ref, o.jam, t, x), {Priority::Designed}).norm());
  }

  json metrics;
  metrics["jam"] = o.jam;
  metrics["samples"] = rec.trajectory.size();
  metrics["template_rms"] = template_rms(rec.template_trace, tpl_ref);
  metrics["group_velocity_rms_baseline"] = err_base;
  metrics["group_velocity_rms_recovered"] = err_rec;
  metrics["recovered_over_baseline"] = err_base > 0 ? err_rec / err_base : 0.0;
  metrics["max_foot_residual_reference"] = max_foot_residual(p, reference);
  metrics["max_foot_residual_baseline"] = max_foot_residual(p, baseline);
  metrics["max_foot_residual_recovered"] = max_foot_residual(p, rec.trajectory);
  metrics["max_jam_deviation"] = jam_dev;
  metrics["max_designed_residual"] = designed;
  metrics["learned_order"] = order;
  metrics["learned_fit_residual"] = json::array();
  for (const auto& s : lc.eta_models) metrics["learned_fit_residual"].push_back(s.residual_rms);
  metrics["learned_self_residual"] = self_res;
  metrics["params"] = crawler_params_json(p);

  if (o.search) {
    stage("search");
    GaitSearchConfig gs;
    gs.jam = o.jam ? o.jam : 1;
    gs.dt = o.common.dt.value_or(2e-3);
    gs.nm.max_iters = o.common.iters.value_or(100);
    gs.nm.initial_step = Vec::Constant(1, 0.5);
    GaitSearchResult sr = optimize_gait(p, ref, gs);
    write_cost_trace(join(dir, "search_cost_trace.csv"), sr.nm.trace);
    manifest.add_output("search_cost_trace.csv");
    json s;
    s["iterations"] = sr.nm.iterations;
    s["evaluations"] = sr.nm.evaluations;
    s["initial_cost"] = sr.initial_cost;
    s["final_cost"] = sr.final_cost;
    s["cost_reduction"] = sr.initial_cost > 0 ? 1.0 - sr.final_cost / sr.initial_cost : 0.0;
    s["initial_designed_residual"] = sr.initial_designed_residual;
    s["final_designed_residual"] = sr.final_designed_residual;
    s["best_knots"] = std::vector<double>(sr.nm.x.data(), sr.nm.x.data() + sr.nm.x.size());
    metrics["search"] = s;
  }

  stage("write");
  write_csv(join(dir, "reference.csv"), reference);
  write_csv(join(dir, "baseline.csv"), baseline);
  write_csv(join(dir, "recovered.csv"), rec.trajectory);
  Mat tpl(reference.size(), 5);
  tpl << reference.t, tpl_ref, rec.template_trace;
  write_table_csv(join(dir, "template.csv"), {"t", "r_reference", "alpha_reference", "r_recovered", "alpha_recovered"},
                  tpl);
  Mat gv(reference.size(), 10);
  gv << reference.t, desired, gv_base, gv_rec;
  write_table_csv(join(dir, "group_velocity.csv"),
                  {"t", "vx_desired", "vy_desired", "vtheta_desired", "vx_baseline", "vy_baseline", "vtheta_baseline",
                   "vx_recovered", "vy_recovered", "vtheta_recovered"},
                  gv);
  std::vector<Panel> panels;
  const char* names[3] = {"v_x", "v_y", "v_theta"};
  for (int c = 0; c < 3; ++c) {
    panels.push_back({names[c], "t",
                      {{"desired", "#222222", reference.t, column(desired, c)},
                       {"old gait", "#d62728", reference.t, column(gv_base, c)},
                       {"recovered", "#1f77b4", reference.t, column(gv_rec, c)}}});
  }
  write_text(join(dir, "group_velocity.svg"),
             render_svg("Group velocity, jam on joint " + std::to_string(o.jam), panels));
  write_text(join(dir, "learned.json"), lc.to_json() + "\n");
  write_json(join(dir, "metrics.json"), metrics);
  for (const char* f : {"reference.csv", "baseline.csv", "recovered.csv", "template.csv", "group_velocity.csv",
                        "group_velocity.svg", "learned.json", "metrics.json"})
    manifest.add_output(f);
  manifest.write();

  std::printf("template rms        %.3e\n", metrics["template_rms"].get<double>());
  std::printf("group vel rms       baseline %.3e  recovered %.3e\n", err_base, err_rec);
  std::printf("max foot residual   %.3e\n", metrics["max_foot_residual_recovered"].get<double>());
  if (o.jam) std::printf("max jam deviation   %.3e\n", jam_dev);
  if (o.search)
    std::printf("search cost         %.4g -> %.4g\n", metrics["search"]["initial_cost"].get<double>(),
                metrics["search"]["final_cost"].get<double>());
  return 0;
}

namespace {

using namespace ctslip;

CTSlipParams load_ctslip(const std::string& path, const CTSlipParams& fallback) {
  if (path.empty()) return fallback;
  return CTSlipParams::from_json(read_text(path));
}

CTSlipParams damaged_default() {
  CTSlipParams p;
  p.t_s = 0.035;
  return p;
}

void write_run_csv(const std::string& path, const SimResult& r) {
  Mat rows(static_cast<Eigen::Index>(r.samples.size()), 8);
  for (size_t i = 0; i < r.samples.size(); ++i) {
    const HybridState& s = r.samples[i];
    rows.row(static_cast<Eigen::Index>(i)) << s.t, s.x, s.y, s.xd, s.yd, static_cast<double>(s.mode), s.zeta, s.psi;
  }
  write_table_csv(path, {"t", "x", "y", "xd", "yd", "mode", "zeta", "psi"}, rows);
}

void write_events_csv(const std::string& path, const std::vector<SimResult>& runs) {
  std::ostringstream os;
  os << "member,kind,t,leg,x,y\n";
  for (size_t m = 0; m < runs.size(); ++m)
    for (const Event& e : runs[m].events)
      os << m << ',' << to_string(e.kind) << ',' << format_double(e.t) << ',' << e.leg << ',' << format_double(e.x)
         << ',' << format_double(e.y) << '\n';
  write_text(path, os.str());
}

Panel com_panel(const std::string& title, const std::vector<SimResult>& runs) {
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  Panel p{title, "x", {}};
  for (size_t m = 0; m < runs.size(); ++m) {
    const auto n = static_cast<Eigen::Index>(runs[m].samples.size());
    Series s{"ic " + std::to_string(m) + (runs[m].crashed ? " (crash)" : ""), palette[m % 10], Vec(n), Vec(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
      s.x(i) = runs[m].samples[static_cast<size_t>(i)].x;
      s.y(i) = runs[m].samples[static_cast<size_t>(i)].y;
    }
    p.series.push_back(std::move(s));
  }
  return p;
}

json ensemble_json(const std::vector<SimResult>& runs, int strides) {
  json j;
  j["completed"] = count_completed(runs, strides);
  j["members"] = runs.size();
  j["strides"] = json::array();
  j["crashed"] = json::array();
  for (const auto& r : runs) {
    j["strides"].push_back(r.strides);
    j["crashed"].push_back(r.crashed);
  }
  return j;
}

void write_runs(const std::string& dir, const std::string& tag, const std::vector<SimResult>& runs, Manifest& manifest) {
  for (size_t m = 0; m < runs.size(); ++m) {
    char name[64];
    std::snprintf(name, sizeof name, "%s_ic%02zu.csv", tag.c_str(), m);
    write_run_csv(join(dir, name), runs[m]);
    manifest.add_output(name);
  }
  write_events_csv(join(dir, tag + "_events.csv"), runs);
  manifest.add_output(tag + "_events.csv");
}

}  // namespace

int cmd_ctslip(const CTSlipOptions& o) {
  stage("setup");
  const std::string dir = out_dir(o.common, "out/ctslip_" + o.mode);
  Manifest manifest("ctslip " + o.mode, dir);
  manifest.set_seed(o.common.seed);
  manifest.set_params_file(o.common.params);
  manifest.options() = common_json(o.common);
  manifest.options()["ensemble"] = o.ensemble;
  manifest.options()["strides"] = o.strides;
  manifest.options()["nominal_params"] = o.nominal_params;
  const int threads = thread_budget();

  SimConfig sim;
  sim.stop_after_strides = o.strides;
  if (o.common.dt) sim.dt = *o.common.dt;
  if (o.common.tol) sim.event_tol = *o.common.tol;
  std::vector<FlightIC> ics = make_ensemble(o.ensemble, o.common.seed);

  json metrics;
  metrics["seed"] = o.common.seed;
  if (o.mode == "simulate" || o.mode == "damage") {
    stage("params");
    CTSlipParams p = load_ctslip(o.common.params, o.mode == "damage" ? damaged_default() : CTSlipParams{});
    p.validate();
    stage("simulate");
    std::vector<SimResult> runs = run_ensemble(p, ics, sim, threads);
    stage("write");
    write_runs(dir, o.mode, runs, manifest);
    metrics["params"] = json::parse(p.to_json());
    metrics["ensemble"] = ensemble_json(runs, o.strides);
    write_text(join(dir, "com.svg"), render_svg("CT-SLIP hip paths (" + o.mode + ")", {com_panel("hip height", runs)}));
    manifest.add_output("com.svg");
    std::printf("%s: %d of %zu runs completed %d strides\n", o.mode.c_str(), count_completed(runs, o.strides),
                runs.size(), o.strides);
  } else {
    stage("params");
    CTSlipParams nominal = load_ctslip(o.nominal_params, CTSlipParams{});
    CTSlipParams damaged = load_ctslip(o.common.params, damaged_default());
    nominal.validate();
    damaged.validate();
    stage("cost model");
    CostModel model = build_cost_model(nominal, ics, 1.0, 0.1, o.common.order.value_or(8), sim, threads);
    stage("optimize");
    NMConfig nm;
    nm.max_iters = o.common.iters.value_or(200);
    nm.initial_step = Vec::Constant(1, 0.5);
    RecoveryResult rr = recover_parameters(damaged, ics, model, SearchSpace{}, nm, threads);
    stage("evaluate");
    std::vector<SimResult> before = run_ensemble(damaged, ics, sim, threads);
    std::vector<SimResult> after = run_ensemble(rr.best, ics, sim, threads);
    stage("write");
    write_cost_trace(join(dir, "cost_trace.csv"), rr.nm.trace);
    manifest.add_output("cost_trace.csv");
    write_text(join(dir, "recovered_params.json"), rr.best.to_json() + "\n");
    manifest.add_output("recovered_params.json");
    write_runs(dir, "damaged", before, manifest);
    write_runs(dir, "recovered", after, manifest);
    write_text(join(dir, "com.svg"), render_svg("CT-SLIP hip paths before and after recovery",
                                                {com_panel("damaged", before), com_panel("recovered", after)}));
    manifest.add_output("com.svg");
    metrics["crash_penalty"] = model.crash_penalty;
    metrics["damaged_cost"] = rr.damaged_cost;
    metrics["recovered_cost"] = rr.recovered_cost;
    metrics["iterations"] = rr.nm.iterations;
    metrics["evaluations"] = rr.nm.evaluations;
    metrics["damaged"] = ensemble_json(before, o.strides);
    metrics["recovered"] = ensemble_json(after, o.strides);
    metrics["recovered_params"] = json::parse(rr.best.to_json());
    std::printf("cost %.6g -> %.6g after %d iterations\n", rr.damaged_cost, rr.recovered_cost, rr.nm.iterations);
    std::printf("completed %d strides: damaged %d, recovered %d of %zu\n", o.strides,
                count_completed(before, o.strides), count_completed(after, o.strides), ics.size());
  }
  write_json(join(dir, "metrics.json"), metrics);
  manifest.add_output("metrics.json");
  manifest.write();
  return 0;
}

int cmd_manipulator(const ManipulatorOptions& o) {
  using namespace manipulator;
  stage("setup");
  const std::string dir = out_dir(o.common, "out/manipulator");
  Manifest manifest("manipulator", dir);
  manifest.set_seed(o.common.seed);
  manifest.options() = common_json(o.common);
  manifest.options()["duration"] = o.duration;
  manifest.options()["strength"] = o.strength;
  IntegratorConfig cfg = default_integrator();
  if (o.common.dt) cfg.dt = *o.common.dt;
  const double tol = o.common.tol.value_or(1e-9);

  ManipulatorModel nominal = toy_model(), perturbed = perturbed_toy({}, o.strength);
  TangentialInput input(o.common.seed);
  const Vec q0 = Vec::Unit(2, 0), qd0 = Vec::Zero(2);

  stage("identity");
  Scenario same = run_scenario(nominal, nominal, input, q0, qd0, o.duration, cfg);
  stage("perturbed");
  Scenario sc = run_scenario(nominal, perturbed, input, q0, qd0, o.duration, cfg);

  stage("gauge");
  std::mt19937_64 rng(o.common.seed);
  std::normal_distribution<double> nd;
  Mat gauge(2, 2);
  do {
    for (int i = 0; i < 4; ++i) gauge(i / 2, i % 2) = nd(rng);
  } while (std::abs(gauge.determinant()) < 0.1);
  Trajectory eta = sc.eta_grid;
  const Eigen::Index coarse = sc.nominal.size();
  eta.t = sc.eta_grid.t(Eigen::seq(0, 2 * (coarse - 1), 2));
  eta.x = sc.eta_grid.x(Eigen::seq(0, 2 * (coarse - 1), 2), Eigen::all);
  const bool gauge_ok = gauge_invariance_check(perturbed, gauge, sc.nominal, eta, tol);
  double gauge_du = 0.0;
  for (Eigen::Index k = 0; k < sc.nominal.size(); ++k) {
    Vec st = sc.nominal.state(k), e = eta.state(k);
    Vec u1 = redesign_input(perturbed, e, st.head(2), st.tail(2)).u;
    Vec u2 = redesign_input(perturbed, gauge * e, st.head(2), st.tail(2), gauge).u;
    gauge_du = std::max(gauge_du, (u1 - u2).lpNorm<Eigen::Infinity>());
  }

  stage("write");
  write_csv(join(dir, "nominal.csv"), sc.nominal);
  write_csv(join(dir, "perturbed.csv"), sc.perturbed);
  write_csv(join(dir, "eta.csv"), eta, "eta");
  for (const char* f : {"nominal.csv", "perturbed.csv", "eta.csv"}) manifest.add_output(f);

  struct Row {
    const char* name;
    double value;
    double threshold;
    bool pass;
  };
  std::vector<Row> rows{{"identity max |dq|", same.max_deviation, 1e-6, same.max_deviation < 1e-6},
                        {"perturbed max |dq|", sc.max_deviation, 1e-6, sc.max_deviation < 1e-6},
                        {"gauge max |du|", gauge_du, tol, gauge_ok}};
  std::printf("%-22s %-12s %-10s %s\n", "scenario", "value", "threshold", "result");
  bool all = true;
  json metrics;
  for (const Row& r : rows) {
    std::printf("%-22s %-12.3e %-10.1e %s\n", r.name, r.value, r.threshold, r.pass ? "PASS" : "FAIL");
    all = all && r.pass;
  }
  metrics["identity_max_deviation"] = same.max_deviation;
  metrics["perturbed_max_deviation"] = sc.max_deviation;
  metrics["perturbed_max_match_residual"] = sc.max_match_residual;
  metrics["gauge"] = {{gauge(0, 0), gauge(0, 1)}, {gauge(1, 0), gauge(1, 1)}};
  metrics["gauge_invariant"] = gauge_ok;
  metrics["gauge_max_input_difference"] = gauge_du;
  metrics["all_pass"] = all;
  write_json(join(dir, "metrics.json"), metrics);
  manifest.add_output("metrics.json");
  manifest.write();
  return all ? 0 : 3;
}

int cmd_learn(const LearnOptions& o) {
  using namespace crawler;
  stage("setup");
  const std::string dir = out_dir(o.common, "out/learn");
  Manifest manifest("learn", dir);
  manifest.set_seed(o.common.seed);
  manifest.set_params_file(o.common.params);
  manifest.options() = common_json(o.common);
  manifest.options()["input"] = o.input;
  CrawlerParams p = crawler_params(o.common.params);
  const int order = o.common.order.value_or(4);

  stage("read");
  Trajectory traj = read_csv_file(o.input);
  if (traj.dim() != kDim)
    throw UsageError("learn: expected a crawler trajectory with " + std::to_string(kDim) + " state columns, got " +
                     std::to_string(traj.dim()));
  stage("learn");
  PhaseEstimator est = train_group_phase(traj);
  LearnedConstraints lc = learn_template_constraints(p, traj, est, order);
  std::vector<double> self_res = self_residuals(p, lc, traj, est);

  stage("write");
  write_text(join(dir, "learned.json"), lc.to_json() + "\n");
  json metrics;
  metrics["order"] = order;
  metrics["samples"] = traj.size();
  metrics["fit_residual"] = json::array();
  for (const auto& s : lc.eta_models) metrics["fit_residual"].push_back(s.residual_rms);
  metrics["self_residual"] = self_res;
  write_json(join(dir, "metrics.json"), metrics);
  manifest.add_output("learned.json");
  manifest.add_output("metrics.json");
  manifest.write();
  const char* form[2] = {"dr", "dalpha"};
  for (size_t j = 0; j < self_res.size(); ++j)
    std::printf("%-7s fit residual %.3e  self residual %.3e\n", form[j], lc.eta_models[j].residual_rms, self_res[j]);
  return 0;
}

int cmd_rank(const RankOptions& o) {
  stage("setup");
  if (o.k < 0 || o.k >= o.n) throw UsageError("rank: need 0 <= k < n");
  if (o.trials < 1) throw UsageError("rank: trials must be positive");
  const std::string dir = out_dir(o.common, "out/rank");
  Manifest manifest("rank", dir);
  manifest.set_seed(o.common.seed);
  manifest.options() = common_json(o.common);
  manifest.options()["n"] = o.n;
  manifest.options()["k"] = o.k;
  manifest.options()["trials"] = o.trials;
  const int bound = transversality_bound(o.n, o.k);
  const int max_count = o.max_count > 0 ? o.max_count : bound + 1;
  const double tol = o.common.tol.value_or(kDefaultTol);

  stage("study");
  std::printf("n=%d k=%d trials=%d  bound: N > %d/%d, smallest N = %d\n", o.n, o.k, o.trials, o.n, o.n - o.k, bound);
  std::printf("%-4s %-10s %-9s %s\n", "N", "successes", "rate", "N > n/(n-k)");
  Mat rows(max_count, 4);
  json table = json::array();
  for (int count = 1; count <= max_count; ++count) {
    TransversalityStudy s = transversality_study(o.n, o.k, count, o.trials, o.common.seed, tol);
    const bool above = count >= bound;
    std::printf("%-4d %-10d %-9.4f %s\n", count, s.successes, s.success_rate(), above ? "yes" : "no");
    rows.row(count - 1) << count, s.successes, s.success_rate(), above ? 1.0 : 0.0;
    table.push_back({{"count", count}, {"successes", s.successes}, {"rate", s.success_rate()}, {"above_bound", above}});
  }
  stage("write");
  write_table_csv(join(dir, "rank.csv"), {"count", "successes", "rate", "above_bound"}, rows);
  write_json(join(dir, "metrics.json"), {{"n", o.n}, {"k", o.k}, {"trials", o.trials}, {"bound", bound}, {"table", table}});
  manifest.add_output("rank.csv");
  manifest.add_output("metrics.json");
  manifest.write();
  return 0;
}

}  // namespace regait::tools
