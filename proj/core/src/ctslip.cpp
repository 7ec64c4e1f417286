#include "regait/ctslip.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include <json.hpp>

#include "regait/error.hpp"

namespace regait::ctslip {

using nlohmann::json;

double BuehlerClock::cycle_fraction(double t, int leg) const {
  double s = std::fmod(frequency * t + 0.5 * leg, 1.0);
  return s < 0.0 ? s + 1.0 : s;
}

namespace {

double clock_angle_at(const BuehlerClock& c, double s) {
  if (s < c.duty_factor) return c.touchdown_angle - c.sweep_angle * s / c.duty_factor;
  return c.touchdown_angle - c.sweep_angle + c.sweep_angle * (s - c.duty_factor) / (1.0 - c.duty_factor);
}

double clock_rate_at(const BuehlerClock& c, double s) {
  if (s < c.duty_factor) return -c.sweep_angle / c.duty_factor * c.frequency;
  return c.sweep_angle / (1.0 - c.duty_factor) * c.frequency;
}

}  // namespace

double BuehlerClock::angle(double t, int leg) const { return clock_angle_at(*this, cycle_fraction(t, leg)); }
double BuehlerClock::rate(double t, int leg) const { return clock_rate_at(*this, cycle_fraction(t, leg)); }
bool BuehlerClock::in_stance_window(double t, int leg) const { return cycle_fraction(t, leg) < duty_factor; }

void CTSlipParams::validate() const {
  if (!(L > 0.0)) throw Error("CTSlipParams: L must be positive");
  if (!(K > 0.0)) throw Error("CTSlipParams: K must be positive");
  if (!(clock.duty_factor > 0.0 && clock.duty_factor < 1.0)) throw Error("CTSlipParams: duty_factor must lie in (0, 1)");
  if (!(clock.frequency > 0.0)) throw Error("CTSlipParams: clock frequency must be positive");
}

std::string CTSlipParams::to_json() const {
  json j{{"eta", eta},
         {"mu", mu},
         {"L", L},
         {"t_s", t_s},
         {"K", K},
         {"gravity", gravity},
         {"kp", kp},
         {"kd", kd},
         {"clock",
          {{"duty_factor", clock.duty_factor},
           {"sweep_angle", clock.sweep_angle},
           {"touchdown_angle", clock.touchdown_angle},
           {"frequency", clock.frequency}}}};
  return j.dump(2);
}

CTSlipParams CTSlipParams::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // byte offset -> line number
    int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + std::min(e.byte, text.size()), '\n'));
    throw ParseError(std::string("CTSlipParams: ") + e.what(), line);
  }
  CTSlipParams p;
  try {
    auto get = [&](const json& obj, const char* key, double& dst) {
      if (obj.contains(key)) dst = obj.at(key).get<double>();
    };
    get(j, "eta", p.eta);
    get(j, "mu", p.mu);
    get(j, "L", p.L);
    get(j, "t_s", p.t_s);
    get(j, "K", p.K);
    get(j, "gravity", p.gravity);
    get(j, "kp", p.kp);
    get(j, "kd", p.kd);
    if (j.contains("clock")) {
      const json& c = j.at("clock");
      get(c, "duty_factor", p.clock.duty_factor);
      get(c, "sweep_angle", p.clock.sweep_angle);
      get(c, "touchdown_angle", p.clock.touchdown_angle);
      get(c, "frequency", p.clock.frequency);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("CTSlipParams: ") + e.what(), 0);
  }
  p.validate();
  return p;
}

double hill_force(const CTSlipParams& p, double zeta, double zeta_dot) {
  return p.K * (p.L - zeta) * (1.0 + p.eta * zeta_dot) - p.mu * zeta_dot;
}

double potential(const CTSlipParams& p, double zeta) { return 0.5 * p.K * (p.L - zeta) * (p.L - zeta); }

double hip_torque(const CTSlipParams& p, double psi, double psi_dot, double t, int leg) {
  const double e = p.clock.angle(t, leg) - psi;
  const double ed = p.clock.rate(t, leg) - psi_dot;
  return p.t_s * (p.kp * e + p.kd * ed) * p.L * p.L;
}

namespace {

double torque_with_clock(const CTSlipParams& p, double psi, double psi_dot, double t, int leg,
                         const std::optional<double>& frozen) {
  if (!frozen) return hip_torque(p, psi, psi_dot, t, leg);
  double s = std::fmod(*frozen + 0.5 * leg, 1.0);
  return p.t_s * (p.kp * (clock_angle_at(p.clock, s) - psi) - p.kd * psi_dot) * p.L * p.L;
}

StanceAccel stance_accel(const CTSlipParams& p, const Polar& z, double tau) {
  const double zeta = z[0], psi = z[1], zd = z[2], pd = z[3];
  if (!(zeta > 0.0)) throw NumericError("stance_dynamics: leg length must be positive");
  StanceAccel a;
  a.zeta_dd = zeta * pd * pd + hill_force(p, zeta, zd) - p.gravity * std::cos(psi);
  a.psi_dd = (tau + p.gravity * zeta * std::sin(psi) - 2.0 * zeta * zd * pd) / (zeta * zeta);
  return a;
}

using State4 = std::array<double, 4>;

template <class F>
State4 rk4(const F& f, double t, const State4& x, double h) {
  auto add = [](const State4& a, const State4& b, double s) {
    State4 r;
    for (int i = 0; i < 4; ++i) r[i] = a[i] + s * b[i];
    return r;
  };
  State4 k1 = f(t, x);
  State4 k2 = f(t + 0.5 * h, add(x, k1, 0.5 * h));
  State4 k3 = f(t + 0.5 * h, add(x, k2, 0.5 * h));
  State4 k4 = f(t + h, add(x, k3, h));
  State4 r;
  for (int i = 0; i < 4; ++i) r[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return r;
}

}  // namespace

StanceAccel stance_dynamics(const CTSlipParams& p, double zeta, double psi, double zeta_dot, double psi_dot, double t,
                            int leg) {
  return stance_accel(p, {zeta, psi, zeta_dot, psi_dot}, hip_torque(p, psi, psi_dot, t, leg));
}

std::vector<Polar> integrate_stance(const CTSlipParams& p, const Polar& z0, double t0, double duration, double dt,
                                    int leg) {
  auto f = [&](double t, const Polar& z) {
    StanceAccel a = stance_dynamics(p, z[0], z[1], z[2], z[3], t, leg);
    return Polar{z[2], z[3], a.zeta_dd, a.psi_dd};
  };
  const auto steps = static_cast<long>(std::ceil(duration / dt - 1e-9));
  std::vector<Polar> out{z0};
  out.reserve(static_cast<size_t>(steps) + 1);
  Polar z = z0;
  double t = t0;
  for (long i = 0; i < steps; ++i) {
    double h = std::min(dt, t0 + duration - t);
    z = rk4(f, t, z, h);
    t += h;
    out.push_back(z);
  }
  return out;
}

double stance_energy(const CTSlipParams& p, const Polar& z) {
  return 0.5 * (z[2] * z[2] + z[0] * z[0] * z[3] * z[3]) + potential(p, z[0]) + p.gravity * z[0] * std::cos(z[1]);
}

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Flight: return "flight";
    case Mode::StanceLeft: return "stance_left";
    case Mode::StanceRight: return "stance_right";
    case Mode::Crashed: return "crashed";
  }
  return "?";
}

const char* to_string(Event::Kind k) {
  switch (k) {
    case Event::Kind::Touchdown: return "touchdown";
    case Event::Kind::Liftoff: return "liftoff";
    case Event::Kind::Crash: return "crash";
  }
  return "?";
}

namespace {

// Shrinks (0, h] to the first time the predicate holds, to within tol.
template <class Pred>
double bisect_event(const Pred& hit, double h, double tol) {
  double lo = 0.0, hi = h;
  int guard = 0;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (hit(mid)) hi = mid;
    else lo = mid;
    if (++guard > 200) throw NumericError("simulate_hybrid: event bisection failed in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return hi;
}

struct Simulator {
  const CTSlipParams& p;
  const SimConfig& cfg;
  SimResult out;
  long step_count = 0;

  double fraction(double t, int leg) const {
    if (cfg.frozen_clock_fraction) return std::fmod(*cfg.frozen_clock_fraction + 0.5 * leg, 1.0);
    return p.clock.cycle_fraction(t, leg);
  }
  double ref_angle(double t, int leg) const { return clock_angle_at(p.clock, fraction(t, leg)); }

  void record(HybridState s, bool force) {
    s.clock_phase = 2.0 * std::numbers::pi * fraction(s.t, 0);
    if (!force && cfg.record_every > 1 && step_count % cfg.record_every != 0) return;
    if (!out.samples.empty() && out.samples.back().t == s.t) out.samples.back() = s;
    else out.samples.push_back(s);
  }

  void event(Event::Kind kind, double t, int leg, double x, double y) { out.events.push_back({kind, t, leg, x, y}); }

  void run(const FlightIC& ic) {
    const double h = cfg.dt, tol = cfg.event_tol;
    double t = 0.0;
    State4 fs{ic.x, ic.y, ic.xd, ic.yd};
    int leg = 0;
    auto flight = [&](double, const State4& z) { return State4{z[2], z[3], 0.0, -p.gravity}; };
    auto flight_state = [&](double tt, const State4& z) {
      HybridState s;
      s.mode = Mode::Flight;
      s.t = tt;
      s.x = z[0];
      s.y = z[1];
      s.xd = z[2];
      s.yd = z[3];
      return s;
    };
    auto crash = [&](HybridState s) {
      s.mode = Mode::Crashed;
      out.crashed = true;
      record(s, true);
      event(Event::Kind::Crash, s.t, leg, s.x, s.y);
    };
    record(flight_state(t, fs), true);
    if (fs[1] <= 0.0) return crash(flight_state(t, fs));

    while (t < cfg.horizon) {
      // Flight until touchdown or crash.
      auto touches = [&](double tt, const State4& z) {
        if (fraction(tt, leg) >= p.clock.duty_factor) return false;
        return z[1] - p.L * std::cos(ref_angle(tt, leg)) <= 0.0;
      };
      bool landed = false;
      while (t < cfg.horizon) {
        State4 n = rk4(flight, t, fs, h);
        const bool down = n[1] <= 0.0, td = touches(t + h, n);
        if (down || td) {
          double tc = down ? bisect_event([&](double m) { return rk4(flight, t, fs, m)[1] <= 0.0; }, h, tol) : h;
          double tt = td ? bisect_event([&](double m) { return touches(t + m, rk4(flight, t, fs, m)); }, h, tol) : h;
          if (down && tc <= tt + tol) {
            fs = rk4(flight, t, fs, tc);
            t += tc;
            return crash(flight_state(t, fs));
          }
          fs = rk4(flight, t, fs, tt);
          t += tt;
          landed = true;
          break;
        }
        fs = n;
        t += h;
        ++step_count;
        record(flight_state(t, fs), false);
      }
      if (!landed) break;

      // Full-length leg at the commanded angle, or steeper when the hip is too low for it.
      const double psi = std::max(ref_angle(t, leg), std::acos(std::min(1.0, fs[1] / p.L)));
      const double zeta = p.L;
      const double foot = fs[0] + zeta * std::sin(psi);
      const double dx = fs[0] - foot, dy = fs[1];
      State4 z{zeta, psi, (dx * fs[2] + dy * fs[3]) / zeta, (-dy * fs[2] + dx * fs[3]) / (zeta * zeta)};
      event(Event::Kind::Touchdown, t, leg, fs[0], fs[1]);
      const Mode mode = leg == 0 ? Mode::StanceLeft : Mode::StanceRight;
      auto stance_state = [&](double tt, const State4& s) {
        HybridState hs;
        hs.mode = mode;
        hs.t = tt;
        hs.foot_x = foot;
        hs.zeta = s[0];
        hs.psi = s[1];
        const double sn = std::sin(s[1]), cs = std::cos(s[1]);
        hs.x = foot - s[0] * sn;
        hs.y = s[0] * cs;
        hs.xd = -s[2] * sn - s[0] * cs * s[3];
        hs.yd = s[2] * cs - s[0] * sn * s[3];
        return hs;
      };
      record(stance_state(t, z), true);

      auto rhs = [&](double tt, const State4& s) {
        const double tau = torque_with_clock(p, s[1], s[3], tt, leg, cfg.frozen_clock_fraction);
        StanceAccel a = stance_accel(p, s, tau);
        return State4{s[2], s[3], a.zeta_dd, a.psi_dd};
      };
      // Hip at the ground, or a leg collapsed below 30% of rest length.
      auto collapsed = [&](const State4& s) {
        return !std::isfinite(s[0]) || s[0] < 0.3 * p.L || s[0] * std::cos(s[1]) <= 0.0;
      };
      auto lifts = [&](const State4& s) { return s[0] >= p.L && s[2] > 0.0; };
      bool lifted = false;
      while (t < cfg.horizon) {
        State4 n = rk4(rhs, t, z, h);
        const bool down = collapsed(n), lo = !down && lifts(n);
        if (down) {
          double tc = bisect_event([&](double m) { return collapsed(rk4(rhs, t, z, m)); }, h, tol);
          z = rk4(rhs, t, z, tc);
          t += tc;
          return crash(stance_state(t, z));
        }
        if (lo) {
          double tl = bisect_event([&](double m) { return rk4(rhs, t, z, m)[0] >= p.L; }, h, tol);
          z = rk4(rhs, t, z, tl);
          t += tl;
          lifted = true;
          break;
        }
        z = n;
        t += h;
        ++step_count;
        record(stance_state(t, z), false);
      }
      if (!lifted) break;

      HybridState lo_state = stance_state(t, z);
      event(Event::Kind::Liftoff, t, leg, lo_state.x, lo_state.y);
      fs = {lo_state.x, lo_state.y, lo_state.xd, lo_state.yd};
      record(flight_state(t, fs), true);
      ++out.strides;
      leg = 1 - leg;
      if (cfg.stop_after_strides > 0 && out.strides >= cfg.stop_after_strides) return;
    }
  }
};

}  // namespace

SimResult simulate_hybrid(const CTSlipParams& p, const FlightIC& ic, const SimConfig& cfg) {
  p.validate();
  if (!(cfg.dt > 0.0)) throw Error("simulate_hybrid: dt must be positive");
  Simulator sim{p, cfg, {}};
  sim.run(ic);
  return std::move(sim.out);
}

EnergyTrace energy_outputs(const CTSlipParams& p, const SimResult& run) {
  const auto n = static_cast<Eigen::Index>(run.samples.size());
  EnergyTrace e{Vec(n), Vec(n), Vec(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const HybridState& s = run.samples[static_cast<size_t>(i)];
    e.t(i) = s.t;
    const bool stance = s.mode == Mode::StanceLeft || s.mode == Mode::StanceRight;
    e.E(i) = stance ? potential(p, s.zeta) : 0.0;
    e.E_T(i) = 0.5 * (s.xd * s.xd + s.yd * s.yd) + p.gravity * s.y;
  }
  return e;
}

std::vector<FlightIC> make_ensemble(int count, std::uint64_t seed, double height, double speed) {
  std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<FlightIC> ics;
  for (int i = 0; i < count; ++i) {
    FlightIC ic;
    ic.x = 0.0;
    ic.y = height * (1.0 + 0.1 * u(rng));
    ic.xd = speed * (0.8 + 0.4 * u(rng));
    ic.yd = 0.0;
    ics.push_back(ic);
  }
  return ics;
}

namespace {

template <class Fn>
void parallel_for(size_t count, int threads, const Fn& fn) {
  const size_t workers = std::min<size_t>(count, static_cast<size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::vector<SimResult> run_ensemble(const CTSlipParams& p, const std::vector<FlightIC>& ics, const SimConfig& cfg,
                                    int threads) {
  std::vector<SimResult> runs(ics.size());
  parallel_for(ics.size(), threads, [&](size_t i) { runs[i] = simulate_hybrid(p, ics[i], cfg); });
  return runs;
}

int count_completed(const std::vector<SimResult>& runs, int strides_needed) {
  return static_cast<int>(std::count_if(runs.begin(), runs.end(), [&](const SimResult& r) { return r.completed(strides_needed); }));
}

namespace {

// Linear resampling of (t, y, yd, E) onto a uniform grid.
struct Resampled {
  Vec t;
  Mat com;  // y, yd
  Vec E;
  Vec E_T;
};

Resampled resample(const CTSlipParams& p, const SimResult& run, double dt) {
  EnergyTrace e = energy_outputs(p, run);
  const auto& s = run.samples;
  Resampled r;
  if (s.size() < 2) return r;
  const double t_end = s.back().t;
  const auto n = static_cast<Eigen::Index>(std::floor(t_end / dt + 1e-12)) + 1;
  r.t.resize(n);
  r.com.resize(n, 2);
  r.E.resize(n);
  r.E_T.resize(n);
  size_t j = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = std::min(static_cast<double>(i) * dt, t_end);
    while (j + 2 < s.size() && s[j + 1].t < t) ++j;
    const HybridState &a = s[j], &b = s[j + 1];
    const double w = b.t > a.t ? std::clamp((t - a.t) / (b.t - a.t), 0.0, 1.0) : 1.0;
    auto lerp = [w](double u, double v) { return u + w * (v - u); };
    r.t(i) = t;
    r.com(i, 0) = lerp(a.y, b.y);
    r.com(i, 1) = lerp(a.yd, b.yd);
    const auto ja = static_cast<Eigen::Index>(j);
    r.E(i) = lerp(e.E(ja), e.E(ja + 1));
    r.E_T(i) = lerp(e.E_T(ja), e.E_T(ja + 1));
  }
  return r;
}

Vec diff_central(const Vec& t, const Vec& y) {
  const auto n = y.size();
  Vec d = Vec::Zero(n);
  if (n < 2) return d;
  d(0) = (y(1) - y(0)) / (t(1) - t(0));
  d(n - 1) = (y(n - 1) - y(n - 2)) / (t(n - 1) - t(n - 2));
  for (Eigen::Index i = 1; i + 1 < n; ++i) d(i) = (y(i + 1) - y(i - 1)) / (t(i + 1) - t(i - 1));
  return d;
}

double raw_member_cost(const CostModel& m, const Resampled& r, MemberCost& mc) {
  const double mean_et = r.E_T.mean();
  if (!(mean_et > 0.0)) throw NumericError("recovery_cost: mean total energy must be positive");
  Vec e = r.E / mean_et;
  Vec de = diff_central(r.t, e);
  Vec phi = m.phase.unwrapped(r.com);
  Vec dphi = diff_central(r.t, phi);
  double mismatch = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    const double d = de(i) - m.energy.deriv(wrap_to_2pi(phi(i))) * dphi(i);
    mismatch += d * d;
  }
  mc.energy_term = mismatch / static_cast<double>(e.size());
  // Forward differences of the phase, one per sample interval.
  const auto k = phi.size() - 1;
  Vec rate = (phi.tail(k) - phi.head(k)) / m.sample_dt;
  const double mean_rate = rate.mean();
  mc.rate_variance = (rate.array() - mean_rate).square().sum() / static_cast<double>(k);
  mc.inverse_rate = mean_rate > 0.0 ? 1.0 / mean_rate : std::numeric_limits<double>::infinity();
  return mc.energy_term + m.alpha * mc.rate_variance + m.beta * mc.inverse_rate;
}

}  // namespace

MemberCost member_cost(const CTSlipParams& p, const SimResult& run, const CostModel& m) {
  MemberCost mc;
  if (!run.completed(m.strides_needed)) {
    mc.penalized = true;
    mc.total = m.crash_penalty;
    return mc;
  }
  Resampled r = resample(p, run, m.sample_dt);
  if (r.t.size() < 3) {
    mc.penalized = true;
    mc.total = m.crash_penalty;
    return mc;
  }
  mc.total = raw_member_cost(m, r, mc);
  if (!std::isfinite(mc.total)) {
    mc.penalized = true;
    mc.total = m.crash_penalty;
  }
  return mc;
}

CostModel build_cost_model(const CTSlipParams& nominal, const std::vector<FlightIC>& ics, double alpha, double beta,
                           int order, const SimConfig& sim, int threads) {
  CostModel m;
  m.alpha = alpha;
  m.beta = beta;
  m.sim = sim;
  m.strides_needed = sim.stop_after_strides > 0 ? sim.stop_after_strides : 10;
  auto runs = run_ensemble(nominal, ics, sim, threads);

  std::vector<Resampled> data;
  Eigen::Index total = 0;
  for (const auto& run : runs) {
    if (!run.completed(m.strides_needed)) continue;
    data.push_back(resample(nominal, run, m.sample_dt));
    total += data.back().t.size();
  }
  if (data.empty()) throw NumericError("build_cost_model: no nominal ensemble member completed its strides");

  Mat pooled(total, 2);
  Eigen::Index row = 0;
  for (const auto& r : data) {
    pooled.middleRows(row, r.t.size()) = r.com;
    row += r.t.size();
  }
  m.phase = PhaseEstimator::train(pooled);

  Vec phases(total), values(total);
  row = 0;
  for (const auto& r : data) {
    const double mean_et = r.E_T.mean();
    for (Eigen::Index i = 0; i < r.t.size(); ++i, ++row) {
      phases(row) = m.phase.phase_unchecked(r.com.row(i).transpose());
      values(row) = r.E(i) / mean_et;
    }
  }
  m.energy = fit_fourier(phases, values, order);

  double worst = 0.0;
  for (const auto& r : data) {
    MemberCost mc;
    worst = std::max(worst, raw_member_cost(m, r, mc));
  }
  m.crash_penalty = 10.0 * worst;
  return m;
}

double recovery_cost(const CTSlipParams& p, const std::vector<FlightIC>& ics, const CostModel& m, int threads) {
  std::vector<double> costs(ics.size());
  parallel_for(ics.size(), threads, [&](size_t i) {
    SimResult run;
    try {
      run = simulate_hybrid(p, ics[i], m.sim);
    } catch (const NumericError&) {
      costs[i] = m.crash_penalty;
      return;
    }
    costs[i] = member_cost(p, run, m).total;
  });
  double sum = 0.0;
  for (double c : costs) sum += c;  // fixed order keeps the result independent of thread count
  return sum;
}

CTSlipParams SearchSpace::apply(const CTSlipParams& base, const Vec& z) const {
  if (z.size() != 8) throw DimensionError("SearchSpace::apply: expected 8 coordinates");
  CTSlipParams p = base;
  p.K = base.K * std::exp(span[0] * z(0));
  p.L = base.L * std::exp(span[1] * z(1));
  p.mu = base.mu * std::exp(span[2] * z(2));
  p.eta = base.eta * std::exp(span[3] * z(3));
  p.clock.frequency = base.clock.frequency * std::exp(span[4] * z(4));
  p.clock.touchdown_angle = base.clock.touchdown_angle + span[5] * z(5);
  p.clock.sweep_angle = base.clock.sweep_angle * std::exp(span[6] * z(6));
  p.clock.duty_factor = std::clamp(base.clock.duty_factor + span[7] * z(7), 0.2, 0.9);
  return p;
}

RecoveryResult recover_parameters(const CTSlipParams& damaged, const std::vector<FlightIC>& ics, const CostModel& model,
                                  const SearchSpace& space, NMConfig nm, int threads) {
  if (!nm.bounds) nm.bounds = std::vector<std::pair<double, double>>(8, {-1.0, 1.0});
  auto objective = [&](const Vec& z) { return recovery_cost(space.apply(damaged, z), ics, model, threads); };
  RecoveryResult r;
  r.nm = nelder_mead(objective, Vec::Zero(8), nm);
  r.best = space.apply(damaged, r.nm.x);
  r.damaged_cost = r.nm.trace.empty() ? objective(Vec::Zero(8)) : r.nm.trace.front().cost;
  r.recovered_cost = r.nm.f;
  return r;
}

}  // namespace regait::ctslip
