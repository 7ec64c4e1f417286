#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regait/optimizer.hpp"
#include "regait/signal.hpp"

namespace regait::ctslip {

// Piecewise-linear leg-angle reference: a slow sweep from touchdown_angle down
// by sweep_angle over duty_factor of the period, then a linear return. Leg 1
// runs half a period behind leg 0.
struct BuehlerClock {
  double duty_factor = 0.72;
  double sweep_angle = 0.4;
  double touchdown_angle = 0.44;
  double frequency = 0.3;  // Hz

  double cycle_fraction(double t, int leg) const;  // in [0, 1)
  double angle(double t, int leg) const;
  double rate(double t, int leg) const;
  bool in_stance_window(double t, int leg) const;
};

// Leg angle psi is measured from the vertical at the foot; hip - foot =
// zeta (-sin psi, cos psi), so positive psi places the foot ahead of the hip.
struct CTSlipParams {
  double eta = -0.03;
  double mu = 0.3;
  double L = 80.0;
  double t_s = 0.1;
  double K = 1.9;
  double gravity = 4.0;
  double kp = 16.7;  // hip PD gains, torque = t_s L^2 (kp e + kd edot)
  double kd = 6.5;
  BuehlerClock clock;

  void validate() const;
  std::string to_json() const;
  static CTSlipParams from_json(const std::string& text);
};

double hill_force(const CTSlipParams& p, double zeta, double zeta_dot);
double potential(const CTSlipParams& p, double zeta);
double hip_torque(const CTSlipParams& p, double psi, double psi_dot, double t, int leg);

struct StanceAccel {
  double zeta_dd = 0.0;
  double psi_dd = 0.0;
};

// zeta'' = zeta psi'^2 - dV/dzeta + F_nc - g cos psi
// psi''  = (tau + g zeta sin psi - 2 zeta zeta' psi') / zeta^2
StanceAccel stance_dynamics(const CTSlipParams& p, double zeta, double psi, double zeta_dot, double psi_dot, double t,
                            int leg);

// Polar stance state (zeta, psi, zeta', psi').
using Polar = std::array<double, 4>;
// Fixed-step RK4 of the stance equations only, no events; for oracles.
std::vector<Polar> integrate_stance(const CTSlipParams& p, const Polar& z0, double t0, double duration, double dt,
                                    int leg);
double stance_energy(const CTSlipParams& p, const Polar& z);

enum class Mode { Flight, StanceLeft, StanceRight, Crashed };
const char* to_string(Mode m);

struct HybridState {
  Mode mode = Mode::Flight;
  double t = 0.0;
  double x = 0.0, y = 0.0, xd = 0.0, yd = 0.0;
  double foot_x = 0.0;  // stance only
  double zeta = 0.0, psi = 0.0;  // stance only
  double clock_phase = 0.0;  // radians, leg 0
};

struct Event {
  enum class Kind { Touchdown, Liftoff, Crash };
  Kind kind = Kind::Touchdown;
  double t = 0.0;
  int leg = 0;
  double x = 0.0, y = 0.0;
};
const char* to_string(Event::Kind k);

struct FlightIC {
  double x = 0.0, y = 80.0, xd = 30.0, yd = 0.0;
};

struct SimConfig {
  double dt = 1e-3;
  double horizon = 60.0;
  int stop_after_strides = 10;  // 0 runs to the horizon
  double event_tol = 1e-10;
  int record_every = 1;
  std::optional<double> frozen_clock_fraction;  // holds both legs at this cycle fraction
};

struct SimResult {
  std::vector<HybridState> samples;
  std::vector<Event> events;
  int strides = 0;  // completed stances (liftoffs)
  bool crashed = false;

  bool completed(int strides_needed) const { return !crashed && strides >= strides_needed; }
};

// Event-driven integration: ballistic flight, touchdown when the commanded
// leg reaches the ground inside its stance window while the hip approaches the
// foot, liftoff when zeta >= L, crash when the hip reaches the ground. Event
// times are bisected to event_tol; a crash within event_tol of another event wins.
SimResult simulate_hybrid(const CTSlipParams& p, const FlightIC& ic, const SimConfig& cfg = {});

// E = V(zeta) in stance and 0 in flight; E_T = (xd^2 + yd^2)/2 + g y.
struct EnergyTrace {
  Vec t, E, E_T;
};
EnergyTrace energy_outputs(const CTSlipParams& p, const SimResult& run);

std::vector<FlightIC> make_ensemble(int count, std::uint64_t seed, double height = 80.0, double speed = 30.0);

// Runs members concurrently on up to `threads` workers; order of results is fixed.
std::vector<SimResult> run_ensemble(const CTSlipParams& p, const std::vector<FlightIC>& ics, const SimConfig& cfg,
                                    int threads = 1);
int count_completed(const std::vector<SimResult>& runs, int strides_needed);

struct CostModel {
  PhaseEstimator phase;        // trained on nominal (y, yd)
  FourierSeries energy;        // nominal E / <E_T> against phase
  double crash_penalty = 0.0;  // 10 x worst nominal member cost
  double alpha = 1.0;
  double beta = 0.1;
  double sample_dt = 0.01;
  int strides_needed = 10;
  SimConfig sim;
};

struct MemberCost {
  double energy_term = 0.0;
  double rate_variance = 0.0;
  double inverse_rate = 0.0;
  double total = 0.0;
  bool penalized = false;
};

CostModel build_cost_model(const CTSlipParams& nominal, const std::vector<FlightIC>& ics, double alpha = 1.0,
                           double beta = 0.1, int order = 8, const SimConfig& sim = {}, int threads = 1);
MemberCost member_cost(const CTSlipParams& p, const SimResult& run, const CostModel& model);
// Sum of member costs; a crashed member contributes the crash penalty.
double recovery_cost(const CTSlipParams& p, const std::vector<FlightIC>& ics, const CostModel& model, int threads = 1);

// Free parameters mapped from z in [-1, 1]^8 around a base point:
// K, L, mu, eta, frequency and sweep scale by exp(span * z), touchdown angle
// and duty factor shift by span * z. t_s and the PD gains stay fixed.
struct SearchSpace {
  std::array<double, 8> span{0.6, 0.2, 0.6, 0.6, 0.4, 0.2, 0.4, 0.15};
  static constexpr std::array<const char*, 8> names{"K", "L", "mu", "eta", "frequency", "touchdown_angle", "sweep_angle", "duty_factor"};
  CTSlipParams apply(const CTSlipParams& base, const Vec& z) const;
};

struct RecoveryResult {
  CTSlipParams best;
  NMResult nm;
  double damaged_cost = 0.0;
  double recovered_cost = 0.0;
};

RecoveryResult recover_parameters(const CTSlipParams& damaged, const std::vector<FlightIC>& ics, const CostModel& model,
                                  const SearchSpace& space, NMConfig nm, int threads = 1);

}  // namespace regait::ctslip
