#include <cstdio>
#include <ios>

#include <CLI11.hpp>

#include "commands.hpp"
#include "regait/behavior_spec.hpp"
#include "regait/error.hpp"
#include "regait/version.hpp"
#include "report.hpp"

using namespace regait;
using namespace regait::tools;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

void add_common(CLI::App* app, CommonOptions& c) {
  app->add_option("--out", c.out, "Output directory");
  app->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  app->add_option("--params", c.params, "Parameter file (JSON)");
  app->add_option("--dt", c.dt, "Time step")->check(CLI::PositiveNumber);
  app->add_option("--tol", c.tol, "Tolerance")->check(CLI::PositiveNumber);
  app->add_option("--order", c.order, "Fourier order")->check(CLI::Range(1, 64));
  app->add_option("--iters", c.iters, "Optimizer iterations")->check(CLI::Range(0, 1000000));
}

int report(const char* kind, const std::string& cmd, const std::exception& e, int code) {
  std::fprintf(stderr, "regait %s: %s in stage '%s': %s\n", cmd.c_str(), kind, current_stage().c_str(), e.what());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Behavior specifications, learned constraints and recovery after damage"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CrawlerOptions crawler;
  auto* c = app.add_subcommand("crawler", "Planar crawler: reference, learn, jam, baseline, recover");
  add_common(c, crawler.common);
  c->add_option("--jam", crawler.jam, "Jammed joint, 0 for none")->check(CLI::Range(0, 6))->capture_default_str();
  c->add_option("--duration", crawler.duration, "Duration (s)")->check(CLI::PositiveNumber)->capture_default_str();
  c->add_flag("--search", crawler.search, "Also run the gait-parameter search with the jam hidden");

  CTSlipOptions slip;
  auto* s = app.add_subcommand("ctslip", "Clock-torqued SLIP ensemble runs and parameter recovery");
  s->require_subcommand(1);
  for (const char* mode : {"simulate", "damage", "recover"}) {
    const char* help = mode[0] == 's' ? "Simulate the ensemble with given (default nominal) parameters"
                       : mode[0] == 'd' ? "Simulate the ensemble with damaged hip torque"
                                        : "Recover parameters for the damaged model by Nelder-Mead";
    auto* m = s->add_subcommand(mode, help);
    add_common(m, slip.common);
    m->add_option("--ensemble", slip.ensemble, "Number of initial conditions")->check(CLI::Range(1, 10000));
    m->add_option("--strides", slip.strides, "Strides a run must complete")->check(CLI::Range(1, 1000));
    if (mode[0] == 'r') m->add_option("--nominal", slip.nominal_params, "Nominal parameter file (JSON)");
    m->callback([&slip, mode] { slip.mode = mode; });
  }

  ManipulatorOptions manip;
  auto* m = app.add_subcommand("manipulator", "Force-matching input redesign on the constrained toy");
  add_common(m, manip.common);
  m->add_option("--duration", manip.duration, "Horizon (s)")->check(CLI::PositiveNumber)->capture_default_str();
  m->add_option("--strength", manip.strength, "Constraint perturbation strength")->capture_default_str();

  LearnOptions learn;
  auto* l = app.add_subcommand("learn", "Learn template constraints from a crawler trajectory CSV");
  add_common(l, learn.common);
  l->add_option("input", learn.input, "Trajectory CSV")->required();

  RankOptions rank;
  auto* r = app.add_subcommand("rank", "Randomized rank-augmentation study");
  add_common(r, rank.common);
  r->add_option("--n", rank.n, "Ambient dimension")->check(CLI::PositiveNumber)->capture_default_str();
  r->add_option("--k", rank.k, "Base rank")->check(CLI::NonNegativeNumber)->capture_default_str();
  r->add_option("--trials", rank.trials, "Trials per count")->capture_default_str();
  r->add_option("--max-count", rank.max_count, "Largest augmenting count (default bound + 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  std::string name = app.get_subcommands().front()->get_name();
  try {
    if (*c) return cmd_crawler(crawler);
    if (*s) {
      name += " " + slip.mode;
      return cmd_ctslip(slip);
    }
    if (*m) return cmd_manipulator(manip);
    if (*l) return cmd_learn(learn);
    return cmd_rank(rank);
  } catch (const UsageError& e) {
    return report("usage error", name, e, kExitUsage);
  } catch (const regait::ParseError& e) {
    return report("parse error", name, e, kExitIo);
  } catch (const IoError& e) {
    return report("I/O error", name, e, kExitIo);
  } catch (const std::ios_base::failure& e) {
    return report("I/O error", name, e, kExitIo);
  } catch (const DimensionError& e) {
    return report("dimension error", name, e, kExitUsage);
  } catch (const NumericError& e) {
    return report("numeric failure", name, e, kExitNumeric);
  } catch (const RankDeficientError& e) {
    return report("numeric failure", name, e, kExitNumeric);
  } catch (const std::exception& e) {
    return report("failure", name, e, kExitNumeric);
  }
}
