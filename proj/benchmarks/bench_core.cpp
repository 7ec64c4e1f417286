#include <benchmark/benchmark.h>

#include <cmath>

#include "regait/behavior_spec.hpp"
#include "regait/crawler.hpp"
#include "regait/ctslip.hpp"
#include "regait/optimizer.hpp"
#include "regait/signal.hpp"

using namespace regait;

static void BM_SolveVelocityCrawler(benchmark::State& state) {
  crawler::CrawlerParams p;
  crawler::ReferenceGait ref(p);
  ConstraintStack stack = crawler::build_stack(p, ref, 1, nullptr, nullptr);
  Vec x = ref.state(0.3);
  for (auto _ : state) benchmark::DoNotOptimize(solve_velocity(stack, 0.3, x, kDefaultTol, true));
}
BENCHMARK(BM_SolveVelocityCrawler);

static void BM_CrawlerRecoverCycle(benchmark::State& state) {
  crawler::CrawlerParams p;
  crawler::ReferenceGait ref(p);
  IntegratorConfig cfg;
  cfg.dt = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(crawler::recover(p, ref, 1, 1.0, cfg));
}
BENCHMARK(BM_CrawlerRecoverCycle)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_FourierFit(benchmark::State& state) {
  const auto n = state.range(0);
  Vec ph(n), v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ph(i) = 2 * M_PI * static_cast<double>(i) / static_cast<double>(n);
    v(i) = std::exp(std::sin(ph(i)));
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_fourier(ph, v, 8));
}
BENCHMARK(BM_FourierFit)->Arg(1000)->Arg(10000);

static void BM_CTSlipSimulate(benchmark::State& state) {
  ctslip::CTSlipParams p;
  ctslip::FlightIC ic = ctslip::make_ensemble(1, 7)[0];
  for (auto _ : state) benchmark::DoNotOptimize(ctslip::simulate_hybrid(p, ic));
}
BENCHMARK(BM_CTSlipSimulate)->Unit(benchmark::kMillisecond);

static void BM_CTSlipEnsembleCost(benchmark::State& state) {
  ctslip::CTSlipParams nominal, damaged;
  damaged.t_s = 0.035;
  auto ics = ctslip::make_ensemble(10, 7);
  ctslip::CostModel model = ctslip::build_cost_model(nominal, ics);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ctslip::recovery_cost(damaged, ics, model, threads));
}
BENCHMARK(BM_CTSlipEnsembleCost)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_NelderMeadRosenbrock(benchmark::State& state) {
  Objective f = [](const Vec& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i)
      s += 100 * std::pow(x(i + 1) - x(i) * x(i), 2) + std::pow(1 - x(i), 2);
    return s;
  };
  NMConfig cfg;
  cfg.max_iters = 2000;
  for (auto _ : state) benchmark::DoNotOptimize(nelder_mead(f, Vec::Zero(state.range(0)), cfg));
}
BENCHMARK(BM_NelderMeadRosenbrock)->Arg(2)->Arg(8);
BENCHMARK_MAIN();
