#include <cmath>

#include <benchmark/benchmark.h>

#include "dynalloc/allocator.hpp"
#include "dynalloc/extended_allocator.hpp"
#include "dynalloc/fes_identify.hpp"
#include "dynalloc/fes_model.hpp"
#include "dynalloc/oracles.hpp"
#include "dynalloc/simulation.hpp"
#include "dynalloc/synthetic.hpp"

using namespace dynalloc;

namespace {

AllocatorParams bench_params() {
  const FesModel f = synthetic_model(Muscle::flexor);
  const FesModel e = synthetic_model(Muscle::extensor);
  AllocatorParams p;
  p.w_base = {0.1, 0.1, 1.0};
  p.limits = attainable_set(f, e, 15.0);
  p.k = bandwidth_matched_gains(p.w_base, 0.908, 3.976);
  return p;
}

void BM_AllocatorTick(benchmark::State& state) {
  const AllocatorParams p = bench_params();
  AllocatorState s;
  double t = 0.0;
  for (auto _ : state) {
    const double net = 4.0 * std::sin(t);
    const AllocatorTick tick = allocator_tick(s, {0.0, 0.0, net}, p, 60.0, 1e-3, t);
    s = tick.next;
    t += 1e-3;
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_AllocatorTick);

void BM_ExtendedTick(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  ExtendedAllocatorParams p;
  p.layout = {n, n};
  p.k_plus = Eigen::VectorXd::Constant(2 * n, 5.0);
  p.w_plus = Eigen::VectorXd::Constant(2 * n + 1, 0.2);
  p.w_plus[2 * n] = 1.0;
  p.muscle_limits.assign(static_cast<std::size_t>(2 * n), [](double) { return 3.0; });
  p.exo_max = 15.0;
  ExtendedAllocatorState s = make_extended_state(p.layout);
  Eigen::VectorXd nominal = Eigen::VectorXd::Zero(2 * n + 1);
  nominal[2 * n] = 4.0;
  for (auto _ : state) {
    s = extended_allocator_step(s, nominal, p, 60.0, 1e-3);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_ExtendedTick)->Arg(1)->Arg(4)->Arg(16);

void BM_RecruitmentInversion(benchmark::State& state) {
  const FesModel m = synthetic_model(Muscle::flexor);
  double a = 0.0;
  for (auto _ : state) {
    a = a > 0.9 ? 0.05 : a + 0.013;
    benchmark::DoNotOptimize(invert_recruitment(m, a, 55.0));
  }
}
BENCHMARK(BM_RecruitmentInversion);

void BM_RunScenario(benchmark::State& state) {
  const Scenario s = resolve_scenario("tracking");
  for (auto _ : state) benchmark::DoNotOptimize(run(s).summary);
}
BENCHMARK(BM_RunScenario)->Unit(benchmark::kMillisecond);

void BM_Identify(benchmark::State& state) {
  const FesModel truth = synthetic_model(Muscle::flexor);
  const TrainingGrid grid = generate_grid(truth, Muscle::flexor, GridProtocol{});
  IdentifyOptions opt;
  opt.upsilon_min_ma = truth.upsilon_min_ma;
  for (auto _ : state) benchmark::DoNotOptimize(identify(grid, Muscle::flexor, opt));
}
BENCHMARK(BM_Identify)->Unit(benchmark::kMillisecond);

void BM_InvisibilityCheck(benchmark::State& state) {
  InvisibilityOptions o;
  for (auto _ : state) benchmark::DoNotOptimize(invisibility_check(o));
}
BENCHMARK(BM_InvisibilityCheck)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
