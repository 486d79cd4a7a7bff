#include <benchmark/benchmark.h>

#include "nvbeat/nvbeat.hpp"

using namespace nvbeat;

namespace {

SystemParams reference_system() {
  SystemParams p;
  p.tensor = {166.9, 122.9, 90.0, -90.3};
  return p;
}

const FieldOrientation kBeatField = FieldOrientation::nv(40.3, 40.0, 90.0);

void BM_Solve(benchmark::State& state) {
  const auto p = reference_system();
  for (auto _ : state) benchmark::DoNotOptimize(solve(p, kBeatField));
}
BENCHMARK(BM_Solve);

void BM_PrincipalAxes(benchmark::State& state) {
  const HyperfineTensor t{166.9, 122.9, 90.0, -90.3};
  for (auto _ : state) benchmark::DoNotOptimize(principal_axes(t));
}
BENCHMARK(BM_PrincipalAxes);

void BM_ZqRamsey(benchmark::State& state) {
  const auto p = reference_system();
  const auto tau = linspace(0.0, 20.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_zq_ramsey(p, kBeatField, 0.035, 5.0, tau));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ZqRamsey)->Arg(501)->Arg(2001);

void BM_Rabi(benchmark::State& state) {
  const auto p = reference_system();
  const auto grid = linspace(0.0, 2.0, 1001);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_rabi(p, kBeatField, {14.3, 0.0, 0.0}, grid));
}
BENCHMARK(BM_Rabi);

void BM_SingleTransitionAxis(benchmark::State& state) {
  const auto p = reference_system();
  for (auto _ : state) benchmark::DoNotOptimize(find_single_transition_axis(p, 40.3));
}
BENCHMARK(BM_SingleTransitionAxis)->Unit(benchmark::kMillisecond);

void BM_Fit(benchmark::State& state) {
  const auto p = reference_system();
  const auto truth = FitParameters::from(p.tensor, 40.3);
  auto design = sq_lines_design(5.00923, 0.0);
  const auto zq = zq_phi_sweep_design(40.0);
  design.insert(design.end(), zq.begin(), zq.end());
  const auto ds = synthesize_dataset(p, truth, design, {}, std::nullopt, 1);
  FitParameters start = truth;
  start.a_zz *= 1.1;
  start.a *= 0.9;
  for (auto _ : state) benchmark::DoNotOptimize(fit_hyperfine(p, ds, start));
}
BENCHMARK(BM_Fit)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
