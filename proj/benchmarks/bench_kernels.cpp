#include <benchmark/benchmark.h>

#include "ssep/exact_oracle.hpp"
#include "ssep/limit_gaussian.hpp"
#include "ssep/mean_field.hpp"

namespace {

void BM_RandomWalkKernel(benchmark::State& state) {
  double z = double(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ssep::random_walk_kernel(z));
}
BENCHMARK(BM_RandomWalkKernel)->Arg(1)->Arg(100)->Arg(10000);

void BM_DiscreteDensity(benchmark::State& state) {
  ssep::HeatField f(ssep::Profile::tanh_ramp(0.3, 0.7, 0.0, 0.5), state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(f.discrete_density(3, 0.5));
}
BENCHMARK(BM_DiscreteDensity)->Arg(10)->Arg(100);

void BM_LimitCurrent(benchmark::State& state) {
  ssep::HeatField f(ssep::Profile::tanh_ramp(0.3, 0.7, 0.0, 0.5), 100);
  for (auto _ : state) benchmark::DoNotOptimize(ssep::cov_current_current(f, 0.0, 0.5, 0.1, 1.0));
}
BENCHMARK(BM_LimitCurrent)->Unit(benchmark::kMillisecond);

void BM_LimitOccupationCurrent(benchmark::State& state) {
  ssep::HeatField f(ssep::Profile::tanh_ramp(0.3, 0.7, 0.0, 0.5), 100);
  for (auto _ : state) benchmark::DoNotOptimize(ssep::cov_occupation_current(f, 0.0, 0.5, 0.0, 1.0));
}
BENCHMARK(BM_LimitOccupationCurrent)->Unit(benchmark::kMillisecond);

void BM_MeetingOracle(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ssep::meeting_time_oracle(1.0, state.range(0)));
}
BENCHMARK(BM_MeetingOracle)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
