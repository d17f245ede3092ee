#include <benchmark/benchmark.h>

#include "ssep/mean_field.hpp"
#include "ssep/stirring.hpp"

namespace {

// One replica on a window sized for T; reports swap events per second.
void BM_Evolve(benchmark::State& state) {
  const long n = state.range(0);
  const double T = 0.5;
  auto profile = ssep::Profile::tanh_ramp(0.3, 0.7, 0.0, 0.5);
  ssep::HeatField field(profile, n);
  auto window = ssep::LatticeWindow::around(n, 0, 1, T);
  std::vector<ssep::Observable> obs{ssep::make_observable(ssep::ObservableSpec::current(0, {T}), &field, n)};
  std::uint64_t seed = 1, events = 0;
  for (auto _ : state) {
    auto c = ssep::sample_initial_configuration(profile, window, seed);
    auto tr = ssep::evolve(c, T, obs, seed + 1);
    events += tr.event_count;
    ++seed;
  }
  state.counters["events/s"] = benchmark::Counter(double(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Evolve)->Arg(10)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
