// Serial reference vs OpenMP map over the same path ensemble.
#include <benchmark/benchmark.h>

#include "rfbm/ensemble.hpp"
#include "rfbm/explosion_lab.hpp"
#include "rfbm/frame_sde.hpp"

namespace {

using namespace rfbm;

double one_path(const EvolvingMetricModel& m, const Vec& x0, const Mat& u0, std::size_t i) {
  SimulationOptions o;
  o.horizon = 0.5;
  o.h = 1e-3;
  o.stream = i;
  return simulate_path(m, x0, u0, o).rho.back();
}

void run_frame(benchmark::State& state, Execution ex) {
  const auto m = EvolvingMetricModel::homothetic(
      EvolvingMetricModel::warped(2, 1.0, Warp::sinh(1.0)), ScaleCurve::linear(4.0, -1.0));
  const Vec x0 = m.state_point_at(0.5);
  const Mat u0 = orthonormal_frame(m, 0.0, x0);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto out = map_paths<double>(n, [&](std::size_t i) { return one_path(m, x0, u0, i); }, ex);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void run_1d(benchmark::State& state, Execution ex) {
  const DriftSpec drift = DriftSpec::radial_model(Warp::sinh(1.0), 3);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto out = map_paths<double>(n, [&](std::size_t i) {
      Sim1dOptions o;
      o.stream = i;
      return simulate_1d(drift, o).y_final;
    }, ex);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_FramePathsSerial(benchmark::State& s) { run_frame(s, Execution::Serial); }
void BM_FramePathsParallel(benchmark::State& s) { run_frame(s, Execution::Parallel); }
void BM_Radial1dSerial(benchmark::State& s) { run_1d(s, Execution::Serial); }
void BM_Radial1dParallel(benchmark::State& s) { run_1d(s, Execution::Parallel); }

}  // namespace

BENCHMARK(BM_FramePathsSerial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FramePathsParallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Radial1dSerial)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Radial1dParallel)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
