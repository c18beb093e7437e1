#include <cmath>

#include <benchmark/benchmark.h>

#include "amspec/aubry.hpp"
#include "amspec/cocycle.hpp"
#include "amspec/spectral.hpp"
#include "amspec/twist_model.hpp"

namespace amspec {
namespace {

const TwistModel& edge_model() {
  static const TwistModel m =
      construct_from_conjugacy(Frequency::golden(), CircleDiffeo::from_derivative_harmonics({0.3}, {}));
  return m;
}

void BM_SeriesEval(benchmark::State& state) {
  const FourierSeries& f = edge_model().f;
  const FourierSeries trimmed = f.trimmed(kCoefficientNoiseFloor);
  const FourierSeries& s = state.range(0) ? trimmed : f;
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(x = s.eval(x) + 0.61803398);
  }
  state.SetLabel(std::to_string(s.n_modes()) + " modes");
}
BENCHMARK(BM_SeriesEval)->Arg(0)->Arg(1);

void BM_SeriesFit(benchmark::State& state) {
  const int modes = static_cast<int>(state.range(0));
  const auto fn = [](double x) { return std::exp(0.3 * std::sin(6.283185307179586 * x)); };
  for (auto _ : state) benchmark::DoNotOptimize(fit_series(fn, modes, 4 * modes));
}
BENCHMARK(BM_SeriesFit)->Arg(64)->Arg(256)->Arg(1024);

void BM_Construct(benchmark::State& state) {
  ConstructOptions opts;
  opts.modes = static_cast<int>(state.range(0));
  const CircleDiffeo phi = CircleDiffeo::from_derivative_harmonics({0.3}, {});
  for (auto _ : state) benchmark::DoNotOptimize(construct_from_conjugacy(Frequency::golden(), phi, opts));
}
BENCHMARK(BM_Construct)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_SectionEigenvalues(benchmark::State& state) {
  const TwistModel& m = edge_model();
  const TridiagonalOperator op = quasi_periodic_section(m.V, m.alpha.value, 0.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(op.eigenvalues());
}
BENCHMARK(BM_SectionEigenvalues)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_SturmCount(benchmark::State& state) {
  const TwistModel& m = edge_model();
  const TridiagonalOperator op = quasi_periodic_section(m.V, m.alpha.value, 0.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(op.count_below(-1.0));
}
BENCHMARK(BM_SturmCount)->Arg(2000);

void BM_Lyapunov(benchmark::State& state) {
  const TwistModel& m = edge_model();
  const MatrixCocycle s0 = schrodinger_cocycle(m.V, 0.0, m.alpha.value);
  const double delta = state.range(0) ? m.strip_h0 / 4 : 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(lyapunov_exponent(s0, 10000, delta));
}
BENCHMARK(BM_Lyapunov)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_FiberedRotation(benchmark::State& state) {
  const TwistModel& m = edge_model();
  const MatrixCocycle s = schrodinger_cocycle(m.V, -1.0, m.alpha.value);
  for (auto _ : state) benchmark::DoNotOptimize(fibered_rotation_number(s, 10000));
}
BENCHMARK(BM_FiberedRotation)->Unit(benchmark::kMillisecond);

void BM_CircleRotationNumber(benchmark::State& state) {
  const TwistModel& m = edge_model();
  for (auto _ : state) benchmark::DoNotOptimize(rotation_number([&](double x) { return m.g(x); }, 10000));
}
BENCHMARK(BM_CircleRotationNumber)->Unit(benchmark::kMillisecond);

void BM_MinimizePeriodic(benchmark::State& state) {
  const TwistModel& m = edge_model();
  const long q = state.range(0);
  const long p = q == 5 ? 3 : q == 13 ? 8 : 21;
  const PeriodicOrbitSpec spec{p, q, double(p) / q};
  for (auto _ : state) benchmark::DoNotOptimize(minimize_periodic(m.f, spec));
}
BENCHMARK(BM_MinimizePeriodic)->Arg(5)->Arg(13)->Arg(34)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace amspec

BENCHMARK_MAIN();
