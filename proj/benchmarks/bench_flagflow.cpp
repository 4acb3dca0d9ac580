#include <benchmark/benchmark.h>

#include <flagflow/experiments.hpp>
#include <flagflow/lyapunov.hpp>

using namespace flagflow;

static void BM_PolyRhs(benchmark::State& state) {
  Vec3 x(0.3, 1.7, 0.9);
  for (auto _ : state) {
    x = su3::poly_rhs(x).normalized();
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_PolyRhs);

static void BM_ChartFieldEval(benchmark::State& state) {
  const auto& chart = experiments::compactified_ricci_field().chart(compact::ChartId::U1);
  Vec3 z(0.4, 1.3, 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(chart(z));
    benchmark::DoNotOptimize(chart.jacobian(z));
  }
}
BENCHMARK(BM_ChartFieldEval);

static void BM_AmbientBlowUp(benchmark::State& state) {
  dyn::IntegratorConfig cfg;
  cfg.t_end = 1.0;
  dyn::Events ev;
  ev.blow_up_radius = 1e6;
  const auto field = su3::poly_flow_field();
  for (auto _ : state) benchmark::DoNotOptimize(dyn::integrate_with_events(field, Vec3(1, 1.1, 0.9), cfg, ev));
}
BENCHMARK(BM_AmbientBlowUp);

static void BM_CompactifiedToInfinity(benchmark::State& state) {
  dyn::IntegratorConfig cfg;
  cfg.t_end = 200.0;
  const auto& f = experiments::compactified_ricci_field();
  for (auto _ : state) benchmark::DoNotOptimize(dyn::integrate_compactified(f, Vec3(0.3, 1.7, 0.9), cfg));
}
BENCHMARK(BM_CompactifiedToInfinity);

static void BM_InfinityCensus(benchmark::State& state) {
  compact::EquilibriumSearchConfig cfg;
  cfg.threads = 1;
  const auto& f = experiments::compactified_ricci_field();
  for (auto _ : state) benchmark::DoNotOptimize(compact::find_infinity_equilibria(f, cfg));
}
BENCHMARK(BM_InfinityCensus)->Unit(benchmark::kMillisecond);

static void BM_LineSpectra(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(experiments::line_spectra());
}
BENCHMARK(BM_LineSpectra)->Unit(benchmark::kMillisecond);

static void BM_Scan(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(experiments::no_interior_equilibria_scan(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Scan)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_Basin(benchmark::State& state) {
  experiments::BasinConfig cfg;
  cfg.samples = 50;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(experiments::cylinder_basin(cfg));
}
BENCHMARK(BM_Basin)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
