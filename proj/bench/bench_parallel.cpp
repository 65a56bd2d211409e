#include <benchmark/benchmark.h>

#include <cmath>
#include <thread>

#include "expins/crop_case.hpp"
#include "expins/cyber_sim.hpp"
#include "expins/expectile.hpp"
#include "expins/parallel.hpp"
#include "expins/payment_design.hpp"

using namespace expins;

namespace {

int max_workers() { return static_cast<int>(std::max(2u, std::thread::hardware_concurrency())); }

// Arg(0) is the serial reference; any other value is an OpenMP worker count.
ExecConfig exec_for(const benchmark::State& state) {
  return ExecConfig{state.range(0) == 0 ? 1 : static_cast<int>(state.range(0))};
}

void worker_args(benchmark::internal::Benchmark* b) {
  b->Arg(0);
  for (int w = 2; w <= max_workers(); w *= 2) b->Arg(w);
  b->Unit(benchmark::kMillisecond)->UseRealTime();
}

void BM_MapIndexed(benchmark::State& state) {
  const auto d = Distribution::truncated_gamma_at_level(2.0, 1.5, 0.3);
  auto f = [&d](std::size_t i) { return expectile(d, 0.01 + 0.98 * static_cast<double>(i % 997) / 997.0); };
  for (auto _ : state) {
    auto out = state.range(0) == 0 ? map_indexed_serial(20000, f)
                                   : map_indexed_omp(20000, static_cast<int>(state.range(0)), f);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_MapIndexed)->Apply(worker_args);

void BM_CropPaymentCurve(benchmark::State& state) {
  const auto p = generate_portfolio(CropConfig{});
  const auto grid = default_theta_grid();
  const auto exec = exec_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(payment_curve(p, central_farm(p), 0.7, grid, exec));
}
BENCHMARK(BM_CropPaymentCurve)->Apply(worker_args);

void BM_BasisRiskDecomposition(benchmark::State& state) {
  const auto p = generate_portfolio(CropConfig{});
  const CropIncidentModel model(p, central_farm(p));
  const auto exec = exec_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(min_basis_risk_decomposition(model, model.trigger(), 200000, 7, exec));
}
BENCHMARK(BM_BasisRiskDecomposition)->Apply(worker_args);

void BM_CyberStudy(benchmark::State& state) {
  StudyConfig cfg;
  cfg.runs = 100;
  const auto exec = exec_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(run_study(cfg, exec).runs.size());
}
BENCHMARK(BM_CyberStudy)->Apply(worker_args);

}  // namespace

BENCHMARK_MAIN();
