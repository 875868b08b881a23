// Serial reference vs OpenMP for the grid kernels.  Arg 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include "dcmicro/corpus.hpp"
#include "dcmicro/extension.hpp"
#include "dcmicro/fbi.hpp"
#include "dcmicro/log.hpp"
#include "dcmicro/parallel.hpp"

using namespace dcmicro;

namespace {

void set_mode(const benchmark::State& st) {
  set_warnings_enabled(false);
  set_parallel(st.range(0) != 0);
}

void BM_ExtensionField(benchmark::State& st) {
  set_mode(st);
  const auto seq = RegularSequence::gevrey(2.0);
  const ExtensionOperator op(seq, corpus_function("rational"));
  const auto shells = default_shells(op.delta(), 4);
  const auto grid = box_grid(Box::cube(1, 1.0), 5);
  for (auto _ : st) benchmark::DoNotOptimize(build_field(op, grid, shells));
  st.SetLabel(st.range(0) ? "parallel" : "serial");
}

void BM_WavefrontScan(benchmark::State& st) {
  set_mode(st);
  const auto seq = RegularSequence::gevrey(2.0);
  const auto u = corpus_member("gaussian");
  const FBIKernel k{1.0, corpus_chart("chart_flat")};
  const std::vector<std::vector<double>> pts = {{-0.5}, {0.0}, {0.5}};
  for (auto _ : st) benchmark::DoNotOptimize(wavefront_scan(u, k, pts, unit_directions(1, 2), seq));
  st.SetLabel(st.range(0) ? "parallel" : "serial");
}

void BM_MollifiedSeries(benchmark::State& st) {
  set_mode(st);
  const RadialCutoff psi(2, 0.5);
  const auto rule = ball_rule_for_degree(psi, 12);
  Taylor coeffs(2, 12);
  for (int d : coeffs.layout().valid()) coeffs.dense(d) = 1.0 / (1.0 + d);
  VecC v(2);
  v << 0.01, 0.02;
  for (auto _ : st) benchmark::DoNotOptimize(mollified_series(rule, coeffs, v, [](double) { return 12; }));
  st.SetLabel(st.range(0) ? "parallel" : "serial");
}

}  // namespace

BENCHMARK(BM_ExtensionField)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WavefrontScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MollifiedSeries)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
