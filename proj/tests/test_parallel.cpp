#include <doctest.h>

#include "dcmicro/corpus.hpp"
#include "dcmicro/extension.hpp"
#include "dcmicro/fbi.hpp"
#include "dcmicro/parallel.hpp"

using namespace dcmicro;

// The OpenMP kernels reduce in index order: results must match the serial path bit for bit.

TEST_CASE("extension field") {
  const auto seq = RegularSequence::gevrey(2.0);
  ExtensionConfig cfg;
  cfg.V = Box{{-1.0}, {1.0}};
  const ExtensionOperator op(seq, corpus_function("rational"), cfg);
  const auto grid = box_grid(Box{{-0.8}, {0.8}}, 5);
  const auto shells = default_shells(op.delta(), 4);
  set_threads(4);
  set_parallel(true);
  const auto par = build_field(op, grid, shells);
  ExtensionField ser;
  {
    SerialScope s;
    CHECK_FALSE(parallel_enabled());
    ser = build_field(op, grid, shells);
  }
  CHECK(parallel_enabled());
  REQUIRE(par.samples.size() == ser.samples.size());
  for (size_t i = 0; i < par.samples.size(); ++i) {
    CHECK(par.samples[i].F == ser.samples[i].F);
    CHECK(par.samples[i].residual == ser.samples[i].residual);
  }
}

TEST_CASE("wave-front scan") {
  const auto seq = RegularSequence::gevrey(2.0);
  const FBIKernel k{1.0, corpus_chart("chart_flat")};
  const std::vector<std::vector<double>> pts = {{-0.5}, {0.0}, {0.5}};
  set_threads(4);
  set_parallel(true);
  const auto par = wavefront_scan(corpus_member("heaviside"), k, pts, unit_directions(1, 2), seq);
  ScanResult ser;
  {
    SerialScope s;
    ser = wavefront_scan(corpus_member("heaviside"), k, pts, unit_directions(1, 2), seq);
  }
  REQUIRE(par.cells.size() == ser.cells.size());
  for (size_t i = 0; i < par.cells.size(); ++i) {
    CHECK(par.cells[i].values == ser.cells[i].values);
    CHECK(par.cells[i].fit.A == ser.cells[i].fit.A);
  }
}

TEST_CASE("mollified series") {
  const RadialCutoff psi(2, 0.5);
  const auto rule = ball_rule_for_degree(psi, 10);
  Taylor c(2, 10);
  for (int d : c.layout().valid()) c.dense(d) = 1.0 / (1.0 + d);
  VecC v(2);
  v << 0.01, -0.02;
  set_threads(4);
  set_parallel(true);
  const cplx par = mollified_series(rule, c, v, [](double) { return 10; });
  cplx ser;
  {
    SerialScope s;
    ser = mollified_series(rule, c, v, [](double) { return 10; });
  }
  CHECK(par == ser);
}
