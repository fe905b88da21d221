// Microbenchmarks for the hot paths of a simulated run: local gradient
// steps, cross-worker averaging and minibatch backprop.

#include <benchmark/benchmark.h>

#include "lsgda/dataset.hpp"
#include "lsgda/local_sgda.hpp"
#include "lsgda/quadratic_saddle.hpp"
#include "lsgda/robust_mlp.hpp"
#include "lsgda/rng.hpp"
#include "lsgda/synthetic.hpp"
#include "lsgda/vec.hpp"

namespace {

using namespace lsgda;

void bench_local_steps(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const QuadraticSaddle prob =
      QuadraticSaddle::random(n, 16, 16, 0.5, 2.0, 0.5, 0.4, 0.1, 1);
  RunConfig cfg;
  cfg.n_workers = n;
  cfg.total_iters = 256;
  cfg.sync_gap = 16;
  cfg.primal_schedule = StepSchedule::constant(1e-3);
  cfg.dual_schedule = StepSchedule::constant(1e-3);
  const Vec64 x0(16, 0.1), y0(16, 0.1);
  for (auto _ : state) {
    const RunResult res = run_local_sgda(prob, cfg, x0, y0);
    benchmark::DoNotOptimize(res.x_avg.data());
  }
  state.SetItemsProcessed(state.iterations() * cfg.total_iters * n);
}
BENCHMARK(bench_local_steps)->Arg(4)->Arg(16)->Arg(64);

void bench_average_vectors(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<Vec64> vs;
  RngStream rng(7);
  for (int i = 0; i < n; ++i) {
    Vec64 v(4096);
    for (double& c : v) c = rng.normal();
    vs.push_back(std::move(v));
  }
  for (auto _ : state) {
    Vec64 avg = average_vectors(vs);
    benchmark::DoNotOptimize(avg.data());
  }
  state.SetBytesProcessed(state.iterations() * n * 4096 * sizeof(double));
}
BENCHMARK(bench_average_vectors)->Arg(8)->Arg(64)->Arg(256);

void bench_mlp_minibatch(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  SyntheticSpec spec;
  spec.kind = TaskKind::Classification;
  spec.n_nodes = 1;
  spec.dim = 60;
  spec.n_classes = 10;
  spec.min_count = 512;
  spec.max_count = 512;
  spec.seed = 3;
  const RobustMlp prob(generate_synthetic(spec), 200, 200, 10, 1.0);
  const Vec64 x = prob.init_weights(5);
  const Vec64 y(60, 0.0);
  RngStream rng(9);
  Vec64 gx, gy;
  for (auto _ : state) {
    prob.stochastic_grad(0, x, y, batch, rng, gx, gy);
    benchmark::DoNotOptimize(gx.data());
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(bench_mlp_minibatch)->Arg(1)->Arg(8)->Arg(32);

} // namespace

BENCHMARK_MAIN();
