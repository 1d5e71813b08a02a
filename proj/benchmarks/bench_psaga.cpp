#include <psaga/baselines.hpp>
#include <psaga/diagnostics.hpp>
#include <psaga/losses.hpp>
#include <psaga/point_saga.hpp>
#include <psaga/step_size.hpp>

#include <benchmark/benchmark.h>

#include <vector>

using namespace psaga;

namespace {

Problem sparse_problem(std::size_t n, std::size_t d, double density, double mu) {
  SyntheticOptions o;
  o.n = n;
  o.d = d;
  o.density = density;
  o.loss = LossKind::logistic;
  o.mu = mu;
  o.seed = 1;
  return make_synthetic(o);
}

}  // namespace

static void BM_ProxLogistic(benchmark::State &state) {
  const double gp = std::ldexp(1.0, static_cast<int>(state.range(0)));
  Rng rng(3);
  std::vector<double> a(1024);
  for (double &v : a) v = 3.0 * rng.normal();
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(prox_logistic(a[k++ & 1023], 1.0, gp));
  }
}
BENCHMARK(BM_ProxLogistic)->Arg(-6)->Arg(0)->Arg(6);

static void BM_ProxHinge(benchmark::State &state) {
  Rng rng(3);
  std::vector<double> a(1024);
  for (double &v : a) v = 3.0 * rng.normal();
  std::size_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(prox_hinge(a[k++ & 1023], 1.0, 0.7));
}
BENCHMARK(BM_ProxHinge);

template <class Solver>
static void step_loop(benchmark::State &state, Solver &solver, std::size_t n) {
  IndexSampler sampler(n, 5);
  for (auto _ : state) solver.step(sampler.next());
  state.SetItemsProcessed(state.iterations());
}

static void BM_PointSagaDenseStep(benchmark::State &state) {
  const Problem p = sparse_problem(500, static_cast<std::size_t>(state.range(0)), 0.01, 1e-3);
  PointSagaOptions o;
  o.gamma = step_size_default(p.n(), p.smoothness, p.mu);
  o.storage = TableStorage::loss_only;
  PointSaga solver(p, o);
  step_loop(state, solver, p.n());
}
BENCHMARK(BM_PointSagaDenseStep)->Arg(1000)->Arg(10000)->Arg(100000);

static void BM_PointSagaLazyStep(benchmark::State &state) {
  const Problem p = sparse_problem(500, static_cast<std::size_t>(state.range(0)), 0.01, 1e-3);
  PointSagaOptions o;
  o.gamma = step_size_default(p.n(), p.smoothness, p.mu);
  o.storage = TableStorage::loss_only;
  LazyPointSaga solver(p, o);
  step_loop(state, solver, p.n());
}
BENCHMARK(BM_PointSagaLazyStep)->Arg(1000)->Arg(10000)->Arg(100000);

static void BM_SagaStep(benchmark::State &state) {
  const Problem p = sparse_problem(500, static_cast<std::size_t>(state.range(0)), 0.01, 1e-3);
  Saga solver(p, 1.0 / (3.0 * p.smoothness));
  step_loop(state, solver, p.n());
}
BENCHMARK(BM_SagaStep)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
