#include <benchmark/benchmark.h>

#include "qlab/hilbert.hpp"

using namespace qlab;

namespace {

Mat random_density(Eigen::Index d, RngStream& rng) {
  Mat g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = Cx(rng.normal(), rng.normal());
  Mat rho = g * g.adjoint();
  return rho / rho.trace();
}

}  // namespace

static void BM_PartialTrace(benchmark::State& state) {
  const Eigen::Index d = state.range(0);
  RngStream rng(1);
  DensityOperator rho(random_density(d * d, rng));
  RegisterLayout layout({d, d});
  const std::size_t keep[1] = {0};
  for (auto _ : state)
    benchmark::DoNotOptimize(partial_trace(rho, layout, std::span(keep, 1)));
}
BENCHMARK(BM_PartialTrace)->Arg(5)->Arg(9)->Arg(17);

static void BM_PartialTranspose(benchmark::State& state) {
  const Eigen::Index d = state.range(0);
  RngStream rng(2);
  Mat rho = random_density(d * d, rng);
  RegisterLayout layout({d, d});
  const std::size_t second[1] = {1};
  for (auto _ : state)
    benchmark::DoNotOptimize(partial_transpose(rho, layout, std::span(second, 1)));
}
BENCHMARK(BM_PartialTranspose)->Arg(5)->Arg(9)->Arg(17);

static void BM_SymProjector(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sym_projector(4, state.range(0)));
}
BENCHMARK(BM_SymProjector)->Arg(2)->Arg(4)->Arg(5);

static void BM_TraceNormHermitian(benchmark::State& state) {
  const Eigen::Index d = state.range(0);
  RngStream rng(3);
  Mat a = random_density(d, rng);
  Mat b = random_density(d, rng);
  Mat diff = a - b;
  for (auto _ : state) benchmark::DoNotOptimize(trace_norm_hermitian(diff));
}
BENCHMARK(BM_TraceNormHermitian)->Arg(64)->Arg(256)->Arg(1024);

static void BM_EnsembleTraceDistance(benchmark::State& state) {
  const Eigen::Index dim = 4096;
  const int parts = static_cast<int>(state.range(0));
  RngStream rng(4);
  auto make = [&](int count) {
    StateEnsemble e;
    for (int i = 0; i < count; ++i) {
      Vec v(dim);
      for (Eigen::Index k = 0; k < dim; ++k) v(k) = Cx(rng.normal(), rng.normal());
      v.normalize();
      e.append(1.0 / count, std::move(v));
    }
    return e;
  };
  StateEnsemble a = make(parts), b = make(parts);
  for (auto _ : state) benchmark::DoNotOptimize(trace_distance(a, b));
}
BENCHMARK(BM_EnsembleTraceDistance)->Arg(16)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
