#include <benchmark/benchmark.h>

#include "qlab/constructions.hpp"
#include "qlab/games.hpp"

using namespace qlab;

static void BM_RepState(benchmark::State& state) {
  RngStream rng(1);
  Vec phi = embed(StateDistribution::haar(2).sample(rng));
  const int t = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rep_state(t, t / 2, phi));
}
BENCHMARK(BM_RepState)->Arg(3)->Arg(5);

static void BM_SimChrsInit(benchmark::State& state) {
  RngStream rng(2);
  Vec phi = embed(StateDistribution::haar(1).sample(rng));
  const int budget = static_cast<int>(state.range(0));
  for (auto _ : state) {
    OracleModel chrs = OracleModel::with_hidden(OracleKind::Chrs, phi);
    SimChrs sim(budget, chrs, rng);
    benchmark::DoNotOptimize(sim.joint_state());
  }
}
BENCHMARK(BM_SimChrsInit)->Arg(3)->Arg(5);

static void BM_BinomLemmaPhase(benchmark::State& state) {
  StateDistribution dist = StateDistribution::discrete_phase(2, 5, 1);
  for (auto _ : state) benchmark::DoNotOptimize(verify_binom_lemma(dist, 2, 2));
}
BENCHMARK(BM_BinomLemmaPhase);

static void BM_ReflectChannel(benchmark::State& state) {
  RngStream rng(3);
  const Eigen::Index d = 16;
  Vec psi(d);
  for (Eigen::Index i = 0; i < d; ++i) psi(i) = Cx(rng.normal(), rng.normal());
  psi.normalize();
  Mat g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = Cx(rng.normal(), rng.normal());
  Mat rho = g * g.adjoint();
  rho /= rho.trace();
  const int copies = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(reflect_about_state_sim(rho, psi, copies));
}
BENCHMARK(BM_ReflectChannel)->Arg(7)->Arg(99);

static void BM_KeyLemmaProjected(benchmark::State& state) {
  KeyLemmaParams p{0, 0, 1, 1, static_cast<int>(state.range(0))};
  for (auto _ : state)
    benchmark::DoNotOptimize(verify_key_lemma(p, PptMethod::Projected).lhs);
}
BENCHMARK(BM_KeyLemmaProjected)->Arg(8)->Arg(16);

static void BM_KeyLemmaDense(benchmark::State& state) {
  KeyLemmaParams p{0, 0, 1, 1, static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(verify_key_lemma(p, PptMethod::Dense).lhs);
}
BENCHMARK(BM_KeyLemmaDense)->Arg(8)->Arg(16);
