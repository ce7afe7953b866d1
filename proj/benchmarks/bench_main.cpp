#include <benchmark/benchmark.h>

#include "psdcuts/cuts.hpp"
#include "psdcuts/engine.hpp"
#include "psdcuts/harness.hpp"
#include "psdcuts/linalg.hpp"
#include "psdcuts/lp.hpp"
#include "psdcuts/model.hpp"
#include "psdcuts/random.hpp"

using namespace psdcuts;

namespace {

struct RltPoint {
  ExtendedModel model;
  XtildeView xt;
  EigenPair most_negative;
};

RltPoint rlt_point(Index n) {
  ExtendedModel model = lift(gen_boxqp(n, 0.8, 1));
  DualSimplex lp;
  load_model(lp, model);
  lp.solve();
  XtildeView xt = assemble_xtilde(model, lp.primal());
  EigenPair e = min_eigen(xt.matrix());
  return {std::move(model), std::move(xt), std::move(e)};
}

void BM_SymEigen(benchmark::State& state) {
  Rng rng(1);
  const auto d = static_cast<Index>(state.range(0));
  Matrix m(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = i; j < d; ++j) m(i, j) = m(j, i) = rng.uniform(-1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(sym_eigen(m));
}
BENCHMARK(BM_SymEigen)->Arg(11)->Arg(21)->Arg(51)->Arg(101);

void BM_Sparsify1(benchmark::State& state) {
  const RltPoint p = rlt_point(static_cast<Index>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(sparsify1(p.most_negative.vector, p.xt, {0.3, 0.6}, Rng(7)));
}
BENCHMARK(BM_Sparsify1)->Arg(10)->Arg(20)->Arg(40);

void BM_Sparsify2(benchmark::State& state) {
  const RltPoint p = rlt_point(static_cast<Index>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        sparsify2(p.most_negative.vector, p.xt, SparsifyParams::sparse2_defaults(), Rng(7)));
}
BENCHMARK(BM_Sparsify2)->Arg(10)->Arg(20)->Arg(40);

void BM_RltSolve(benchmark::State& state) {
  const ExtendedModel model = lift(gen_boxqp(static_cast<Index>(state.range(0)), 0.8, 1));
  for (auto _ : state) {
    DualSimplex lp;
    load_model(lp, model);
    benchmark::DoNotOptimize(lp.solve());
  }
}
BENCHMARK(BM_RltSolve)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_Run(benchmark::State& state) {
  const ExtendedModel model = lift(gen_boxqp(20, 0.8, 1));
  const auto strategy = static_cast<Strategy>(state.range(0));
  LoopConfig cfg = LoopConfig::for_strategy(strategy);
  cfg.max_iterations = 5;
  for (auto _ : state) {
    DualSimplex lp;
    benchmark::DoNotOptimize(run(model, cfg, lp));
  }
  state.SetLabel(std::string(to_string(strategy)));
}
BENCHMARK(BM_Run)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
