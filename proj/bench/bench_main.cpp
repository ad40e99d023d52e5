#include <benchmark/benchmark.h>

#include <assoc_clt/cltlab.hpp>
#include <assoc_clt/fft.hpp>
#include <assoc_clt/fields.hpp>

using namespace assoc_clt;

static void BM_FftForward(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const int d = static_cast<int>(state.range(1));
  FftPlan plan(std::vector<int>(static_cast<std::size_t>(d), side));
  FftBuffer buf(plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    buf.re(i) = static_cast<double>(i % 7);
    buf.im(i) = 0.0;
  }
  for (auto _ : state) {
    plan.forward(buf);
    benchmark::DoNotOptimize(buf.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(plan.size()));
}
BENCHMARK(BM_FftForward)->Args({1 << 12, 1})->Args({1 << 16, 1})->Args({256, 2})->Args({32, 3});

static void BM_GaussianSample(benchmark::State& state) {
  const std::int64_t side = state.range(0);
  const auto model = CovarianceModel::radial_power(1, 1.0, 1.0);
  const auto sampler = make_gaussian(model, MultiIndex{4 * side});
  const Box box = Box::from_extent(MultiIndex{side});
  std::uint64_t r = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(box, StreamId{1, r++, 0}));
  state.SetItemsProcessed(state.iterations() * side);
}
BENCHMARK(BM_GaussianSample)->Arg(1 << 10)->Arg(1 << 14);

static void BM_CenteredSumsIid(benchmark::State& state) {
  const auto sampler = make_iid(1, 1.0, MarginalLaw::normal);
  const RunOptions run{static_cast<std::int64_t>(state.range(1)), 7, 1};
  const MultiIndex n{state.range(0)};
  for (auto _ : state) benchmark::DoNotOptimize(centered_sums(sampler, n, run));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}
BENCHMARK(BM_CenteredSumsIid)->Args({1024, 200})->Args({4096, 200});

static void BM_CenteredSumsMa2d(benchmark::State& state) {
  const auto sampler = make_moving_average(2, {{MultiIndex{0, 0}, 1.0}, {MultiIndex{1, 0}, 0.5}, {MultiIndex{0, 1}, 0.5}}, 1.0);
  const RunOptions run{100, 7, 1};
  const MultiIndex n{state.range(0), state.range(0)};
  for (auto _ : state) benchmark::DoNotOptimize(centered_sums(sampler, n, run));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0) * 100);
}
BENCHMARK(BM_CenteredSumsMa2d)->Arg(32)->Arg(64);
BENCHMARK_MAIN();
