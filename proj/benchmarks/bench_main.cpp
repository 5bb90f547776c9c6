#include <benchmark/benchmark.h>

#include <memory>

#include "poolnet/cnn.hpp"
#include "poolnet/mlp.hpp"
#include "poolnet/patch_batch.hpp"
#include "poolnet/svm.hpp"

using namespace poolnet;

namespace {

// Noiseless data at the paper's scale: d = l = 20, n = 10.
Dataset paper_data(int m, double rho, std::uint64_t seed) {
  RngStream rng(seed);
  auto ps = std::make_shared<const PatternSet>(PatternSet::sample(20, 20, rng));
  return sample_dataset(ps, 10, m, rng, rho);
}

void BM_ForwardBatch(benchmark::State& state) {
  const Dataset ds = paper_data(static_cast<int>(state.range(0)), state.range(1) / 10.0, 1);
  const PatchBatch batch = PatchBatch::from_dataset(ds);
  RngStream rng(2);
  const CnnParams p = init_cnn(500, 20, 1e-2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(forward_batch(p, batch));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBatch)->Args({256, 0})->Args({256, 10})->Args({1024, 10});

void BM_BatchGradient(benchmark::State& state) {
  const Dataset ds = paper_data(static_cast<int>(state.range(0)), state.range(1) / 10.0, 1);
  const PatchBatch batch = PatchBatch::from_dataset(ds);
  RngStream rng(2);
  const CnnParams p = init_cnn(500, 20, 1e-2, rng);
  for (auto _ : state) {
    const BatchForward f = forward_batch(p, batch);
    benchmark::DoNotOptimize(batch_gradient(p, batch, f, LossKind::Logistic, true, true));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BatchGradient)->Args({256, 0})->Args({256, 10})->Args({1024, 10});

void BM_HardMarginSvm(benchmark::State& state) {
  const Dataset ds = paper_data(static_cast<int>(state.range(0)), 0.0, 3);
  for (auto _ : state) benchmark::DoNotOptimize(hard_margin_svm(ds));
}
BENCHMARK(BM_HardMarginSvm)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_MlpGradient(benchmark::State& state) {
  const Dataset ds = paper_data(static_cast<int>(state.range(0)), 1.0, 4);
  const Matrix inputs = flat_inputs(ds.samples);
  std::vector<int> labels;
  for (const auto& s : ds.samples) labels.push_back(s.label);
  RngStream rng(5);
  const MlpParams p = init_mlp(52, 200, 0.1, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mlp_gradient(p, inputs, labels, LossKind::Logistic));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MlpGradient)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
