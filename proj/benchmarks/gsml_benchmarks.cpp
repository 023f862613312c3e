#include <benchmark/benchmark.h>

#include "gsml/encoder.hpp"
#include "gsml/evaluation.hpp"
#include "gsml/gsmlp.hpp"
#include "gsml/smlc.hpp"
#include "gsml/synthetic.hpp"
#include "gsml/trainer.hpp"

namespace {

using namespace gsml;

// Default-shaped dataset with `ids` identities of 8 images.
Dataset dataset_of(std::size_t ids) {
  DatasetSpec spec;
  spec.n_identities = ids;
  return generate(spec);
}

LookupTable table_of(const Dataset& data) {
  return init_table(encode_dataset(LinearEncoder::random(32, data.raw_dim, 0), data));
}

void BM_BuildAdjacency(benchmark::State& state) {
  const Dataset data = dataset_of(static_cast<std::size_t>(state.range(0)));
  const LookupTable table = table_of(data);
  for (auto _ : state) benchmark::DoNotOptimize(build_adjacency(table, 0.6));
  state.SetComplexityN(static_cast<std::int64_t>(data.size()));
}
BENCHMARK(BM_BuildAdjacency)->Arg(25)->Arg(50)->Arg(100)->Complexity();

void BM_PredictAll(benchmark::State& state) {
  const Dataset data = dataset_of(static_cast<std::size_t>(state.range(0)));
  const LookupTable table = table_of(data);
  for (auto _ : state) benchmark::DoNotOptimize(predict_all(table, {Predictor::kGsmlp, 0.6, 4}));
  state.SetComplexityN(static_cast<std::int64_t>(data.size()));
}
BENCHMARK(BM_PredictAll)->Arg(25)->Arg(50)->Arg(100)->Complexity();

void BM_SmlcGradient(benchmark::State& state) {
  const Dataset data = dataset_of(50);
  const LookupTable table = table_of(data);
  const auto labels = predict_all(table, {Predictor::kGsmlp, 0.6, 4});
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        smlc_loss_and_gradient(table.row(i), table, labels[i], SmlcConfig{0.01, false}));
    i = (i + 1) % table.size();
  }
}
BENCHMARK(BM_SmlcGradient);

void BM_EncodeGradient(benchmark::State& state) {
  const Dataset data = dataset_of(50);
  const auto enc = LinearEncoder::random(32, data.raw_dim, 0);
  const std::vector<double> upstream(32, 0.1);
  Matrix accum(32, data.raw_dim);
  std::size_t i = 0;
  for (auto _ : state) {
    enc.accumulate_gradient(data.samples[i].raw, upstream, accum);
    benchmark::ClobberMemory();
    i = (i + 1) % data.size();
  }
}
BENCHMARK(BM_EncodeGradient);

// One warm-up epoch plus one epoch with refreshed multi-labels.
void BM_TrainTwoEpochs(benchmark::State& state) {
  const Dataset data = dataset_of(50);
  TrainConfig config;
  config.epochs = 2;
  config.warmup_epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train(config, data));
}
BENCHMARK(BM_TrainTwoEpochs)->Unit(benchmark::kMillisecond);

void BM_Evaluate(benchmark::State& state) {
  const Dataset data = dataset_of(50);
  const auto features = encode_dataset(LinearEncoder::random(32, data.raw_dim, 0), data);
  const auto protocol = standard_protocol(data);
  for (auto _ : state) benchmark::DoNotOptimize(cmc_map(data, features, protocol));
}
BENCHMARK(BM_Evaluate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
