#include <benchmark/benchmark.h>

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "gibbsnet/data.hpp"
#include "gibbsnet/descriptors.hpp"
#include "gibbsnet/model/model.hpp"
#include "gibbsnet/thermo.hpp"
#include "gibbsnet/train.hpp"

using namespace gibbsnet;

namespace {

model::ModelParameters make_model(std::size_t dim, std::size_t hidden) {
    model::ArchitectureConfig c;
    c.descriptor_dim = dim;
    c.hidden = hidden;
    return model::ModelParameters::random(c, 1);
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> d(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

void BM_PredictGammas(benchmark::State& state) {
    const auto hidden = static_cast<std::size_t>(state.range(0));
    const auto p = make_model(kDefaultDescriptorDim, hidden);
    std::mt19937_64 rng(2);
    const auto e1 = random_vector(rng, kDefaultDescriptorDim);
    const auto e2 = random_vector(rng, kDefaultDescriptorDim);
    const model::StandardizedQuery q{e1, e2, 0.3, model::Composition::from_x1(0.4)};
    for (auto _ : state) benchmark::DoNotOptimize(model::predict_gammas(p, q));
}
BENCHMARK(BM_PredictGammas)->Arg(32)->Arg(96);

// Composition sweep with the component embeddings computed once.
void BM_PairEvaluatorGrid(benchmark::State& state) {
    const auto p = make_model(kDefaultDescriptorDim, 96);
    std::mt19937_64 rng(3);
    const auto e1 = random_vector(rng, kDefaultDescriptorDim);
    const auto e2 = random_vector(rng, kDefaultDescriptorDim);
    for (auto _ : state) {
        const model::PairEvaluator pair(p, e1, e2, 0.3);
        for (int k = 0; k <= 100; ++k) benchmark::DoNotOptimize(pair.at(model::Composition::from_x1(0.01 * k)));
    }
}
BENCHMARK(BM_PairEvaluatorGrid);

void BM_BatchLoss(benchmark::State& state) {
    const auto table = featurize_all(builtin_smiles_corpus(20), kDefaultDescriptorDim);
    const auto records = thermo::synthesize_dataset(table, {});
    const auto stats = fit_standardizer(records, table).stats;
    const auto data = prepare_dataset(records, table, stats);
    const auto p = make_model(kDefaultDescriptorDim, 32);
    train::TrainConfig c;
    c.threads = static_cast<std::size_t>(state.range(0));
    std::vector<std::uint32_t> batch(64);
    std::iota(batch.begin(), batch.end(), 0u);
    for (auto _ : state) benchmark::DoNotOptimize(train::batch_loss(p, data, batch, c));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch.size()));
}
BENCHMARK(BM_BatchLoss)->Arg(1)->Arg(4);

void BM_Featurize(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(featurize("CC(=O)Oc1ccccc1C(=O)O"));
}
BENCHMARK(BM_Featurize);

}  // namespace

BENCHMARK_MAIN();
