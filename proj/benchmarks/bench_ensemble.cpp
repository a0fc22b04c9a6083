#include <benchmark/benchmark.h>

#include <random>

#include "copyguard/ensemble/ensemble.hpp"

using namespace copyguard;

namespace {

std::vector<ensemble::Sample> samples(std::size_t n) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<ensemble::Sample> out(n);
    for (auto& s : out) {
        s.label = u(rng) < 0.3;
        for (auto& c : s.conf) c = std::min(1.0, u(rng) * 0.8 + (s.label ? 0.2 : 0.0));
        s.split = features::Split::Val;
    }
    return out;
}

}  // namespace

static void BM_RocAuc(benchmark::State& st) {
    const auto s = samples(static_cast<std::size_t>(st.range(0)));
    const auto scores = ensemble::scores_of(s, ensemble::WeightVector::uniform());
    const auto labels = ensemble::labels_of(s);
    for (auto _ : st) benchmark::DoNotOptimize(ensemble::roc_auc(scores, labels));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_RocAuc)->Arg(1'000)->Arg(100'000);

static void BM_FitWeights(benchmark::State& st) {
    const auto s = samples(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(ensemble::fit_weights(s, std::nullopt, 1).auc);
}
BENCHMARK(BM_FitWeights)->Arg(500)->Arg(5'000)->Unit(benchmark::kMillisecond);
