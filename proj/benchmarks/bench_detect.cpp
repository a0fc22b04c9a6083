#include <benchmark/benchmark.h>

#include "copyguard/detect/detectors.hpp"
#include "copyguard/sim/dataset.hpp"

using namespace copyguard;

namespace {

const std::vector<chain::CoinLedger>& corpus() {
    static const auto ledgers = [] {
        std::map<sim::ScenarioKind, double> mix;
        for (auto k : sim::all_kinds()) mix[k] = 1.0;
        return sim::ledgers_of(sim::generate_dataset(200, mix, 7));
    }();
    return ledgers;
}

}  // namespace

static void BM_DetectAll(benchmark::State& st) {
    const auto& l = corpus();
    for (auto _ : st)
        benchmark::DoNotOptimize(
            detect::detect_all(l, {}, curve::CurveParams::defaults(), nullptr, static_cast<std::size_t>(st.range(0))));
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(l.size()));
}
BENCHMARK(BM_DetectAll)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_BumpOnly(benchmark::State& st) {
    const auto& l = corpus();
    for (auto _ : st)
        for (const auto& c : l) benchmark::DoNotOptimize(detect::detect_bump(c, {}).flagged);
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(l.size()));
}
BENCHMARK(BM_BumpOnly)->Unit(benchmark::kMillisecond);
