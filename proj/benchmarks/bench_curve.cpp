#include <benchmark/benchmark.h>

#include "copyguard/curve/bonding_curve.hpp"
#include "copyguard/econ/copier.hpp"

using namespace copyguard;

static void BM_BuySellRoundTrip(benchmark::State& st) {
    const auto s0 = curve::CurveState::fresh(curve::CurveParams::defaults());
    const auto q = Decimal::parse("1234567.891");
    for (auto _ : st) {
        auto b = curve::apply_buy(s0, q);
        auto s = curve::apply_sell(b.state, q);
        benchmark::DoNotOptimize(s.cash);
    }
}
BENCHMARK(BM_BuySellRoundTrip);

static void BM_CopierReplay(benchmark::State& st) {
    econ::TradeSeq t;
    t.initial_state = curve::CurveState::fresh(curve::CurveParams::defaults());
    for (int i = 0; i < st.range(0); ++i) t.trades.push_back(Decimal::from_int(100'000 + i));
    for (int i = 0; i < st.range(0); ++i) t.trades.push_back(-Decimal::from_int(100'000 + i));
    for (auto _ : st) benchmark::DoNotOptimize(econ::replay_with_copier(t).r_copier);
    st.SetItemsProcessed(st.iterations() * st.range(0) * 2);
}
BENCHMARK(BM_CopierReplay)->Arg(8)->Arg(64);
