#include <gtest/gtest.h>

#include "bump_oracle.hpp"
#include "copyguard/common/error.hpp"
#include "copyguard/detect/detectors.hpp"
#include "gen.hpp"
#include "ledger_builder.hpp"

using namespace copyguard;
using namespace copyguard::detect;
using cgtest::LedgerBuilder;

namespace {

DetectionConfig cfg() { return {}; }

// Declarative restatements over raw rows.
bool bundle_predicate(const chain::CoinLedger& l) {
    return std::any_of(l.txs.begin(), l.txs.end(), [&](const chain::TxRecord& t) {
        return t.kind == chain::TxKind::Buy && t.block == *l.launch_block && t.trader != *l.creator;
    });
}
bool sniper_predicate(const chain::CoinLedger& l, std::uint64_t K) {
    return std::any_of(l.txs.begin(), l.txs.end(), [&](const chain::TxRecord& t) {
        return t.kind == chain::TxKind::Buy && t.block > *l.launch_block &&
               t.block - *l.launch_block <= K && t.trader != *l.creator;
    });
}

class FixedClassifier : public CommentClassifier {
public:
    std::vector<bool> classify(std::span<const chain::CommentRecord> cs) override {
        std::vector<bool> out;
        for (const auto& c : cs) out.push_back(c.text.find("MOON") != std::string::npos);
        return out;
    }
};

class BrokenClassifier : public CommentClassifier {
public:
    std::vector<bool> classify(std::span<const chain::CommentRecord>) override {
        throw Error(ErrorCode::ClassifierUnavailable, "offline");
    }
};

}  // namespace

TEST(Bundle, Examples) {
    EXPECT_TRUE(detect_bundle(LedgerBuilder().create("A", 10).buy("B", 10, "5").build()));
    EXPECT_FALSE(detect_bundle(LedgerBuilder().create("A", 10).buy("A", 10, "5").buy("B", 11, "5").build()));
    EXPECT_FALSE(detect_bundle(LedgerBuilder().create("A", 10).build()));
    try {
        detect_bundle(LedgerBuilder().buy("B", 10, "5").build());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::CreatorUnknown);
    }
}

TEST(Sniper, Examples) {
    EXPECT_TRUE(detect_sniper(LedgerBuilder().create("A", 10).buy("B", 13, "5").build(), cfg()));
    EXPECT_FALSE(detect_sniper(LedgerBuilder().create("A", 10).buy("B", 16, "5").build(), cfg()));
    EXPECT_FALSE(detect_sniper(LedgerBuilder().create("A", 10).buy("A", 12, "5").build(), cfg()));
    EXPECT_TRUE(detect_sniper(LedgerBuilder().create("A", 10).buy("B", 15, "5").build(), cfg()));
    EXPECT_FALSE(detect_sniper(LedgerBuilder().create("A", 10).buy("B", 10, "5").build(), cfg()));
}

TEST(Bump, HundredFlipsNetZero) {
    LedgerBuilder b;
    b.create("A", 1);
    std::uint64_t blk = 2;
    for (int i = 0; i < 50; ++i) {
        b.buy("bot", blk++, "1000");
        b.sell("bot", blk++, "1000");
    }
    b.buy("bot", blk++, "500");
    b.sell("bot", blk++, "500");
    auto r = detect_bump(b.build(), cfg());
    const auto& w = r.wallets.at("bot");
    EXPECT_EQ(w.flips, 100);
    EXPECT_TRUE(w.net_position.is_zero());
    EXPECT_EQ(w.alpha, Real(100));
    EXPECT_TRUE(r.flagged);
}

TEST(Bump, BuyOnlyWallet) {
    auto r = detect_bump(LedgerBuilder().create("A", 1).buy("w", 2, "10").buy("w", 3, "10").build(), cfg());
    EXPECT_EQ(r.wallets.at("w").flips, 0);
    EXPECT_FALSE(r.flagged);
}

TEST(Bump, OverlappingPairsCount) {
    auto r = detect_bump(LedgerBuilder().buy("w", 2, "7").sell("w", 3, "7").buy("w", 4, "7").build(), cfg());
    EXPECT_EQ(r.wallets.at("w").flips, 2);
    EXPECT_EQ(r.wallets.at("w").net_position, Decimal::from_int(7));
}

TEST(Bump, ThresholdIsInclusiveAndExact) {
    DetectionConfig c;
    EXPECT_TRUE(bump_exceeds(50, Decimal{}, c));
    EXPECT_FALSE(bump_exceeds(49, Decimal{}, c));
    // 100 / (1 + 1) = 50 exactly
    EXPECT_TRUE(bump_exceeds(100, Decimal::from_int(1), c));
    EXPECT_FALSE(bump_exceeds(100, Decimal::from_raw(1'000'000'001), c));
}

TEST(Bump, MatchesBruteForceOracle) {
    cgtest::Gen g(99);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<chain::TxRecord> rows;
        rows.push_back({"c", 0, 0, chain::TxKind::Create, "A", {}, {}, 0});
        const int n = static_cast<int>(g.integer(0, 120));
        const std::vector<std::string> qtys{"1", "2", "2.5", "1000", "0.000000001"};
        for (int i = 0; i < n; ++i) {
            chain::TxRecord tx;
            tx.coin = "c";
            tx.block = static_cast<std::uint64_t>(g.integer(1, 40));
            tx.index_in_block = static_cast<std::uint32_t>(i);
            const auto roll = g.integer(0, 9);
            tx.kind = roll == 0 ? chain::TxKind::Transfer : (roll < 5 ? chain::TxKind::Buy : chain::TxKind::Sell);
            tx.trader = "w" + std::to_string(g.integer(0, 4));
            tx.token_qty = Decimal::parse(g.pick(qtys));
            tx.timestamp = static_cast<std::int64_t>(tx.block);
            rows.push_back(tx);
        }
        auto ledger = chain::assemble_ledgers(rows).ledgers.at(0);
        auto got = detect_bump(ledger, cfg());
        auto want = cgtest::brute_force_bump(rows);
        ASSERT_EQ(got.wallets.size(), want.size());
        bool any = false;
        for (const auto& [w, t] : want) {
            const auto& wb = got.wallets.at(w);
            EXPECT_EQ(wb.flips, t.flips);
            EXPECT_EQ(cgtest::rat(wb.net_position), t.net);
            const auto alpha = cgtest::Rational(t.flips) / (t.net + 1);
            EXPECT_LT(cgtest::rel_err(wb.alpha, alpha), 1e-40);
            EXPECT_EQ(wb.flagged, alpha >= 50);
            any = any || alpha >= 50;
        }
        EXPECT_EQ(got.flagged, any);
    }
}

TEST(Bump, MonotoneInFlipsAndNetPosition) {
    DetectionConfig c;
    cgtest::Gen g(4);
    for (int i = 0; i < 1000; ++i) {
        const auto f = g.integer(0, 500);
        const auto dp = g.decimal(0, 100);
        const Real a = Real(f) / (to_real(dp) + 1);
        EXPECT_GE(Real(f + 1) / (to_real(dp) + 1), a);
        EXPECT_LE(Real(f) / (to_real(dp + g.decimal(0, 10)) + 1), a);
        if (bump_exceeds(f, dp, c)) EXPECT_TRUE(bump_exceeds(f + 1, dp, c));
    }
}

TEST(Detectors, AgreeWithDeclarativePredicates) {
    cgtest::Gen g(17);
    for (int trial = 0; trial < 500; ++trial) {
        LedgerBuilder b;
        const std::uint64_t b0 = static_cast<std::uint64_t>(g.integer(0, 100));
        b.create("A", b0);
        const int n = static_cast<int>(g.integer(0, 8));
        for (int i = 0; i < n; ++i) {
            const std::string who = g.coin(0.3) ? "A" : "w" + std::to_string(g.integer(0, 3));
            const auto blk = b0 + static_cast<std::uint64_t>(g.integer(0, 8));
            if (g.coin(0.7))
                b.buy(who, blk, "3");
            else
                b.sell(who, blk, "1");
        }
        auto l = b.build();
        EXPECT_EQ(detect_bundle(l), bundle_predicate(l));
        EXPECT_EQ(detect_sniper(l, cfg()), sniper_predicate(l, 5));
        EXPECT_EQ(to_json_line(detect_coin(l, cfg(), curve::CurveParams::defaults(), nullptr)),
                  to_json_line(detect_coin(l, cfg(), curve::CurveParams::defaults(), nullptr)));
    }
}

TEST(Comments, CoinFlagNeedsMoreThanOne) {
    FixedClassifier fc;
    auto two = LedgerBuilder().create("A", 1).comment("x", 5, "TO THE MOON!!! READYY").comment("y", 6, "MOON LFG").build();
    EXPECT_TRUE(classify_coin_comments(two, fc, cfg()).flagged);
    auto one = LedgerBuilder().create("A", 1).comment("x", 5, "TO THE MOON!!! READYY").comment("y", 6, "ok").build();
    auto r = classify_coin_comments(one, fc, cfg());
    EXPECT_FALSE(r.flagged);
    EXPECT_EQ(r.bot_count, 1u);
    EXPECT_TRUE(comment_flag_before(two, {true, true}, 7, cfg()));
    EXPECT_FALSE(comment_flag_before(two, {true, true}, 6, cfg()));
}

TEST(Comments, UnavailableClassifierGivesUnknown) {
    BrokenClassifier bc;
    auto l = LedgerBuilder().create("A", 1).buy("B", 2, "5").comment("x", 5, "hi").build();
    auto rep = detect_coin(l, cfg(), curve::CurveParams::defaults(), &bc);
    EXPECT_EQ(rep.flags.comment, Tri::Unknown);
    EXPECT_NE(to_json_line(rep).find("\"comment\":\"unknown\""), std::string::npos);
}

TEST(Metrics, MonotonePathHasNoDump) {
    auto l = LedgerBuilder().create("A", 1).buy("B", 2, "1000000").buy("C", 3, "1000000").build();
    auto m = coin_metrics(l, curve::CurveParams::defaults(), cfg());
    EXPECT_FALSE(m.ln_dump_duration.has_value());
    EXPECT_GT(m.ln_max_return, 0);
    EXPECT_EQ(m.peak_ts, 3);
}

TEST(Metrics, PumpThenDump) {
    // deposited SOL goes up then back below 10% of its peak
    auto l = LedgerBuilder()
                 .create("A", 1, 100)
                 .buy("B", 2, "100000000", "1", 110)
                 .sell("B", 3, "50000000", "1", 150)
                 .sell("B", 4, "45000000", "1", 190)
                 .build();
    auto p = curve::CurveParams::defaults();
    auto m = coin_metrics(l, p, cfg());
    EXPECT_EQ(m.peak_ts, 110);
    ASSERT_TRUE(m.ln_dump_duration.has_value());
    EXPECT_NEAR(to_double(*m.ln_dump_duration), std::log(80.0), 1e-12);
    auto s = curve::apply_buy(curve::CurveState::fresh(p), Decimal::from_int(100'000'000)).state;
    EXPECT_NEAR(to_double(m.ln_max_return),
                std::log(to_double(curve::marginal_price(s) / (to_real(p.x_virtual) / to_real(p.y_virtual)))),
                1e-12);
}

TEST(Metrics, FlatPathAndEmpty) {
    auto l = LedgerBuilder().create("A", 1).buy("B", 2, "1", "0.5").build();
    DetectionConfig c;
    c.curve_replay = false;
    auto m = coin_metrics(l, curve::CurveParams::defaults(), c);
    EXPECT_EQ(m.ln_max_return, Real(0));
    EXPECT_FALSE(m.from_curve);
    EXPECT_THROW(coin_metrics(LedgerBuilder().create("A", 1).build(), curve::CurveParams::defaults(), c), Error);
}

TEST(Metrics, InfeasibleReplayFallsBackToImpliedPrices) {
    // a sell with nothing issued cannot be replayed on a fresh curve
    auto l = LedgerBuilder().sell("B", 2, "10", "2").buy("C", 3, "10", "4").build();
    auto m = coin_metrics(l, curve::CurveParams::defaults(), cfg());
    EXPECT_FALSE(m.from_curve);
    EXPECT_NEAR(to_double(m.ln_max_return), std::log(2.0), 1e-15);
}

TEST(Report, JsonRoundTrip) {
    FixedClassifier fc;
    auto l = LedgerBuilder()
                 .create("A", 1)
                 .buy("B", 1, "5")
                 .sell("B", 2, "5")
                 .comment("x", 5, "MOON")
                 .comment("y", 6, "#1234567 fine")
                 .build();
    auto rep = detect_coin(l, cfg(), curve::CurveParams::defaults(), &fc);
    auto back = report_from_json_line(to_json_line(rep));
    EXPECT_EQ(to_json_line(back), to_json_line(rep));
    EXPECT_EQ(back.flags.bundle, Tri::True);
    EXPECT_EQ(back.comment_labels, (std::vector<bool>{true, false}));
}
