#include <gtest/gtest.h>

#include "copyguard/common/error.hpp"
#include "copyguard/curve/bonding_curve.hpp"
#include "gen.hpp"
#include "oracle.hpp"

using namespace copyguard;
using namespace copyguard::curve;
using cgtest::rat;

namespace {

CurveParams params(const char* x, const char* y, const char* fee = "0") {
    return CurveParams::make(Decimal::parse(x), Decimal::parse(y), Decimal::parse(fee));
}

}  // namespace

TEST(Curve, SmallIntegerIssuance) {
    auto s = CurveState::fresh(params("1", "2"));
    EXPECT_EQ(tokens_for_deposit(s, Real(1)), Real(1));
    EXPECT_EQ(marginal_price(s), Real("0.5"));
    EXPECT_EQ(marginal_price(deposit(s, Real(1))), Real(2));
}

TEST(Curve, DefaultMagnitudeAgainstRationalOracle) {
    auto s = CurveState::fresh(params("30", "1000000000"));
    const auto want = cgtest::tokens_for_deposit(rat(30'000'000'000LL), rat(30), rat(1));
    EXPECT_EQ(want, cgtest::Rational(cgtest::BigInt(1'000'000'000), cgtest::BigInt(31)));
    EXPECT_LT(cgtest::rel_err(tokens_for_deposit(s, Real(1)), want), 1e-40);
    EXPECT_EQ(to_string(tokens_for_deposit(s, Real(1)), 30).substr(0, 20), "32258064.51612903225");
}

TEST(Curve, SplitDepositPathIndependent) {
    auto s = CurveState::fresh(params("1", "2"));
    auto half = deposit(deposit(s, Real("0.5")), Real("0.5"));
    auto whole = deposit(s, Real(1));
    EXPECT_LT(to_double(abs(half.tokens_issued - whole.tokens_issued)), 1e-12);
}

TEST(Curve, BuyCost) {
    auto s = CurveState::fresh(params("1", "2"));
    auto r = apply_buy(s, Decimal::from_int(1));
    EXPECT_EQ(r.curve_amount, Real(1));
    EXPECT_EQ(r.state.Y, Real(1));

    auto fee = CurveState::fresh(params("1", "2", "0.01"));
    auto h = apply_buy(fee, Decimal::parse("0.5"));
    const auto want = cgtest::delta_x(rat(2), rat(2), rat(1, 2));
    EXPECT_EQ(want, rat(1, 3));
    EXPECT_LT(cgtest::rel_err(h.curve_amount, want), 1e-45);
    EXPECT_LT(cgtest::rel_err(h.cash, want * rat(101, 100)), 1e-45);
}

TEST(Curve, BuyAtReserveIsInfeasible) {
    auto s = CurveState::fresh(params("1", "2"));
    try {
        apply_buy(s, Decimal::from_int(2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InfeasibleTrade);
    }
    EXPECT_THROW(apply_sell(s, Decimal::from_int(1)), Error);
}

TEST(Curve, RoundTripRestoresState) {
    auto s = CurveState::fresh(CurveParams::make(Decimal::from_int(30), Decimal::from_int(1'073'000'000),
                                                 Decimal::from_int(0)));
    auto b = apply_buy(s, Decimal::from_int(5'000'000));
    auto back = apply_sell(b.state, Decimal::from_int(5'000'000));
    EXPECT_LT(to_double(abs(back.curve_amount - b.curve_amount) / b.curve_amount), 1e-12);
    EXPECT_LT(to_double(abs(back.state.X - s.X) / s.X), 1e-12);
}

TEST(Curve, RoundTripFeeLossNearTwoPercent) {
    auto s = CurveState::fresh(CurveParams::defaults());
    auto b = apply_buy(s, Decimal::from_int(1'000));
    auto back = apply_sell(b.state, Decimal::from_int(1'000));
    const double loss = to_double((b.cash - back.cash) / b.curve_amount);
    // 1.01 - 0.99 on the same notional
    EXPECT_NEAR(loss, 0.02, 1e-9);
}

TEST(Curve, PriceMatchesFiniteDifference) {
    cgtest::Gen g(3);
    for (int i = 0; i < 200; ++i) {
        auto p = CurveParams::make(g.decimal(1, 100), g.decimal(1'000'000, 2'000'000'000), Decimal{});
        const Real x = to_real(g.decimal(0, 500));
        const Real h = Real("1e-6");
        // SOL per token: dx/dy via central difference of y(x).
        const Real dy = issued_at(p, x + h) - issued_at(p, x - h);
        const Real fd = 2 * h / dy;
        const Real exact = price_at(p, x);
        EXPECT_LT(to_double(abs(fd - exact) / exact), 1e-6);
    }
}

TEST(Curve, InvalidParams) {
    EXPECT_THROW(params("0", "1"), Error);
    EXPECT_THROW(params("1", "1", "1"), Error);
}
