#pragma once

#include "copyguard/common/decimal.hpp"
#include "copyguard/common/real.hpp"

namespace copyguard::curve {

struct CurveParams {
    Decimal x_virtual;  // x'
    Decimal y_virtual;  // y'
    Decimal fee_rate;   // fraction of each cash flow, in [0, 1)
    Real k;             // x' * y'

    // Throws Error(InvalidConfig) unless x', y' > 0 and 0 <= fee < 1.
    static CurveParams make(Decimal x_virtual, Decimal y_virtual, Decimal fee_rate);
    static CurveParams defaults();  // 30 SOL, 1.073e9 tokens, 1% fee

    Real fee() const { return to_real(fee_rate); }
};

struct CurveState {
    CurveParams params;
    Real X;              // effective SOL reserve, x' + x
    Real Y;              // effective token reserve, y' - y
    Real x_deposited;    // x
    Real tokens_issued;  // y

    static CurveState fresh(const CurveParams& params);

    // |X*Y - k| / k
    Real invariant_error() const;
};

struct TradeResult {
    CurveState state;
    Real curve_amount;  // fee-exclusive SOL moved into (buy) or out of (sell) the curve
    Real cash;          // what the trader pays (buy) or receives (sell)
    Real fee;           // |cash - curve_amount|
};

// k/X - k/(X+dx); dx must be positive.
Real tokens_for_deposit(const CurveState& state, const Real& dx);

// State after a fee-exclusive SOL deposit of dx.
CurveState deposit(const CurveState& state, const Real& dx);

// X^2 / k
Real marginal_price(const CurveState& state);

// Closed forms over cumulative deposits x, used by property checks.
Real issued_at(const CurveParams& params, const Real& x);  // y(x) = y' - k/(x'+x)
Real price_at(const CurveParams& params, const Real& x);   // (x'+x)^2 / k

// kq / (Y(Y-q)); Error(InfeasibleTrade) when q >= Y, Error(DomainError) when q <= 0.
TradeResult apply_buy(const CurveState& state, const Real& q);
TradeResult apply_buy(const CurveState& state, Decimal q);

// kq / (Y(Y+q)); Error(InfeasibleTrade) when q exceeds the tokens issued so far.
TradeResult apply_sell(const CurveState& state, const Real& q);
TradeResult apply_sell(const CurveState& state, Decimal q);

// Fee-exclusive SOL flow of a signed token trade at reserve Y: kq / (Y(Y-q)).
Real delta_x(const Real& k, const Real& Y, const Real& q);

}  // namespace copyguard::curve
