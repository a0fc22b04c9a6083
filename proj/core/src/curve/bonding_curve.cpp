#include "copyguard/curve/bonding_curve.hpp"

#include <boost/multiprecision/number.hpp>

#include "copyguard/common/error.hpp"

namespace copyguard::curve {

CurveParams CurveParams::make(Decimal x_virtual, Decimal y_virtual, Decimal fee_rate) {
    if (!x_virtual.is_positive() || !y_virtual.is_positive())
        throw Error(ErrorCode::InvalidConfig, "curve virtual reserves must be positive");
    if (fee_rate.is_negative() || fee_rate >= Decimal::from_int(1))
        throw Error(ErrorCode::InvalidConfig, "curve fee_rate must lie in [0, 1)");
    CurveParams p;
    p.x_virtual = x_virtual;
    p.y_virtual = y_virtual;
    p.fee_rate = fee_rate;
    p.k = to_real(x_virtual) * to_real(y_virtual);
    return p;
}

CurveParams CurveParams::defaults() {
    return make(Decimal::from_int(30), Decimal::from_int(1'073'000'000), Decimal::parse("0.01"));
}

CurveState CurveState::fresh(const CurveParams& params) {
    CurveState s;
    s.params = params;
    s.X = to_real(params.x_virtual);
    s.Y = to_real(params.y_virtual);
    s.x_deposited = 0;
    s.tokens_issued = 0;
    return s;
}

Real CurveState::invariant_error() const {
    return boost::multiprecision::abs(X * Y - params.k) / params.k;
}

Real tokens_for_deposit(const CurveState& state, const Real& dx) {
    if (dx <= 0) throw Error(ErrorCode::DomainError, "deposit must be positive");
    const Real& k = state.params.k;
    return k / state.X - k / (state.X + dx);
}

CurveState deposit(const CurveState& state, const Real& dx) {
    const Real dy = tokens_for_deposit(state, dx);
    CurveState next = state;
    next.X += dx;
    next.x_deposited += dx;
    next.Y -= dy;
    next.tokens_issued += dy;
    return next;
}

Real marginal_price(const CurveState& state) { return state.X * state.X / state.params.k; }

Real issued_at(const CurveParams& params, const Real& x) {
    return to_real(params.y_virtual) - params.k / (to_real(params.x_virtual) + x);
}

Real price_at(const CurveParams& params, const Real& x) {
    const Real X = to_real(params.x_virtual) + x;
    return X * X / params.k;
}

Real delta_x(const Real& k, const Real& Y, const Real& q) { return k * q / (Y * (Y - q)); }

TradeResult apply_buy(const CurveState& state, const Real& q) {
    if (q <= 0) throw Error(ErrorCode::DomainError, "buy quantity must be positive");
    if (q >= state.Y)
        throw Error(ErrorCode::InfeasibleTrade,
                    "buy of " + to_string(q) + " tokens exceeds reserve " + to_string(state.Y));
    const Real cost = delta_x(state.params.k, state.Y, q);
    TradeResult r;
    r.state = state;
    r.state.X += cost;
    r.state.x_deposited += cost;
    r.state.Y -= q;
    r.state.tokens_issued += q;
    r.curve_amount = cost;
    r.cash = cost * (1 + state.params.fee());
    r.fee = r.cash - cost;
    return r;
}

TradeResult apply_buy(const CurveState& state, Decimal q) { return apply_buy(state, to_real(q)); }

TradeResult apply_sell(const CurveState& state, const Real& q) {
    if (q <= 0) throw Error(ErrorCode::DomainError, "sell quantity must be positive");
    if (q > state.tokens_issued)
        throw Error(ErrorCode::InfeasibleTrade, "sell of " + to_string(q) +
                                                    " tokens exceeds issued supply " +
                                                    to_string(state.tokens_issued));
    const Real proceeds = -delta_x(state.params.k, state.Y, -q);
    TradeResult r;
    r.state = state;
    r.state.X -= proceeds;
    r.state.x_deposited -= proceeds;
    r.state.Y += q;
    r.state.tokens_issued -= q;
    r.curve_amount = proceeds;
    r.cash = proceeds * (1 - state.params.fee());
    r.fee = proceeds - r.cash;
    return r;
}

TradeResult apply_sell(const CurveState& state, Decimal q) { return apply_sell(state, to_real(q)); }

}  // namespace copyguard::curve
