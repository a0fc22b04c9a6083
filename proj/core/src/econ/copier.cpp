#include "copyguard/econ/copier.hpp"

#include <algorithm>
#include <string>

#include "copyguard/common/error.hpp"

namespace copyguard::econ {

namespace {

using curve::CurveState;

void finish(ReturnReport& r, bool with_copier) {
    if (r.x_in_smart <= 0 || r.x_out_smart <= 0)
        throw Error(ErrorCode::InvalidSequence,
                    "trade sequence needs at least one buy and one sell for the leader");
    r.r_smart = r.x_out_smart / r.x_in_smart - 1;
    if (!with_copier) return;
    if (r.x_in_copier <= 0 || r.x_out_copier <= 0)
        throw Error(ErrorCode::InvalidSequence, "copier ends with no cash in or no cash out");
    r.r_copier = r.x_out_copier / r.x_in_copier - 1;
}

struct SharedReplay {
    CurveState s;
    ReturnReport r;
    Real leader_bal = 0, copier_bal = 0;
    bool with_copier;

    void noise(const CopierOptions& opts, std::size_t t) {
        if (opts.interleaved_noise.empty()) return;
        const Decimal n = opts.interleaved_noise.at(t);
        if (n.is_positive())
            s = curve::apply_buy(s, n).state;
        else if (n.is_negative())
            s = curve::apply_sell(s, n.abs()).state;
    }

    void buy(std::size_t t, const Real& q, const CopierOptions& opts) {
        const auto lead = curve::apply_buy(s, q);
        s = lead.state;
        r.x_in_smart += lead.cash;
        leader_bal += q;
        if (!with_copier) return;
        noise(opts, t);
        if (s.Y <= q)
            throw Error(ErrorCode::InfeasibleForCopier,
                        "trade " + std::to_string(t) + ": copier buy infeasible (Y <= 2d)");
        const auto copy = curve::apply_buy(s, q);
        s = copy.state;
        r.x_in_copier += copy.cash;
        copier_bal += q;
        r.penalty_per_buy.push_back(copy.curve_amount / lead.curve_amount);
    }

    void sell(std::size_t t, const Real& q, const CopierOptions& opts) {
        const auto lead = curve::apply_sell(s, q);
        s = lead.state;
        r.x_out_smart += lead.cash;
        leader_bal -= q;
        if (!with_copier) return;
        noise(opts, t);
        Real qc = q;
        if (copier_bal < q) {
            qc = copier_bal;
            r.truncated_sells.push_back(t);
        }
        if (qc <= 0) return;
        const auto copy = curve::apply_sell(s, qc);
        s = copy.state;
        r.x_out_copier += copy.cash;
        copier_bal -= qc;
    }
};

ReturnReport replay(const TradeSeq& seq, const CopierOptions& opts, bool with_copier) {
    if (!opts.interleaved_noise.empty() && opts.interleaved_noise.size() != seq.trades.size())
        throw Error(ErrorCode::InvalidSequence, "interleaved noise must have one entry per trade");
    SharedReplay rp{seq.initial_state, {}, 0, 0, with_copier};
    for (std::size_t t = 0; t < seq.trades.size(); ++t) {
        const Decimal q = seq.trades[t];
        if (q.is_zero())
            throw Error(ErrorCode::InvalidSequence, "trade " + std::to_string(t) + " has zero size");
        if (q.is_positive())
            rp.buy(t, to_real(q), opts);
        else
            rp.sell(t, to_real(q.abs()), opts);
    }
    rp.r.residual_smart = rp.leader_bal;
    rp.r.residual_copier = rp.copier_bal;
    if (opts.liquidate_residual) {
        if (rp.leader_bal > 0) {
            const auto lead = curve::apply_sell(rp.s, rp.leader_bal);
            rp.s = lead.state;
            rp.r.x_out_smart += lead.cash;
            rp.r.liquidated = true;
        }
        if (with_copier && rp.copier_bal > 0) {
            const auto copy = curve::apply_sell(rp.s, rp.copier_bal);
            rp.s = copy.state;
            rp.r.x_out_copier += copy.cash;
            rp.r.liquidated = true;
        }
    }
    finish(rp.r, with_copier);
    return rp.r;
}

}  // namespace

ReturnReport replay_with_copier(const TradeSeq& seq, const CopierOptions& opts) {
    return replay(seq, opts, true);
}

ReturnReport replay_leader_only(const TradeSeq& seq, const CopierOptions& opts) {
    return replay(seq, opts, false);
}

ReturnReport replay_at_observed_reserves(const std::vector<ObservedTrade>& trades,
                                         const curve::CurveParams& params,
                                         std::optional<Real> final_Y) {
    const Real& k = params.k;
    const Real fee = params.fee();
    ReturnReport r;
    Real leader_bal = 0, copier_bal = 0;
    for (std::size_t t = 0; t < trades.size(); ++t) {
        const Real q = to_real(trades[t].q);
        const Real& Y = trades[t].observed_Y;
        if (q > 0) {
            if (Y <= 2 * q)
                throw Error(ErrorCode::InfeasibleForCopier,
                            "trade " + std::to_string(t) + ": copier buy infeasible (Y <= 2d)");
            const Real lead = curve::delta_x(k, Y, q);
            const Real copy = curve::delta_x(k, Y - q, q);
            r.x_in_smart += lead * (1 + fee);
            r.x_in_copier += copy * (1 + fee);
            r.penalty_per_buy.push_back(copy / lead);
            leader_bal += q;
            copier_bal += q;
        } else if (q < 0) {
            const Real qs = -q;
            r.x_out_smart += -curve::delta_x(k, Y, q) * (1 - fee);
            leader_bal -= qs;
            Real qc = qs;
            if (copier_bal < qs) {
                qc = copier_bal;
                r.truncated_sells.push_back(t);
            }
            if (qc > 0) {
                r.x_out_copier += -curve::delta_x(k, Y + qs, -qc) * (1 - fee);
                copier_bal -= qc;
            }
        }
    }
    r.residual_smart = leader_bal;
    r.residual_copier = copier_bal;
    if (final_Y) {
        Real Y = *final_Y;
        if (leader_bal > 0) {
            r.x_out_smart += -curve::delta_x(k, Y, -leader_bal) * (1 - fee);
            Y += leader_bal;
            r.liquidated = true;
        }
        if (copier_bal > 0) {
            r.x_out_copier += -curve::delta_x(k, Y, -copier_bal) * (1 - fee);
            r.liquidated = true;
        }
    }
    finish(r, true);
    return r;
}

Real imitation_penalty(const Real& Y, const Real& d) {
    if (d <= 0) throw Error(ErrorCode::DomainError, "imitation_penalty needs d > 0");
    if (Y <= 2 * d)
        throw Error(ErrorCode::DomainError,
                    "imitation_penalty needs Y > 2d (Y=" + to_string(Y) + ", d=" + to_string(d) + ")");
    return Y / (Y - 2 * d);
}

}  // namespace copyguard::econ
