#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "copyguard/common/decimal.hpp"
#include "copyguard/common/real.hpp"
#include "copyguard/curve/bonding_curve.hpp"

namespace copyguard::econ {

// Signed token quantities: positive buys, negative sells.
struct TradeSeq {
    std::vector<Decimal> trades;
    curve::CurveState initial_state;
};

struct CopierOptions {
    // Sell whatever either role still holds with one synthetic trade at the end.
    bool liquidate_residual = false;
    // Optional signed trade inserted between each leader trade and its copy
    // (sensitivity runs only). Empty or one entry per trade.
    std::vector<Decimal> interleaved_noise;
};

struct ReturnReport {
    Real x_in_smart = 0, x_out_smart = 0;
    Real x_in_copier = 0, x_out_copier = 0;
    Real r_smart = 0, r_copier = 0;
    // Copier-to-leader fee-exclusive cost ratio for every replicated buy.
    std::vector<Real> penalty_per_buy;
    // Trade indices where the copier's sell was capped at its balance.
    std::vector<std::size_t> truncated_sells;
    Real residual_smart = 0, residual_copier = 0;  // tokens left before liquidation
    bool liquidated = false;
};

// Leader and copier on one shared curve; copy t executes right after trade t.
// Errors: InfeasibleTrade (leader), InfeasibleForCopier (names the index),
// InvalidSequence when a role ends with no cash in or no cash out.
ReturnReport replay_with_copier(const TradeSeq& seq, const CopierOptions& opts = {});

// Leader alone; copier fields stay zero.
ReturnReport replay_leader_only(const TradeSeq& seq, const CopierOptions& opts = {});

// One leader trade together with the reserve observed just before it in the
// full coin ledger. The copier executes at observed_Y - q and does not move
// the reserves seen by later leader trades. When final_Y is given, residual
// holdings are sold there (leader first, then copier).
struct ObservedTrade {
    Decimal q;
    Real observed_Y;
};

ReturnReport replay_at_observed_reserves(const std::vector<ObservedTrade>& trades,
                                         const curve::CurveParams& params,
                                         std::optional<Real> final_Y = std::nullopt);

// Y / (Y - 2d); Error(DomainError) unless d > 0 and Y > 2d.
Real imitation_penalty(const Real& Y, const Real& d);

}  // namespace copyguard::econ
