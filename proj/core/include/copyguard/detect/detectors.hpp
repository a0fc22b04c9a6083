#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "copyguard/chain/model.hpp"
#include "copyguard/common/decimal.hpp"
#include "copyguard/common/real.hpp"
#include "copyguard/curve/bonding_curve.hpp"

namespace copyguard::detect {

enum class LiquidityProxy { DepositedSol, Price };

struct DetectionConfig {
    std::uint64_t sniper_window_K = 5;
    Decimal bump_threshold_xi = Decimal::from_int(50);
    Decimal bump_epsilon = Decimal::from_int(1);
    int comment_bot_min_count = 2;
    bool curve_replay = true;
    LiquidityProxy liquidity_proxy = LiquidityProxy::DepositedSol;
    double dump_fraction = 0.10;

    void validate() const;  // Error(InvalidConfig)
};

enum class Tri { False, True, Unknown };
std::string_view to_string(Tri t);
inline Tri tri(bool b) { return b ? Tri::True : Tri::False; }

struct WalletBump {
    std::int64_t flips = 0;  // F
    Decimal net_position;    // |ΔP|
    Real alpha = 0;          // F / (ΔP + ε)
    bool flagged = false;    // α >= ξ, decided in exact fixed point
};

struct BumpResult {
    bool flagged = false;
    std::map<std::string, WalletBump> wallets;  // only wallets with >= 1 trade
};

struct BotFlags {
    Tri bundle = Tri::Unknown;  // Unknown when the creator is unknown
    Tri sniper = Tri::Unknown;
    bool bump = false;
    Tri comment = Tri::Unknown;  // Unknown when no classifier ran
    std::map<std::string, WalletBump> bump_scores;
};

// Error(CreatorUnknown) when the ledger has no create row.
bool detect_bundle(const chain::CoinLedger& ledger);
bool detect_sniper(const chain::CoinLedger& ledger, const DetectionConfig& cfg);

BumpResult detect_bump(const chain::CoinLedger& ledger, const DetectionConfig& cfg);

// Exact test of F / (ΔP + ε) >= ξ.
bool bump_exceeds(std::int64_t flips, Decimal net_position, const DetectionConfig& cfg);

class CommentClassifier {
public:
    virtual ~CommentClassifier() = default;
    // One label per comment (true = bot). May throw Error(ClassifierUnavailable)
    // or any external-service error.
    virtual std::vector<bool> classify(std::span<const chain::CommentRecord> comments) = 0;
};

struct CommentResult {
    bool flagged = false;
    std::size_t bot_count = 0;
    std::vector<bool> labels;
};

CommentResult classify_coin_comments(const chain::CoinLedger& ledger, CommentClassifier& classifier,
                                     const DetectionConfig& cfg);

// Coin flag from already-computed labels, counting only comments before `cutoff_ts`.
bool comment_flag_before(const chain::CoinLedger& ledger, const std::vector<bool>& labels,
                         std::int64_t cutoff_ts, const DetectionConfig& cfg);

struct CoinMetrics {
    Real ln_max_return = 0;
    std::optional<Real> ln_dump_duration;  // unset: never fell to the dump fraction
    std::int64_t peak_ts = 0;
    bool from_curve = true;  // false when implied prices were used
};

// Price path of a ledger: fresh-curve replay when enabled and feasible,
// otherwise sol_amount / token_qty per trade.
struct PricePoint {
    std::int64_t timestamp = 0;
    std::uint64_t block = 0;
    Real price = 0;
    Real liquidity = 0;  // deposited SOL on the curve path, price otherwise
};

struct PricePath {
    Real launch_price = 0;
    std::vector<PricePoint> points;  // one per trade
    bool from_curve = true;
};

PricePath price_path(const chain::CoinLedger& ledger, const curve::CurveParams& params,
                     const DetectionConfig& cfg);

// Error(EmptyLedger) without trades.
CoinMetrics coin_metrics(const chain::CoinLedger& ledger, const curve::CurveParams& params,
                         const DetectionConfig& cfg);
CoinMetrics metrics_from_path(const PricePath& path, const DetectionConfig& cfg);

struct CoinReport {
    std::string coin;
    BotFlags flags;
    std::vector<bool> comment_labels;  // aligned with ledger.comments; empty when unknown
    std::optional<CoinMetrics> metrics;  // unset when the ledger has no trades
};

// All detectors for one coin. `classifier` may be null (comment flag Unknown).
// A classifier failure also yields Unknown rather than an error.
CoinReport detect_coin(const chain::CoinLedger& ledger, const DetectionConfig& cfg,
                       const curve::CurveParams& params, CommentClassifier* classifier);

// Fans out over a bounded pool; output sorted by coin id.
std::vector<CoinReport> detect_all(std::span<const chain::CoinLedger> ledgers,
                                   const DetectionConfig& cfg, const curve::CurveParams& params,
                                   CommentClassifier* classifier, std::size_t workers);

std::string to_json_line(const CoinReport& report);
CoinReport report_from_json_line(const std::string& line);

}  // namespace copyguard::detect
