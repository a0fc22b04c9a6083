#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "copyguard/chain/model.hpp"
#include "copyguard/detect/detectors.hpp"

namespace copyguard::features {

inline constexpr std::string_view kFeatureHeader =
    "wallet,coin,first_trade_ts,split,label,return_all,return_1st,return_1_5,return_6_10,return_11_15,"
    "n_trades,return_std,t_stat,t_since_last,t_since_first,t_since_launch,px,amount,qty,"
    "bot_bundle,bot_sniper,bot_bump,bot_comment";

enum class Split { Train, Val, Test };
std::string_view to_string(Split s);
std::optional<Split> parse_split(std::string_view text);

// Missing values (no history, undefined statistic) are nullopt and written as
// empty CSV fields.
struct FeatureVector {
    std::optional<double> return_all, return_1st, return_1_5, return_6_10, return_11_15;
    std::int64_t n_trades = 0;
    std::optional<double> return_std, t_stat;
    std::optional<double> t_since_last;  // seconds
    double t_since_first = 0, t_since_launch = 0;
    double px = 0, amount = 0, qty = 0;  // purchase triple; quote units per token, quote units, tokens
    int bot_bundle = 0, bot_sniper = 0, bot_bump = 0, bot_comment = 0;

    bool operator==(const FeatureVector&) const = default;
};

struct TraderSample {
    std::string wallet;
    std::string coin;
    std::int64_t first_trade_ts = 0;
    FeatureVector features;
    bool label = false;
    Split split = Split::Train;

    bool operator==(const TraderSample&) const = default;
};

enum class TerminalValuation { LastPrice, Zero };

// SOL -> USD conversion: last quote at or before a timestamp.
class UsdPrices {
public:
    // CSV with header `timestamp,usd_per_sol`.
    static UsdPrices load(const std::filesystem::path& path);
    static UsdPrices from_points(std::vector<std::pair<std::int64_t, double>> points);
    double at(std::int64_t ts) const;  // Error(MissingInput) before the first quote

private:
    std::vector<std::pair<std::int64_t, double>> points_;
};

struct FeatureOptions {
    detect::DetectionConfig detection;
    TerminalValuation valuation = TerminalValuation::LastPrice;
    std::optional<UsdPrices> usd;
    std::size_t workers = 0;  // 0: hardware concurrency
};

// Per-coin realized return of `wallet` using only trades strictly before
// `as_of` (nullopt when it had put no SOL in by then).
std::optional<double> coin_return(const chain::CoinLedger& ledger, const std::string& wallet,
                                  std::int64_t as_of, TerminalValuation valuation);

// Signed SOL profit over the full history, used for labels.
double realized_profit(const chain::CoinLedger& ledger, const std::string& wallet, TerminalValuation valuation);

// History statistics from returns ordered most recent first.
void fill_history(FeatureVector& f, std::span<const double> recent_first);

// One sample per (wallet, coin) with a buy. `reports` supplies comment labels
// (matched by coin; may be empty). Output sorted by (first_trade_ts, wallet, coin).
std::vector<TraderSample> build_samples(std::span<const chain::CoinLedger> ledgers,
                                        std::span<const detect::CoinReport> reports,
                                        const FeatureOptions& opts = {});

struct SplitFractions {
    double train = 0.70, val = 0.15, test = 0.15;
};

// Sorts chronologically with (wallet, coin) tie-break; val/test get floor
// shares, train the rest.
void split_chronological(std::vector<TraderSample>& samples, const SplitFractions& fr = {});

enum class Rule { GreaterThanZero, TStatAbove, StdBelow, PercentileAbove, PercentileBelow, BotMustBeFalse };
std::string_view to_string(Rule r);

struct Condition {
    std::string feature;
    Rule rule = Rule::GreaterThanZero;
    double cut = 0;  // 0, 1.645, 1.0, or the fitted percentile
};

struct ConditionThresholds {
    std::vector<Condition> conditions;
    const Condition& at(std::string_view feature) const;
};

struct ConditionParams {
    double t_stat_cut = 1.645;
    double std_cut = 1.0;
    double low_pct = 25, high_pct = 75;
};

// Error(DegenerateTrainingSet) when a percentile has no defined training value.
ConditionThresholds fit_conditions(std::span<const TraderSample> train, const ConditionParams& params = {});

struct ConditionResult {
    std::map<std::string, bool> pass;
    bool all_pass = false;
};

ConditionResult evaluate_conditions(const TraderSample& s, const ConditionThresholds& th);

// Named feature value (nullopt for a sentinel). Error(InvalidConfig) on an unknown name.
std::optional<double> feature_value(const FeatureVector& f, std::string_view name);

void export_features(std::ostream& out, std::span<const TraderSample> samples);
void export_features(const std::filesystem::path& path, std::span<const TraderSample> samples);
std::vector<TraderSample> import_features(std::istream& in);
std::vector<TraderSample> import_features(const std::filesystem::path& path);

std::string thresholds_to_json(const ConditionThresholds& th);
ConditionThresholds thresholds_from_json(const std::string& text);

}  // namespace copyguard::features
