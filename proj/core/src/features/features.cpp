#include "copyguard/features/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "copyguard/common/csv.hpp"
#include "copyguard/common/error.hpp"
#include "copyguard/common/parallel.hpp"
#include "copyguard/common/stats.hpp"

namespace copyguard::features {

namespace {

using chain::CoinLedger;
using chain::TxKind;
using chain::TxRecord;

double implied_price(const TxRecord& tx) { return tx.sol_amount.to_double() / tx.token_qty.to_double(); }

// Last trade price strictly before `as_of` (any trader).
std::optional<double> last_price(const CoinLedger& l, std::int64_t as_of) {
    for (auto it = l.txs.rbegin(); it != l.txs.rend(); ++it)
        if (it->is_trade() && it->timestamp < as_of && it->token_qty.is_positive()) return implied_price(*it);
    return std::nullopt;
}

struct Flow {
    double in = 0, out = 0;
    Decimal hold;
};

void add_flow(Flow& f, const TxRecord& tx) {
    if (tx.kind == TxKind::Buy) {
        f.in += tx.sol_amount.to_double();
        f.hold += tx.token_qty;
    } else if (tx.kind == TxKind::Sell) {
        f.out += tx.sol_amount.to_double();
        f.hold -= tx.token_qty;
    }
}

Flow flow_of(const CoinLedger& l, const std::string& wallet, std::int64_t as_of) {
    Flow f;
    for (const auto& tx : l.txs)
        if (tx.timestamp < as_of && tx.trader == wallet) add_flow(f, tx);
    return f;
}

double terminal_value(const CoinLedger& l, const Flow& f, std::int64_t as_of, TerminalValuation v) {
    if (v == TerminalValuation::Zero || !f.hold.is_positive()) return 0.0;
    return f.hold.to_double() * last_price(l, as_of).value_or(0.0);
}

std::string fmt(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}
std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

double parse_double(const std::string& s, std::size_t row, std::string_view col) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw Error(ErrorCode::MalformedRow, "row " + std::to_string(row) + ": bad " + std::string(col) + " '" + s + "'");
    return v;
}
std::optional<double> parse_opt(const std::string& s, std::size_t row, std::string_view col) {
    if (s.empty()) return std::nullopt;
    return parse_double(s, row, col);
}
std::int64_t parse_int(const std::string& s, std::size_t row, std::string_view col) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw Error(ErrorCode::MalformedRow, "row " + std::to_string(row) + ": bad " + std::string(col) + " '" + s + "'");
    return v;
}
int parse_bit(const std::string& s, std::size_t row, std::string_view col) {
    if (s == "0") return 0;
    if (s == "1") return 1;
    throw Error(ErrorCode::MalformedRow, "row " + std::to_string(row) + ": " + std::string(col) + " must be 0 or 1");
}

struct Participation {
    std::int64_t first_ts = 0;
    std::size_t coin = 0;
    std::vector<const TxRecord*> txs;  // this wallet's trades in the coin
};

}  // namespace

std::string_view to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "train";
}

std::optional<Split> parse_split(std::string_view t) {
    if (t == "train") return Split::Train;
    if (t == "val") return Split::Val;
    if (t == "test") return Split::Test;
    return std::nullopt;
}

std::string_view to_string(Rule r) {
    switch (r) {
        case Rule::GreaterThanZero: return "gt_zero";
        case Rule::TStatAbove: return "t_stat_above";
        case Rule::StdBelow: return "std_below";
        case Rule::PercentileAbove: return "pct_above";
        case Rule::PercentileBelow: return "pct_below";
        case Rule::BotMustBeFalse: return "bot_false";
    }
    return "gt_zero";
}

UsdPrices UsdPrices::from_points(std::vector<std::pair<std::int64_t, double>> points) {
    std::sort(points.begin(), points.end());
    UsdPrices u;
    u.points_ = std::move(points);
    return u;
}

UsdPrices UsdPrices::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingInput, "cannot open USD price file " + path.string());
    csv::Reader r(in);
    std::vector<std::string> f;
    if (!r.next(f) || f != std::vector<std::string>{"timestamp", "usd_per_sol"})
        throw Error(ErrorCode::MalformedRow, path.string() + ": header must be timestamp,usd_per_sol");
    std::vector<std::pair<std::int64_t, double>> pts;
    while (r.next(f)) {
        if (f.size() == 1 && f[0].empty()) continue;
        if (f.size() != 2) throw Error(ErrorCode::MalformedRow, "row " + std::to_string(r.line()) + ": expected 2 fields");
        const double px = parse_double(f[1], r.line(), "usd_per_sol");
        if (!(px > 0)) throw Error(ErrorCode::MalformedRow, "row " + std::to_string(r.line()) + ": price must be positive");
        pts.emplace_back(parse_int(f[0], r.line(), "timestamp"), px);
    }
    return from_points(std::move(pts));
}

double UsdPrices::at(std::int64_t ts) const {
    auto it = std::upper_bound(points_.begin(), points_.end(), std::make_pair(ts, std::numeric_limits<double>::infinity()));
    if (it == points_.begin())
        throw Error(ErrorCode::MissingInput, "no SOL/USD quote at or before ts " + std::to_string(ts));
    return std::prev(it)->second;
}

std::optional<double> coin_return(const CoinLedger& ledger, const std::string& wallet, std::int64_t as_of,
                                  TerminalValuation valuation) {
    const Flow f = flow_of(ledger, wallet, as_of);
    if (!(f.in > 0)) return std::nullopt;
    return (f.out + terminal_value(ledger, f, as_of, valuation)) / f.in - 1.0;
}

double realized_profit(const CoinLedger& ledger, const std::string& wallet, TerminalValuation valuation) {
    constexpr auto kEnd = std::numeric_limits<std::int64_t>::max();
    const Flow f = flow_of(ledger, wallet, kEnd);
    return f.out + terminal_value(ledger, f, kEnd, valuation) - f.in;
}

void fill_history(FeatureVector& f, std::span<const double> r) {
    const std::size_t n = r.size();
    auto window = [&](std::size_t from, std::size_t to) -> std::optional<double> {
        if (n <= from) return std::nullopt;
        return stats::mean(r.subspan(from, std::min(to, n) - from));
    };
    f.return_all = window(0, n);
    f.return_1st = window(0, 1);
    f.return_1_5 = window(0, 5);
    f.return_6_10 = window(5, 10);
    f.return_11_15 = window(10, 15);
    f.return_std = stats::sample_stddev(r);
    f.t_stat.reset();
    if (f.return_std && *f.return_std > 0)
        f.t_stat = *f.return_all / (*f.return_std / std::sqrt(static_cast<double>(n)));
}

std::vector<TraderSample> build_samples(std::span<const CoinLedger> ledgers,
                                        std::span<const detect::CoinReport> reports, const FeatureOptions& opts) {
    std::map<std::string, const detect::CoinReport*> report_of;
    for (const auto& r : reports) report_of[r.coin] = &r;

    // wallet -> coins it bought, and every trade timestamp it made
    std::map<std::string, std::vector<Participation>> parts;
    std::map<std::string, std::vector<std::int64_t>> trade_ts;
    struct Key {
        std::string wallet;
        std::size_t coin;
        const TxRecord* first_buy;
    };
    std::vector<Key> keys;
    for (std::size_t c = 0; c < ledgers.size(); ++c) {
        std::map<std::string, const TxRecord*> first_buy;
        std::map<std::string, std::vector<const TxRecord*>> own;
        for (const auto& tx : ledgers[c].txs) {
            if (!tx.is_trade()) continue;
            trade_ts[tx.trader].push_back(tx.timestamp);
            own[tx.trader].push_back(&tx);
            if (tx.kind == TxKind::Buy) first_buy.emplace(tx.trader, &tx);
        }
        for (const auto& [w, tx] : first_buy) {
            parts[w].push_back({tx->timestamp, c, std::move(own[w])});
            keys.push_back({w, c, tx});
        }
    }
    for (auto& [w, v] : trade_ts) std::sort(v.begin(), v.end());
    for (auto& [w, v] : parts)
        std::sort(v.begin(), v.end(), [&](const auto& a, const auto& b) {
            return std::tie(a.first_ts, ledgers[a.coin].coin) < std::tie(b.first_ts, ledgers[b.coin].coin);
        });

    std::vector<TraderSample> out(keys.size());
    const std::size_t workers = opts.workers ? opts.workers : default_workers();
    parallel_for(keys.size(), workers, [&](std::size_t i) {
        const auto& k = keys[i];
        const CoinLedger& L = ledgers[k.coin];
        const std::int64_t tau = k.first_buy->timestamp;
        TraderSample s;
        s.wallet = k.wallet;
        s.coin = L.coin;
        s.first_trade_ts = tau;
        FeatureVector& f = s.features;

        std::vector<double> recent_first;
        const auto& ps = parts.at(k.wallet);
        for (auto it = ps.rbegin(); it != ps.rend(); ++it) {
            if (it->first_ts >= tau || it->coin == k.coin) continue;
            Flow fl;
            for (const auto* tx : it->txs)
                if (tx->timestamp < tau) add_flow(fl, *tx);
            if (fl.in > 0)
                recent_first.push_back(
                    (fl.out + terminal_value(ledgers[it->coin], fl, tau, opts.valuation)) / fl.in - 1.0);
        }
        fill_history(f, recent_first);

        const auto& ts = trade_ts.at(k.wallet);
        const auto before = std::lower_bound(ts.begin(), ts.end(), tau);
        f.n_trades = before - ts.begin();
        if (f.n_trades > 0) {
            f.t_since_last = static_cast<double>(tau - *std::prev(before));
            f.t_since_first = static_cast<double>(tau - ts.front());
        }
        f.t_since_launch = static_cast<double>(tau - L.start_ts().value_or(tau));

        const double usd = opts.usd ? opts.usd->at(tau) : 1.0;
        f.qty = k.first_buy->token_qty.to_double();
        f.amount = k.first_buy->sol_amount.to_double() * usd;
        f.px = f.amount / f.qty;

        const CoinLedger past = chain::truncated_before(L, tau);
        if (past.creator_known()) {
            f.bot_bundle = detect::detect_bundle(past);
            f.bot_sniper = detect::detect_sniper(past, opts.detection);
        }
        f.bot_bump = detect::detect_bump(past, opts.detection).flagged;
        if (auto it = report_of.find(L.coin); it != report_of.end() && !it->second->comment_labels.empty())
            f.bot_comment = detect::comment_flag_before(L, it->second->comment_labels, tau, opts.detection);

        s.label = realized_profit(L, k.wallet, opts.valuation) > 0;
        out[i] = std::move(s);
    });
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::tie(a.first_trade_ts, a.wallet, a.coin) < std::tie(b.first_trade_ts, b.wallet, b.coin);
    });
    return out;
}

void split_chronological(std::vector<TraderSample>& samples, const SplitFractions& fr) {
    if (samples.empty()) throw Error(ErrorCode::MissingInput, "no samples to split");
    if (fr.train < 0 || fr.val < 0 || fr.test < 0 || std::abs(fr.train + fr.val + fr.test - 1.0) > 1e-9)
        throw Error(ErrorCode::InvalidConfig, "split fractions must be non-negative and sum to 1");
    std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) {
        return std::tie(a.first_trade_ts, a.wallet, a.coin) < std::tie(b.first_trade_ts, b.wallet, b.coin);
    });
    const std::size_t n = samples.size();
    // small epsilon keeps exact products such as 0.15 * 20 from flooring to 2
    const auto n_val = static_cast<std::size_t>(std::floor(fr.val * static_cast<double>(n) + 1e-9));
    const auto n_test = static_cast<std::size_t>(std::floor(fr.test * static_cast<double>(n) + 1e-9));
    const std::size_t n_train = n - n_val - n_test;
    for (std::size_t i = 0; i < n; ++i)
        samples[i].split = i < n_train ? Split::Train : (i < n_train + n_val ? Split::Val : Split::Test);
}

std::optional<double> feature_value(const FeatureVector& f, std::string_view name) {
    if (name == "return_all") return f.return_all;
    if (name == "return_1st") return f.return_1st;
    if (name == "return_1_5") return f.return_1_5;
    if (name == "return_6_10") return f.return_6_10;
    if (name == "return_11_15") return f.return_11_15;
    if (name == "n_trades") return static_cast<double>(f.n_trades);
    if (name == "return_std") return f.return_std;
    if (name == "t_stat") return f.t_stat;
    if (name == "t_since_last") return f.t_since_last;
    if (name == "t_since_first") return f.t_since_first;
    if (name == "t_since_launch") return f.t_since_launch;
    if (name == "px") return f.px;
    if (name == "amount") return f.amount;
    if (name == "qty") return f.qty;
    if (name == "bot_bundle") return f.bot_bundle;
    if (name == "bot_sniper") return f.bot_sniper;
    if (name == "bot_bump") return f.bot_bump;
    if (name == "bot_comment") return f.bot_comment;
    throw Error(ErrorCode::InvalidConfig, "unknown feature '" + std::string(name) + "'");
}

const Condition& ConditionThresholds::at(std::string_view feature) const {
    for (const auto& c : conditions)
        if (c.feature == feature) return c;
    throw Error(ErrorCode::InvalidConfig, "no condition for feature '" + std::string(feature) + "'");
}

ConditionThresholds fit_conditions(std::span<const TraderSample> train, const ConditionParams& p) {
    if (train.empty()) throw Error(ErrorCode::DegenerateTrainingSet, "training split is empty");
    ConditionThresholds th;
    auto pct = [&](const std::string& name, double q) {
        std::vector<double> vals;
        for (const auto& s : train)
            if (auto v = feature_value(s.features, name)) vals.push_back(*v);
        auto cut = stats::percentile(std::move(vals), q);
        if (!cut)
            throw Error(ErrorCode::DegenerateTrainingSet,
                        "feature " + name + " has no defined value in the training split");
        return *cut;
    };
    for (const char* r : {"return_all", "return_1st", "return_1_5", "return_6_10", "return_11_15"})
        th.conditions.push_back({r, Rule::GreaterThanZero, 0.0});
    th.conditions.push_back({"n_trades", Rule::PercentileAbove, pct("n_trades", p.low_pct)});
    th.conditions.push_back({"return_std", Rule::StdBelow, p.std_cut});
    th.conditions.push_back({"t_stat", Rule::TStatAbove, p.t_stat_cut});
    th.conditions.push_back({"t_since_last", Rule::PercentileBelow, pct("t_since_last", p.high_pct)});
    th.conditions.push_back({"t_since_first", Rule::PercentileAbove, pct("t_since_first", p.low_pct)});
    th.conditions.push_back({"t_since_launch", Rule::PercentileAbove, pct("t_since_launch", p.low_pct)});
    for (const char* n : {"px", "amount", "qty"})
        th.conditions.push_back({n, Rule::PercentileBelow, pct(n, p.high_pct)});
    th.conditions.push_back({"bot_bundle", Rule::BotMustBeFalse, 0.0});
    return th;
}

ConditionResult evaluate_conditions(const TraderSample& s, const ConditionThresholds& th) {
    ConditionResult r;
    r.all_pass = true;
    for (const auto& c : th.conditions) {
        const auto v = feature_value(s.features, c.feature);
        bool ok = false;
        if (v) {
            switch (c.rule) {
                case Rule::GreaterThanZero: ok = *v > 0; break;
                case Rule::TStatAbove:
                case Rule::PercentileAbove: ok = *v > c.cut; break;
                case Rule::StdBelow:
                case Rule::PercentileBelow: ok = *v < c.cut; break;
                case Rule::BotMustBeFalse: ok = *v == 0; break;
            }
        }
        r.pass[c.feature] = ok;
        r.all_pass = r.all_pass && ok;
    }
    return r;
}

void export_features(std::ostream& out, std::span<const TraderSample> samples) {
    out << kFeatureHeader << '\n';
    for (const auto& s : samples) {
        const auto& f = s.features;
        const std::vector<std::string> row{
            s.wallet, s.coin, std::to_string(s.first_trade_ts), std::string(to_string(s.split)), s.label ? "1" : "0",
            fmt(f.return_all), fmt(f.return_1st), fmt(f.return_1_5), fmt(f.return_6_10), fmt(f.return_11_15),
            std::to_string(f.n_trades), fmt(f.return_std), fmt(f.t_stat), fmt(f.t_since_last), fmt(f.t_since_first),
            fmt(f.t_since_launch), fmt(f.px), fmt(f.amount), fmt(f.qty), std::to_string(f.bot_bundle),
            std::to_string(f.bot_sniper), std::to_string(f.bot_bump), std::to_string(f.bot_comment)};
        csv::write_row(out, row);
    }
}

void export_features(const std::filesystem::path& path, std::span<const TraderSample> samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    export_features(out, samples);
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

std::vector<TraderSample> import_features(std::istream& in) {
    csv::Reader r(in);
    std::vector<std::string> f;
    const auto header = csv::split_header(kFeatureHeader);
    if (!r.next(f) || f != header)
        throw Error(ErrorCode::MalformedRow, "feature file header does not match the expected columns");
    std::vector<TraderSample> out;
    while (r.next(f)) {
        if (f.size() == 1 && f[0].empty()) continue;
        const auto row = r.line();
        if (f.size() != header.size())
            throw Error(ErrorCode::MalformedRow, "row " + std::to_string(row) + ": expected " +
                                                     std::to_string(header.size()) + " fields");
        TraderSample s;
        s.wallet = f[0];
        s.coin = f[1];
        s.first_trade_ts = parse_int(f[2], row, "first_trade_ts");
        auto sp = parse_split(f[3]);
        if (!sp) throw Error(ErrorCode::MalformedRow, "row " + std::to_string(row) + ": bad split '" + f[3] + "'");
        s.split = *sp;
        s.label = parse_bit(f[4], row, "label");
        auto& v = s.features;
        v.return_all = parse_opt(f[5], row, "return_all");
        v.return_1st = parse_opt(f[6], row, "return_1st");
        v.return_1_5 = parse_opt(f[7], row, "return_1_5");
        v.return_6_10 = parse_opt(f[8], row, "return_6_10");
        v.return_11_15 = parse_opt(f[9], row, "return_11_15");
        v.n_trades = parse_int(f[10], row, "n_trades");
        v.return_std = parse_opt(f[11], row, "return_std");
        v.t_stat = parse_opt(f[12], row, "t_stat");
        v.t_since_last = parse_opt(f[13], row, "t_since_last");
        v.t_since_first = parse_double(f[14], row, "t_since_first");
        v.t_since_launch = parse_double(f[15], row, "t_since_launch");
        v.px = parse_double(f[16], row, "px");
        v.amount = parse_double(f[17], row, "amount");
        v.qty = parse_double(f[18], row, "qty");
        v.bot_bundle = parse_bit(f[19], row, "bot_bundle");
        v.bot_sniper = parse_bit(f[20], row, "bot_sniper");
        v.bot_bump = parse_bit(f[21], row, "bot_bump");
        v.bot_comment = parse_bit(f[22], row, "bot_comment");
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<TraderSample> import_features(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingInput, "missing feature file " + path.string());
    return import_features(in);
}

std::string thresholds_to_json(const ConditionThresholds& th) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : th.conditions)
        arr.push_back({{"feature", c.feature}, {"rule", std::string(to_string(c.rule))}, {"cut", c.cut}});
    return nlohmann::json{{"conditions", arr}}.dump(2);
}

ConditionThresholds thresholds_from_json(const std::string& text) {
    ConditionThresholds th;
    try {
        const auto j = nlohmann::json::parse(text);
        for (const auto& c : j.at("conditions")) {
            Condition cond;
            cond.feature = c.at("feature").get<std::string>();
            const auto rule = c.at("rule").get<std::string>();
            bool found = false;
            for (auto r : {Rule::GreaterThanZero, Rule::TStatAbove, Rule::StdBelow, Rule::PercentileAbove,
                           Rule::PercentileBelow, Rule::BotMustBeFalse})
                if (to_string(r) == rule) {
                    cond.rule = r;
                    found = true;
                }
            if (!found) throw Error(ErrorCode::MalformedRow, "unknown rule '" + rule + "'");
            cond.cut = c.at("cut").get<double>();
            th.conditions.push_back(std::move(cond));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedRow, std::string("thresholds: ") + e.what());
    }
    return th;
}

}  // namespace copyguard::features
