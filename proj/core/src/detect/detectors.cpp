#include "copyguard/detect/detectors.hpp"

#include <algorithm>
#include <cmath>

#include <boost/multiprecision/number.hpp>
#include <nlohmann/json.hpp>

#include "copyguard/common/error.hpp"
#include "copyguard/common/parallel.hpp"

namespace copyguard::detect {

using chain::CoinLedger;
using chain::TxKind;
using chain::TxRecord;

void DetectionConfig::validate() const {
    if (sniper_window_K == 0) throw Error(ErrorCode::InvalidConfig, "sniper_window_K must be positive");
    if (!bump_threshold_xi.is_positive())
        throw Error(ErrorCode::InvalidConfig, "bump_threshold_xi must be positive");
    if (!bump_epsilon.is_positive()) throw Error(ErrorCode::InvalidConfig, "bump_epsilon must be positive");
    if (comment_bot_min_count <= 0)
        throw Error(ErrorCode::InvalidConfig, "comment_bot_min_count must be positive");
    if (!(dump_fraction > 0.0 && dump_fraction < 1.0))
        throw Error(ErrorCode::InvalidConfig, "dump_fraction must lie in (0, 1)");
}

std::string_view to_string(Tri t) {
    switch (t) {
        case Tri::False: return "false";
        case Tri::True: return "true";
        case Tri::Unknown: return "unknown";
    }
    return "unknown";
}

namespace {

void require_creator(const CoinLedger& ledger) {
    if (!ledger.creator_known())
        throw Error(ErrorCode::CreatorUnknown, "coin " + ledger.coin + ": creator unknown");
}

}  // namespace

bool detect_bundle(const CoinLedger& ledger) {
    require_creator(ledger);
    const auto b0 = *ledger.launch_block;
    for (const auto& tx : ledger.txs) {
        if (tx.block == b0 && tx.kind == TxKind::Buy && tx.trader != *ledger.creator) return true;
    }
    return false;
}

bool detect_sniper(const CoinLedger& ledger, const DetectionConfig& cfg) {
    require_creator(ledger);
    const auto b0 = *ledger.launch_block;
    for (const auto& tx : ledger.txs) {
        if (tx.block > b0 && tx.block <= b0 + cfg.sniper_window_K && tx.kind == TxKind::Buy &&
            tx.trader != *ledger.creator)
            return true;
    }
    return false;
}

bool bump_exceeds(std::int64_t flips, Decimal net_position, const DetectionConfig& cfg) {
    // F * unit * unit >= xi_raw * (dP + eps)_raw, both sides at scale 1e18.
    using U = unsigned __int128;
    const U lhs = static_cast<U>(flips) * static_cast<U>(Decimal::kUnit) * static_cast<U>(Decimal::kUnit);
    const U rhs = static_cast<U>(cfg.bump_threshold_xi.raw()) *
                  static_cast<U>((net_position + cfg.bump_epsilon).raw());
    return lhs >= rhs;
}

BumpResult detect_bump(const CoinLedger& ledger, const DetectionConfig& cfg) {
    // txs are already in (block, index) order, so per-wallet subsequences are too.
    std::map<std::string, std::vector<const TxRecord*>> by_wallet;
    for (const auto& tx : ledger.txs) {
        if (tx.is_trade()) by_wallet[tx.trader].push_back(&tx);
    }
    BumpResult out;
    const Real eps = to_real(cfg.bump_epsilon);
    for (const auto& [wallet, txs] : by_wallet) {
        WalletBump wb;
        Decimal signed_sum;
        for (std::size_t i = 0; i < txs.size(); ++i) {
            signed_sum += txs[i]->kind == TxKind::Buy ? txs[i]->token_qty : -txs[i]->token_qty;
            if (i + 1 < txs.size() && txs[i]->kind != txs[i + 1]->kind &&
                txs[i]->token_qty == txs[i + 1]->token_qty)
                ++wb.flips;
        }
        wb.net_position = signed_sum.abs();
        wb.alpha = Real(wb.flips) / (to_real(wb.net_position) + eps);
        wb.flagged = bump_exceeds(wb.flips, wb.net_position, cfg);
        out.flagged = out.flagged || wb.flagged;
        out.wallets.emplace(wallet, wb);
    }
    return out;
}

CommentResult classify_coin_comments(const CoinLedger& ledger, CommentClassifier& classifier,
                                     const DetectionConfig& cfg) {
    CommentResult r;
    if (ledger.comments.empty()) return r;
    r.labels = classifier.classify(ledger.comments);
    if (r.labels.size() != ledger.comments.size())
        throw Error(ErrorCode::InvariantViolation, "classifier returned wrong number of labels");
    r.bot_count = static_cast<std::size_t>(std::count(r.labels.begin(), r.labels.end(), true));
    r.flagged = r.bot_count >= static_cast<std::size_t>(cfg.comment_bot_min_count);
    return r;
}

bool comment_flag_before(const CoinLedger& ledger, const std::vector<bool>& labels,
                         std::int64_t cutoff_ts, const DetectionConfig& cfg) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < ledger.comments.size() && i < labels.size(); ++i) {
        if (labels[i] && ledger.comments[i].timestamp < cutoff_ts) ++n;
    }
    return n >= static_cast<std::size_t>(cfg.comment_bot_min_count);
}

namespace {

std::optional<PricePath> curve_path(const CoinLedger& ledger, const curve::CurveParams& params,
                                    const DetectionConfig& cfg) {
    auto s = curve::CurveState::fresh(params);
    PricePath path;
    path.launch_price = curve::marginal_price(s);
    path.from_curve = true;
    try {
        for (const auto& tx : ledger.txs) {
            if (!tx.is_trade()) continue;
            s = tx.kind == TxKind::Buy ? curve::apply_buy(s, tx.token_qty).state
                                       : curve::apply_sell(s, tx.token_qty).state;
            PricePoint p;
            p.timestamp = tx.timestamp;
            p.block = tx.block;
            p.price = curve::marginal_price(s);
            p.liquidity = cfg.liquidity_proxy == LiquidityProxy::DepositedSol ? s.x_deposited : p.price;
            path.points.push_back(p);
        }
    } catch (const Error&) {
        return std::nullopt;
    }
    return path;
}

PricePath implied_path(const CoinLedger& ledger) {
    PricePath path;
    path.from_curve = false;
    for (const auto& tx : ledger.txs) {
        if (!tx.is_trade()) continue;
        PricePoint p;
        p.timestamp = tx.timestamp;
        p.block = tx.block;
        p.price = to_real(tx.sol_amount) / to_real(tx.token_qty);
        p.liquidity = p.price;
        if (path.points.empty()) path.launch_price = p.price;
        path.points.push_back(p);
    }
    return path;
}

}  // namespace

PricePath price_path(const CoinLedger& ledger, const curve::CurveParams& params,
                     const DetectionConfig& cfg) {
    if (cfg.curve_replay) {
        if (auto p = curve_path(ledger, params, cfg)) return *p;
    }
    return implied_path(ledger);
}

CoinMetrics metrics_from_path(const PricePath& path, const DetectionConfig& cfg) {
    if (path.points.empty()) throw Error(ErrorCode::EmptyLedger, "no trades to measure");
    CoinMetrics m;
    m.from_curve = path.from_curve;
    Real p_max = path.launch_price;
    std::size_t peak = path.points.size();  // none above launch yet
    for (std::size_t i = 0; i < path.points.size(); ++i) {
        if (path.points[i].price > p_max) {
            p_max = path.points[i].price;
            peak = i;
        }
    }
    if (peak == path.points.size()) {
        peak = 0;
        m.peak_ts = path.points.front().timestamp;
    } else {
        m.peak_ts = path.points[peak].timestamp;
    }
    m.ln_max_return = path.launch_price > 0 ? Real(boost::multiprecision::log(p_max / path.launch_price)) : Real(0);
    const Real cut = path.points[peak].liquidity * Real(cfg.dump_fraction);
    for (std::size_t i = peak + 1; i < path.points.size(); ++i) {
        if (path.points[i].liquidity <= cut) {
            const auto secs = std::max<std::int64_t>(1, path.points[i].timestamp - m.peak_ts);
            m.ln_dump_duration = Real(boost::multiprecision::log(Real(secs)));
            break;
        }
    }
    return m;
}

CoinMetrics coin_metrics(const CoinLedger& ledger, const curve::CurveParams& params,
                         const DetectionConfig& cfg) {
    const bool any_trade = std::any_of(ledger.txs.begin(), ledger.txs.end(),
                                       [](const TxRecord& t) { return t.is_trade(); });
    if (!any_trade) throw Error(ErrorCode::EmptyLedger, "coin " + ledger.coin + ": no trades");
    return metrics_from_path(price_path(ledger, params, cfg), cfg);
}

CoinReport detect_coin(const CoinLedger& ledger, const DetectionConfig& cfg,
                       const curve::CurveParams& params, CommentClassifier* classifier) {
    CoinReport r;
    r.coin = ledger.coin;
    if (ledger.creator_known()) {
        r.flags.bundle = tri(detect_bundle(ledger));
        r.flags.sniper = tri(detect_sniper(ledger, cfg));
    }
    auto bump = detect_bump(ledger, cfg);
    r.flags.bump = bump.flagged;
    r.flags.bump_scores = std::move(bump.wallets);
    if (classifier) {
        try {
            auto c = classify_coin_comments(ledger, *classifier, cfg);
            r.flags.comment = tri(c.flagged);
            r.comment_labels = std::move(c.labels);
        } catch (const Error& e) {
            if (category(e.code()) != ErrorCategory::External) throw;
            r.flags.comment = Tri::Unknown;
        }
    }
    try {
        r.metrics = coin_metrics(ledger, params, cfg);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptyLedger) throw;
    }
    return r;
}

std::vector<CoinReport> detect_all(std::span<const CoinLedger> ledgers, const DetectionConfig& cfg,
                                   const curve::CurveParams& params, CommentClassifier* classifier,
                                   std::size_t workers) {
    cfg.validate();
    std::vector<CoinReport> out(ledgers.size());
    parallel_for(ledgers.size(), workers,
                 [&](std::size_t i) { out[i] = detect_coin(ledgers[i], cfg, params, classifier); });
    std::sort(out.begin(), out.end(),
              [](const CoinReport& a, const CoinReport& b) { return a.coin < b.coin; });
    return out;
}

namespace {

using json = nlohmann::json;

json tri_json(Tri t) {
    if (t == Tri::Unknown) return "unknown";
    return t == Tri::True;
}

Tri tri_from(const json& j) {
    if (j.is_boolean()) return tri(j.get<bool>());
    if (j.is_string() && j.get<std::string>() == "unknown") return Tri::Unknown;
    throw Error(ErrorCode::MalformedRow, "expected true/false/\"unknown\"");
}

double num(const Real& r) { return to_double(r); }

}  // namespace

std::string to_json_line(const CoinReport& r) {
    json scores = json::object(), flips = json::object(), net = json::object();
    for (const auto& [w, b] : r.flags.bump_scores) {
        scores[w] = num(b.alpha);
        flips[w] = b.flips;
        net[w] = b.net_position.to_string();
    }
    json j = json::object();
    j["coin"] = r.coin;
    j["bundle"] = tri_json(r.flags.bundle);
    j["sniper"] = tri_json(r.flags.sniper);
    j["bump"] = r.flags.bump;
    j["comment"] = tri_json(r.flags.comment);
    j["bump_scores"] = std::move(scores);
    j["flip_counts"] = std::move(flips);
    j["net_positions"] = std::move(net);
    if (r.metrics) {
        j["ln_max_return"] = num(r.metrics->ln_max_return);
        j["ln_dump_duration"] =
            r.metrics->ln_dump_duration ? json(num(*r.metrics->ln_dump_duration)) : json(nullptr);
        j["peak_ts"] = r.metrics->peak_ts;
    } else {
        j["ln_max_return"] = nullptr;
        j["ln_dump_duration"] = nullptr;
        j["peak_ts"] = nullptr;
    }
    json labels = json::array();
    for (bool b : r.comment_labels) labels.push_back(b ? 1 : 0);
    j["comment_labels"] = std::move(labels);
    return j.dump();
}

CoinReport report_from_json_line(const std::string& line) {
    CoinReport r;
    try {
        const json j = json::parse(line);
        r.coin = j.at("coin").get<std::string>();
        r.flags.bundle = tri_from(j.at("bundle"));
        r.flags.sniper = tri_from(j.at("sniper"));
        r.flags.bump = j.at("bump").get<bool>();
        r.flags.comment = tri_from(j.at("comment"));
        const auto& flips = j.value("flip_counts", json::object());
        const auto& net = j.value("net_positions", json::object());
        for (const auto& [w, a] : j.at("bump_scores").items()) {
            WalletBump b;
            b.alpha = Real(a.get<double>());
            if (flips.contains(w)) b.flips = flips.at(w).get<std::int64_t>();
            if (net.contains(w)) b.net_position = Decimal::parse(net.at(w).get<std::string>());
            r.flags.bump_scores.emplace(w, b);
        }
        if (!j.at("ln_max_return").is_null()) {
            CoinMetrics m;
            m.ln_max_return = Real(j.at("ln_max_return").get<double>());
            if (!j.at("ln_dump_duration").is_null())
                m.ln_dump_duration = Real(j.at("ln_dump_duration").get<double>());
            m.peak_ts = j.at("peak_ts").get<std::int64_t>();
            r.metrics = m;
        }
        for (const auto& v : j.value("comment_labels", json::array())) r.comment_labels.push_back(v.get<int>() != 0);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedRow, std::string("detection report: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw Error(ErrorCode::MalformedRow, std::string("detection report: ") + e.what());
    }
    return r;
}

}  // namespace copyguard::detect
