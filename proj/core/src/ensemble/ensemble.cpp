#include "copyguard/ensemble/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <tuple>

#include "copyguard/common/error.hpp"
#include "copyguard/common/parallel.hpp"

namespace copyguard::ensemble {

void WeightVector::validate() const {
    double sum = 0;
    for (double x : w) {
        if (!(x >= 0)) throw Error(ErrorCode::InvalidConfig, "agent weights must be non-negative");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw Error(ErrorCode::InvalidConfig, "agent weights must sum to 1");
}

Aggregate aggregate(const Confidences& conf, const WeightVector& w) {
    Aggregate out;
    double mass = 0, acc = 0, plain = 0;
    std::size_t present = 0;
    for (std::size_t a = 0; a < 3; ++a) {
        if (!conf[a]) {
            out.renormalized = true;
            continue;
        }
        ++present;
        mass += w.w[a];
        acc += w.w[a] * *conf[a];
        plain += *conf[a];
    }
    if (present == 0) return out;
    if (!out.renormalized) out.score = acc;
    else if (mass > 0) out.score = acc / mass;
    else out.score = plain / static_cast<double>(present);
    out.score = std::clamp(out.score, 0.0, 1.0);
    return out;
}

namespace {

void check_sizes(std::span<const double> scores, std::span<const bool> labels) {
    if (scores.size() != labels.size())
        throw Error(ErrorCode::InvariantViolation, "score and label counts differ");
}

std::vector<std::size_t> by_score_desc(std::span<const double> scores) {
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return idx;
}

}  // namespace

std::optional<double> roc_auc(std::span<const double> scores, std::span<const bool> labels) {
    check_sizes(scores, labels);
    const auto pos = static_cast<std::uint64_t>(std::count(labels.begin(), labels.end(), true));
    const auto neg = static_cast<std::uint64_t>(labels.size()) - pos;
    if (pos == 0 || neg == 0) return std::nullopt;
    const auto idx = by_score_desc(scores);
    // twice the area in (fp, tp) count units; a tied group is one diagonal step
    unsigned __int128 area2 = 0;
    std::uint64_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < idx.size();) {
        std::uint64_t dtp = 0, dfp = 0;
        std::size_t j = i;
        for (; j < idx.size() && scores[idx[j]] == scores[idx[i]]; ++j) (labels[idx[j]] ? dtp : dfp)++;
        area2 += static_cast<unsigned __int128>(dfp) * (2 * tp + dtp);
        tp += dtp;
        fp += dfp;
        i = j;
    }
    return static_cast<double>(area2) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const bool> labels) {
    check_sizes(scores, labels);
    const auto pos = static_cast<double>(std::count(labels.begin(), labels.end(), true));
    const auto neg = static_cast<double>(labels.size()) - pos;
    std::vector<RocPoint> out{{std::numeric_limits<double>::infinity(), 0, 0}};
    const auto idx = by_score_desc(scores);
    double tp = 0, fp = 0;
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        for (; j < idx.size() && scores[idx[j]] == scores[idx[i]]; ++j) (labels[idx[j]] ? tp : fp) += 1;
        out.push_back({scores[idx[i]], neg > 0 ? fp / neg : 0.0, pos > 0 ? tp / pos : 0.0});
        i = j;
    }
    return out;
}

std::vector<double> default_threshold_grid() {
    std::vector<double> g;
    for (int i = 0; i <= 100; ++i) g.push_back(i / 100.0);
    return g;
}

std::vector<ThresholdRow> threshold_sweep(std::span<const double> scores, std::span<const bool> labels,
                                          std::span<const double> grid) {
    check_sizes(scores, labels);
    std::vector<ThresholdRow> rows;
    rows.reserve(grid.size());
    for (double t : grid) {
        ThresholdRow r;
        r.threshold = t;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const bool pred = scores[i] >= t;
            if (pred) (labels[i] ? r.tp : r.fp)++;
            else (labels[i] ? r.fn : r.tn)++;
        }
        const auto tp = static_cast<double>(r.tp);
        r.precision_undefined = r.tp + r.fp == 0;
        r.recall_undefined = r.tp + r.fn == 0;
        r.precision = r.precision_undefined ? 0.0 : tp / static_cast<double>(r.tp + r.fp);
        r.recall = r.recall_undefined ? 0.0 : tp / static_cast<double>(r.tp + r.fn);
        r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
        rows.push_back(r);
    }
    return rows;
}

double best_f1_threshold(std::span<const ThresholdRow> rows) {
    if (rows.empty()) throw Error(ErrorCode::NoSelections, "empty threshold sweep");
    const ThresholdRow* best = &rows.front();
    for (const auto& r : rows)
        if (r.f1 > best->f1 || (r.f1 == best->f1 && r.threshold < best->threshold)) best = &r;
    return best->threshold;
}

std::vector<double> scores_of(std::span<const Sample> samples, const WeightVector& w) {
    std::vector<double> s;
    s.reserve(samples.size());
    for (const auto& x : samples) s.push_back(aggregate(x.conf, w).score);
    return s;
}

namespace {

// vector<bool> has no contiguous storage
struct Labels {
    std::unique_ptr<bool[]> data;
    std::size_t n = 0;
    explicit Labels(std::span<const Sample> s) : data(std::make_unique<bool[]>(s.size())), n(s.size()) {
        for (std::size_t i = 0; i < n; ++i) data[i] = s[i].label;
    }
    std::span<const bool> span() const { return {data.get(), n}; }
};

}  // namespace

EvalReport evaluate_scores(std::string split, std::span<const double> scores, std::span<const bool> labels,
                           std::span<const double> grid) {
    EvalReport r;
    r.split = std::move(split);
    r.n = scores.size();
    r.n_positive = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
    r.auc = roc_auc(scores, labels);
    r.roc = roc_curve(scores, labels);
    r.sweep = threshold_sweep(scores, labels, grid);
    return r;
}

std::vector<bool> labels_of(std::span<const Sample> samples) {
    std::vector<bool> l;
    l.reserve(samples.size());
    for (const auto& x : samples) l.push_back(x.label);
    return l;
}

namespace {

std::unique_ptr<bool[]> contiguous(const std::vector<bool>& v) {
    auto out = std::make_unique<bool[]>(v.size());
    std::copy(v.begin(), v.end(), out.get());
    return out;
}

}  // namespace

std::optional<double> roc_auc(std::span<const double> scores, const std::vector<bool>& labels) {
    const auto buf = contiguous(labels);
    return roc_auc(scores, std::span<const bool>(buf.get(), labels.size()));
}

EvalReport evaluate_scores(std::string split, std::span<const double> scores, const std::vector<bool>& labels,
                           std::span<const double> grid) {
    const auto buf = contiguous(labels);
    return evaluate_scores(std::move(split), scores, std::span<const bool>(buf.get(), labels.size()), grid);
}

EvalReport evaluate(std::string split, std::span<const Sample> samples, const WeightVector& w,
                    std::span<const double> grid) {
    const auto scores = scores_of(samples, w);
    const Labels labels(samples);
    auto r = evaluate_scores(std::move(split), scores, labels.span(), grid);
    r.weights = w;
    for (const auto& s : samples) r.renormalized += aggregate(s.conf, w).renormalized ? 1 : 0;
    return r;
}

FitResult fit_weights(std::span<const Sample> validation, std::optional<AgentKind> drop, std::size_t workers) {
    const Labels labels(validation);
    const auto pos = std::count(labels.span().begin(), labels.span().end(), true);
    if (pos == 0 || pos == static_cast<std::ptrdiff_t>(validation.size()))
        throw Error(ErrorCode::SingleClassValidation, "validation split needs both classes to fit weights");

    // integer grid coordinates (sum 100); the exact uniform point is kept apart
    struct Point {
        std::array<int, 3> units;
        bool exact_uniform;
        WeightVector w;
    };
    std::vector<Point> pts;
    for (int i = 0; i <= 100; ++i)
        for (int j = 0; i + j <= 100; ++j) {
            const std::array<int, 3> u{i, j, 100 - i - j};
            if (drop && u[index_of(*drop)] != 0) continue;
            pts.push_back({u, false, WeightVector::of(u[0] / 100.0, u[1] / 100.0, u[2] / 100.0)});
        }
    if (!drop) pts.push_back({{0, 0, 0}, true, WeightVector::uniform()});

    std::vector<double> auc(pts.size());
    parallel_for(pts.size(), workers == 0 ? default_workers() : workers, [&](std::size_t p) {
        auc[p] = roc_auc(scores_of(validation, pts[p].w), labels.span()).value_or(0.5);
    });

    // squared distance to the uniform point of the searched face, scaled by k*100
    auto dist = [&](const Point& p) -> long {
        if (p.exact_uniform) return 0;
        const int k = drop ? 2 : 3;
        long d = 0;
        for (std::size_t a = 0; a < 3; ++a) {
            if (drop && a == index_of(*drop)) continue;
            const long x = static_cast<long>(p.units[a]) * k - 100;
            d += x * x;
        }
        return d;
    };
    std::size_t best = 0;
    for (std::size_t p = 1; p < pts.size(); ++p) {
        if (auc[p] > auc[best]) best = p;
        else if (auc[p] == auc[best]) {
            const auto dp = dist(pts[p]), db = dist(pts[best]);
            if (dp < db || (dp == db && pts[p].units < pts[best].units)) best = p;
        }
    }

    FitResult out;
    out.weights = pts[best].w;
    out.auc = auc[best];
    out.grid_points = pts.size();
    out.dropped = drop;
    for (auto k : agents::kAllAgents) {
        WeightVector corner{{0, 0, 0}};
        corner.w[index_of(k)] = 1;
        out.single_agent_auc[index_of(k)] = roc_auc(scores_of(validation, corner), labels.span()).value_or(0.5);
    }
    return out;
}

econ::TradeSeq wallet_trade_seq(const chain::CoinLedger& ledger, const std::string& wallet,
                                const curve::CurveParams& params) {
    econ::TradeSeq seq;
    auto state = curve::CurveState::fresh(params);
    bool started = false;
    for (const auto& tx : ledger.txs) {
        if (!tx.is_trade()) continue;
        const bool buy = tx.kind == chain::TxKind::Buy;
        if (tx.trader == wallet) {
            if (!started) seq.initial_state = state;
            started = true;
            seq.trades.push_back(buy ? tx.token_qty : -tx.token_qty);
        }
        if (!started) state = buy ? curve::apply_buy(state, tx.token_qty).state : curve::apply_sell(state, tx.token_qty).state;
    }
    if (!started) throw Error(ErrorCode::InvalidSequence, wallet + " has no trades in " + ledger.coin);
    return seq;
}

std::vector<Selection> select_at(std::span<const Sample> samples, const WeightVector& w, double threshold) {
    std::vector<Selection> out;
    for (const auto& s : samples)
        if (aggregate(s.conf, w).score >= threshold) out.push_back({s.wallet, s.coin});
    return out;
}

EconomicsResult economics_of_selection(std::span<const Selection> selections,
                                       std::span<const chain::CoinLedger> ledgers,
                                       const curve::CurveParams& params, std::size_t workers) {
    if (selections.empty()) throw Error(ErrorCode::NoSelections, "no samples selected at the operating threshold");
    std::map<std::string, const chain::CoinLedger*, std::less<>> by_coin;
    for (const auto& l : ledgers) by_coin[l.coin] = &l;

    EconomicsResult out;
    out.selections.resize(selections.size());
    parallel_for(selections.size(), workers == 0 ? default_workers() : workers, [&](std::size_t i) {
        auto& r = out.selections[i];
        r.wallet = selections[i].wallet;
        r.coin = selections[i].coin;
        const auto it = by_coin.find(r.coin);
        if (it == by_coin.end()) {
            r.skipped = "coin not in ledgers";
            return;
        }
        try {
            econ::CopierOptions opts;
            opts.liquidate_residual = true;
            r.report = econ::replay_with_copier(wallet_trade_seq(*it->second, r.wallet, params), opts);
        } catch (const Error& e) {
            r.skipped = std::string(to_string(e.code())) + ": " + e.what();
        }
    });
    Real smart = 0, copier = 0;
    for (const auto& r : out.selections) {
        if (!r.report) {
            ++out.skipped;
            continue;
        }
        ++out.used;
        smart += 1 + r.report->r_smart;
        copier += 1 + r.report->r_copier;
    }
    if (out.used == 0)
        throw Error(ErrorCode::NoSelections, "none of the " + std::to_string(out.skipped) + " selections could be replayed");
    out.smart_money_gross_return = to_double(smart / static_cast<long long>(out.used));
    out.copier_gross_return = to_double(copier / static_cast<long long>(out.used));
    return out;
}

ModelRun run_model(std::span<const Sample> validation, std::span<const Sample> test,
                   std::optional<AgentKind> drop, const EconomicsContext* econ, std::span<const double> grid,
                   std::size_t workers) {
    ModelRun m;
    m.fit = fit_weights(validation, drop, workers);
    m.validation = evaluate("val", validation, m.fit.weights, grid);
    m.test = evaluate("test", test, m.fit.weights, grid);
    const double t = best_f1_threshold(m.validation.sweep);
    m.test.threshold = t;
    if (econ) {
        const auto sel = select_at(test, m.fit.weights, t);
        m.test.selections = sel.size();
        if (!sel.empty()) {
            try {
                m.economics = economics_of_selection(sel, econ->ledgers, econ->params, workers);
                m.test.smart_money_gross_return = m.economics->smart_money_gross_return;
                m.test.copier_gross_return = m.economics->copier_gross_return;
                m.test.selections_skipped = m.economics->skipped;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::NoSelections) throw;
                m.test.selections_skipped = sel.size();
            }
        }
    }
    return m;
}

AblationResult ablate(AgentKind drop, const ModelRun& full, std::span<const Sample> validation,
                      std::span<const Sample> test, const EconomicsContext* econ, std::span<const double> grid,
                      std::size_t workers) {
    AblationResult a;
    a.dropped = drop;
    a.run = run_model(validation, test, drop, econ, grid, workers);
    a.delta_validation_auc = a.run.fit.auc - full.fit.auc;
    if (a.run.test.auc && full.test.auc) a.delta_test_auc = *a.run.test.auc - *full.test.auc;
    if (a.run.test.smart_money_gross_return && full.test.smart_money_gross_return)
        a.delta_smart_money_gross_return = *a.run.test.smart_money_gross_return - *full.test.smart_money_gross_return;
    if (a.run.test.copier_gross_return && full.test.copier_gross_return)
        a.delta_copier_gross_return = *a.run.test.copier_gross_return - *full.test.copier_gross_return;
    return a;
}

}  // namespace copyguard::ensemble
