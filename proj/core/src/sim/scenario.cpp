#include "copyguard/sim/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "copyguard/chain/ingest.hpp"
#include "copyguard/common/error.hpp"

namespace copyguard::sim {

namespace {

constexpr std::array<std::pair<ScenarioKind, std::string_view>, 8> kKindNames{{
    {ScenarioKind::Benign, "benign"},
    {ScenarioKind::NaiveBundle, "naive_bundle"},
    {ScenarioKind::BundleBot, "bundle_bot"},
    {ScenarioKind::GradualBundle, "gradual_bundle"},
    {ScenarioKind::SniperBot, "sniper_bot"},
    {ScenarioKind::BumpBot, "bump_bot"},
    {ScenarioKind::CommentBot, "comment_bot"},
    {ScenarioKind::Mixed, "mixed"},
}};

// Slogans in the style of hype bots; all short and reference-free.
const std::vector<std::string> kSlogans = {
    "TO THE MOON!!! READYY", "we'll get there! LFG", "SENDOOR", "Bro moon incoming right now",
    "LFG LFG LFG", "100x GEM NO CAP", "PUMP IT!!!", "SEND IT", "MOON SOON", "next 100x gem",
    "WAGMI!!!", "BUY THE DIP LFG", "sacks full, moon time", "HUGE PUMP INCOMING",
};

// Organic comments; {ref} becomes a #-prefixed 8 digit user id.
const std::vector<std::string> kOrganic = {
    "{ref} show screenshot as proof pls?",
    "Fake web bros, not same ca",
    "dev sold part of the supply already, be careful with sizing here",
    "{ref} where did you see the roadmap? cannot find any socials",
    "chart looks weak after the first dump, waiting for a retest before adding",
    "who is behind this one, any real community or just a quick flip?",
    "{ref} you said the same thing about the last coin and it went to zero",
    "took my initial out, riding the rest with a stop at break even",
};

std::string fill_ref(const std::string& tmpl, std::mt19937_64& rng) {
    auto pos = tmpl.find("{ref}");
    if (pos == std::string::npos) return tmpl;
    std::uniform_int_distribution<long> d(10'000'000, 99'999'999);
    return tmpl.substr(0, pos) + "#" + std::to_string(d(rng)) + tmpl.substr(pos + 5);
}

enum class Act { Create, BuySol, BuyQty, SellAll, SellQty, SellHalf };

struct Event {
    std::uint64_t block = 0;
    int prio = 2;
    std::size_t seq = 0;
    std::string wallet;
    Act act = Act::BuySol;
    double sol = 0.0;
    Decimal qty;
    std::optional<std::size_t> participant;
};

class Engine {
public:
    Engine(const ScenarioSpec& spec, LabeledScenario& out)
        : spec_(spec), out_(out), state_(curve::CurveState::fresh(spec.curve)) {
        launch_price_ = curve::marginal_price(state_);
        p_max_ = launch_price_;
        x0_ = state_.X;
    }

    std::int64_t ts_of(std::uint64_t block) const {
        return spec_.launch_ts + static_cast<std::int64_t>((block - spec_.launch_block) * 2 / 5);
    }

    void create(const std::string& wallet, std::uint64_t block) {
        push_row(wallet, block, chain::TxKind::Create, Decimal{}, Decimal::parse("0.02"));
    }

    // Returns the token quantity actually bought (zero when the budget is too small).
    Decimal buy_sol(const std::string& wallet, std::uint64_t block, double sol) {
        const Real net = Real(sol) / (1 + spec_.curve.fee());
        const Decimal q = to_decimal_floor(curve::tokens_for_deposit(state_, net));
        if (!q.is_positive()) return q;
        buy_qty(wallet, block, q);
        return q;
    }

    void buy_qty(const std::string& wallet, std::uint64_t block, Decimal q) {
        if (to_real(q) * 2 >= state_.Y)
            throw Error(ErrorCode::InfeasibleSpec,
                        "coin " + spec_.coin + ": planned buy of " + q.to_string() + " tokens too large");
        const auto r = curve::apply_buy(state_, q);
        state_ = r.state;
        auto& p = out_.pnl[wallet];
        p.cash_in += r.cash;
        p.holding += q;
        if (!p.bought) {
            p.bought = true;
            p.first_buy_ts = ts_of(block);
        }
        out_.total_cash_in += r.cash;
        out_.total_fees += r.fee;
        push_row(wallet, block, chain::TxKind::Buy, q, to_decimal(r.cash));
        track(block);
    }

    Decimal sell_qty(const std::string& wallet, std::uint64_t block, Decimal q) {
        auto& p = out_.pnl[wallet];
        q = std::min(q, p.holding);
        if (!q.is_positive()) return Decimal{};
        const auto r = curve::apply_sell(state_, q);
        state_ = r.state;
        p.cash_out += r.cash;
        p.holding -= q;
        out_.total_cash_out += r.cash;
        out_.total_fees += r.fee;
        push_row(wallet, block, chain::TxKind::Sell, q, to_decimal(r.cash));
        track(block);
        return q;
    }

    Decimal holding(const std::string& wallet) const {
        auto it = out_.pnl.find(wallet);
        return it == out_.pnl.end() ? Decimal{} : it->second.holding;
    }

    const curve::CurveState& state() const { return state_; }

    void finish() {
        auto rows = std::move(rows_);
        out_.ledger = chain::assemble_ledgers(std::move(rows)).ledgers.at(0);
        out_.terminal_price = curve::marginal_price(state_);
        out_.x_growth = state_.X - x0_;
        auto& m = out_.truth_metrics;
        m.from_curve = true;
        m.peak_ts = peak_ts_.value_or(first_ts_.value_or(spec_.launch_ts));
        m.ln_max_return = Real(boost::multiprecision::log(p_max_ / launch_price_));
        if (dump_ts_) {
            const auto secs = std::max<std::int64_t>(1, *dump_ts_ - m.peak_ts);
            m.ln_dump_duration = Real(boost::multiprecision::log(Real(secs)));
        }
    }

private:
    void push_row(const std::string& wallet, std::uint64_t block, chain::TxKind kind, Decimal q, Decimal sol) {
        chain::TxRecord tx;
        tx.coin = spec_.coin;
        tx.block = block;
        tx.index_in_block = next_index_[block]++;
        tx.kind = kind;
        tx.trader = wallet;
        tx.token_qty = q;
        tx.sol_amount = sol;
        tx.timestamp = ts_of(block);
        rows_.push_back(std::move(tx));
    }

    // Ground-truth peak and dump crossing, tracked while trading.
    void track(std::uint64_t block) {
        const std::int64_t ts = ts_of(block);
        if (!first_ts_) {
            first_ts_ = ts;
            first_liq_ = state_.x_deposited;
        }
        const Real p = curve::marginal_price(state_);
        if (p > p_max_) {
            p_max_ = p;
            peak_ts_ = ts;
            peak_liq_ = state_.x_deposited;
            dump_ts_.reset();
            return;
        }
        const Real ref = peak_ts_ ? peak_liq_ : first_liq_;
        if (!dump_ts_ && state_.x_deposited <= ref * Real(spec_.dump_fraction)) dump_ts_ = ts;
    }

    const ScenarioSpec& spec_;
    LabeledScenario& out_;
    curve::CurveState state_;
    Real launch_price_, p_max_, x0_;
    Real peak_liq_ = 0, first_liq_ = 0;
    std::optional<std::int64_t> peak_ts_, dump_ts_, first_ts_;
    std::vector<chain::TxRecord> rows_;
    std::map<std::uint64_t, std::uint32_t> next_index_;
};

double lognormal(std::mt19937_64& rng, double mu, double sigma) {
    return std::lognormal_distribution<double>(mu, sigma)(rng);
}

std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    if (hi < lo) return lo;
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

}  // namespace

std::string_view to_string(ScenarioKind kind) {
    for (const auto& [k, n] : kKindNames)
        if (k == kind) return n;
    return "unknown";
}

std::optional<ScenarioKind> parse_scenario_kind(std::string_view text) {
    for (const auto& [k, n] : kKindNames)
        if (n == text) return k;
    return std::nullopt;
}

const std::vector<ScenarioKind>& all_kinds() {
    static const std::vector<ScenarioKind> kinds = [] {
        std::vector<ScenarioKind> v;
        for (const auto& [k, n] : kKindNames) v.push_back(k);
        return v;
    }();
    return kinds;
}

std::string_view to_string(Role role) {
    switch (role) {
        case Role::Creator: return "creator";
        case Role::Controlled: return "controlled";
        case Role::Sniper: return "sniper";
        case Role::BumpBot: return "bump_bot";
        case Role::Copier: return "copier";
        case Role::Retail: return "retail";
        case Role::KOL: return "kol";
    }
    return "unknown";
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

void ScenarioSpec::validate() const {
    auto bad = [&](const std::string& why) {
        throw Error(ErrorCode::InfeasibleSpec, "scenario " + coin + ": " + why);
    };
    if (coin.empty()) bad("empty coin id");
    if (n_retail < 0 || n_controlled_wallets < 1) bad("wallet counts out of range");
    if (sniper_delay_blocks < 1 || static_cast<std::uint64_t>(sniper_delay_blocks) > sniper_window_K)
        bad("sniper_delay_blocks must lie in [1, K]");
    if (flip_count < 0 || comment_bot_count < 0 || organic_comment_count < 0) bad("negative count");
    if (gradual_span_blocks < 1) bad("gradual_span_blocks must be positive");
    if (dump_lead_min < 0 || dump_lead_max < dump_lead_min) bad("dump lead range");
    const auto first_free = static_cast<int>(sniper_window_K) + 1;
    if (turn_offset_blocks - dump_lead_max <= first_free + gradual_span_blocks)
        bad("turn too early for the gradual span and dump lead");
    if (horizon_blocks <= turn_offset_blocks + 20) bad("horizon must leave room after the turn");
    if (exit_blocks < 1) bad("exit_blocks must be positive");
    for (double v : {controlled_budget_sol, sniper_budget_sol, gradual_buy_sol, bump_trade_sol})
        if (!(v > 0)) bad("budgets must be positive");
    if (!(dump_fraction > 0 && dump_fraction < 1)) bad("dump_fraction must lie in (0, 1)");
    for (const auto& p : participants) {
        if (p.entry_offset <= sniper_window_K) bad("participant " + p.wallet + " enters inside the sniper window");
        if (p.exit_offset <= p.entry_offset) bad("participant " + p.wallet + " exits before entering");
        if (p.exit_offset + 5 >= static_cast<std::uint64_t>(horizon_blocks))
            bad("participant " + p.wallet + " exits after the horizon");
    }
}

Components resolve_components(const ScenarioSpec& spec) {
    Components c;
    switch (spec.kind) {
        case ScenarioKind::Benign: break;
        case ScenarioKind::NaiveBundle: c.naive = true; break;
        case ScenarioKind::BundleBot: c.bundle = true; break;
        case ScenarioKind::GradualBundle: c.gradual = true; break;
        case ScenarioKind::SniperBot: c.sniper = true; break;
        case ScenarioKind::BumpBot: c.bump = true; break;
        case ScenarioKind::CommentBot: c.comment = true; break;
        case ScenarioKind::Mixed: {
            std::mt19937_64 rng(derive_seed(spec.seed, 1));
            std::bernoulli_distribution half(0.5);
            c.bundle = half(rng);
            c.gradual = half(rng);
            c.sniper = half(rng);
            c.bump = half(rng);
            c.comment = half(rng);
            break;
        }
    }
    return c;
}

Participant plan_participant(std::mt19937_64& rng, std::string wallet, double skill, const ScenarioSpec& spec) {
    Participant p;
    p.wallet = std::move(wallet);
    p.role = skill > 0.6 ? Role::KOL : Role::Retail;
    const auto K = static_cast<std::int64_t>(spec.sniper_window_K);
    const std::int64_t T = spec.turn_offset_blocks;
    const std::int64_t H = spec.horizon_blocks;
    const double early = std::clamp(std::normal_distribution<double>(1.0 - skill, 0.2)(rng), 0.0, 1.15);
    const auto entry = K + 1 + static_cast<std::int64_t>(std::llround(early * static_cast<double>(T - K - 1) * 0.85));
    const bool good_exit = std::bernoulli_distribution(std::clamp(skill, 0.0, 1.0))(rng);
    std::int64_t exit = good_exit ? T - uniform_int(rng, 0, 25) : T + uniform_int(rng, 10, H - T - 8);
    if (exit <= entry + 1) exit = entry + 2 + uniform_int(rng, 0, 10);
    exit = std::min(exit, H - 8);
    p.entry_offset = static_cast<std::uint64_t>(entry);
    p.exit_offset = static_cast<std::uint64_t>(std::max(exit, entry + 1));
    p.budget_sol = lognormal(rng, spec.retail_size_mu + 0.5 * (0.5 - skill), spec.retail_size_sigma);
    if (std::bernoulli_distribution(0.25)(rng)) {
        const auto second = entry + uniform_int(rng, 2, 20);
        if (second < static_cast<std::int64_t>(p.exit_offset)) {
            p.second_buy_offset = static_cast<std::uint64_t>(second);
            p.second_budget_sol = p.budget_sol * 0.5;
        }
    }
    p.split_exit = std::bernoulli_distribution(0.3)(rng);
    return p;
}

LabeledScenario generate(const ScenarioSpec& spec_in) {
    spec_in.validate();
    ScenarioSpec spec = spec_in;
    LabeledScenario out;
    out.kind = spec.kind;
    out.components = resolve_components(spec);
    const Components& c = out.components;
    std::mt19937_64 rng(derive_seed(spec.seed, 2));

    const std::uint64_t b0 = spec.launch_block;
    const std::uint64_t K = spec.sniper_window_K;
    const std::uint64_t T = static_cast<std::uint64_t>(spec.turn_offset_blocks);
    const std::uint64_t H = static_cast<std::uint64_t>(spec.horizon_blocks);
    const std::string& coin = spec.coin;

    if (spec.participants.empty()) {
        const double boost = c.bump ? spec.attention_boost : 1.0;
        const int n = static_cast<int>(std::lround(spec.n_retail * boost));
        for (int i = 0; i < n; ++i) {
            const double skill = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            spec.participants.push_back(plan_participant(rng, coin + "-r" + std::to_string(i), skill, spec));
        }
        if (spec.include_copier && !spec.participants.empty()) {
            std::size_t leader = 0;
            for (std::size_t i = 0; i < spec.participants.size(); ++i)
                if (spec.participants[i].role == Role::KOL) {
                    leader = i;
                    break;
                }
            spec.participants[leader].role = Role::KOL;
            Participant cp;
            cp.wallet = coin + "-copier";
            cp.role = Role::Copier;
            cp.copy_of = leader;
            spec.participants.push_back(cp);
        }
    }

    const std::string creator = coin + "-creator";
    out.role_map[creator] = Role::Creator;
    std::vector<Event> events;
    auto add = [&](std::uint64_t block, int prio, const std::string& wallet, Act act, double sol = 0,
                   Decimal qty = {}, std::optional<std::size_t> participant = std::nullopt) {
        events.push_back({block, prio, events.size(), wallet, act, sol, qty, participant});
    };

    add(b0, 0, creator, Act::Create);

    const auto dump_at = T - static_cast<std::uint64_t>(uniform_int(rng, spec.dump_lead_min, spec.dump_lead_max));
    std::vector<std::string> dumpers;

    if (c.naive) {
        add(b0, 1, creator, Act::BuySol, spec.controlled_budget_sol * spec.n_controlled_wallets * 0.5);
        dumpers.push_back(creator);
    }
    if (c.bundle) {
        for (int i = 0; i < spec.n_controlled_wallets; ++i) {
            const std::string w = coin + "-ctl" + std::to_string(i);
            out.role_map[w] = Role::Controlled;
            add(b0, 1, w, Act::BuySol,
                spec.controlled_budget_sol * std::uniform_real_distribution<double>(0.8, 1.2)(rng));
            dumpers.push_back(w);
        }
    }
    if (c.gradual) {
        const auto fresh = curve::CurveState::fresh(spec.curve);
        const Decimal qg = to_decimal_floor(
            curve::tokens_for_deposit(fresh, Real(spec.gradual_buy_sol) / (1 + spec.curve.fee())));
        std::vector<std::string> ws;
        for (int i = 0; i < spec.n_controlled_wallets; ++i) {
            ws.push_back(coin + "-grd" + std::to_string(i));
            out.role_map[ws.back()] = Role::Controlled;
            dumpers.push_back(ws.back());
        }
        for (int j = 0; j < spec.gradual_span_blocks; ++j)
            add(b0 + K + 1 + static_cast<std::uint64_t>(j), 1, ws[static_cast<std::size_t>(j) % ws.size()],
                Act::BuyQty, 0, qg);
    }
    for (std::size_t i = 0; i < dumpers.size(); ++i) {
        const auto blk = b0 + dump_at + i * static_cast<std::uint64_t>(spec.exit_blocks) / dumpers.size();
        add(blk, 1, dumpers[i], Act::SellAll);
    }
    if (c.sniper) {
        const std::string w = coin + "-snp";
        out.role_map[w] = Role::Sniper;
        add(b0 + static_cast<std::uint64_t>(spec.sniper_delay_blocks), 1, w, Act::BuySol, spec.sniper_budget_sol);
        add(b0 + T / 2, 1, w, Act::SellAll);
    }
    const std::string bump_wallet = coin + "-bump";
    if (c.bump && spec.flip_count > 0) {
        out.role_map[bump_wallet] = Role::BumpBot;
        const auto fresh = curve::CurveState::fresh(spec.curve);
        const Decimal q1 = to_decimal_floor(
            curve::tokens_for_deposit(fresh, Real(spec.bump_trade_sol) / (1 + spec.curve.fee())));
        const Decimal q2 = Decimal::from_raw(q1.raw() / 2);
        std::vector<std::pair<bool, Decimal>> seq;  // (is_buy, qty)
        if (spec.flip_count % 2 == 1) {
            for (int i = 0; i <= spec.flip_count; ++i) seq.emplace_back(i % 2 == 0, q1);
        } else {
            for (int i = 0; i < spec.flip_count; ++i) seq.emplace_back(i % 2 == 0, q1);
            seq.emplace_back(true, q2);
            seq.emplace_back(false, q2);
        }
        const std::uint64_t span = T - K - 1;
        const std::uint64_t step = std::max<std::uint64_t>(1, span / seq.size());
        for (std::size_t i = 0; i < seq.size(); ++i) {
            add(b0 + K + 1 + i * step, 3, bump_wallet, seq[i].first ? Act::BuyQty : Act::SellQty, 0, seq[i].second);
        }
    }

    for (std::size_t i = 0; i < spec.participants.size(); ++i) {
        const auto& p = spec.participants[i];
        out.role_map[p.wallet] = p.role;
        if (p.copy_of) continue;  // trades only in the leader's wake
        add(b0 + p.entry_offset, 2, p.wallet, Act::BuySol, p.budget_sol, {}, i);
        if (p.second_buy_offset) add(b0 + *p.second_buy_offset, 2, p.wallet, Act::BuySol, p.second_budget_sol, {}, i);
        if (p.split_exit) {
            add(b0 + p.exit_offset, 2, p.wallet, Act::SellHalf, 0, {}, i);
            add(b0 + p.exit_offset + 3, 2, p.wallet, Act::SellAll, 0, {}, i);
        } else {
            add(b0 + p.exit_offset, 2, p.wallet, Act::SellAll, 0, {}, i);
        }
    }
    std::map<std::size_t, std::vector<std::size_t>> followers;
    for (std::size_t i = 0; i < spec.participants.size(); ++i)
        if (spec.participants[i].copy_of) followers[*spec.participants[i].copy_of].push_back(i);

    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        return std::tie(a.block, a.prio, a.seq) < std::tie(b.block, b.prio, b.seq);
    });

    Engine eng(spec, out);
    for (const auto& e : events) {
        Decimal done;
        bool bought = false;
        switch (e.act) {
            case Act::Create: eng.create(e.wallet, e.block); break;
            case Act::BuySol: done = eng.buy_sol(e.wallet, e.block, e.sol); bought = true; break;
            case Act::BuyQty: eng.buy_qty(e.wallet, e.block, e.qty); done = e.qty; bought = true; break;
            case Act::SellAll: done = eng.sell_qty(e.wallet, e.block, eng.holding(e.wallet)); break;
            case Act::SellQty: done = eng.sell_qty(e.wallet, e.block, e.qty); break;
            case Act::SellHalf:
                done = eng.sell_qty(e.wallet, e.block, Decimal::from_raw(eng.holding(e.wallet).raw() / 2));
                break;
        }
        if (!e.participant || !done.is_positive()) continue;
        auto it = followers.find(*e.participant);
        if (it == followers.end()) continue;
        for (auto f : it->second) {
            const auto& w = spec.participants[f].wallet;
            if (bought) {
                if (to_real(done) * 2 < eng.state().Y) eng.buy_qty(w, e.block, done);
            } else {
                eng.sell_qty(w, e.block, done);
            }
        }
    }

    if (spec.close_all_positions) {
        std::vector<std::string> holders;
        for (const auto& [w, p] : out.pnl)
            if (p.holding.is_positive()) holders.push_back(w);
        for (const auto& w : holders) eng.sell_qty(w, b0 + H, eng.holding(w));
    }

    // comments
    std::vector<chain::CommentRecord> comments;
    const auto lift_lo = spec.launch_ts + static_cast<std::int64_t>((K + 1) * 2 / 5);
    const auto lift_hi = spec.launch_ts + static_cast<std::int64_t>(T * 2 / 5);
    const auto life_hi = spec.launch_ts + static_cast<std::int64_t>(H * 2 / 5);
    if (c.comment) {
        for (int i = 0; i < spec.comment_bot_count; ++i) {
            const std::string w = coin + "-cbot" + std::to_string(i % 2);
            out.role_map.emplace(w, Role::Controlled);
            comments.push_back(chain::make_comment(coin, w, uniform_int(rng, lift_lo, lift_hi),
                                                   kSlogans[static_cast<std::size_t>(uniform_int(
                                                       rng, 0, static_cast<std::int64_t>(kSlogans.size()) - 1))]));
        }
    }
    if (!spec.participants.empty()) {
        for (int i = 0; i < spec.organic_comment_count; ++i) {
            const auto& p = spec.participants[static_cast<std::size_t>(
                uniform_int(rng, 0, static_cast<std::int64_t>(spec.participants.size()) - 1))];
            const auto& tmpl = kOrganic[static_cast<std::size_t>(
                uniform_int(rng, 0, static_cast<std::int64_t>(kOrganic.size()) - 1))];
            comments.push_back(chain::make_comment(coin, p.wallet, uniform_int(rng, lift_lo, life_hi),
                                                   fill_ref(tmpl, rng)));
        }
    }
    std::stable_sort(comments.begin(), comments.end(),
                     [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });

    eng.finish();
    out.ledger.comments = std::move(comments);

    // truth
    out.truth.bundle = detect::tri(c.bundle);
    out.truth.sniper = detect::tri(c.sniper);
    out.truth_gradual = c.gradual;
    out.truth_naive = c.naive;
    if (c.bump && spec.flip_count > 0) {
        detect::WalletBump wb;
        wb.flips = spec.flip_count;
        wb.alpha = Real(spec.flip_count) / Real(spec.bump_epsilon);
        wb.flagged = static_cast<double>(spec.flip_count) >= spec.bump_xi * spec.bump_epsilon;
        out.truth.bump = wb.flagged;
        out.truth.bump_scores[bump_wallet] = wb;
    }
    out.truth.comment = detect::tri(c.comment && spec.comment_bot_count >= spec.comment_min_count);
    return out;
}

}  // namespace copyguard::sim
