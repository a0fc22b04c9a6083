#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "copyguard/chain/model.hpp"
#include "copyguard/common/real.hpp"
#include "copyguard/curve/bonding_curve.hpp"
#include "copyguard/detect/detectors.hpp"

namespace copyguard::sim {

enum class ScenarioKind { Benign, NaiveBundle, BundleBot, GradualBundle, SniperBot, BumpBot, CommentBot, Mixed };

std::string_view to_string(ScenarioKind kind);
std::optional<ScenarioKind> parse_scenario_kind(std::string_view text);
const std::vector<ScenarioKind>& all_kinds();

enum class Role { Creator, Controlled, Sniper, BumpBot, Copier, Retail, KOL };
std::string_view to_string(Role role);

// A non-adversarial trader with a fixed plan, offsets in blocks after launch.
struct Participant {
    std::string wallet;
    Role role = Role::Retail;
    std::uint64_t entry_offset = 0;
    double budget_sol = 1.0;
    std::optional<std::uint64_t> second_buy_offset;
    double second_budget_sol = 0.0;
    std::uint64_t exit_offset = 0;
    bool split_exit = false;             // sell half at exit, the rest a few blocks later
    std::optional<std::size_t> copy_of;  // index of the leader this wallet copies
};

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::Benign;
    std::uint64_t seed = 0;
    std::string coin = "coin-0";
    int n_retail = 20;
    int n_controlled_wallets = 4;
    curve::CurveParams curve = curve::CurveParams::defaults();

    // intensity knobs
    int flip_count = 60;
    int gradual_span_blocks = 40;
    int sniper_delay_blocks = 2;
    int comment_bot_count = 5;
    int organic_comment_count = 4;

    std::uint64_t launch_block = 1'000;
    std::int64_t launch_ts = 1'700'000'000;
    std::uint64_t sniper_window_K = 5;
    int turn_offset_blocks = 300;  // demand turns from buying to selling
    int horizon_blocks = 600;      // remaining holders close out here
    int exit_blocks = 10;          // rug-pull pacing
    int dump_lead_min = 20;        // adversary dumps this many blocks before the turn ...
    int dump_lead_max = 80;        // ... up to this many

    double controlled_budget_sol = 2.0;
    double sniper_budget_sol = 1.5;
    double gradual_buy_sol = 0.25;
    double bump_trade_sol = 0.5;
    double retail_size_mu = -0.3;  // log SOL
    double retail_size_sigma = 0.7;
    double attention_boost = 1.4;  // participant multiplier on bumped coins
    double dump_fraction = 0.10;

    // truth thresholds mirror the detector defaults
    double bump_xi = 50.0;
    double bump_epsilon = 1.0;
    int comment_min_count = 2;

    bool close_all_positions = true;
    bool include_copier = true;

    // When empty, n_retail participants are drawn from the scenario RNG.
    std::vector<Participant> participants;

    void validate() const;  // Error(InfeasibleSpec)
};

// Which signatures a scenario carries; Mixed resolves each with probability 1/2.
struct Components {
    bool naive = false;
    bool bundle = false;
    bool gradual = false;
    bool sniper = false;
    bool bump = false;
    bool comment = false;

    bool manipulated() const { return naive || bundle || gradual; }
};

Components resolve_components(const ScenarioSpec& spec);

struct WalletPnl {
    Real cash_in = 0;   // fee-inclusive SOL paid
    Real cash_out = 0;  // fee-net SOL received
    Decimal holding;    // tokens left at the end
    std::int64_t first_buy_ts = 0;
    bool bought = false;

    Real profit(const Real& terminal_price) const { return cash_out + to_real(holding) * terminal_price - cash_in; }
};

struct LabeledScenario {
    ScenarioKind kind = ScenarioKind::Benign;
    Components components;
    chain::CoinLedger ledger;
    detect::BotFlags truth;
    bool truth_gradual = false;
    bool truth_naive = false;
    detect::CoinMetrics truth_metrics;
    std::map<std::string, Role> role_map;
    std::map<std::string, WalletPnl> pnl;
    Real terminal_price = 0;  // marginal price after the last trade

    // flow accounting on the exact curve amounts
    Real total_cash_in = 0, total_cash_out = 0, total_fees = 0, x_growth = 0;
};

// Error(InfeasibleSpec) when the planned trades do not fit the curve.
LabeledScenario generate(const ScenarioSpec& spec);

// Plans one participant for a coin: skilled wallets enter early and leave
// before the turn, unskilled ones enter late and leave after it.
Participant plan_participant(std::mt19937_64& rng, std::string wallet, double skill,
                             const ScenarioSpec& spec);

// Deterministic per-index seed derived from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace copyguard::sim
