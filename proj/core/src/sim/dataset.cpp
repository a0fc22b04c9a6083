#include "copyguard/sim/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "copyguard/chain/ingest.hpp"
#include "copyguard/common/csv.hpp"
#include "copyguard/common/error.hpp"
#include "copyguard/common/parallel.hpp"

namespace copyguard::sim {

namespace {

using nlohmann::json;

struct PoolWallet {
    std::string id;
    double skill = 0;
    double weight = 1;
    std::size_t birth = 0;  // first coin index it may trade
};

std::string coin_id(std::size_t i) {
    std::string s = std::to_string(i);
    return "coin-" + std::string(s.size() < 5 ? 5 - s.size() : 0, '0') + s;
}

std::string wallet_id(std::size_t i) {
    std::string s = std::to_string(i);
    return "w" + std::string(s.size() < 4 ? 4 - s.size() : 0, '0') + s;
}

// Weighted sampling without replacement (Efraimidis-Spirakis keys).
std::vector<std::size_t> pick_weighted(std::mt19937_64& rng, const std::vector<PoolWallet>& pool,
                                       std::size_t coin_index, std::size_t m) {
    std::vector<std::pair<double, std::size_t>> keys;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const double r = u(rng);  // drawn for every wallet so streams stay aligned
        if (pool[i].birth > coin_index) continue;
        keys.emplace_back(std::log(std::max(r, 1e-300)) / pool[i].weight, i);
    }
    m = std::min(m, keys.size());
    std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(m), keys.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < m; ++i) out.push_back(keys[i].second);
    std::sort(out.begin(), out.end());
    return out;
}

json num(const Real& r) { return to_double(r); }

}  // namespace

AllocationRecord allocate_kinds(std::size_t n_coins, const std::map<ScenarioKind, double>& mix,
                                std::uint64_t seed) {
    double total = 0;
    for (const auto& [k, w] : mix) {
        if (!(w >= 0) || !std::isfinite(w))
            throw Error(ErrorCode::InvalidConfig, "mix weight for " + std::string(to_string(k)) + " must be >= 0");
        total += w;
    }
    if (!(total > 0)) throw Error(ErrorCode::InvalidConfig, "mix weights must sum to a positive value");

    AllocationRecord rec;
    std::vector<std::pair<double, ScenarioKind>> rema;
    std::size_t assigned = 0;
    for (const auto& [k, w] : mix) {
        const double exact = static_cast<double>(n_coins) * w / total;
        const auto base = static_cast<std::size_t>(std::floor(exact));
        rec.counts[k] = base;
        assigned += base;
        rema.emplace_back(exact - static_cast<double>(base), k);
    }
    // larger remainder first, enum order breaks ties
    std::stable_sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < n_coins; ++i, ++assigned) ++rec.counts[rema[i % rema.size()].second];

    for (const auto& [k, c] : rec.counts) rec.order.insert(rec.order.end(), c, k);
    std::mt19937_64 rng(derive_seed(seed, 0xA110C));
    std::shuffle(rec.order.begin(), rec.order.end(), rng);
    return rec;
}

Dataset generate_dataset(std::size_t n_coins, const std::map<ScenarioKind, double>& mix, std::uint64_t seed,
                         const DatasetParams& params) {
    Dataset ds;
    ds.allocation = allocate_kinds(n_coins, mix, seed);

    std::mt19937_64 world(derive_seed(seed, 0x5EED));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<PoolWallet> pool(params.pool_size);
    const double n = static_cast<double>(n_coins);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        auto& w = pool[i];
        w.id = wallet_id(i);
        const bool skilled = u01(world) < params.skilled_frac;
        w.skill = skilled ? 0.65 + 0.30 * u01(world) : 0.05 + 0.45 * u01(world);
        w.weight = std::lognormal_distribution<double>(0.0, 0.5)(world) * (skilled ? 1.5 : 1.0);
        w.birth = static_cast<std::size_t>(std::floor(u01(world) * n * (skilled ? 0.2 : 0.9)));
        ds.skill[w.id] = w.skill;
    }

    // launch schedule is sequential; everything else is per coin
    std::vector<std::uint64_t> launch(n_coins);
    std::uint64_t block = params.base.launch_block;
    for (std::size_t i = 0; i < n_coins; ++i) {
        launch[i] = block;
        block += static_cast<std::uint64_t>(
            std::uniform_int_distribution<int>(params.gap_min, params.gap_max)(world));
    }

    ds.scenarios.resize(n_coins);
    const std::size_t workers = params.workers ? params.workers : default_workers();
    parallel_for(n_coins, workers, [&](std::size_t i) {
        ScenarioSpec spec = params.base;
        spec.kind = ds.allocation.order[i];
        spec.seed = derive_seed(seed, i + 1);
        spec.coin = coin_id(i);
        spec.launch_block = launch[i];
        spec.launch_ts = params.base.launch_ts +
                         static_cast<std::int64_t>((launch[i] - params.base.launch_block) * 2 / 5);
        spec.include_copier = false;
        std::mt19937_64 rng(derive_seed(spec.seed, 3));
        spec.turn_offset_blocks = std::uniform_int_distribution<int>(params.turn_min, params.turn_max)(rng);
        spec.horizon_blocks = spec.turn_offset_blocks + params.tail_blocks;
        const double boost = resolve_components(spec).bump ? spec.attention_boost : 1.0;
        const auto m = std::max<std::size_t>(
            3, std::poisson_distribution<std::size_t>(params.mean_participants * boost)(rng));
        spec.participants.clear();
        for (auto idx : pick_weighted(rng, pool, i, m))
            spec.participants.push_back(plan_participant(rng, pool[idx].id, pool[idx].skill, spec));
        ds.scenarios[i] = generate(spec);
    });

    for (const auto& s : ds.scenarios) {
        for (const auto& [w, p] : s.pnl) {
            if (!p.bought) continue;
            SampleLabel l{w, s.ledger.coin, p.first_buy_ts, p.profit(s.terminal_price), false};
            l.label = l.profit > 0;
            ds.labels.push_back(std::move(l));
        }
    }
    std::sort(ds.labels.begin(), ds.labels.end(), [](const auto& a, const auto& b) {
        return std::tie(a.first_buy_ts, a.wallet, a.coin) < std::tie(b.first_buy_ts, b.wallet, b.coin);
    });
    return ds;
}

std::vector<chain::CoinLedger> ledgers_of(const Dataset& ds) {
    std::vector<chain::CoinLedger> out;
    out.reserve(ds.scenarios.size());
    for (const auto& s : ds.scenarios) out.push_back(s.ledger);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.coin < b.coin; });
    return out;
}

std::string truth_json_line(const LabeledScenario& s) {
    json j = json::object();
    j["coin"] = s.ledger.coin;
    j["kind"] = std::string(to_string(s.kind));
    j["bundle"] = s.truth.bundle == detect::Tri::True;
    j["sniper"] = s.truth.sniper == detect::Tri::True;
    j["bump"] = s.truth.bump;
    j["comment"] = s.truth.comment == detect::Tri::True;
    j["gradual"] = s.truth_gradual;
    j["naive"] = s.truth_naive;
    j["ln_max_return"] = num(s.truth_metrics.ln_max_return);
    j["ln_dump_duration"] =
        s.truth_metrics.ln_dump_duration ? json(num(*s.truth_metrics.ln_dump_duration)) : json(nullptr);
    j["peak_ts"] = s.truth_metrics.peak_ts;
    json roles = json::object();
    for (const auto& [w, r] : s.role_map) roles[w] = std::string(to_string(r));
    j["roles"] = std::move(roles);
    return j.dump();
}

void write_dataset(const Dataset& ds, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
    auto open = [&](const char* name) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw Error(ErrorCode::Io, "cannot write " + (dir / name).string());
        return f;
    };
    const auto ledgers = ledgers_of(ds);
    {
        auto f = open("transactions.csv");
        chain::write_transactions_csv(f, ledgers);
    }
    {
        auto f = open("comments.csv");
        chain::write_comments_csv(f, ledgers);
    }
    {
        auto f = open("truth.jsonl");
        for (const auto& s : ds.scenarios) f << truth_json_line(s) << '\n';
    }
    {
        auto f = open("labels.csv");
        f << "wallet,coin,first_buy_ts,profit,label\n";
        for (const auto& l : ds.labels) {
            const std::vector<std::string> row{l.wallet, l.coin, std::to_string(l.first_buy_ts),
                                               copyguard::to_string(l.profit, 12), l.label ? "1" : "0"};
            csv::write_row(f, row);
        }
    }
}

}  // namespace copyguard::sim
