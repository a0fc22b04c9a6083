#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "copyguard/sim/scenario.hpp"

namespace copyguard::sim {

// World shared by all coins of a synthetic corpus.
struct DatasetParams {
    std::size_t pool_size = 400;
    double skilled_frac = 0.30;
    double mean_participants = 14.0;
    int turn_min = 200, turn_max = 400;   // blocks after launch
    int gap_min = 1200, gap_max = 1800;   // blocks between launches
    int tail_blocks = 300;                // horizon = turn + tail
    std::size_t workers = 0;              // 0: hardware concurrency
    ScenarioSpec base;                    // knobs copied into every coin
};

// Deterministic largest-remainder allocation, then a seeded shuffle of the order.
struct AllocationRecord {
    std::map<ScenarioKind, std::size_t> counts;
    std::vector<ScenarioKind> order;  // kind of coin i
};

AllocationRecord allocate_kinds(std::size_t n_coins, const std::map<ScenarioKind, double>& mix,
                                std::uint64_t seed);

struct SampleLabel {
    std::string wallet;
    std::string coin;
    std::int64_t first_buy_ts = 0;
    Real profit = 0;  // exact curve replay, terminal holdings at the last price
    bool label = false;
};

struct Dataset {
    std::vector<LabeledScenario> scenarios;  // coin order = launch order
    AllocationRecord allocation;
    std::map<std::string, double> skill;     // latent skill per pool wallet
    std::vector<SampleLabel> labels;         // sorted by (first_buy_ts, wallet, coin)
};

// Error(InvalidConfig) when the mix has a negative weight or sums to zero.
Dataset generate_dataset(std::size_t n_coins, const std::map<ScenarioKind, double>& mix, std::uint64_t seed,
                         const DatasetParams& params = {});

std::vector<chain::CoinLedger> ledgers_of(const Dataset& ds);

std::string truth_json_line(const LabeledScenario& s);

// transactions.csv, comments.csv, truth.jsonl and labels.csv under `dir`.
void write_dataset(const Dataset& ds, const std::filesystem::path& dir);

}  // namespace copyguard::sim
