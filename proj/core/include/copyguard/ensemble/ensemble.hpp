#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "copyguard/agents/agents.hpp"
#include "copyguard/chain/model.hpp"
#include "copyguard/curve/bonding_curve.hpp"
#include "copyguard/econ/copier.hpp"
#include "copyguard/features/features.hpp"

namespace copyguard::ensemble {

using agents::AgentKind;

inline std::size_t index_of(AgentKind k) { return static_cast<std::size_t>(k); }

struct WeightVector {
    std::array<double, 3> w{1.0 / 3, 1.0 / 3, 1.0 / 3};  // wallet, coin, timing

    double operator[](AgentKind k) const { return w[index_of(k)]; }
    static WeightVector uniform() { return {}; }
    static WeightVector of(double wallet, double coin, double timing) { return {{wallet, coin, timing}}; }
    // Error(InvalidConfig) unless every weight is >= 0 and the sum is 1 within 1e-12.
    void validate() const;
    bool operator==(const WeightVector&) const = default;
};

using Confidences = std::array<std::optional<double>, 3>;

struct Sample {
    std::string wallet;
    std::string coin;
    std::int64_t first_trade_ts = 0;
    features::Split split = features::Split::Train;
    bool label = false;
    Confidences conf;
};

struct Aggregate {
    double score = 0.5;
    // An agent was missing and its weight mass was spread over the others.
    bool renormalized = false;
};

// Sum of w_a * confidence_a. With missing agents the present weights are
// rescaled to sum 1; if they are all zero the present agents are averaged.
// No agent at all gives 0.5.
Aggregate aggregate(const Confidences& conf, const WeightVector& w);

// Tie-aware trapezoidal ROC AUC; nullopt when a class is absent.
std::optional<double> roc_auc(std::span<const double> scores, std::span<const bool> labels);

struct RocPoint {
    double threshold = 0;  // predict positive when score >= threshold
    double fpr = 0, tpr = 0;
};

// From (0,0) at +inf down to (1,1); one point per distinct score.
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const bool> labels);

struct ThresholdRow {
    double threshold = 0;
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    double precision = 0, recall = 0, f1 = 0;
    bool precision_undefined = false, recall_undefined = false;  // reported as 0
};

// {0.00, 0.01, ..., 1.00}
std::vector<double> default_threshold_grid();

std::vector<ThresholdRow> threshold_sweep(std::span<const double> scores, std::span<const bool> labels,
                                          std::span<const double> grid);

// Highest F1; ties go to the lowest threshold. Error(NoSelections) on an empty sweep.
double best_f1_threshold(std::span<const ThresholdRow> rows);

struct EvalReport {
    std::string split;
    std::size_t n = 0, n_positive = 0;
    std::optional<double> auc;
    std::vector<RocPoint> roc;
    std::vector<ThresholdRow> sweep;
    std::optional<WeightVector> weights;  // unset when scores came from outside
    std::size_t renormalized = 0;         // samples with a missing agent
    std::optional<double> threshold;      // operating threshold used for economics
    std::optional<double> smart_money_gross_return, copier_gross_return;
    std::size_t selections = 0, selections_skipped = 0;
};

EvalReport evaluate_scores(std::string split, std::span<const double> scores, std::span<const bool> labels,
                           std::span<const double> grid);
EvalReport evaluate(std::string split, std::span<const Sample> samples, const WeightVector& w,
                    std::span<const double> grid);

std::vector<double> scores_of(std::span<const Sample> samples, const WeightVector& w);
std::vector<bool> labels_of(std::span<const Sample> samples);

// vector<bool> conveniences (copied into contiguous storage)
std::optional<double> roc_auc(std::span<const double> scores, const std::vector<bool>& labels);
EvalReport evaluate_scores(std::string split, std::span<const double> scores, const std::vector<bool>& labels,
                           std::span<const double> grid);

struct FitResult {
    WeightVector weights;
    double auc = 0.5;  // validation
    std::size_t grid_points = 0;
    std::array<double, 3> single_agent_auc{};  // corner AUCs
    std::optional<AgentKind> dropped;
};

// Exhaustive search over the 1/100 simplex grid plus the exact uniform point.
// With `drop`, only points giving that agent zero weight. Ties go to the point
// nearest uniform, then the lexicographically smallest. Error(SingleClassValidation).
FitResult fit_weights(std::span<const Sample> validation, std::optional<AgentKind> drop = std::nullopt,
                      std::size_t workers = 0);

// A wallet's signed trades in one coin, starting from the curve state the
// ledger replay reaches just before its first trade. Error(InvalidSequence)
// when the wallet never trades; curve errors when the ledger does not replay.
econ::TradeSeq wallet_trade_seq(const chain::CoinLedger& ledger, const std::string& wallet,
                                const curve::CurveParams& params);

struct SelectionReturn {
    std::string wallet, coin;
    std::optional<econ::ReturnReport> report;
    std::string skipped;  // reason when report is unset
};

struct EconomicsResult {
    std::vector<SelectionReturn> selections;
    double smart_money_gross_return = 0;  // mean of 1 + r over replayed selections
    double copier_gross_return = 0;
    std::size_t used = 0, skipped = 0;
};

struct Selection {
    std::string wallet, coin;
};

// Leader/copier replay per selection with residual holdings liquidated at the
// end. Error(NoSelections) when nothing is selected or nothing replays.
EconomicsResult economics_of_selection(std::span<const Selection> selections,
                                       std::span<const chain::CoinLedger> ledgers,
                                       const curve::CurveParams& params, std::size_t workers = 0);

std::vector<Selection> select_at(std::span<const Sample> samples, const WeightVector& w, double threshold);

struct EconomicsContext {
    std::span<const chain::CoinLedger> ledgers;
    curve::CurveParams params = curve::CurveParams::defaults();
};

// Fits on validation, picks the validation-F1 threshold, evaluates test and,
// with a context, attaches the selection economics.
struct ModelRun {
    FitResult fit;
    EvalReport validation;
    EvalReport test;
    std::optional<EconomicsResult> economics;
};

ModelRun run_model(std::span<const Sample> validation, std::span<const Sample> test,
                   std::optional<AgentKind> drop, const EconomicsContext* econ, std::span<const double> grid,
                   std::size_t workers = 0);

struct AblationResult {
    AgentKind dropped = AgentKind::Wallet;
    ModelRun run;
    double delta_validation_auc = 0;        // ablated - full
    std::optional<double> delta_test_auc;   // unset if either is undefined
    std::optional<double> delta_smart_money_gross_return, delta_copier_gross_return;
};

AblationResult ablate(AgentKind drop, const ModelRun& full, std::span<const Sample> validation,
                      std::span<const Sample> test, const EconomicsContext* econ, std::span<const double> grid,
                      std::size_t workers = 0);

}  // namespace copyguard::ensemble
