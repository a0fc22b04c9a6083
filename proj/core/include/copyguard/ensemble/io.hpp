#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "copyguard/agents/agents.hpp"
#include "copyguard/ensemble/ensemble.hpp"
#include "copyguard/features/features.hpp"

namespace copyguard::ensemble {

// One JSON object per line:
// {"wallet","coin","agent","decision","confidence","raw_confidence","logprobs_unavailable","reasoning"}
struct VerdictRecord {
    std::string wallet;
    std::string coin;
    agents::AgentVerdict verdict;
};

void write_verdicts(std::ostream& out, std::span<const VerdictRecord> records);
// Error(MalformedRow) naming the line on bad JSON, unknown agent or confidence outside [0, 1].
std::vector<VerdictRecord> read_verdicts(std::istream& in);

// External score files (e.g. statistical baselines): `wallet,coin,score`, score in [0, 1].
inline constexpr std::string_view kScoreHeader = "wallet,coin,score";

struct ScoreRecord {
    std::string wallet;
    std::string coin;
    double score = 0;
};

void write_scores(std::ostream& out, std::span<const ScoreRecord> records);
std::vector<ScoreRecord> read_scores(std::istream& in);

// Attaches agent confidences to feature samples by (wallet, coin). Samples
// without a verdict for some agent keep it missing. Error(MalformedRow) on a
// duplicate (wallet, coin, agent) or a verdict for an unknown sample.
std::vector<Sample> join_verdicts(std::span<const features::TraderSample> samples,
                                  std::span<const VerdictRecord> verdicts);

struct ScoredSplit {
    std::vector<double> scores;
    std::vector<bool> labels;
};

// Samples of `split` paired with their external scores, in sample order.
// Error(MissingInput) when a sample has no score.
ScoredSplit join_scores(std::span<const features::TraderSample> samples, std::span<const ScoreRecord> scores,
                        features::Split split);

std::vector<Sample> of_split(std::span<const Sample> samples, features::Split split);

// Plot data: threshold,precision,recall,f1,tp,fp,tn,fn,precision_undefined,recall_undefined
inline constexpr std::string_view kSweepHeader =
    "threshold,precision,recall,f1,tp,fp,tn,fn,precision_undefined,recall_undefined";
inline constexpr std::string_view kRocHeader = "threshold,fpr,tpr";

void write_sweep_csv(std::ostream& out, std::span<const ThresholdRow> rows);
void write_roc_csv(std::ostream& out, std::span<const RocPoint> points);

// Stable key order and fixed number formatting so identical runs give identical bytes.
std::string report_json(const EvalReport& report);
std::string fit_json(const FitResult& fit);
std::string model_run_json(const ModelRun& run);
std::string ablation_json(const ModelRun& full, std::span<const AblationResult> ablations);
std::string economics_json(const EconomicsResult& econ);

}  // namespace copyguard::ensemble
