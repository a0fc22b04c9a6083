#include "copyguard/ensemble/io.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <tuple>

#include <nlohmann/json.hpp>

#include "copyguard/common/csv.hpp"
#include "copyguard/common/error.hpp"

namespace copyguard::ensemble {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string num(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

template <class T>
ordered_json opt(const std::optional<T>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

Error bad_row(std::size_t line, const std::string& what) {
    return Error(ErrorCode::MalformedRow, "line " + std::to_string(line) + ": " + what);
}

}  // namespace

void write_verdicts(std::ostream& out, std::span<const VerdictRecord> records) {
    for (const auto& r : records) {
        const auto& v = r.verdict;
        ordered_json j{{"wallet", r.wallet},
                       {"coin", r.coin},
                       {"agent", std::string(agents::to_string(v.agent))},
                       {"decision", v.decision},
                       {"confidence", v.confidence},
                       {"raw_confidence", opt(v.raw_confidence)},
                       {"logprobs_unavailable", v.logprobs_unavailable},
                       {"reasoning", v.reasoning}};
        out << j.dump() << '\n';
    }
}

std::vector<VerdictRecord> read_verdicts(std::istream& in) {
    std::vector<VerdictRecord> out;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        if (line.empty() || line == "\r") continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw bad_row(n, "not a JSON object");
        try {
            VerdictRecord r;
            r.wallet = j.at("wallet").get<std::string>();
            r.coin = j.at("coin").get<std::string>();
            const auto kind = agents::parse_agent_kind(j.at("agent").get<std::string>());
            if (!kind) throw bad_row(n, "unknown agent " + j.at("agent").dump());
            r.verdict.agent = *kind;
            r.verdict.confidence = j.at("confidence").get<double>();
            if (!(r.verdict.confidence >= 0 && r.verdict.confidence <= 1))
                throw bad_row(n, "confidence outside [0, 1]");
            r.verdict.decision = j.contains("decision") ? j["decision"].get<bool>() : r.verdict.confidence >= 0.5;
            if (j.contains("raw_confidence") && !j["raw_confidence"].is_null())
                r.verdict.raw_confidence = j["raw_confidence"].get<double>();
            if (j.contains("logprobs_unavailable"))
                r.verdict.logprobs_unavailable = j["logprobs_unavailable"].get<bool>();
            if (j.contains("reasoning"))
                r.verdict.reasoning = j["reasoning"].is_string() ? j["reasoning"].get<std::string>() : j["reasoning"].dump();
            out.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw bad_row(n, e.what());
        }
    }
    return out;
}

void write_scores(std::ostream& out, std::span<const ScoreRecord> records) {
    out << kScoreHeader << '\n';
    for (const auto& r : records) {
        const std::string f[] = {r.wallet, r.coin, num(r.score)};
        csv::write_row(out, f);
    }
}

std::vector<ScoreRecord> read_scores(std::istream& in) {
    csv::Reader rd(in);
    std::vector<std::string> f;
    if (!rd.next(f) || f != csv::split_header(kScoreHeader))
        throw Error(ErrorCode::MalformedRow, "score file header must be `" + std::string(kScoreHeader) + "`");
    std::vector<ScoreRecord> out;
    while (rd.next(f)) {
        if (f.size() != 3) throw bad_row(rd.line(), "expected 3 fields");
        ScoreRecord r{f[0], f[1], 0};
        const auto* b = f[2].data();
        const auto res = std::from_chars(b, b + f[2].size(), r.score);
        if (res.ec != std::errc() || res.ptr != b + f[2].size()) throw bad_row(rd.line(), "bad score `" + f[2] + "`");
        if (!(r.score >= 0 && r.score <= 1)) throw bad_row(rd.line(), "score outside [0, 1]");
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<Sample> join_verdicts(std::span<const features::TraderSample> samples,
                                  std::span<const VerdictRecord> verdicts) {
    std::vector<Sample> out;
    out.reserve(samples.size());
    std::map<std::pair<std::string, std::string>, std::size_t> at;
    for (const auto& s : samples) {
        at[{s.wallet, s.coin}] = out.size();
        out.push_back({s.wallet, s.coin, s.first_trade_ts, s.split, s.label, {}});
    }
    for (const auto& v : verdicts) {
        const auto it = at.find({v.wallet, v.coin});
        if (it == at.end())
            throw Error(ErrorCode::MalformedRow, "verdict for unknown sample " + v.wallet + "/" + v.coin);
        auto& slot = out[it->second].conf[index_of(v.verdict.agent)];
        if (slot)
            throw Error(ErrorCode::MalformedRow, "duplicate " + std::string(agents::to_string(v.verdict.agent)) +
                                                     " verdict for " + v.wallet + "/" + v.coin);
        slot = v.verdict.confidence;
    }
    return out;
}

ScoredSplit join_scores(std::span<const features::TraderSample> samples, std::span<const ScoreRecord> scores,
                        features::Split split) {
    std::map<std::pair<std::string, std::string>, double> by_key;
    for (const auto& s : scores) by_key[{s.wallet, s.coin}] = s.score;
    ScoredSplit out;
    for (const auto& s : samples) {
        if (s.split != split) continue;
        const auto it = by_key.find({s.wallet, s.coin});
        if (it == by_key.end()) throw Error(ErrorCode::MissingInput, "no score for " + s.wallet + "/" + s.coin);
        out.scores.push_back(it->second);
        out.labels.push_back(s.label);
    }
    return out;
}

std::vector<Sample> of_split(std::span<const Sample> samples, features::Split split) {
    std::vector<Sample> out;
    for (const auto& s : samples)
        if (s.split == split) out.push_back(s);
    return out;
}

void write_sweep_csv(std::ostream& out, std::span<const ThresholdRow> rows) {
    out << kSweepHeader << '\n';
    for (const auto& r : rows)
        out << num(r.threshold) << ',' << num(r.precision) << ',' << num(r.recall) << ',' << num(r.f1) << ','
            << r.tp << ',' << r.fp << ',' << r.tn << ',' << r.fn << ',' << (r.precision_undefined ? 1 : 0) << ','
            << (r.recall_undefined ? 1 : 0) << '\n';
}

void write_roc_csv(std::ostream& out, std::span<const RocPoint> points) {
    out << kRocHeader << '\n';
    for (const auto& p : points)
        out << (std::isinf(p.threshold) ? std::string("inf") : num(p.threshold)) << ',' << num(p.fpr) << ','
            << num(p.tpr) << '\n';
}

namespace {

ordered_json weights_j(const WeightVector& w) {
    return ordered_json{{"wallet", w.w[0]}, {"coin", w.w[1]}, {"timing", w.w[2]}};
}

ordered_json report_j(const EvalReport& r) {
    ordered_json j;
    j["split"] = r.split;
    j["n"] = r.n;
    j["n_positive"] = r.n_positive;
    j["auc"] = opt(r.auc);
    j["weights"] = r.weights ? weights_j(*r.weights) : ordered_json(nullptr);
    j["renormalized_samples"] = r.renormalized;
    j["threshold"] = opt(r.threshold);
    if (r.threshold) {
        for (const auto& row : r.sweep)
            if (row.threshold == *r.threshold) {
                j["precision_at_threshold"] = row.precision;
                j["recall_at_threshold"] = row.recall;
                j["f1_at_threshold"] = row.f1;
            }
    }
    j["selections"] = r.selections;
    j["selections_skipped"] = r.selections_skipped;
    j["smart_money_gross_return"] = opt(r.smart_money_gross_return);
    j["copier_gross_return"] = opt(r.copier_gross_return);
    std::size_t undefined_precision = 0;
    for (const auto& row : r.sweep) undefined_precision += row.precision_undefined ? 1 : 0;
    j["thresholds"] = r.sweep.size();
    j["thresholds_with_undefined_precision"] = undefined_precision;
    return j;
}

ordered_json fit_j(const FitResult& f) {
    ordered_json j;
    j["weights"] = weights_j(f.weights);
    j["validation_auc"] = f.auc;
    j["grid_points"] = f.grid_points;
    j["single_agent_auc"] = {{"wallet", f.single_agent_auc[0]},
                             {"coin", f.single_agent_auc[1]},
                             {"timing", f.single_agent_auc[2]}};
    j["dropped"] = f.dropped ? ordered_json(std::string(agents::to_string(*f.dropped))) : ordered_json(nullptr);
    return j;
}

ordered_json run_j(const ModelRun& m) {
    return ordered_json{{"fit", fit_j(m.fit)}, {"validation", report_j(m.validation)}, {"test", report_j(m.test)}};
}

}  // namespace

std::string report_json(const EvalReport& report) { return report_j(report).dump(2) + "\n"; }
std::string fit_json(const FitResult& fit) { return fit_j(fit).dump(2) + "\n"; }
std::string model_run_json(const ModelRun& run) { return run_j(run).dump(2) + "\n"; }

std::string ablation_json(const ModelRun& full, std::span<const AblationResult> ablations) {
    ordered_json rows = ordered_json::array();
    auto row = [](std::string name, const ModelRun& m) {
        return ordered_json{{"model", std::move(name)},
                            {"weights", weights_j(m.fit.weights)},
                            {"validation_auc", m.fit.auc},
                            {"test_auc", opt(m.test.auc)},
                            {"threshold", opt(m.test.threshold)},
                            {"smart_money_gross_return", opt(m.test.smart_money_gross_return)},
                            {"copier_gross_return", opt(m.test.copier_gross_return)}};
    };
    rows.push_back(row("full", full));
    for (const auto& a : ablations) {
        auto r = row("without_" + std::string(agents::to_string(a.dropped)), a.run);
        r["delta_validation_auc"] = a.delta_validation_auc;
        r["delta_test_auc"] = opt(a.delta_test_auc);
        r["delta_smart_money_gross_return"] = opt(a.delta_smart_money_gross_return);
        r["delta_copier_gross_return"] = opt(a.delta_copier_gross_return);
        rows.push_back(std::move(r));
    }
    return ordered_json{{"ablations", std::move(rows)}}.dump(2) + "\n";
}

std::string economics_json(const EconomicsResult& e) {
    ordered_json sel = ordered_json::array();
    for (const auto& s : e.selections) {
        ordered_json j{{"wallet", s.wallet}, {"coin", s.coin}};
        if (s.report) {
            j["r_smart"] = to_double(s.report->r_smart);
            j["r_copier"] = to_double(s.report->r_copier);
            j["liquidated"] = s.report->liquidated;
        } else {
            j["skipped"] = s.skipped;
        }
        sel.push_back(std::move(j));
    }
    return ordered_json{{"smart_money_gross_return", e.smart_money_gross_return},
                        {"copier_gross_return", e.copier_gross_return},
                        {"used", e.used},
                        {"skipped", e.skipped},
                        {"selections", std::move(sel)}}
               .dump(2) +
           "\n";
}

}  // namespace copyguard::ensemble
