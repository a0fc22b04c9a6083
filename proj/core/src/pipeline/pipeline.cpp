#include "copyguard/pipeline/pipeline.hpp"

#include <algorithm>

#include "copyguard/common/error.hpp"
#include "copyguard/common/parallel.hpp"

namespace copyguard::pipeline {

using agents::AgentKind;

std::string_view to_string(AgentMode m) {
    switch (m) {
        case AgentMode::Rule: return "rule";
        case AgentMode::Llm: return "llm";
        case AgentMode::Hybrid: return "hybrid";
    }
    return "rule";
}

std::optional<AgentMode> parse_agent_mode(std::string_view t) {
    for (auto m : {AgentMode::Rule, AgentMode::Llm, AgentMode::Hybrid})
        if (to_string(m) == t) return m;
    return std::nullopt;
}

namespace {

const chain::CoinLedger& ledger_for(const AgentInputs& in, const std::string& coin) {
    const auto* l = chain::find_ledger(in.ledgers, coin);
    if (!l) throw Error(ErrorCode::MissingInput, "no ledger for coin " + coin);
    return *l;
}

std::size_t workers_of(const AgentInputs& in) { return in.workers ? in.workers : default_workers(); }

}  // namespace

std::optional<agents::CandlestickSeries> entry_candles(const chain::CoinLedger& ledger, std::int64_t ts,
                                                       const AgentInputs& in) {
    const auto past = chain::truncated_before(ledger, ts);
    const bool traded = std::any_of(past.txs.begin(), past.txs.end(), [](const auto& t) { return t.is_trade(); });
    if (!traded) return std::nullopt;
    return agents::build_candles(past, in.bucketing, in.curve, in.detection, in.mech);
}

std::vector<ensemble::VerdictRecord> rule_verdicts(std::span<const features::TraderSample> samples,
                                                   const features::ConditionThresholds& th, const AgentInputs& in) {
    std::vector<ensemble::VerdictRecord> out(samples.size() * 3);
    parallel_for(samples.size(), workers_of(in), [&](std::size_t i) {
        const auto& s = samples[i];
        const auto candles = entry_candles(ledger_for(in, s.coin), s.first_trade_ts, in);
        const std::optional<double> mech = candles ? std::optional(candles->mechanicality) : std::nullopt;
        for (std::size_t a = 0; a < 3; ++a)
            out[3 * i + a] = {s.wallet, s.coin, agents::run_rule_agent(agents::kAllAgents[a], s, th, mech, in.rule)};
    });
    return out;
}

std::vector<agents::PromptBundle> agent_prompts(AgentKind kind, std::span<const features::TraderSample> samples,
                                                const AgentInputs& in) {
    std::vector<agents::PromptBundle> out(samples.size());
    parallel_for(samples.size(), workers_of(in), [&](std::size_t i) {
        const auto& s = samples[i];
        switch (kind) {
            case AgentKind::Wallet: out[i] = agents::wallet_prompt(s.features); break;
            case AgentKind::Timing: out[i] = agents::timing_prompt(s.features); break;
            case AgentKind::Coin: {
                const auto& l = ledger_for(in, s.coin);
                std::vector<chain::CommentRecord> before;
                for (const auto& c : l.comments)
                    if (c.timestamp < s.first_trade_ts) before.push_back(c);
                const auto candles = entry_candles(l, s.first_trade_ts, in);
                out[i] = agents::coin_prompt(s.features, before, candles ? &*candles : nullptr, in.attach_image);
                break;
            }
        }
    });
    return out;
}

std::vector<ensemble::VerdictRecord> llm_verdicts(std::span<const features::TraderSample> samples,
                                                  const AgentInputs& in, agents::ChatClient& client,
                                                  const agents::LlmOptions& opts) {
    std::vector<ensemble::VerdictRecord> out(samples.size() * 3);
    for (std::size_t a = 0; a < 3; ++a) {
        const auto kind = agents::kAllAgents[a];
        const auto prompts = agent_prompts(kind, samples, in);
        const auto verdicts = agents::run_llm_batch(kind, prompts, client, opts);
        for (std::size_t i = 0; i < samples.size(); ++i)
            out[3 * i + a] = {samples[i].wallet, samples[i].coin, verdicts[i]};
    }
    return out;
}

}  // namespace copyguard::pipeline
