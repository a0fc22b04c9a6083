#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "copyguard/agents/agents.hpp"
#include "copyguard/agents/candles.hpp"
#include "copyguard/agents/llm.hpp"
#include "copyguard/chain/model.hpp"
#include "copyguard/curve/bonding_curve.hpp"
#include "copyguard/detect/detectors.hpp"
#include "copyguard/ensemble/io.hpp"
#include "copyguard/features/features.hpp"

namespace copyguard::pipeline {

// Rule: everything offline. Llm: comment labels and agent verdicts from the
// chat model. Hybrid: rule comment labels, chat-model agent verdicts.
enum class AgentMode { Rule, Llm, Hybrid };
std::string_view to_string(AgentMode m);
std::optional<AgentMode> parse_agent_mode(std::string_view text);

struct AgentInputs {
    std::span<const chain::CoinLedger> ledgers;
    curve::CurveParams curve = curve::CurveParams::defaults();
    detect::DetectionConfig detection;
    agents::Bucketing bucketing;
    agents::MechanicalityParams mech;
    agents::RuleAgentParams rule;
    bool attach_image = false;
    std::size_t workers = 0;
};

// Candles of the coin as seen just before `ts`; unset when nothing traded yet.
std::optional<agents::CandlestickSeries> entry_candles(const chain::CoinLedger& ledger, std::int64_t ts,
                                                       const AgentInputs& in);

// Three verdicts per sample, sample-major, agents in wallet/coin/timing order.
// Error(MissingInput) when a sample's coin has no ledger.
std::vector<ensemble::VerdictRecord> rule_verdicts(std::span<const features::TraderSample> samples,
                                                   const features::ConditionThresholds& thresholds,
                                                   const AgentInputs& in);

std::vector<agents::PromptBundle> agent_prompts(agents::AgentKind kind, std::span<const features::TraderSample> samples,
                                                const AgentInputs& in);

std::vector<ensemble::VerdictRecord> llm_verdicts(std::span<const features::TraderSample> samples,
                                                  const AgentInputs& in, agents::ChatClient& client,
                                                  const agents::LlmOptions& opts);

}  // namespace copyguard::pipeline
