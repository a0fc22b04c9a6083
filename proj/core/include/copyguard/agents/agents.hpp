#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "copyguard/detect/detectors.hpp"
#include "copyguard/features/features.hpp"

namespace copyguard::agents {

enum class AgentKind { Wallet, Coin, Timing };
std::string_view to_string(AgentKind k);
std::optional<AgentKind> parse_agent_kind(std::string_view text);
inline constexpr AgentKind kAllAgents[] = {AgentKind::Wallet, AgentKind::Coin, AgentKind::Timing};

struct AgentVerdict {
    AgentKind agent = AgentKind::Wallet;
    bool decision = false;
    double confidence = 0.5;  // probability of TRUE
    std::string reasoning;    // JSON trace
    bool logprobs_unavailable = false;
    std::optional<double> raw_confidence;  // exp(logprob) of the result token before renormalization
};

struct RuleAgentParams {
    double mechanicality_cut = 0.31;
};

// Deterministic gatekeeper over the fitted conditions. `mechanicality` is the
// as-of-entry candle score (nullopt: no trades yet, scored as 0).
AgentVerdict run_rule_agent(AgentKind kind, const features::TraderSample& sample,
                            const features::ConditionThresholds& thresholds, std::optional<double> mechanicality,
                            const RuleAgentParams& params = {});

// 0.5 + 0.5 * aux fraction when every required check passes, else 0.5 * required fraction.
double gate_confidence(std::span<const bool> required, std::span<const bool> auxiliary);

struct CommentRuleParams {
    std::vector<std::string> hype_terms{"moon",  "lfg",  "100x",    "1000x",   "pump", "send",   "wagmi",
                                        "gem",   "rocket", "sendoor", "bullish", "hodl", "ape",   "x100",
                                        "ngmi",  "rug",  "scam",    "dump"};
    double caps_ratio = 0.6;     // share of upper-case letters
    std::size_t max_length = 40;  // characters
};

// Bot iff no wallet reference, shorter than max_length, and a hype term or shouting.
bool rule_comment_is_bot(std::string_view text, const CommentRuleParams& p = {});

class RuleCommentClassifier : public detect::CommentClassifier {
public:
    explicit RuleCommentClassifier(CommentRuleParams p = {}) : p_(std::move(p)) {}
    std::vector<bool> classify(std::span<const chain::CommentRecord> comments) override;

private:
    CommentRuleParams p_;
};

}  // namespace copyguard::agents
