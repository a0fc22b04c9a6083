#include "copyguard/agents/agents.hpp"

#include <algorithm>
#include <cctype>
#include <memory>

#include <nlohmann/json.hpp>

namespace copyguard::agents {

namespace {

struct Check {
    std::string name;
    bool pass;
};

AgentVerdict finish(AgentKind kind, const std::vector<Check>& req, const std::vector<Check>& aux) {
    // vector<bool> is not contiguous
    auto r = std::make_unique<bool[]>(req.size());
    auto a = std::make_unique<bool[]>(aux.size());
    nlohmann::json trace = nlohmann::json::object();
    nlohmann::json jr = nlohmann::json::object(), ja = nlohmann::json::object();
    for (std::size_t i = 0; i < req.size(); ++i) {
        r[i] = req[i].pass;
        jr[req[i].name] = req[i].pass ? "pass" : "fail";
    }
    for (std::size_t i = 0; i < aux.size(); ++i) {
        a[i] = aux[i].pass;
        ja[aux[i].name] = aux[i].pass ? "pass" : "fail";
    }
    trace["required"] = std::move(jr);
    trace["auxiliary"] = std::move(ja);
    AgentVerdict v;
    v.agent = kind;
    v.confidence = gate_confidence({r.get(), req.size()}, {a.get(), aux.size()});
    v.decision = std::all_of(req.begin(), req.end(), [](const Check& c) { return c.pass; });
    trace["summary"] = v.decision ? "required checks pass" : "a required check fails";
    v.reasoning = trace.dump();
    return v;
}

}  // namespace

std::string_view to_string(AgentKind k) {
    switch (k) {
        case AgentKind::Wallet: return "wallet";
        case AgentKind::Coin: return "coin";
        case AgentKind::Timing: return "timing";
    }
    return "wallet";
}

std::optional<AgentKind> parse_agent_kind(std::string_view t) {
    for (auto k : kAllAgents)
        if (to_string(k) == t) return k;
    return std::nullopt;
}

double gate_confidence(std::span<const bool> required, std::span<const bool> auxiliary) {
    const auto passed = [](std::span<const bool> v) {
        return static_cast<double>(std::count(v.begin(), v.end(), true));
    };
    const double req_frac = required.empty() ? 1.0 : passed(required) / static_cast<double>(required.size());
    if (req_frac < 1.0) return 0.5 * req_frac;
    const double aux_frac = auxiliary.empty() ? 1.0 : passed(auxiliary) / static_cast<double>(auxiliary.size());
    return 0.5 + 0.5 * aux_frac;
}

AgentVerdict run_rule_agent(AgentKind kind, const features::TraderSample& s,
                            const features::ConditionThresholds& th, std::optional<double> mech,
                            const RuleAgentParams& params) {
    const auto cond = features::evaluate_conditions(s, th);
    auto pass = [&](const char* f) { return cond.pass.at(f); };
    const auto& f = s.features;
    switch (kind) {
        case AgentKind::Wallet:
            return finish(kind,
                          {{"t_stat", pass("t_stat")},
                           {"return_all", pass("return_all")},
                           {"return_std", pass("return_std")},
                           {"n_trades", pass("n_trades")},
                           {"t_since_last", pass("t_since_last")},
                           {"t_since_first", pass("t_since_first")}},
                          {{"return_1st", pass("return_1st")},
                           {"return_1_5", pass("return_1_5")},
                           {"return_6_10", pass("return_6_10")},
                           {"return_11_15", pass("return_11_15")}});
        case AgentKind::Coin:
            return finish(kind,
                          {{"bundle_bot", f.bot_bundle == 0}, {"candlestick", mech.value_or(0.0) < params.mechanicality_cut}},
                          {{"sniper_bot", f.bot_sniper == 0}, {"bump_bot", f.bot_bump == 1}, {"comment_bot", f.bot_comment == 0}});
        case AgentKind::Timing:
            return finish(kind, {{"px", pass("px")}, {"amount", pass("amount")}, {"qty", pass("qty")}},
                          {{"t_since_launch", pass("t_since_launch")}});
    }
    return {};
}

bool rule_comment_is_bot(std::string_view text, const CommentRuleParams& p) {
    if (chain::references_other_wallet(text)) return false;
    if (text.size() >= p.max_length) return false;
    std::size_t letters = 0, upper = 0;
    std::string word, lower;
    bool hype = false;
    auto flush = [&] {
        if (!word.empty() && std::find(p.hype_terms.begin(), p.hype_terms.end(), word) != p.hype_terms.end())
            hype = true;
        word.clear();
    };
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalpha(c)) {
            ++letters;
            if (std::isupper(c)) ++upper;
        }
        if (std::isalnum(c))
            word.push_back(static_cast<char>(std::tolower(c)));
        else
            flush();
    }
    flush();
    const bool shouting = letters > 0 && static_cast<double>(upper) / static_cast<double>(letters) >= p.caps_ratio;
    return hype || shouting;
}

std::vector<bool> RuleCommentClassifier::classify(std::span<const chain::CommentRecord> comments) {
    std::vector<bool> out;
    out.reserve(comments.size());
    for (const auto& c : comments) out.push_back(rule_comment_is_bot(c.text, p_));
    return out;
}

}  // namespace copyguard::agents
