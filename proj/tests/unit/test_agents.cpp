#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <gtest/gtest.h>
#include <httplib.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <sstream>

#include "copyguard/agents/agents.hpp"
#include "copyguard/agents/candles.hpp"
#include "copyguard/agents/llm.hpp"
#include "copyguard/agents/prompts.hpp"
#include "copyguard/common/error.hpp"
#include "copyguard/common/real.hpp"
#include "copyguard/common/stats.hpp"
#include "copyguard/curve/bonding_curve.hpp"
#include "copyguard/sim/scenario.hpp"
#include "gen.hpp"
#include "ledger_builder.hpp"

using namespace copyguard;
using namespace copyguard::agents;
using cgtest::LedgerBuilder;

namespace {

std::vector<std::string> golden(const std::string& name) {
    std::ifstream in(std::string(COPYGUARD_GOLDEN_DIR) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string all = ss.str();
    if (!all.empty() && all.back() == '\n') all.pop_back();
    std::vector<std::string> out;
    for (std::size_t pos = 0;;) {
        const auto next = all.find("\n---\n", pos);
        out.push_back(all.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
        if (next == std::string::npos) break;
        pos = next + 5;
    }
    return out;
}

features::ConditionThresholds thresholds() {
    using features::Rule;
    features::ConditionThresholds th;
    for (auto r : {"return_all", "return_1st", "return_1_5", "return_6_10", "return_11_15"})
        th.conditions.push_back({r, Rule::GreaterThanZero, 0.0});
    th.conditions.push_back({"n_trades", Rule::PercentileAbove, 100});
    th.conditions.push_back({"return_std", Rule::StdBelow, 1.0});
    th.conditions.push_back({"t_stat", Rule::TStatAbove, 1.645});
    th.conditions.push_back({"t_since_last", Rule::PercentileBelow, 1000});
    th.conditions.push_back({"t_since_first", Rule::PercentileAbove, 1000});
    th.conditions.push_back({"t_since_launch", Rule::PercentileAbove, 10});
    th.conditions.push_back({"px", Rule::PercentileBelow, 1e-5});
    th.conditions.push_back({"amount", Rule::PercentileBelow, 500});
    th.conditions.push_back({"qty", Rule::PercentileBelow, 1e7});
    th.conditions.push_back({"bot_bundle", Rule::BotMustBeFalse, 0});
    return th;
}

// wallet features from the worked positive example
features::TraderSample positive_wallet() {
    features::TraderSample s;
    auto& f = s.features;
    f.t_stat = 24.39;
    f.return_all = 1.25;
    f.return_std = 0.84;
    f.n_trades = 4114;
    f.return_1st = 0.12;
    f.return_1_5 = 0.14;
    f.return_6_10 = 0.79;
    f.return_11_15 = 0.48;
    f.t_since_last = 371;
    f.t_since_first = 19118974;
    f.t_since_launch = 40;
    f.px = 4.95e-06;
    f.amount = 99.65;
    f.qty = 6026170.61;
    return s;
}

features::TraderSample negative_wallet() {
    features::TraderSample s;
    auto& f = s.features;
    f.t_stat = 0.45;
    f.return_all = 0.0;
    f.return_std = 0.31;
    f.n_trades = 461;
    f.return_1st = 0.02;
    f.return_1_5 = -0.02;
    f.return_6_10 = 0.11;
    f.return_11_15 = -0.12;
    f.t_since_last = 10;
    f.t_since_first = 15449;
    f.px = 1.19e-05;
    f.amount = 661.21;
    f.qty = 55153573.25;
    return s;
}

class ScriptedClient : public ChatClient {
public:
    std::vector<std::function<ChatResponse()>> script;
    std::vector<ChatRequest> seen;

    ChatResponse complete(const ChatRequest& r) override {
        std::lock_guard lock(m_);
        seen.push_back(r);
        const auto i = std::min(seen.size() - 1, script.size() - 1);
        return script[i]();
    }

private:
    std::mutex m_;
};

ChatResponse text(std::string s) { return {std::move(s), std::nullopt}; }

// reply split so that the result literal is its own token
ChatResponse with_token(const std::string& head, const std::string& lit, double lp, std::vector<TopLogprob> top) {
    ChatResponse r;
    r.content = head + lit + "}";
    r.logprobs = std::vector<TokenLogprob>{{head, -0.01, {}}, {lit, lp, std::move(top)}, {"}", -0.001, {}}};
    return r;
}

LlmOptions quiet(std::vector<long>* sleeps = nullptr) {
    LlmOptions o;
    o.sleep = [sleeps](std::chrono::milliseconds d) {
        if (sleeps) sleeps->push_back(static_cast<long>(d.count()));
    };
    return o;
}

std::string joined(const PromptBundle& b) { return b.system + "\n" + b.user; }

sim::ScenarioSpec spec_of(sim::ScenarioKind k, std::uint64_t seed) {
    sim::ScenarioSpec s;
    s.kind = k;
    s.seed = seed;
    return s;
}

CandlestickSeries candles_of(const chain::CoinLedger& l) {
    return build_candles(l, {}, curve::CurveParams::defaults(), {});
}

}  // namespace

// ---- rule agents

TEST(RuleAgent, AllChecksPassGiveFullConfidence) {
    auto v = run_rule_agent(AgentKind::Wallet, positive_wallet(), thresholds(), std::nullopt);
    EXPECT_TRUE(v.decision);
    EXPECT_DOUBLE_EQ(v.confidence, 1.0);
    auto j = nlohmann::json::parse(v.reasoning);
    EXPECT_EQ(j["required"]["t_stat"], "pass");
}

TEST(RuleAgent, HalfRequiredPassing) {
    auto s = negative_wallet();
    s.features.n_trades = 50;  // t_stat, return_all and n_trades fail
    auto v = run_rule_agent(AgentKind::Wallet, s, thresholds(), std::nullopt);
    EXPECT_FALSE(v.decision);
    EXPECT_DOUBLE_EQ(v.confidence, 0.25);
}

TEST(RuleAgent, BundleVetoesCoin) {
    auto s = positive_wallet();
    s.features.bot_bundle = 1;
    s.features.bot_bump = 1;
    auto v = run_rule_agent(AgentKind::Coin, s, thresholds(), 0.0);
    EXPECT_FALSE(v.decision);
    EXPECT_DOUBLE_EQ(v.confidence, 0.25);
    s.features.bot_bundle = 0;
    v = run_rule_agent(AgentKind::Coin, s, thresholds(), 0.0);
    EXPECT_TRUE(v.decision);
    EXPECT_DOUBLE_EQ(v.confidence, 1.0);
    // mechanical uptrend fails the candle check
    v = run_rule_agent(AgentKind::Coin, s, thresholds(), 0.5);
    EXPECT_FALSE(v.decision);
}

TEST(RuleAgent, TimingTriple) {
    EXPECT_TRUE(run_rule_agent(AgentKind::Timing, positive_wallet(), thresholds(), std::nullopt).decision);
    EXPECT_FALSE(run_rule_agent(AgentKind::Timing, negative_wallet(), thresholds(), std::nullopt).decision);
}

TEST(RuleAgent, GateFormula) {
    const bool t[] = {true, true}, half[] = {true, false}, none[] = {false, false};
    EXPECT_DOUBLE_EQ(gate_confidence(t, t), 1.0);
    EXPECT_DOUBLE_EQ(gate_confidence(t, half), 0.75);
    EXPECT_DOUBLE_EQ(gate_confidence(t, none), 0.5);
    EXPECT_DOUBLE_EQ(gate_confidence(half, t), 0.25);
    EXPECT_DOUBLE_EQ(gate_confidence(none, t), 0.0);
    EXPECT_DOUBLE_EQ(gate_confidence(t, {}), 1.0);
}

TEST(RuleAgent, DecisionIsConfidenceAtLeastHalfOnRandomSamples) {
    cgtest::Gen g(31);
    const auto th = thresholds();
    for (int i = 0; i < 400; ++i) {
        features::TraderSample s;
        auto& f = s.features;
        auto opt = [&](double lo, double hi) -> std::optional<double> {
            if (g.coin(0.1)) return std::nullopt;
            return g.uniform(lo, hi);
        };
        f.return_all = opt(-1, 1);
        f.return_1st = opt(-1, 1);
        f.return_1_5 = opt(-1, 1);
        f.return_6_10 = opt(-1, 1);
        f.return_11_15 = opt(-1, 1);
        f.return_std = opt(0, 2);
        f.t_stat = opt(-3, 5);
        f.n_trades = g.integer(0, 300);
        f.t_since_last = opt(0, 2000);
        f.t_since_first = g.uniform(0, 3000);
        f.t_since_launch = g.uniform(0, 30);
        f.px = g.uniform(0, 2e-5);
        f.amount = g.uniform(0, 1000);
        f.qty = g.uniform(0, 2e7);
        f.bot_bundle = g.coin() ? 1 : 0;
        f.bot_sniper = g.coin() ? 1 : 0;
        f.bot_bump = g.coin() ? 1 : 0;
        f.bot_comment = g.coin() ? 1 : 0;
        const std::optional<double> mech = g.coin(0.2) ? std::nullopt : std::optional<double>(g.uniform(0, 1));
        for (auto k : kAllAgents) {
            auto v = run_rule_agent(k, s, th, mech);
            ASSERT_GE(v.confidence, 0.0);
            ASSERT_LE(v.confidence, 1.0);
            ASSERT_EQ(v.decision, v.confidence >= 0.5);
            auto again = run_rule_agent(k, s, th, mech);
            ASSERT_EQ(again.confidence, v.confidence);
            ASSERT_EQ(again.reasoning, v.reasoning);
        }
    }
}

// ---- comment rules

TEST(CommentRule, FewShots) {
    EXPECT_TRUE(rule_comment_is_bot("TO THE MOON!!! READYY"));
    EXPECT_FALSE(rule_comment_is_bot("Fake web bros, not same ca"));
    EXPECT_FALSE(rule_comment_is_bot("#88857219 show screenshot as proof pls?"));
    EXPECT_FALSE(rule_comment_is_bot("#88857219 LFG MOON"));
    EXPECT_FALSE(rule_comment_is_bot("this is a long message about moon that goes past the limit"));
    EXPECT_FALSE(rule_comment_is_bot("moonshot"));  // whole words only
}

TEST(CommentRule, SimulatedPoolsSeparate) {
    RuleCommentClassifier cls;
    std::size_t organic = 0, refs = 0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto sc = sim::generate(spec_of(sim::ScenarioKind::CommentBot, seed));
        auto flags = cls.classify(sc.ledger.comments);
        for (std::size_t i = 0; i < flags.size(); ++i) {
            const auto& c = sc.ledger.comments[i];
            const bool bot = c.wallet.find("-cbot") != std::string::npos;
            EXPECT_EQ(flags[i], bot) << c.text;
            if (!bot) ++organic;
            if (c.text.find('#') != std::string::npos) ++refs;
        }
    }
    EXPECT_GT(organic, 0u);
    EXPECT_GT(refs, 0u);
}

// ---- candles

TEST(Candles, SingleTradeSingleBar) {
    auto l = LedgerBuilder("x").create("C", 10).buy("A", 11, "1000000", "0.03").build();
    auto s = candles_of(l);
    ASSERT_EQ(s.bars.size(), 1u);
    const auto& b = s.bars[0];
    EXPECT_EQ(b.open, b.close);
    EXPECT_EQ(b.high, b.close);
    EXPECT_EQ(b.low, b.close);
    EXPECT_GT(b.close, 0);
    EXPECT_EQ(s.mechanicality, 0.0);
}

TEST(Candles, EmptyLedger) {
    auto l = LedgerBuilder("x").create("C", 10).build();
    try {
        candles_of(l);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyLedger);
    }
}

TEST(Candles, EqualBuysEveryBlockLookMechanical) {
    const auto p = curve::CurveParams::defaults();
    LedgerBuilder lb("g");
    lb.create("C", 100);
    auto st = curve::CurveState::fresh(p);
    for (int i = 1; i <= 40; ++i) {
        // same SOL each block; token count from the curve so the ledger is consistent
        const auto q = to_decimal_floor(curve::tokens_for_deposit(st, Real(1)));
        const auto r = curve::apply_buy(st, q);
        lb.buy("G", static_cast<std::uint64_t>(100 + i), q.to_string(), to_decimal(r.cash).to_string());
        st = r.state;
    }
    auto s = candles_of(lb.build());
    EXPECT_EQ(s.bars.size(), 40u);
    EXPECT_GE(s.mechanicality, 0.9);
}

TEST(Candles, EnvelopeOnGeneratedLedgers) {
    for (auto kind : sim::all_kinds())
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            auto sc = sim::generate(spec_of(kind, seed));
            for (auto bucketing : {Bucketing{}, Bucketing{Bucketing::Mode::Seconds, 30}}) {
                auto s = build_candles(sc.ledger, bucketing, curve::CurveParams::defaults(), {});
                ASSERT_FALSE(s.bars.empty());
                ASSERT_GE(s.mechanicality, 0.0);
                ASSERT_LE(s.mechanicality, 1.0);
                for (const auto& b : s.bars) {
                    ASSERT_GE(b.high, std::max(b.open, b.close));
                    ASSERT_LE(b.low, std::min(b.open, b.close));
                    ASSERT_GT(b.trades, 0u);
                }
            }
        }
}

TEST(Candles, GradualAboveBenignP95) {
    std::vector<double> benign, gradual;
    for (std::uint64_t seed = 100; seed < 160; ++seed) {
        benign.push_back(candles_of(sim::generate(spec_of(sim::ScenarioKind::Benign, seed)).ledger).mechanicality);
        gradual.push_back(
            candles_of(sim::generate(spec_of(sim::ScenarioKind::GradualBundle, seed)).ledger).mechanicality);
    }
    const double p95 = *stats::percentile(benign, 95);
    const RuleAgentParams defaults;
    EXPECT_LT(p95, defaults.mechanicality_cut);
    for (double g : gradual) EXPECT_GT(g, p95);
    EXPECT_GT(*stats::percentile(gradual, 5), defaults.mechanicality_cut);
}

TEST(Candles, PngAndTable) {
    auto sc = sim::generate(spec_of(sim::ScenarioKind::GradualBundle, 3));
    auto s = candles_of(sc.ledger);
    auto png = render_png(s);
    ASSERT_GT(png.size(), 8u);
    const unsigned char sig[] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    EXPECT_TRUE(std::equal(sig, sig + 8, png.begin()));
    auto t = candles_table(s, 10);
    EXPECT_EQ(std::count(t.begin(), t.end(), '\n'), 11);
    EXPECT_EQ(t.rfind("bar,open,high,low,close,volume_sol\n", 0), 0u);
}

// ---- prompts

TEST(Prompts, CommentTemplateGolden) {
    const auto p = joined(comment_prompt("gm frens"));
    for (const auto& frag : golden("comment_prompt.txt")) EXPECT_NE(p.find(frag), std::string::npos) << frag;
    EXPECT_NE(p.rfind("gm frens"), std::string::npos);
}

TEST(Prompts, WalletTemplateGolden) {
    const auto p = joined(wallet_prompt(positive_wallet().features));
    for (const auto& frag : golden("wallet_prompt.txt")) EXPECT_NE(p.find(frag), std::string::npos) << frag;
    EXPECT_NE(p.find("T-statistic of Returns: 24.39\n"), std::string::npos);
    EXPECT_NE(p.find("Time Since First Trade: 19118974\n"), std::string::npos);
}

TEST(Prompts, WalletSentinelsRenderNA) {
    features::FeatureVector f;
    const auto p = wallet_prompt(f).user;
    EXPECT_NE(p.find("T-statistic of Returns: N/A\n"), std::string::npos);
    EXPECT_NE(p.find("Time Since Last Trade: N/A\n"), std::string::npos);
}

TEST(Prompts, CoinTemplateGolden) {
    auto f = positive_wallet().features;
    f.bot_bump = 1;
    auto l = LedgerBuilder("x")
                 .create("C", 10)
                 .buy("A", 11, "1000000", "0.03")
                 .comment("3yxCdwQpZZ", 1737126396, "Makers missing? Upgrade your strategy now!")
                 .comment("9kk", 1737126400, "braces {comments} {bundle} stay as typed")
                 .build();
    auto s = candles_of(l);
    auto b = coin_prompt(f, l.comments, &s, false);
    const auto p = joined(b);
    for (const auto& frag : golden("coin_prompt.txt")) EXPECT_NE(p.find(frag), std::string::npos) << frag;
    EXPECT_NE(p.rfind("Bump Bot: True\n"), std::string::npos);
    EXPECT_NE(p.find("braces {comments} {bundle} stay as typed"), std::string::npos);
    EXPECT_FALSE(b.image_png);
    auto with_img = coin_prompt(f, l.comments, &s, true);
    ASSERT_TRUE(with_img.image_png);
    EXPECT_FALSE(with_img.image_png->empty());
}

TEST(Prompts, TimingTemplateGolden) {
    const auto p = joined(timing_prompt(positive_wallet().features));
    for (const auto& frag : golden("timing_prompt.txt")) EXPECT_NE(p.find(frag), std::string::npos) << frag;
}

TEST(Prompts, UnfilledSlotIsInvalid) {
    PromptBundle b;
    b.user = "Average Return: {return_all}";
    EXPECT_THROW(b.validate(), Error);
    b.user = fill(b.user, std::vector<std::pair<std::string, std::string>>{{"return_all", "0.10"}});
    EXPECT_NO_THROW(b.validate());
    EXPECT_EQ(utc_timestamp(1737126396), "2025-01-17 15:06:36");
}

// ---- LLM path with a scripted client

TEST(LlmAgent, WorkedExampleReplyIsTrue) {
    ScriptedClient c;
    c.script = {[] {
        return text(
            "Here is my assessment.\n{\"reasoning\":{\"Statistical Significance\":\"Gate check: require t-statistic > "
            "1.645 (one-tailed 5% level). Observed = 24.39\"},\"result\":true}");
    }};
    auto v = run_llm_agent(AgentKind::Wallet, wallet_prompt(positive_wallet().features), c, quiet());
    EXPECT_TRUE(v.decision);
    EXPECT_TRUE(v.logprobs_unavailable);
    EXPECT_DOUBLE_EQ(v.confidence, 0.9);
    EXPECT_NE(v.reasoning.find("Statistical Significance"), std::string::npos);
    ASSERT_EQ(c.seen.size(), 1u);
    EXPECT_EQ(c.seen[0].temperature, 0.0);
    EXPECT_TRUE(c.seen[0].logprobs);
}

TEST(LlmAgent, CoinExemplarsParse) {
    const auto g = golden("coin_prompt.txt");
    for (int i : {1, 2}) {
        ScriptedClient c;
        const std::string reply = g[static_cast<std::size_t>(i)];
        c.script = {[reply] { return text(reply); }};
        auto v = run_llm_agent(AgentKind::Coin, PromptBundle{"", "x", std::nullopt}, c, quiet());
        EXPECT_EQ(v.decision, i == 1);
        EXPECT_DOUBLE_EQ(v.confidence, i == 1 ? 0.9 : 0.1);
    }
}

TEST(LlmAgent, MalformedTwiceIsAnError) {
    ScriptedClient c;
    c.script = {[] { return text("I think it will go up."); }};
    try {
        run_llm_agent(AgentKind::Wallet, PromptBundle{"", "x", std::nullopt}, c, quiet());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MalformedReply);
    }
    ASSERT_EQ(c.seen.size(), 2u);
    const auto& second = c.seen[1].messages;
    ASSERT_GE(second.size(), 3u);
    EXPECT_EQ(second[second.size() - 2].role, "assistant");
    EXPECT_EQ(second.back().text, format_reminder());
}

TEST(LlmAgent, RepromptRecovers) {
    ScriptedClient c;
    c.script = {[] { return text("no idea"); }, [] { return text("{\"result\": false}"); }};
    auto v = run_llm_agent(AgentKind::Timing, PromptBundle{"", "x", std::nullopt}, c, quiet());
    EXPECT_FALSE(v.decision);
    EXPECT_EQ(c.seen.size(), 2u);
}

TEST(LlmAgent, ResultTokenLogprob) {
    ScriptedClient c;
    c.script = {[] { return with_token("{\"reasoning\":\"ok\",\"result\":", "true", std::log(0.8), {}); }};
    auto v = run_llm_agent(AgentKind::Wallet, PromptBundle{"", "x", std::nullopt}, c, quiet());
    EXPECT_TRUE(v.decision);
    EXPECT_FALSE(v.logprobs_unavailable);
    EXPECT_NEAR(v.confidence, 0.8, 1e-9);
    EXPECT_NEAR(*v.raw_confidence, 0.8, 1e-9);
}

TEST(LlmAgent, FalseTokenGivesComplement) {
    ScriptedClient c;
    c.script = {[] { return with_token("{\"result\": ", "false", std::log(0.7), {{"false", std::log(0.7)}}); }};
    auto v = run_llm_agent(AgentKind::Wallet, PromptBundle{"", "x", std::nullopt}, c, quiet());
    EXPECT_FALSE(v.decision);
    EXPECT_NEAR(v.confidence, 0.3, 1e-9);
}

TEST(LlmAgent, RenormalizesOverBothCandidates) {
    ScriptedClient c;
    c.script = {[] {
        return with_token("{\"result\":", " true", std::log(0.6),
                          {{" true", std::log(0.6)}, {" false", std::log(0.3)}, {" maybe", std::log(0.1)}});
    }};
    auto v = run_llm_agent(AgentKind::Wallet, PromptBundle{"", "x", std::nullopt}, c, quiet());
    EXPECT_NEAR(v.confidence, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(*v.raw_confidence, 0.6, 1e-12);
}

TEST(LlmAgent, LocatesTheLastResultLiteral) {
    // a reasoning string mentioning "result": false must not be picked up
    const std::string head = "{\"reasoning\":\"the \\\"result\\\": false case was rejected\",\"result\":";
    auto p = parse_reply(head + "true}");
    ASSERT_TRUE(p);
    EXPECT_TRUE(p->result);
    EXPECT_EQ(p->result_offset, head.size());
}

TEST(LlmAgent, TransportRetriesWithBackoff) {
    ScriptedClient c;
    int calls = 0;
    c.script = {[&calls]() -> ChatResponse {
        if (++calls <= 2) throw Error(ErrorCode::TransportError, "503");
        return text("{\"result\": true}");
    }};
    std::vector<long> sleeps;
    auto v = run_llm_agent(AgentKind::Wallet, PromptBundle{"", "x", std::nullopt}, c, quiet(&sleeps));
    EXPECT_TRUE(v.decision);
    EXPECT_EQ(sleeps, (std::vector<long>{500, 1000}));
}

TEST(LlmAgent, TransportGivesUpAfterThreeRetries) {
    ScriptedClient c;
    c.script = {[]() -> ChatResponse { throw Error(ErrorCode::TransportError, "down"); }};
    std::vector<long> sleeps;
    try {
        run_llm_agent(AgentKind::Wallet, PromptBundle{"", "x", std::nullopt}, c, quiet(&sleeps));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TransportError);
    }
    EXPECT_EQ(c.seen.size(), 4u);
    EXPECT_EQ(sleeps, (std::vector<long>{500, 1000, 2000}));
}

TEST(LlmAgent, BatchKeepsOrder) {
    ScriptedClient c;
    c.script = {[] { return text("{\"result\": true}"); }};
    std::vector<PromptBundle> bundles(9, PromptBundle{"", "x", std::nullopt});
    auto out = run_llm_batch(AgentKind::Coin, bundles, c, quiet());
    ASSERT_EQ(out.size(), 9u);
    for (const auto& v : out) EXPECT_EQ(v.agent, AgentKind::Coin);
}

TEST(LlmComment, ClassifierUsesVerbatimPrompt) {
    ScriptedClient c;
    c.script = {[] { return text("{\"result\": true}"); }};
    LlmCommentClassifier cls(c, quiet());
    std::vector<chain::CommentRecord> cs{chain::make_comment("x", "w", 1, "TO THE MOON!!! READYY")};
    EXPECT_EQ(cls.classify(cs), std::vector<bool>{true});
    ASSERT_EQ(c.seen.size(), 1u);
    const auto& u = c.seen[0].messages.back().text;
    for (const auto& frag : golden("comment_prompt.txt")) EXPECT_NE(u.find(frag), std::string::npos);
}

// ---- wire format against a local server

TEST(HttpChat, RoundTripAgainstLocalServer) {
    httplib::Server svr;
    nlohmann::json last_body;
    std::string last_auth;
    int status = 200;
    svr.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        last_body = nlohmann::json::parse(req.body);
        last_auth = req.get_header_value("Authorization");
        nlohmann::json reply{
            {"choices",
             {{{"message", {{"role", "assistant"}, {"content", "{\"result\":true}"}}},
               {"logprobs",
                {{"content",
                  {{{"token", "{\"result\":"}, {"logprob", -0.01}, {"top_logprobs", nlohmann::json::array()}},
                   {{"token", "true"},
                    {"logprob", std::log(0.8)},
                    {"top_logprobs", {{{"token", "true"}, {"logprob", std::log(0.8)}}}}},
                   {{"token", "}"}, {"logprob", -0.001}, {"top_logprobs", nlohmann::json::array()}}}}}}}}}};
        res.status = status;
        res.set_content(reply.dump(), "application/json");
    });
    const int port = svr.bind_to_any_port("127.0.0.1");
    std::thread th([&] { svr.listen_after_bind(); });
    svr.wait_until_ready();

    ::setenv("CG_TEST_KEY", "sk-test", 1);
    HttpChatConfig cfg;
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port);
    cfg.api_key_env = "CG_TEST_KEY";
    cfg.timeout_seconds = 5;
    HttpChatClient client(cfg);

    PromptBundle b{"sys", "user text", std::vector<unsigned char>{1, 2, 3}};
    auto v = run_llm_agent(AgentKind::Coin, b, client, quiet());
    EXPECT_TRUE(v.decision);
    EXPECT_NEAR(v.confidence, 0.8, 1e-9);
    EXPECT_EQ(last_auth, "Bearer sk-test");
    EXPECT_EQ(last_body["temperature"], 0.0);
    EXPECT_EQ(last_body["logprobs"], true);
    EXPECT_EQ(last_body["messages"][0]["role"], "system");
    EXPECT_EQ(last_body["messages"][1]["content"][1]["image_url"]["url"], "data:image/png;base64,AQID");

    status = 503;
    EXPECT_THROW(client.complete(ChatRequest{"m", {{"user", "x", std::nullopt}}}), Error);

    svr.stop();
    th.join();

    ::unsetenv("CG_TEST_KEY");
    EXPECT_THROW(HttpChatClient{cfg}, Error);
}
