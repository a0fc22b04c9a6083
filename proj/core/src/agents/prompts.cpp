#include "copyguard/agents/prompts.hpp"

#include <cstdio>
#include <ctime>
#include <algorithm>
#include <regex>

#include "copyguard/common/error.hpp"

namespace copyguard::agents {

namespace {

constexpr std::string_view kCommentInstruction =
    R"P(You are a meme coin comment analyzer. Your task is to classify a given comment as bot-generated or human-generated. Bot-generated comments are often short, context-less, and mass-producible slogans that express hype or hostility. In contrast, human-generated comments tend to be more personalized and nuanced, containing context or opinion with reasoning. Comments that reference other users (e.g., #89009679) are typically human-generated, although not all human comments contain such references. Respond with id and true (if the comment is bot-generated) or false (if it is human-generated). Your response should follow this format:{"result": <true/false>})P";

constexpr std::string_view kCommentShots = R"P(TO THE MOON!!! READYY
{"result": true}

we’ll get there! LFG
{"result": true}

#88857219 show screenshot as proof pls?
{"result": false}

Fake web bros, not same ca
{"result": false}
)P";

constexpr std::string_view kWalletInstruction =
    "You are a professional on-chain analyst specializing in meme coin wallet trading behavior. You will be given "
    "features of a wallet's historical meme coin trading activity. Your task is to assess whether the wallet's next "
    "trade will be profitable so that a user can copy trade from it.";

constexpr std::string_view kWalletCot = R"P(Example 1
T-statistic of Returns: 24.39
Average Return: 1.25
Return Standard Deviation: 0.84
Number of Trades: 4114
Last Return 0.12
Five-to-One Return: 0.14
Ten-to-Six Return: 0.79
Fifteen-to-Eleven Return: 0.48
Time Since Last Trade: 371
Time Since First Trade: 19118974
{"reasoning":{"Statistical Significance":"Gate check: require t-statistic > 1.645 (one-tailed 5% level). Observed = 24.39 > 1.645, so this check passes.","Average Return":"Required check: average return > 0. Observed = 1.25, so this check passes.","Return Standard Deviation":"Required check: standard deviation < 1. Observed = 0.84, so this check passes.","Number of Trades":"Required check: number of trades above the 25th percentile of the training set. Observed = 4114, an experienced wallet, so this check passes.","Time Since Last Trade":"Required check: below the 75th percentile of the training set. Observed = 371 seconds, the wallet is active, so this check passes.","Time Since First Trade":"Required check: above the 25th percentile of the training set. Observed = 19118974 seconds, a long track record, so this check passes.","Horizon Returns":"Auxiliary check: last, five-to-one, ten-to-six and fifteen-to-eleven returns are all positive (0.12, 0.14, 0.79, 0.48); profitability persists across horizons.","Summary":"All required checks pass and the auxiliary horizon returns agree. Classify the next trade as profitable."},"result":true}

Example 2
T-statistic of Returns: 0.45
Average Return: 0.00
Return Standard Deviation: 0.31
Number of Trades: 461
Last Return 0.02
Five-to-One Return: -0.02
Ten-to-Six Return: 0.11
Fifteen-to-Eleven Return: -0.12
Time Since Last Trade: 10
Time Since First Trade: 15449
{"reasoning":{"Statistical Significance":"Gate check: require t-statistic > 1.645 (one-tailed 5% level). Observed = 0.45 <= 1.645, so this check fails.","Average Return":"Required check: average return > 0. Observed = 0.00, so this check fails.","Return Standard Deviation":"Required check: standard deviation < 1. Observed = 0.31, so this check passes.","Number of Trades":"Required check: number of trades above the 25th percentile of the training set. Observed = 461; this alone is not decisive.","Time Since Last Trade":"Required check: below the 75th percentile of the training set. Observed = 10 seconds, so this check passes.","Time Since First Trade":"Required check: above the 25th percentile of the training set. Observed = 15449 seconds, a short track record.","Horizon Returns":"Auxiliary check: five-to-one and fifteen-to-eleven returns are negative (-0.02, -0.12); no persistent edge.","Summary":"The significance and average-return checks fail. Classify the next trade as not profitable."},"result":false}
)P";

constexpr std::string_view kWalletFeatures = R"P(T-statistic of Returns: {t_stat}
Average Return: {return_all}
Return Standard Deviation: {return_std}
Number of Trades: {n_trades}
Last Return {return_1st}
Five-to-One Return: {return_1_5}
Ten-to-Six Return: {return_6_10}
Fifteen-to-Eleven Return: {return_11_15}
Time Since Last Trade: {t_since_last}
Time Since First Trade: {t_since_first}
)P";

constexpr std::string_view kCoinInstruction =
    "You are a professional on-chain analyst specializing in meme coin investment potential. You will be given "
    "various transaction features, candlestick chart, and comment history related to a meme coin. Your task is to "
    "assess whether the meme coin is a good investment opportunity.";

constexpr std::string_view kCoinCot = R"P(Example 1
Transaction Features:
Bundle Bot: False
Sniper Bot: False
Bump Bot: True
Comment Bot: True
Comment History:
2025-01-17 15:06:36 -- 3yxCdw: Makers missing? Upgrade your strategy now!
...
Candlestick Chart: (chart of a gradual increase)
{"reasoning":{"Bundle Bot":"Required check: Bundle Bot must be False. Observed = False. Since False == False, this check passes.","Candlestick Pattern":"Required check: chart should show gradual, sustained price discovery (no single-candle spike-and-dump). Observed pattern indicates a gradual increase, so this check passes.","Sniper Bot":"Auxiliary check: Sniper Bot ideally False. Observed = False. This reduces early predatory trading risk.","Bump Bot":"Auxiliary check: Bump Bot may be True as a weak visibility/support signal but is not required. Observed = True; treat as weakly supportive.","Comments":"Auxiliary check: discount repetitive spam; prefer evidence of non-boilerplate engagement. Observed Comment Bot = True; treat as caution, but not decisive if other required signals are clean.","Summary":"Required checks pass (no bundle and no pump-like candlestick signature). Auxiliary signals are not contradictory. Classify as a good investment opportunity."},"result":true}

Example 2
Transaction Features:
Bundle Bot: True
Sniper Bot: True
Bump Bot: False
Comment Bot: False
Comment History:
Candlestick Chart: (chart of a spike)
{"reasoning":{"Bundle Bot":"Required check: Bundle Bot must be False. Observed = True. Since True != False, this check fails.","Candlestick Pattern":"Required check: chart should show gradual, sustained price discovery. Observed pattern resembles a spike/pump-like move, so this check fails.","Sniper Bot":"Auxiliary check: Sniper Bot ideally False. Observed = True; negative signal indicating elevated predatory early trading risk.","Bump Bot":"Auxiliary check: Bump Bot may be supportive if True. Observed = False; not supportive.","Comments":"Auxiliary check: prefer sustained, organic engagement. Observed Comment Bot = False; absent bot flags alone is not supportive without additional evidence, treat as non-decisive.","Summary":"One or more required checks fail (bundle present and pump-like price action). Auxiliary signals do not offset these failures. Classify as a poor investment opportunity."},"result":false}
)P";

constexpr std::string_view kCoinFeatures = R"P(Transaction Features:
Bundle Bot: {bundle}
Sniper Bot: {sniper}
Bump Bot: {bump}
Comment Bot: {comment}
Comment History: {comments}
Candlestick Chart: {candlestick}
)P";

constexpr std::string_view kTimingCot = R"P(Example 1
Trader Purchase Price: 4.95e-06
Trader Purchase Amount: 99.65
Trader Purchase Quantity: 6026170.61
{"reasoning":{"Trader Purchase Price":"Require purchase price < {75% percentile of the training set}. Observed = 4.95e-06, an early entry below the cut, so this check passes.","Trader Purchase Amount":"Require purchase amount < {75% percentile of the training set}. Observed = 99.65, below the cut, so this check passes.","Trader Purchase Quantity":"Require purchase quantity < {75% percentile of the training set}. Observed = 6026170.61, below the cut, so this check passes.","Summary":"Entry price, size and quantity are all within the required ranges. Classify the trade as well timed."},"result":true}

Example 2
Trader Purchase Price: 1.19e-05
Trader Purchase Amount: 661.21
Trader Purchase Quantity: 55153573.25
{"reasoning":{"Trader Purchase Price":"Require purchase price < {75% percentile of the training set}. Observed = 1.19e-05, a late entry above the cut, so this check fails.","Trader Purchase Amount":"Require purchase amount < {75% percentile of the training set}. Observed = 661.21, above the cut, so this check fails.","Trader Purchase Quantity":"Require purchase quantity < {75% percentile of the training set}. Observed = 55153573.25, above the cut, so this check fails.","Summary":"The entry is late and oversized. Classify the trade as poorly timed."},"result":false}
)P";

constexpr std::string_view kTimingFeatures = R"P(Trader Purchase Price: {px}
Trader Purchase Amount: {amount}
Trader Purchase Quantity: {qty}
)P";

constexpr std::string_view kAnswerFormat =
    R"P(Reason step by step, then answer with a single JSON object of the form {"reasoning": {...}, "result": true|false}.)P";

std::string num(const std::optional<double>& v, const char* f) {
    if (!v) return "N/A";
    char buf[64];
    std::snprintf(buf, sizeof buf, f, *v);
    return buf;
}

std::string tf(int b) { return b ? "True" : "False"; }

std::string assemble(std::string_view instruction, std::string_view cot, const std::string& filled) {
    std::string s;
    s += instruction;
    s += "\n\n";
    s += cot;
    s += "\n";
    s += filled;
    return s;
}

}  // namespace

void PromptBundle::validate_except(std::initializer_list<std::string_view> pending) const {
    static const std::regex slot(R"(\{([a-z_0-9]+)\})");
    for (const std::string* s : {&system, &user})
        for (auto it = std::sregex_iterator(s->begin(), s->end(), slot); it != std::sregex_iterator(); ++it) {
            const std::string name = (*it)[1];
            if (std::find(pending.begin(), pending.end(), name) == pending.end())
                throw Error(ErrorCode::InvalidConfig, "prompt slot {" + name + "} left unfilled");
        }
}

std::string_view comment_instruction() { return kCommentInstruction; }
std::string_view wallet_template() { return kWalletFeatures; }
std::string_view coin_template() { return kCoinFeatures; }
std::string_view timing_template() { return kTimingFeatures; }
std::string_view format_reminder() {
    return R"P(Your previous reply could not be parsed. Reply with exactly one JSON object such as {"reasoning": {...}, "result": true} and nothing else.)P";
}

std::string fill(std::string_view tmpl, std::span<const std::pair<std::string, std::string>> slots) {
    std::string out(tmpl);
    for (const auto& [k, v] : slots) {
        const std::string key = "{" + k + "}";
        for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + v.size()))
            out.replace(pos, key.size(), v);
    }
    return out;
}

std::string utc_timestamp(std::int64_t ts) {
    std::time_t t = static_cast<std::time_t>(ts);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%d %H:%M:%S", &tm);
    return buf;
}

PromptBundle comment_prompt(std::string_view comment) {
    PromptBundle b;
    b.user = std::string(kCommentInstruction) + "\n" + std::string(kCommentShots) + "\n" + std::string(comment) + "\n";
    return b;
}

PromptBundle wallet_prompt(const features::FeatureVector& f) {
    const std::vector<std::pair<std::string, std::string>> slots{
        {"t_stat", num(f.t_stat, "%.2f")},
        {"return_all", num(f.return_all, "%.2f")},
        {"return_std", num(f.return_std, "%.2f")},
        {"n_trades", std::to_string(f.n_trades)},
        {"return_1st", num(f.return_1st, "%.2f")},
        {"return_1_5", num(f.return_1_5, "%.2f")},
        {"return_6_10", num(f.return_6_10, "%.2f")},
        {"return_11_15", num(f.return_11_15, "%.2f")},
        {"t_since_last", num(f.t_since_last, "%.0f")},
        {"t_since_first", num(f.t_since_first, "%.0f")},
    };
    PromptBundle b;
    b.system = std::string(kAnswerFormat);
    b.user = assemble(kWalletInstruction, kWalletCot, fill(kWalletFeatures, slots));
    b.validate();
    return b;
}

PromptBundle coin_prompt(const features::FeatureVector& f, std::span<const chain::CommentRecord> comments,
                         const CandlestickSeries* candles, bool attach_image) {
    std::string hist;
    for (const auto& c : comments)
        hist += "\n" + utc_timestamp(c.timestamp) + " -- " + c.wallet.substr(0, 6) + ": " + c.text;
    std::string chart;
    PromptBundle b;
    if (!candles) {
        chart = "(no trades yet)";
    } else if (attach_image) {
        chart = "(attached image)";
        b.image_png = render_png(*candles);
    } else {
        chart = "\n" + candles_table(*candles);
    }
    const std::vector<std::pair<std::string, std::string>> flags{
        {"bundle", tf(f.bot_bundle)}, {"sniper", tf(f.bot_sniper)}, {"bump", tf(f.bot_bump)},
        {"comment", tf(f.bot_comment)}, {"candlestick", chart}};
    b.system = std::string(kAnswerFormat);
    b.user = assemble(kCoinInstruction, kCoinCot, fill(kCoinFeatures, flags));
    b.validate_except({"comments"});
    // comment text is user content and may itself contain braces
    const std::vector<std::pair<std::string, std::string>> text{{"comments", hist}};
    b.user = fill(b.user, text);
    return b;
}

PromptBundle timing_prompt(const features::FeatureVector& f) {
    const std::vector<std::pair<std::string, std::string>> slots{
        {"px", num(f.px, "%.2e")}, {"amount", num(f.amount, "%.2f")}, {"qty", num(f.qty, "%.2f")}};
    PromptBundle b;
    b.system = std::string(kAnswerFormat);
    // the timing agent shares the wallet agent's role text
    b.user = assemble(kWalletInstruction, kTimingCot, fill(kTimingFeatures, slots));
    b.validate();
    return b;
}

}  // namespace copyguard::agents
