#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>
#include <thread>

#include <nlohmann/json.hpp>

#include "copyguard/agents/llm.hpp"
#include "copyguard/common/error.hpp"
#include "copyguard/common/parallel.hpp"

namespace copyguard::agents {

using nlohmann::json;

namespace {

// end of the balanced object starting at `from`, string-aware
std::optional<std::size_t> object_end(std::string_view s, std::size_t from) {
    int depth = 0;
    bool in_str = false, esc = false;
    for (std::size_t i = from; i < s.size(); ++i) {
        const char c = s[i];
        if (in_str) {
            if (esc) esc = false;
            else if (c == '\\') esc = true;
            else if (c == '"') in_str = false;
            continue;
        }
        if (c == '"') in_str = true;
        else if (c == '{') ++depth;
        else if (c == '}' && --depth == 0) return i + 1;
    }
    return std::nullopt;
}

std::string bare(std::string_view tok) {
    std::string t;
    for (char c : tok)
        if (std::isalpha(static_cast<unsigned char>(c))) t.push_back(static_cast<char>(std::tolower(c)));
    return t;
}

ChatResponse call_with_retry(ChatClient& client, const ChatRequest& req, const LlmOptions& opts) {
    auto delay = opts.backoff;
    for (int attempt = 0;; ++attempt) {
        try {
            return client.complete(req);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::TransportError || attempt >= opts.max_retries) throw;
        }
        if (opts.sleep) opts.sleep(delay);
        else std::this_thread::sleep_for(delay);
        delay *= 2;
    }
}

ChatRequest initial_request(const PromptBundle& b, const LlmOptions& opts) {
    ChatRequest req;
    req.model = opts.model;
    if (!b.system.empty()) req.messages.push_back({"system", b.system, std::nullopt});
    ChatMessage user{"user", b.user, std::nullopt};
    if (b.image_png) user.image_base64 = base64_encode(*b.image_png);
    req.messages.push_back(std::move(user));
    return req;
}

struct Exchange {
    ChatResponse resp;
    ParsedReply parsed;
};

Exchange exchange(const PromptBundle& bundle, ChatClient& client, const LlmOptions& opts) {
    auto req = initial_request(bundle, opts);
    auto resp = call_with_retry(client, req, opts);
    if (auto p = parse_reply(resp.content)) return {std::move(resp), *p};
    req.messages.push_back({"assistant", resp.content, std::nullopt});
    req.messages.push_back({"user", std::string(format_reminder()), std::nullopt});
    resp = call_with_retry(client, req, opts);
    if (auto p = parse_reply(resp.content)) return {std::move(resp), *p};
    throw Error(ErrorCode::MalformedReply, "reply has no JSON object with a boolean \"result\" after a reprompt");
}

}  // namespace

std::optional<ParsedReply> parse_reply(std::string_view text) {
    static const std::regex result_re(R"re("result"\s*:\s*(true|false))re");
    for (std::size_t open = text.find('{'); open != std::string_view::npos; open = text.find('{', open + 1)) {
        const auto end = object_end(text, open);
        if (!end) continue;
        const std::string obj(text.substr(open, *end - open));
        json j = json::parse(obj, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("result") || !j["result"].is_boolean()) continue;
        ParsedReply out;
        out.result = j["result"].get<bool>();
        if (j.contains("reasoning"))
            out.reasoning = j["reasoning"].is_string() ? j["reasoning"].get<std::string>() : j["reasoning"].dump();
        std::size_t last = std::string::npos;
        for (auto it = std::sregex_iterator(obj.begin(), obj.end(), result_re); it != std::sregex_iterator(); ++it)
            last = static_cast<std::size_t>(it->position(1));
        if (last == std::string::npos) continue;
        out.result_offset = open + last;
        return out;
    }
    return std::nullopt;
}

std::optional<ResultConfidence> result_confidence(const std::vector<TokenLogprob>& tokens, std::size_t offset,
                                                  bool decision) {
    std::size_t pos = 0;
    for (const auto& t : tokens) {
        const std::size_t end = pos + t.token.size();
        if (offset >= pos && offset < end) {
            const std::string emitted = bare(t.token);
            if (emitted != "true" && emitted != "false") return std::nullopt;
            ResultConfidence rc;
            const double p = std::exp(t.logprob);
            rc.raw = p;
            std::optional<double> pt, pf;
            for (const auto& c : t.top) {
                const auto b = bare(c.token);
                if (b == "true" && !pt) pt = std::exp(c.logprob);
                if (b == "false" && !pf) pf = std::exp(c.logprob);
            }
            if (pt && pf && *pt + *pf > 0)
                rc.confidence = *pt / (*pt + *pf);
            else
                rc.confidence = decision ? p : 1.0 - p;
            rc.confidence = std::clamp(rc.confidence, 0.0, 1.0);
            return rc;
        }
        pos = end;
    }
    return std::nullopt;
}

AgentVerdict run_llm_agent(AgentKind kind, const PromptBundle& bundle, ChatClient& client, const LlmOptions& opts) {
    auto ex = exchange(bundle, client, opts);
    AgentVerdict v;
    v.agent = kind;
    v.decision = ex.parsed.result;
    v.reasoning = ex.parsed.reasoning;
    std::optional<ResultConfidence> rc;
    if (ex.resp.logprobs) rc = result_confidence(*ex.resp.logprobs, ex.parsed.result_offset, v.decision);
    if (rc) {
        v.confidence = rc->confidence;
        v.raw_confidence = rc->raw;
    } else {
        v.confidence = v.decision ? 0.9 : 0.1;
        v.logprobs_unavailable = true;
    }
    return v;
}

std::vector<AgentVerdict> run_llm_batch(AgentKind kind, std::span<const PromptBundle> bundles, ChatClient& client,
                                        const LlmOptions& opts) {
    std::vector<AgentVerdict> out(bundles.size());
    parallel_for(bundles.size(), std::max<std::size_t>(1, opts.max_in_flight),
                 [&](std::size_t i) { out[i] = run_llm_agent(kind, bundles[i], client, opts); });
    return out;
}

bool llm_comment_is_bot(std::string_view text, ChatClient& client, const LlmOptions& opts) {
    return exchange(comment_prompt(text), client, opts).parsed.result;
}

std::vector<bool> LlmCommentClassifier::classify(std::span<const chain::CommentRecord> comments) {
    std::vector<char> flags(comments.size(), 0);
    parallel_for(comments.size(), std::max<std::size_t>(1, opts_.max_in_flight),
                 [&](std::size_t i) { flags[i] = llm_comment_is_bot(comments[i].text, client_, opts_) ? 1 : 0; });
    return {flags.begin(), flags.end()};
}

}  // namespace copyguard::agents
