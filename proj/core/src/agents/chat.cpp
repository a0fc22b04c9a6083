#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <openssl/evp.h>

#include <cstdlib>
#include <nlohmann/json.hpp>

#include "copyguard/agents/llm.hpp"
#include "copyguard/common/error.hpp"

namespace copyguard::agents {

using nlohmann::json;

std::string base64_encode(std::span<const unsigned char> bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                  static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::string chat_request_json(const ChatRequest& r) {
    json msgs = json::array();
    for (const auto& m : r.messages) {
        if (!m.image_base64) {
            msgs.push_back({{"role", m.role}, {"content", m.text}});
            continue;
        }
        json parts = json::array();
        parts.push_back({{"type", "text"}, {"text", m.text}});
        parts.push_back(
            {{"type", "image_url"}, {"image_url", {{"url", "data:image/png;base64," + *m.image_base64}}}});
        msgs.push_back({{"role", m.role}, {"content", std::move(parts)}});
    }
    json body{{"model", r.model}, {"messages", std::move(msgs)}, {"temperature", r.temperature}};
    if (r.logprobs) {
        body["logprobs"] = true;
        body["top_logprobs"] = r.top_logprobs;
    }
    return body.dump();
}

ChatResponse parse_chat_response(std::string_view body) {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw Error(ErrorCode::MalformedReply, "chat response is not a JSON object");
    try {
        const auto& choice = j.at("choices").at(0);
        ChatResponse out;
        const auto& content = choice.at("message").at("content");
        out.content = content.is_string() ? content.get<std::string>() : std::string();
        if (choice.contains("logprobs") && choice["logprobs"].is_object() &&
            choice["logprobs"].contains("content") && choice["logprobs"]["content"].is_array()) {
            std::vector<TokenLogprob> toks;
            for (const auto& t : choice["logprobs"]["content"]) {
                TokenLogprob tl{t.at("token").get<std::string>(), t.at("logprob").get<double>(), {}};
                if (t.contains("top_logprobs") && t["top_logprobs"].is_array())
                    for (const auto& c : t["top_logprobs"])
                        tl.top.push_back({c.at("token").get<std::string>(), c.at("logprob").get<double>()});
                toks.push_back(std::move(tl));
            }
            out.logprobs = std::move(toks);
        }
        return out;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedReply, std::string("chat response: ") + e.what());
    }
}

HttpChatClient::HttpChatClient(HttpChatConfig cfg) : cfg_(std::move(cfg)) {
    if (!cfg_.api_key_env.empty()) {
        const char* v = std::getenv(cfg_.api_key_env.c_str());
        if (!v || !*v) throw Error(ErrorCode::MissingInput, "environment variable " + cfg_.api_key_env + " is not set");
        key_ = v;
    }
}

ChatResponse HttpChatClient::complete(const ChatRequest& request) {
    httplib::Client cli(cfg_.endpoint);
    if (!cli.is_valid()) throw Error(ErrorCode::InvalidConfig, "bad chat endpoint " + cfg_.endpoint);
    cli.set_connection_timeout(cfg_.timeout_seconds, 0);
    cli.set_read_timeout(cfg_.timeout_seconds, 0);
    cli.set_write_timeout(cfg_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!key_.empty()) headers.emplace("Authorization", "Bearer " + key_);
    auto res = cli.Post(cfg_.path, headers, chat_request_json(request), "application/json");
    if (!res) throw Error(ErrorCode::TransportError, "chat request failed: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
        throw Error(ErrorCode::TransportError, "chat endpoint returned HTTP " + std::to_string(res->status));
    return parse_chat_response(res->body);
}

}  // namespace copyguard::agents
