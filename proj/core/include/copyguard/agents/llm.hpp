#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "copyguard/agents/agents.hpp"
#include "copyguard/agents/prompts.hpp"
#include "copyguard/detect/detectors.hpp"

namespace copyguard::agents {

struct ChatMessage {
    std::string role;  // system | user | assistant
    std::string text;
    std::optional<std::string> image_base64;  // PNG
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    bool logprobs = true;
    int top_logprobs = 5;
};

struct TopLogprob {
    std::string token;
    double logprob = 0.0;
};

struct TokenLogprob {
    std::string token;
    double logprob = 0.0;
    std::vector<TopLogprob> top;
};

struct ChatResponse {
    std::string content;
    std::optional<std::vector<TokenLogprob>> logprobs;  // absent when the provider does not return them
};

// Implementations must be safe to call from several threads at once.
class ChatClient {
public:
    virtual ~ChatClient() = default;
    // Throws Error(TransportError) on network failure or a non-2xx status.
    virtual ChatResponse complete(const ChatRequest& request) = 0;
};

// OpenAI-compatible wire format.
std::string chat_request_json(const ChatRequest& request);
ChatResponse parse_chat_response(std::string_view body);  // Error(MalformedReply) on bad JSON

std::string base64_encode(std::span<const unsigned char> bytes);

struct HttpChatConfig {
    std::string endpoint = "https://api.openai.com";  // scheme://host[:port]
    std::string path = "/v1/chat/completions";
    std::string api_key_env = "OPENAI_API_KEY";       // empty: no Authorization header
    int timeout_seconds = 60;
};

class HttpChatClient : public ChatClient {
public:
    // Error(MissingInput) if api_key_env names an unset variable.
    explicit HttpChatClient(HttpChatConfig cfg);
    ChatResponse complete(const ChatRequest& request) override;

private:
    HttpChatConfig cfg_;
    std::string key_;
};

struct LlmOptions {
    std::string model = "gpt-4o";
    int max_retries = 3;  // transport retries after the first attempt
    std::chrono::milliseconds backoff{500};  // doubled per retry
    std::function<void(std::chrono::milliseconds)> sleep;  // default: this_thread::sleep_for
    std::size_t max_in_flight = 4;
};

struct ParsedReply {
    bool result = false;
    std::string reasoning;        // serialized "reasoning" member, empty if absent
    std::size_t result_offset = 0;  // char offset of the true/false literal in the reply
};

// First JSON object in `text` carrying a boolean "result".
std::optional<ParsedReply> parse_reply(std::string_view text);

struct ResultConfidence {
    double confidence = 0.5;  // P(TRUE)
    double raw = 0.5;         // exp(logprob) of the emitted result token
};

// nullopt when the result token cannot be located in the logprob stream.
std::optional<ResultConfidence> result_confidence(const std::vector<TokenLogprob>& tokens, std::size_t offset,
                                                  bool decision);

AgentVerdict run_llm_agent(AgentKind kind, const PromptBundle& bundle, ChatClient& client,
                           const LlmOptions& opts = {});

// Bounded by opts.max_in_flight; output order follows input.
std::vector<AgentVerdict> run_llm_batch(AgentKind kind, std::span<const PromptBundle> bundles, ChatClient& client,
                                        const LlmOptions& opts = {});

bool llm_comment_is_bot(std::string_view text, ChatClient& client, const LlmOptions& opts = {});

class LlmCommentClassifier : public detect::CommentClassifier {
public:
    LlmCommentClassifier(ChatClient& client, LlmOptions opts = {}) : client_(client), opts_(std::move(opts)) {}
    std::vector<bool> classify(std::span<const chain::CommentRecord> comments) override;

private:
    ChatClient& client_;
    LlmOptions opts_;
};

}  // namespace copyguard::agents
