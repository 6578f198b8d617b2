#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "quizgen/llm.hpp"

namespace quizgen {

struct OpenAiConfig {
    std::string base_url = "https://api.openai.com/v1";
    std::string api_key;
    int timeout_seconds = 120;

    /// LLM_BASE_URL / LLM_API_KEY, keeping defaults for unset variables.
    static OpenAiConfig from_env();
};

/// OpenAI-compatible `POST {base_url}/chat/completions` transport.
class OpenAiBackend : public ChatBackend {
public:
    explicit OpenAiBackend(OpenAiConfig config);

    BackendReply send(const ChatRequest& req) override;

    static nlohmann::json build_payload(const ChatRequest& req);
    /// Throws MalformedResponse when the body lacks choices[0].message.content.
    static BackendReply parse_response(const std::string& body);

private:
    OpenAiConfig config_;
};

}  // namespace quizgen
