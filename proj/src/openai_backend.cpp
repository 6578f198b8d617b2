#include "quizgen/openai_backend.hpp"

#include <cstdlib>

#include "http_util.hpp"
#include "quizgen/errors.hpp"

namespace quizgen {

using json = nlohmann::json;

OpenAiConfig OpenAiConfig::from_env() {
    OpenAiConfig cfg;
    if (const char* url = std::getenv("LLM_BASE_URL"); url && *url) cfg.base_url = url;
    if (const char* key = std::getenv("LLM_API_KEY"); key && *key) cfg.api_key = key;
    return cfg;
}

OpenAiBackend::OpenAiBackend(OpenAiConfig config) : config_(std::move(config)) {}

json OpenAiBackend::build_payload(const ChatRequest& req) {
    json messages = json::array();
    if (!req.system.empty()) messages.push_back({{"role", "system"}, {"content", req.system}});
    for (const auto& t : req.turns) messages.push_back({{"role", t.role}, {"content", t.text}});
    return json{{"model", req.model}, {"messages", std::move(messages)}, {"temperature", req.temperature}};
}

BackendReply OpenAiBackend::parse_response(const std::string& body) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error& e) {
        throw MalformedResponse(std::string("response is not JSON: ") + e.what());
    }
    const auto* content = [&]() -> const json* {
        if (!doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty()) return nullptr;
        const auto& choice = doc["choices"][0];
        if (!choice.contains("message") || !choice["message"].contains("content")) return nullptr;
        const auto& c = choice["message"]["content"];
        return c.is_string() ? &c : nullptr;
    }();
    if (!content) throw MalformedResponse("response has no choices[0].message.content");

    BackendReply reply;
    reply.text = content->get<std::string>();
    if (doc.contains("usage") && doc["usage"].is_object()) {
        const auto& u = doc["usage"];
        TokenUsage usage;
        usage.prompt_tokens = u.value("prompt_tokens", 0u);
        usage.completion_tokens = u.value("completion_tokens", 0u);
        if (u.contains("prompt_tokens_details") && u["prompt_tokens_details"].is_object())
            usage.cached_prompt_tokens = u["prompt_tokens_details"].value("cached_tokens", 0u);
        reply.usage = usage;
    }
    return reply;
}

BackendReply OpenAiBackend::send(const ChatRequest& req) {
    if (config_.api_key.empty()) throw AuthError("LLM_API_KEY is not set");

    const auto url = detail::split_url(config_.base_url);
    auto cli = detail::make_client(url.origin, config_.timeout_seconds);
    httplib::Headers headers = {{"Authorization", "Bearer " + config_.api_key}};

    auto res = cli->Post(url.path + "/chat/completions", headers, build_payload(req).dump(), "application/json");
    if (!res) throw TransientError("transport failure: " + httplib::to_string(res.error()));

    const int status = res->status;
    if (status == 401 || status == 403) throw AuthError("provider rejected credentials (HTTP " + std::to_string(status) + ")");
    if (status == 429) throw RateLimited("provider rate limit (HTTP 429)");
    if (status == 408 || status >= 500) throw TransientError("provider error HTTP " + std::to_string(status));
    if (status != 200) throw LlmError("provider returned HTTP " + std::to_string(status) + ": " + res->body);
    return parse_response(res->body);
}

}  // namespace quizgen
