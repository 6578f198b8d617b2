#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

namespace quizgen {

/// Pipeline stage that issued a request; recorded on every ledger entry.
enum class Stage { map, combine, reduce, rank, generate, judge };

std::string_view to_string(Stage s);
/// Throws Error on an unknown name.
Stage stage_from_string(std::string_view s);

struct Turn {
    std::string role;  // "user" | "assistant"
    std::string text;
};

struct ChatRequest {
    std::string model;
    std::string system;
    std::vector<Turn> turns;
    double temperature = 0.0;
    Stage tag = Stage::generate;

    /// Text of the final user turn, or empty.
    const std::string& last_user_text() const;
};

struct TokenUsage {
    std::size_t prompt_tokens = 0;
    std::size_t completion_tokens = 0;
    std::size_t cached_prompt_tokens = 0;
    std::string stage_tag;

    TokenUsage& operator+=(const TokenUsage& o);
};

struct Completion {
    std::string text;
    TokenUsage usage;
};

/// What a transport returns before the client fills in ledger bookkeeping.
struct BackendReply {
    std::string text;
    std::optional<TokenUsage> usage;  // absent when the provider reports none
};

/// Transport boundary. Implementations throw TransientError / RateLimited for
/// retryable failures and AuthError / MalformedResponse otherwise.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual BackendReply send(const ChatRequest& req) = 0;
};

/// Append-only record of token usage; safe for concurrent appends.
class TokenLedger {
public:
    void append(TokenUsage usage);
    std::vector<TokenUsage> entries() const;
    TokenUsage totals() const;
    std::map<std::string, TokenUsage> totals_by_stage() const;
    std::size_t count(std::string_view stage_tag) const;
    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::vector<TokenUsage> entries_;
};

struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{500};
    double multiplier = 2.0;
};

struct ClientOptions {
    std::string model = "gpt-4o";
    std::map<Stage, std::string> stage_models;  // per-stage override, e.g. a separate ranking model
    std::size_t concurrency_cap = 8;
    RetryPolicy retry;
};

/// Provider-agnostic chat-completion client. Bounds in-flight requests to
/// `concurrency_cap`, retries transient failures with exponential backoff and
/// records one ledger entry per successful completion.
class LlmClient {
public:
    LlmClient(std::shared_ptr<ChatBackend> backend, ClientOptions options = {},
              std::shared_ptr<TokenLedger> ledger = std::make_shared<TokenLedger>());

    Completion complete(ChatRequest req) const;

    /// Single-turn request for `stage` with the configured model.
    ChatRequest make_request(Stage stage, std::string user_text) const;

    const std::string& model_for(Stage stage) const;
    const ClientOptions& options() const noexcept { return options_; }
    TokenLedger& ledger() const noexcept { return *ledger_; }
    std::shared_ptr<TokenLedger> shared_ledger() const noexcept { return ledger_; }

private:
    std::shared_ptr<ChatBackend> backend_;
    ClientOptions options_;
    std::shared_ptr<TokenLedger> ledger_;
    std::shared_ptr<std::counting_semaphore<4096>> slots_;
};

/// Stable hash of (tag, model-independent content) used to key scripted replies.
std::string request_fingerprint(const ChatRequest& req);

}  // namespace quizgen
