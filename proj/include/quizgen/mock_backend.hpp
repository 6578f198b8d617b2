#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "quizgen/llm.hpp"

namespace quizgen {

struct ScriptedReply {
    enum class Kind { text, transient, rate_limited, auth, malformed };
    Kind kind = Kind::text;
    std::string text;
    std::optional<TokenUsage> usage;

    static ScriptedReply ok(std::string t) { return {Kind::text, std::move(t), std::nullopt}; }
    static ScriptedReply fail(Kind k) { return {k, {}, std::nullopt}; }
};

/// Matches a request and replays its replies in order; the last reply repeats.
struct ScriptRule {
    std::optional<Stage> tag;
    std::optional<std::string> fingerprint;
    std::vector<std::string> contains;  // all must occur in the conversation text
    std::optional<std::size_t> user_turns;
    std::vector<ScriptedReply> replies;
};

/// Deterministic offline backend driven by fixture rules.
///
/// Lookup order: fingerprint rules, then rules with content matchers in
/// insertion order, then per-tag defaults, then the optional responder.
/// Unmatched requests throw MalformedResponse.
///
/// Fixture file shape:
///   {"rules": [{"tag": "rank", "contains": ["..."], "user_turns": 1,
///               "replies": ["text", {"text": "...", "usage": {...}},
///                           {"error": "transient"}]}]}
class ScriptedBackend : public ChatBackend {
public:
    using Responder = std::function<std::optional<ScriptedReply>(const ChatRequest&)>;

    ScriptedBackend() = default;

    static std::shared_ptr<ScriptedBackend> from_json(const nlohmann::json& fixture);
    static std::shared_ptr<ScriptedBackend> from_file(const std::string& path);

    void add_rule(ScriptRule rule);
    /// Per-tag default that always returns `reply`.
    void on(Stage tag, std::string reply);
    void set_responder(Responder r);

    BackendReply send(const ChatRequest& req) override;

    std::vector<ChatRequest> requests() const;
    std::size_t call_count() const;

private:
    struct Slot {
        ScriptRule rule;
        std::size_t served = 0;
    };
    static bool matches(const ScriptRule& rule, const ChatRequest& req, const std::string& fp,
                        const std::string& conversation);

    mutable std::mutex mu_;
    std::vector<Slot> slots_;
    Responder responder_;
    std::vector<ChatRequest> seen_;
};

}  // namespace quizgen
