#include "quizgen/mock_backend.hpp"

#include <algorithm>
#include <fstream>

#include "quizgen/errors.hpp"

namespace quizgen {

using json = nlohmann::json;

namespace {

ScriptedReply reply_from_json(const json& j) {
    if (j.is_string()) return ScriptedReply::ok(j.get<std::string>());
    if (!j.is_object()) throw SchemaError("scripted reply must be a string or object");
    if (j.contains("error")) {
        const auto e = j["error"].get<std::string>();
        if (e == "transient") return ScriptedReply::fail(ScriptedReply::Kind::transient);
        if (e == "rate_limited") return ScriptedReply::fail(ScriptedReply::Kind::rate_limited);
        if (e == "auth") return ScriptedReply::fail(ScriptedReply::Kind::auth);
        if (e == "malformed") return ScriptedReply::fail(ScriptedReply::Kind::malformed);
        throw SchemaError("unknown scripted error kind: " + e);
    }
    ScriptedReply r = ScriptedReply::ok(j.at("text").get<std::string>());
    if (j.contains("usage")) {
        const auto& u = j["usage"];
        TokenUsage usage;
        usage.prompt_tokens = u.value("prompt_tokens", 0u);
        usage.completion_tokens = u.value("completion_tokens", 0u);
        usage.cached_prompt_tokens = u.value("cached_prompt_tokens", 0u);
        r.usage = usage;
    }
    return r;
}

std::string conversation_text(const ChatRequest& req) {
    std::string out = req.system;
    for (const auto& t : req.turns) {
        out += '\n';
        out += t.text;
    }
    return out;
}

}  // namespace

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_json(const json& fixture) {
    auto backend = std::make_shared<ScriptedBackend>();
    if (!fixture.contains("rules") || !fixture["rules"].is_array())
        throw SchemaError("mock fixture needs a \"rules\" array");
    for (const auto& jr : fixture["rules"]) {
        ScriptRule rule;
        if (jr.contains("tag")) rule.tag = stage_from_string(jr["tag"].get<std::string>());
        if (jr.contains("fingerprint")) rule.fingerprint = jr["fingerprint"].get<std::string>();
        if (jr.contains("contains")) {
            if (jr["contains"].is_string()) {
                rule.contains.push_back(jr["contains"].get<std::string>());
            } else {
                rule.contains = jr["contains"].get<std::vector<std::string>>();
            }
        }
        if (jr.contains("user_turns")) rule.user_turns = jr["user_turns"].get<std::size_t>();
        if (jr.contains("reply")) rule.replies.push_back(reply_from_json(jr["reply"]));
        if (jr.contains("replies"))
            for (const auto& r : jr["replies"]) rule.replies.push_back(reply_from_json(r));
        if (rule.replies.empty()) throw SchemaError("mock rule without replies");
        backend->add_rule(std::move(rule));
    }
    return backend;
}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open mock fixture: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw SchemaError("mock fixture " + path + " is not valid JSON: " + e.what());
    }
    return from_json(j);
}

void ScriptedBackend::add_rule(ScriptRule rule) {
    if (rule.replies.empty()) throw Error("scripted rule needs at least one reply");
    std::lock_guard lock(mu_);
    slots_.push_back(Slot{std::move(rule), 0});
}

void ScriptedBackend::on(Stage tag, std::string reply) {
    ScriptRule rule;
    rule.tag = tag;
    rule.replies.push_back(ScriptedReply::ok(std::move(reply)));
    add_rule(std::move(rule));
}

void ScriptedBackend::set_responder(Responder r) {
    std::lock_guard lock(mu_);
    responder_ = std::move(r);
}

bool ScriptedBackend::matches(const ScriptRule& rule, const ChatRequest& req, const std::string& fp,
                              const std::string& conversation) {
    if (rule.tag && *rule.tag != req.tag) return false;
    if (rule.fingerprint && *rule.fingerprint != fp) return false;
    if (rule.user_turns) {
        auto users = static_cast<std::size_t>(std::count_if(
            req.turns.begin(), req.turns.end(), [](const Turn& t) { return t.role == "user"; }));
        if (users != *rule.user_turns) return false;
    }
    return std::all_of(rule.contains.begin(), rule.contains.end(),
                       [&](const std::string& s) { return conversation.find(s) != std::string::npos; });
}

BackendReply ScriptedBackend::send(const ChatRequest& req) {
    const auto fp = request_fingerprint(req);
    const auto conversation = conversation_text(req);

    std::optional<ScriptedReply> chosen;
    Responder responder;
    {
        std::lock_guard lock(mu_);
        seen_.push_back(req);

        auto pick = [&](auto&& pred) -> bool {
            for (auto& slot : slots_) {
                if (!pred(slot.rule) || !matches(slot.rule, req, fp, conversation)) continue;
                const auto idx = std::min(slot.served, slot.rule.replies.size() - 1);
                ++slot.served;
                chosen = slot.rule.replies[idx];
                return true;
            }
            return false;
        };
        pick([](const ScriptRule& r) { return r.fingerprint.has_value(); }) ||
            pick([](const ScriptRule& r) { return !r.fingerprint && (!r.contains.empty() || r.user_turns); }) ||
            pick([](const ScriptRule& r) { return !r.fingerprint && r.contains.empty() && !r.user_turns; });
        if (!chosen) responder = responder_;
    }
    if (!chosen && responder) chosen = responder(req);
    if (!chosen) {
        throw MalformedResponse("no scripted reply for " + std::string(to_string(req.tag)) + " request " + fp);
    }

    switch (chosen->kind) {
        case ScriptedReply::Kind::transient: throw TransientError("scripted transient failure");
        case ScriptedReply::Kind::rate_limited: throw RateLimited("scripted rate limit");
        case ScriptedReply::Kind::auth: throw AuthError("scripted auth failure");
        case ScriptedReply::Kind::malformed: throw MalformedResponse("scripted malformed response");
        case ScriptedReply::Kind::text: break;
    }
    return BackendReply{chosen->text, chosen->usage};
}

std::vector<ChatRequest> ScriptedBackend::requests() const {
    std::lock_guard lock(mu_);
    return seen_;
}

std::size_t ScriptedBackend::call_count() const {
    std::lock_guard lock(mu_);
    return seen_.size();
}

}  // namespace quizgen
