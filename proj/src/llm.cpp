#include "quizgen/llm.hpp"

#include <algorithm>
#include <array>
#include <thread>

#include <spdlog/spdlog.h>

#include "quizgen/errors.hpp"
#include "quizgen/ingest.hpp"
#include "quizgen/text.hpp"

namespace quizgen {

namespace {

constexpr std::array<std::pair<Stage, std::string_view>, 6> kStageNames{{
    {Stage::map, "map"},
    {Stage::combine, "combine"},
    {Stage::reduce, "reduce"},
    {Stage::rank, "rank"},
    {Stage::generate, "generate"},
    {Stage::judge, "judge"},
}};

std::size_t prompt_estimate(const ChatRequest& req) {
    std::size_t words = text::count_words(req.system);
    for (const auto& t : req.turns) words += text::count_words(t.text);
    return estimate_tokens_for_words(words);
}

}  // namespace

std::string_view to_string(Stage s) {
    for (const auto& [stage, name] : kStageNames)
        if (stage == s) return name;
    return "unknown";
}

Stage stage_from_string(std::string_view s) {
    for (const auto& [stage, name] : kStageNames)
        if (name == s) return stage;
    throw Error("unknown stage tag: " + std::string(s));
}

const std::string& ChatRequest::last_user_text() const {
    static const std::string empty;
    for (auto it = turns.rbegin(); it != turns.rend(); ++it)
        if (it->role == "user") return it->text;
    return empty;
}

TokenUsage& TokenUsage::operator+=(const TokenUsage& o) {
    prompt_tokens += o.prompt_tokens;
    completion_tokens += o.completion_tokens;
    cached_prompt_tokens += o.cached_prompt_tokens;
    return *this;
}

void TokenLedger::append(TokenUsage usage) {
    std::lock_guard lock(mu_);
    entries_.push_back(std::move(usage));
}

std::vector<TokenUsage> TokenLedger::entries() const {
    std::lock_guard lock(mu_);
    return entries_;
}

TokenUsage TokenLedger::totals() const {
    std::lock_guard lock(mu_);
    TokenUsage t;
    for (const auto& e : entries_) t += e;
    return t;
}

std::map<std::string, TokenUsage> TokenLedger::totals_by_stage() const {
    std::lock_guard lock(mu_);
    std::map<std::string, TokenUsage> out;
    for (const auto& e : entries_) {
        auto& slot = out[e.stage_tag];
        slot.stage_tag = e.stage_tag;
        slot += e;
    }
    return out;
}

std::size_t TokenLedger::count(std::string_view stage_tag) const {
    std::lock_guard lock(mu_);
    return static_cast<std::size_t>(std::count_if(
        entries_.begin(), entries_.end(), [&](const TokenUsage& e) { return e.stage_tag == stage_tag; }));
}

std::size_t TokenLedger::size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
}

LlmClient::LlmClient(std::shared_ptr<ChatBackend> backend, ClientOptions options,
                     std::shared_ptr<TokenLedger> ledger)
    : backend_(std::move(backend)),
      options_(std::move(options)),
      ledger_(std::move(ledger)) {
    if (!backend_) throw Error("LlmClient requires a backend");
    if (!ledger_) ledger_ = std::make_shared<TokenLedger>();
    const auto cap = static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(options_.concurrency_cap, 1, 4096));
    slots_ = std::make_shared<std::counting_semaphore<4096>>(cap);
}

const std::string& LlmClient::model_for(Stage stage) const {
    auto it = options_.stage_models.find(stage);
    return it != options_.stage_models.end() ? it->second : options_.model;
}

ChatRequest LlmClient::make_request(Stage stage, std::string user_text) const {
    ChatRequest req;
    req.model = model_for(stage);
    req.tag = stage;
    req.turns.push_back(Turn{"user", std::move(user_text)});
    return req;
}

Completion LlmClient::complete(ChatRequest req) const {
    if (req.turns.empty()) throw Error("chat request has no turns");
    if (req.model.empty()) req.model = model_for(req.tag);

    slots_->acquire();
    struct Release {
        std::counting_semaphore<4096>& s;
        ~Release() { s.release(); }
    } release{*slots_};

    auto backoff = options_.retry.initial_backoff;
    for (int attempt = 0;; ++attempt) {
        try {
            BackendReply reply = backend_->send(req);
            Completion c;
            c.text = std::move(reply.text);
            if (reply.usage) {
                c.usage = *reply.usage;
            } else {
                c.usage.prompt_tokens = prompt_estimate(req);
                c.usage.completion_tokens = estimate_tokens(c.text);
            }
            c.usage.cached_prompt_tokens = std::min(c.usage.cached_prompt_tokens, c.usage.prompt_tokens);
            c.usage.stage_tag = std::string(to_string(req.tag));
            ledger_->append(c.usage);
            return c;
        } catch (const TransientError& e) {
            if (attempt >= options_.retry.max_retries) throw;
            spdlog::warn("{} request failed ({}), retry {}/{}", to_string(req.tag), e.what(), attempt + 1,
                         options_.retry.max_retries);
        } catch (const RateLimited& e) {
            if (attempt >= options_.retry.max_retries) throw;
            spdlog::warn("{} request rate limited, retry {}/{}", to_string(req.tag), attempt + 1,
                         options_.retry.max_retries);
        }
        if (backoff.count() > 0) std::this_thread::sleep_for(backoff);
        backoff = std::chrono::milliseconds(
            static_cast<long long>(static_cast<double>(backoff.count()) * options_.retry.multiplier));
    }
}

std::string request_fingerprint(const ChatRequest& req) {
    std::uint64_t h = text::fnv1a64(to_string(req.tag));
    h = text::fnv1a64(req.system, text::fnv1a64("\x1f", h));
    for (const auto& t : req.turns) {
        h = text::fnv1a64(t.role, text::fnv1a64("\x1e", h));
        h = text::fnv1a64(t.text, text::fnv1a64("\x1f", h));
    }
    return text::hex64(h);
}

}  // namespace quizgen
