#include "quizgen/pipeline.hpp"

#include <chrono>
#include <random>

#include <spdlog/spdlog.h>

#include "quizgen/errors.hpp"
#include "quizgen/parallel.hpp"

namespace quizgen {

namespace {

template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

struct IdeaWork {
    MainIdea idea;
    std::vector<Passage> passages;
};

std::vector<Question> generate_round(const LlmClient& llm, const std::vector<IdeaWork>& work,
                                     const std::vector<IdeaAllocation>& alloc, const RunConfig& cfg,
                                     const std::string& doc_id) {
    auto per_idea = parallel_map(alloc.size(), llm.options().concurrency_cap, [&](std::size_t i) {
        std::vector<Question> qs;
        if (alloc[i].count == 0) return qs;
        const auto& w = work[i];
        qs = generate_for_idea(llm, w.idea, w.passages, alloc[i].count, doc_id);
        if (cfg.request.refine) {
            for (auto& q : qs) {
                try {
                    q = refine_choices(llm, q, w.idea, w.passages, true);
                } catch (const RefineViolation& e) {
                    spdlog::warn("keeping unrefined question: {}", e.what());
                    q = e.original();
                }
            }
        }
        return qs;
    });
    std::vector<Question> out;
    for (auto& qs : per_idea) out.insert(out.end(), qs.begin(), qs.end());
    return out;
}

std::vector<Question> run_savaal(const Document& doc, const RunConfig& cfg, const LlmClient& llm,
                                 const std::shared_ptr<const Embedder>& embedder, std::vector<MainIdea>& ideas_out) {
    const auto notes = in_stage("map", [&] { return map_sections(llm, doc); });
    const auto combined = in_stage("combine", [&] { return combine(llm, notes, cfg.context_window_tokens); });
    auto ideas = in_stage("reduce", [&] { return reduce_ideas(llm, combined, cfg.context_window_tokens, doc.id); });
    ideas = in_stage("rank", [&] { return rank_ideas(llm, std::move(ideas)); });
    ideas_out = ideas;

    const auto alloc = allocate_questions(cfg.request.n, ideas);
    std::vector<IdeaWork> work = in_stage("retrieval", [&] {
        auto index = PassageIndex::build(chunk_passages(doc, cfg.chunk_target_tokens, cfg.chunk_overlap_tokens),
                                         embedder, cfg.retrieval_mode);
        const RetrievalConfig rc{cfg.request.k, cfg.retrieval_mode};
        std::vector<IdeaWork> w;
        for (const auto& a : alloc) w.push_back({a.idea, a.count ? retrieve_top_k(index, a.idea, rc) : std::vector<Passage>{}});
        return w;
    });

    return in_stage("generate", [&] {
        auto qs = dedupe_questions(generate_round(llm, work, alloc, cfg, doc.id));
        // Ideas that received questions, in rank order, share any shortfall.
        std::vector<IdeaWork> active;
        std::vector<MainIdea> active_ideas;
        for (std::size_t i = 0; i < alloc.size(); ++i) {
            if (alloc[i].count == 0) continue;
            active.push_back(work[i]);
            active_ideas.push_back(work[i].idea);
        }
        for (int round = 0; round < cfg.topup_rounds && qs.size() < cfg.request.n; ++round) {
            const auto deficit = cfg.request.n - qs.size();
            spdlog::info("{} duplicate questions removed; generating replacements", deficit);
            auto extra = generate_round(llm, active, allocate_questions(deficit, active_ideas), cfg, doc.id);
            qs.insert(qs.end(), extra.begin(), extra.end());
            qs = dedupe_questions(qs);
        }
        if (qs.size() < cfg.request.n)
            throw InsufficientQuestions("only " + std::to_string(qs.size()) + " unique questions of " +
                                        std::to_string(cfg.request.n));
        qs.resize(cfg.request.n);
        return qs;
    });
}

std::string now_iso() {
    return iso8601_utc(std::chrono::system_clock::to_time_t(std::chrono::system_clock::now()));
}

}  // namespace

std::vector<Question> shuffle_all(std::vector<Question> qs, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (auto& q : qs) q = shuffle_choices(std::move(q), rng);
    return qs;
}

RunResult run(const Document& doc, const RunConfig& cfg, const LlmClient& llm,
              std::shared_ptr<const Embedder> embedder) {
    in_stage("config", [&] {
        cfg.request.validate();
        if (doc.sections.empty()) throw EmptyDocument("document has no sections");
        return 0;
    });

    RunResult result;
    std::vector<Question> qs;
    const auto& req = cfg.request;
    switch (req.method) {
        case Method::savaal:
            qs = run_savaal(doc, cfg, llm, embedder, result.ideas);
            break;
        case Method::direct:
            qs = in_stage("generate", [&] { return generate_direct(llm, doc, req); });
            break;
        case Method::summary: {
            const auto summary = in_stage("summary", [&] { return summarize_map_reduce(llm, doc); });
            result.summary = summary;
            qs = in_stage("generate", [&] { return generate_from_summary(llm, doc, summary, req); });
            break;
        }
        case Method::single_prompt:
            qs = in_stage("generate", [&] { return generate_single_prompt(llm, doc, req); });
            break;
    }
    qs = dedupe_questions(qs);

    Quiz& quiz = result.quiz;
    quiz.doc_id = doc.id;
    quiz.title = doc.title;
    quiz.method = req.method;
    quiz.model = cfg.model;
    quiz.seed = req.seed;
    quiz.questions = shuffle_all(std::move(qs), req.seed);
    quiz.usage_totals = llm.ledger().totals();
    quiz.created_at = cfg.created_at.empty() ? now_iso() : cfg.created_at;

    LedgerFile& ledger = result.ledger;
    ledger.doc_id = doc.id;
    ledger.method = req.method;
    ledger.n = req.n;
    ledger.model = cfg.model;
    ledger.doc_tokens = estimate_tokens(doc.body_text());
    if (result.summary) ledger.summary_tokens = estimate_tokens(*result.summary);
    ledger.entries = llm.ledger().entries();
    return result;
}

}  // namespace quizgen
