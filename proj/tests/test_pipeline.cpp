#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "quizgen/embedders.hpp"
#include "quizgen/errors.hpp"
#include "quizgen/pipeline.hpp"
#include "quizgen/quiz_io.hpp"
#include "quizgen/templates.hpp"
#include "support.hpp"

using namespace quizgen;

namespace {

Document fixture_doc() { return load_plaintext_file(qt::fixture("transformer.md")); }

RunConfig savaal_config(std::size_t n = 20) {
    RunConfig cfg;
    cfg.request.n = n;
    cfg.request.method = Method::savaal;
    cfg.request.seed = 0;
    cfg.created_at = "2025-01-01T00:00:00Z";
    return cfg;
}

std::shared_ptr<const Embedder> embedder() { return std::make_shared<HashEmbedder>(64); }

nlohmann::json fixture_json() {
    std::ifstream in(qt::fixture("mock_llm.json"));
    return nlohmann::json::parse(in);
}

}  // namespace

TEST(Savaal, FixtureEndToEnd) {
    qt::MockClient m(ScriptedBackend::from_file(qt::fixture("mock_llm.json")));
    const auto doc = fixture_doc();
    const auto cfg = savaal_config();
    auto result = run(doc, cfg, m.client, embedder());

    ASSERT_EQ(result.quiz.questions.size(), 20u);
    for (const auto& q : result.quiz.questions) EXPECT_TRUE(is_valid(q));
    EXPECT_EQ(dedupe_questions(result.quiz.questions).size(), 20u);

    ASSERT_EQ(result.ideas.size(), 10u);
    std::map<std::string, int> per_idea;
    for (const auto& q : result.quiz.questions) ++per_idea[q.idea_title.value_or("")];
    for (const auto& i : result.ideas) EXPECT_EQ(per_idea[i.title], 2) << i.title;

    EXPECT_EQ(m.client.ledger().count("map"), doc.sections.size());
    EXPECT_EQ(m.client.ledger().count("combine"), 1u);
    EXPECT_EQ(m.client.ledger().count("rank"), 1u);
    EXPECT_EQ(m.client.ledger().count("generate"), 10u);
    EXPECT_EQ(result.ledger.entries.size(), m.client.ledger().size());
    EXPECT_EQ(result.quiz.usage_totals.prompt_tokens, m.client.ledger().totals().prompt_tokens);
    EXPECT_EQ(result.quiz.created_at, "2025-01-01T00:00:00Z");
}

TEST(Savaal, RankOrderApplied) {
    qt::MockClient m(ScriptedBackend::from_file(qt::fixture("mock_llm.json")));
    auto result = run(fixture_doc(), savaal_config(), m.client, embedder());
    // The scripted rank reply swaps ideas 4/5 and 7/8.
    EXPECT_EQ(result.ideas[3].title, "Masked Decoder Self-Attention");
    EXPECT_EQ(result.ideas[4].title, "Positional Encoding");
    for (std::size_t i = 0; i < result.ideas.size(); ++i) EXPECT_EQ(result.ideas[i].rank, static_cast<int>(i) + 1);
}

TEST(Savaal, GenerationPromptsStayBounded) {
    qt::MockClient m(ScriptedBackend::from_file(qt::fixture("mock_llm.json")));
    const auto cfg = savaal_config();
    auto result = run(fixture_doc(), cfg, m.client, embedder());
    const auto template_tokens = estimate_tokens(TemplateRegistry::builtin().get("savaal_generate").body);
    std::size_t checked = 0;
    for (const auto& req : m.backend->requests()) {
        if (req.tag != Stage::generate) continue;
        const auto& prompt = req.last_user_text();
        const MainIdea* idea = nullptr;
        for (const auto& i : result.ideas)
            if (prompt.find("Main Idea:\n" + i.as_text()) != std::string::npos) idea = &i;
        ASSERT_NE(idea, nullptr);
        EXPECT_LE(estimate_tokens(prompt), cfg.request.k * 256 + estimate_tokens(idea->as_text()) + template_tokens);
        // The whole document never appears in a generation prompt.
        EXPECT_LT(estimate_tokens(prompt), estimate_tokens(fixture_doc().body_text()));
        ++checked;
    }
    EXPECT_EQ(checked, 10u);
}

TEST(Savaal, ByteIdenticalAcrossRuns) {
    std::string first;
    for (int run_no = 0; run_no < 3; ++run_no) {
        qt::MockClient m(ScriptedBackend::from_file(qt::fixture("mock_llm.json")), qt::fast_options(run_no + 1));
        auto text = quiz_to_json(run(fixture_doc(), savaal_config(), m.client, embedder()).quiz);
        if (run_no == 0) first = text;
        EXPECT_EQ(text, first);
    }
}

TEST(Savaal, SeedChangesOnlyChoiceOrder) {
    qt::MockClient a(ScriptedBackend::from_file(qt::fixture("mock_llm.json")));
    qt::MockClient b(ScriptedBackend::from_file(qt::fixture("mock_llm.json")));
    auto cfg = savaal_config();
    auto qa = run(fixture_doc(), cfg, a.client, embedder()).quiz;
    cfg.request.seed = 99;
    auto qb = run(fixture_doc(), cfg, b.client, embedder()).quiz;
    ASSERT_EQ(qa.questions.size(), qb.questions.size());
    bool any_moved = false;
    for (std::size_t i = 0; i < qa.questions.size(); ++i) {
        EXPECT_EQ(qa.questions[i].stem, qb.questions[i].stem);
        EXPECT_EQ(qa.questions[i].correct_text(), qb.questions[i].correct_text());
        any_moved |= qa.questions[i].correct_index != qb.questions[i].correct_index;
    }
    EXPECT_TRUE(any_moved);
}

TEST(Savaal, LateInteractionRetrieval) {
    qt::MockClient m(ScriptedBackend::from_file(qt::fixture("mock_llm.json")));
    auto cfg = savaal_config();
    cfg.retrieval_mode = ScoringMode::late_interaction;
    EXPECT_EQ(run(fixture_doc(), cfg, m.client, embedder()).quiz.questions.size(), 20u);
}

TEST(Savaal, FewerQuestionsThanIdeas) {
    qt::MockClient m(ScriptedBackend::from_file(qt::fixture("mock_llm.json")));
    auto result = run(fixture_doc(), savaal_config(5), m.client, embedder());
    EXPECT_EQ(result.quiz.questions.size(), 5u);
    EXPECT_EQ(m.client.ledger().count("generate"), 5u);
    std::set<std::string> ideas;
    for (const auto& q : result.quiz.questions) ideas.insert(*q.idea_title);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_TRUE(ideas.count(result.ideas[i].title));
}

TEST(Methods, DirectUsesTwoTurnsForForty) {
    qt::MockClient m(ScriptedBackend::from_file(qt::fixture("mock_llm.json")));
    auto cfg = savaal_config(40);
    cfg.request.method = Method::direct;
    auto result = run(fixture_doc(), cfg, m.client, embedder());
    EXPECT_EQ(result.quiz.questions.size(), 40u);
    EXPECT_GE(m.client.ledger().count("generate"), 2u);
    EXPECT_EQ(m.client.ledger().count("map"), 0u);
    EXPECT_EQ(result.quiz.method, Method::direct);
}

TEST(Methods, Summary) {
    qt::MockClient m(ScriptedBackend::from_file(qt::fixture("mock_llm.json")));
    auto cfg = savaal_config();
    cfg.request.method = Method::summary;
    const auto doc = fixture_doc();
    auto result = run(doc, cfg, m.client, embedder());
    EXPECT_EQ(result.quiz.questions.size(), 20u);
    ASSERT_TRUE(result.summary.has_value());
    EXPECT_EQ(m.client.ledger().count("map"), doc.sections.size());
    EXPECT_EQ(m.client.ledger().count("reduce"), 1u);
    ASSERT_TRUE(result.ledger.summary_tokens.has_value());
    EXPECT_EQ(*result.ledger.summary_tokens, estimate_tokens(*result.summary));
}

TEST(Methods, SinglePrompt) {
    qt::MockClient m(ScriptedBackend::from_file(qt::fixture("mock_llm.json")));
    auto cfg = savaal_config();
    cfg.request.method = Method::single_prompt;
    auto result = run(fixture_doc(), cfg, m.client, embedder());
    EXPECT_EQ(result.quiz.questions.size(), 20u);
    EXPECT_EQ(m.client.ledger().size(), 1u);
}

TEST(Errors, StageNamedOnFailure) {
    qt::MockClient empty;
    try {
        run(fixture_doc(), savaal_config(), empty.client, embedder());
        FAIL();
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "map");
    }

    auto j = fixture_json();
    auto& rules = j["rules"];
    for (auto it = rules.begin(); it != rules.end();) {
        const bool savaal_gen = (*it)["tag"] == "generate" && it->contains("contains") &&
                                (*it)["contains"][0].get<std::string>().rfind("Main Idea:", 0) == 0;
        it = savaal_gen ? rules.erase(it) : it + 1;
    }
    rules.push_back({{"tag", "generate"}, {"reply", "I cannot help with that."}});
    qt::MockClient broken(ScriptedBackend::from_json(j));
    try {
        run(fixture_doc(), savaal_config(), broken.client, embedder());
        FAIL();
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "generate");
    }

    qt::MockClient m;
    auto cfg = savaal_config();
    cfg.request.k = 0;
    try {
        run(fixture_doc(), cfg, m.client, embedder());
        FAIL();
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "config");
    }
}

TEST(ShuffleAll, OneGeneratorInOrder) {
    auto qs = qt::distinct_questions(8);
    auto a = shuffle_all(qs, 5);
    std::mt19937_64 rng(5);
    for (std::size_t i = 0; i < qs.size(); ++i) {
        auto expect = shuffle_choices(qs[i], rng);
        EXPECT_EQ(a[i].choices, expect.choices);
        EXPECT_EQ(a[i].correct_text(), qs[i].correct_text());
    }
}
