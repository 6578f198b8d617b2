#include <gtest/gtest.h>

#include <functional>

#include <nlohmann/json.hpp>

#include "quizgen/errors.hpp"
#include "quizgen/quiz_io.hpp"
#include "support.hpp"

using namespace quizgen;

namespace {

Quiz sample_quiz() {
    Quiz q;
    q.doc_id = "doc-1";
    q.title = "Sample";
    q.method = Method::direct;
    q.model = "gpt-4o";
    q.seed = 7;
    q.created_at = "2025-01-02T03:04:05Z";
    q.questions = qt::distinct_questions(3);
    q.questions[1].idea_title = "An idea";
    q.questions[1].passage_ids = {"p1", "p2"};
    for (auto& x : q.questions) x.method = Method::direct;
    q.usage_totals.prompt_tokens = 10;
    q.usage_totals.completion_tokens = 5;
    return q;
}

std::string mutate(const std::string& json, const std::function<void(nlohmann::ordered_json&)>& fn) {
    auto j = nlohmann::ordered_json::parse(json);
    fn(j);
    return j.dump();
}

}  // namespace

TEST(QuizJson, RoundTrip) {
    const auto q = sample_quiz();
    const auto text = quiz_to_json(q);
    const auto back = quiz_from_json(text);
    EXPECT_EQ(back.doc_id, q.doc_id);
    EXPECT_EQ(back.method, Method::direct);
    EXPECT_EQ(back.seed, 7u);
    ASSERT_EQ(back.questions.size(), 3u);
    EXPECT_EQ(back.questions[1].idea_title, "An idea");
    EXPECT_FALSE(back.questions[0].idea_title.has_value());
    EXPECT_EQ(back.questions[1].passage_ids, (std::vector<std::string>{"p1", "p2"}));
    EXPECT_EQ(back.usage_totals.prompt_tokens, 10u);
    EXPECT_EQ(quiz_to_json(back), text);
}

TEST(QuizJson, StableKeyOrder) {
    const auto text = quiz_to_json(sample_quiz());
    const std::vector<std::string> keys{"\"version\"", "\"doc_id\"", "\"title\"", "\"method\"", "\"model\"",
                                        "\"seed\"", "\"created_at\"", "\"questions\"", "\"usage\""};
    std::size_t last = 0;
    for (const auto& k : keys) {
        const auto pos = text.find(k);
        ASSERT_NE(pos, std::string::npos) << k;
        EXPECT_GE(pos, last) << k;
        last = pos;
    }
    EXPECT_EQ(text.back(), '\n');
    EXPECT_NE(text.find("\"version\": \"1\""), std::string::npos);
}

TEST(QuizJson, SchemaErrorsNameTheField) {
    const auto good = quiz_to_json(sample_quiz());
    auto expect_error = [](const std::string& text, const std::string& fragment) {
        try {
            quiz_from_json(text);
            ADD_FAILURE() << "no error for " << fragment;
        } catch (const SchemaError& e) {
            EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
        }
    };
    expect_error("{not json", "not valid JSON");
    expect_error("[]", "expected an object");
    expect_error(mutate(good, [](auto& j) { j.erase("doc_id"); }), "doc_id");
    expect_error(mutate(good, [](auto& j) { j["version"] = "2"; }), "version");
    expect_error(mutate(good, [](auto& j) { j["method"] = "magic"; }), "method");
    expect_error(mutate(good, [](auto& j) { j["seed"] = -1; }), "seed");
    expect_error(mutate(good, [](auto& j) { j["questions"][0]["choices"].erase(0); }), "questions[0].choices");
    expect_error(mutate(good, [](auto& j) { j["questions"][2]["correct_index"] = 4; }), "questions[2]");
    expect_error(mutate(good, [](auto& j) { j["questions"][1]["choices"][1] = j["questions"][1]["choices"][0]; }),
                 "duplicate choices");
    expect_error(mutate(good, [](auto& j) { j["questions"][1]["id"] = j["questions"][0]["id"]; }), "duplicate question id");
    expect_error(mutate(good, [](auto& j) { j.erase("usage"); }), "usage");
}

TEST(QuizId, DependsOnContent) {
    auto a = sample_quiz();
    auto b = sample_quiz();
    EXPECT_EQ(quiz_id(a), quiz_id(b));
    b.seed = 8;
    EXPECT_NE(quiz_id(a), quiz_id(b));
}

TEST(LedgerJson, RoundTripAndTotals) {
    LedgerFile l;
    l.doc_id = "d";
    l.method = Method::summary;
    l.n = 20;
    l.model = "m";
    l.doc_tokens = 1000;
    l.summary_tokens = 120;
    for (int i = 0; i < 3; ++i) {
        TokenUsage u;
        u.prompt_tokens = 100;
        u.completion_tokens = 50;
        u.cached_prompt_tokens = 10;
        u.stage_tag = i ? "generate" : "map";
        l.entries.push_back(u);
    }
    const auto text = ledger_to_json(l);
    auto j = nlohmann::json::parse(text);
    EXPECT_EQ(j["totals"]["prompt_tokens"], 300);
    EXPECT_EQ(j["totals"]["completion_tokens"], 150);
    const auto back = ledger_from_json(text);
    EXPECT_EQ(back.method, Method::summary);
    EXPECT_EQ(back.summary_tokens, 120u);
    ASSERT_EQ(back.entries.size(), 3u);
    EXPECT_EQ(back.entries[0].stage_tag, "map");
    EXPECT_THROW(ledger_from_json("{}"), SchemaError);
}

TEST(ScoresJson, AggregateBlock) {
    std::vector<JudgeScore> s{{"q1", Metric::clarity, 4, "Agree"}, {"q2", Metric::clarity, 1, "Disagree"}};
    auto j = nlohmann::json::parse(scores_to_json(s));
    ASSERT_EQ(j["scores"].size(), 2u);
    EXPECT_EQ(j["scores"][1]["label"], "Disagree");
    EXPECT_EQ(j["aggregate"]["clarity"]["total"], 2);
    EXPECT_DOUBLE_EQ(j["aggregate"]["clarity"]["fractions"]["Agree"].get<double>(), 0.5);
    EXPECT_DOUBLE_EQ(j["aggregate"]["clarity"]["negative_fraction"].get<double>(), 0.5);
}

TEST(Session, ScoreFraction) {
    SessionResult s;
    EXPECT_EQ(s.score_fraction(), 0.0);
    s.answers = {{"a", 0, true}, {"b", 1, false}, {"c", 2, true}, {"d", 3, true}};
    EXPECT_DOUBLE_EQ(s.score_fraction(), 0.75);
    auto j = nlohmann::json::parse(session_to_json(s));
    EXPECT_EQ(j["answers"].size(), 4u);
    EXPECT_DOUBLE_EQ(j["score_fraction"].get<double>(), 0.75);
}

TEST(Iso8601, Epoch) {
    EXPECT_EQ(iso8601_utc(0), "1970-01-01T00:00:00Z");
    EXPECT_EQ(iso8601_utc(1700000000), "2023-11-14T22:13:20Z");
}

TEST(Files, MissingReadThrows) { EXPECT_THROW(read_text_file("/nonexistent/file"), Error); }
