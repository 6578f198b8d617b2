#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "quizgen/cli.hpp"
#include "quizgen/quiz_io.hpp"
#include "support.hpp"

using namespace quizgen;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun cli(std::vector<std::string> args, const std::string& input = "") {
    args.insert(args.begin(), "quizgen");
    std::vector<const char*> argv;
    for (auto& a : args) argv.push_back(a.c_str());
    std::istringstream in(input);
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), in, out, err);
    return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("quizgen_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string generate(const std::string& method = "savaal", const std::string& n = "20") {
        const auto out = path("quiz.json");
        auto r = cli({"generate", "-i", qt::fixture("transformer.md"), "--method", method, "-n", n, "--seed", "0",
                      "--mock", qt::fixture("mock_llm.json"), "--created-at", "2025-01-01T00:00:00Z", "-o", out});
        EXPECT_EQ(r.code, 0) << r.err;
        return out;
    }

    // A small quiz whose correct answers are known.
    std::string write_quiz(std::size_t n) {
        Quiz q;
        q.doc_id = "d";
        q.title = "t";
        q.model = "m";
        q.created_at = "2025-01-01T00:00:00Z";
        q.questions = qt::distinct_questions(n);
        const auto p = path("small.json");
        write_text_file(p, quiz_to_json(q));
        return p;
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(cli({}).code, kExitUsage);
    EXPECT_EQ(cli({"bogus"}).code, kExitUsage);
    EXPECT_EQ(cli({"generate", "-i", qt::fixture("transformer.md"), "--method", "magic"}).code, kExitUsage);
    EXPECT_EQ(cli({"generate"}).code, kExitUsage);
    EXPECT_EQ(cli({"cost", "--n-min", "50", "--n-max", "10"}).code, kExitUsage);
    EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST_F(Cli, RuntimeErrorsExitOne) {
    auto r = cli({"generate", "-i", path("missing.md"), "--mock", qt::fixture("mock_llm.json"), "-o", path("q.json")});
    EXPECT_EQ(r.code, kExitFailure);
    EXPECT_NE(r.err.find("[ingest]"), std::string::npos);
    write_text_file(path("broken.json"), "{\"version\": \"1\"");
    EXPECT_EQ(cli({"judge", "--quiz", path("broken.json"), "--mock", qt::fixture("mock_llm.json")}).code, kExitFailure);
}

TEST_F(Cli, GenerateWritesQuizAndLedger) {
    const auto quiz_path = generate();
    const auto quiz = quiz_from_json(read_text_file(quiz_path));
    EXPECT_EQ(quiz.questions.size(), 20u);
    EXPECT_EQ(quiz.created_at, "2025-01-01T00:00:00Z");
    EXPECT_EQ(quiz.method, Method::savaal);
    const auto ledger = ledger_from_json(read_text_file(path("quiz.ledger.json")));
    EXPECT_EQ(ledger.n, 20u);
    EXPECT_FALSE(ledger.entries.empty());
}

TEST_F(Cli, CostReportCrossovers) {
    for (const char* name : {"cost", "cost-report"}) {
        auto r = cli({name, "--parity-at", "100"});
        ASSERT_EQ(r.code, 0) << r.err;
        EXPECT_EQ(r.out.rfind("method,N,modeled_cost,actual_cost\n", 0), 0u);
        EXPECT_NE(r.out.find("crossover uncached: N*=29.6 "), std::string::npos) << r.out;
        EXPECT_NE(r.out.find("crossover cached: N*=39.2 "), std::string::npos) << r.out;
        EXPECT_NE(r.out.find("b\xE2\x89\x88" "67 "), std::string::npos) << r.out;
        EXPECT_NE(r.out.find("\nsavaal,20,"), std::string::npos);
    }
}

TEST_F(Cli, CostReconcilesLedger) {
    generate();
    auto r = cli({"cost", "--ledger", path("quiz.ledger.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(r.out);
    std::string line;
    bool found = false;
    while (std::getline(lines, line)) {
        if (line.rfind("savaal,20,", 0) != 0) continue;
        found = true;
        EXPECT_NE(line.back(), ',') << line;
    }
    EXPECT_TRUE(found);
    EXPECT_NE(r.out.find("actual_cost="), std::string::npos);
}

TEST_F(Cli, JudgeTable) {
    const auto quiz_path = generate();
    auto r = cli({"judge", "--quiz", quiz_path, "--mock", qt::fixture("mock_llm.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("clarity"), std::string::npos);
    EXPECT_NE(r.out.find("usability"), std::string::npos);
    EXPECT_NE(r.out.find("100.0%"), std::string::npos);
    auto scores = nlohmann::json::parse(read_text_file(path("quiz.scores.json")));
    EXPECT_EQ(scores["scores"].size(), 20u * 7u);

    r = cli({"judge", "--quiz", quiz_path, "--mock", qt::fixture("mock_llm.json"), "--metrics", "clarity,difficulty",
             "-o", path("two.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.find("usability"), std::string::npos);
    EXPECT_EQ(nlohmann::json::parse(read_text_file(path("two.json")))["scores"].size(), 40u);
    EXPECT_EQ(cli({"judge", "--quiz", quiz_path, "--metrics", "vibes"}).code, kExitUsage);
}

TEST_F(Cli, QuizAllCorrect) {
    const auto p = write_quiz(4);
    auto r = cli({"quiz", "--quiz", p, "--result-out", path("s.json")}, "A\nb\nC\nd\n");
    ASSERT_EQ(r.code, 0) << r.err;
    auto s = nlohmann::json::parse(read_text_file(path("s.json")));
    EXPECT_DOUBLE_EQ(s["score_fraction"].get<double>(), 1.0);
    EXPECT_TRUE(s["completed"].get<bool>());
    EXPECT_NE(r.out.find("4/4 correct"), std::string::npos);
}

TEST_F(Cli, QuizInvalidKeyReprompts) {
    const auto p = write_quiz(2);
    auto r = cli({"quiz", "--quiz", p, "--result-out", path("s.json")}, "x\nAB\nA\nA\n");
    ASSERT_EQ(r.code, 0);
    std::size_t reprompts = 0;
    for (auto pos = r.out.find("Please enter"); pos != std::string::npos; pos = r.out.find("Please enter", pos + 1))
        ++reprompts;
    EXPECT_EQ(reprompts, 2u);
    auto s = nlohmann::json::parse(read_text_file(path("s.json")));
    EXPECT_DOUBLE_EQ(s["score_fraction"].get<double>(), 0.5);
    EXPECT_NE(r.out.find("The answer is B."), std::string::npos);
}

TEST_F(Cli, QuizEndOfInputIsPartial) {
    const auto p = write_quiz(4);
    auto r = cli({"quiz", "--quiz", p, "--result-out", path("s.json")}, "A\n");
    ASSERT_EQ(r.code, 0);
    auto s = nlohmann::json::parse(read_text_file(path("s.json")));
    EXPECT_FALSE(s["completed"].get<bool>());
    EXPECT_EQ(s["answers"].size(), 1u);
    EXPECT_NE(r.out.find("Session ended early"), std::string::npos);
}

TEST_F(Cli, QuizShuffledOrderIsSeeded) {
    const auto p = write_quiz(6);
    auto a = cli({"quiz", "--quiz", p, "--shuffle-questions", "--seed", "3", "--result-out", path("a.json")}, "");
    auto b = cli({"quiz", "--quiz", p, "--shuffle-questions", "--seed", "3", "--result-out", path("b.json")}, "");
    EXPECT_EQ(a.out.substr(0, a.out.find("result:")), b.out.substr(0, b.out.find("result:")));
}
