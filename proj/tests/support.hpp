#pragma once

#include <memory>
#include <string>
#include <vector>

#include "quizgen/llm.hpp"
#include "quizgen/mcq.hpp"
#include "quizgen/mock_backend.hpp"

namespace qt {

inline std::string fixture(const std::string& name) { return std::string(QUIZGEN_FIXTURE_DIR) + "/" + name; }

inline quizgen::Question make_question(std::string stem, std::array<std::string, 4> choices, int correct) {
    quizgen::Question q;
    q.stem = std::move(stem);
    q.choices = std::move(choices);
    q.correct_index = correct;
    q.id = quizgen::question_id("doc", quizgen::Method::savaal, q.stem);
    return q;
}

/// Numbered MCQ text in the format the generation prompts ask for.
inline std::string mcq_block(const std::vector<quizgen::Question>& qs) {
    std::string out;
    for (std::size_t i = 0; i < qs.size(); ++i)
        out += std::to_string(i + 1) + ". " + quizgen::format_mcq(qs[i]) + "\n\n";
    return out;
}

/// `n` distinct questions whose stems share no 3-word run with other prefixes.
inline std::vector<quizgen::Question> distinct_questions(std::size_t n, const std::string& prefix = "topic") {
    std::vector<quizgen::Question> out;
    for (std::size_t i = 0; i < n; ++i) {
        const auto tag = prefix + std::to_string(i);
        out.push_back(make_question("Which property of " + tag + " holds?",
                                    {tag + " alpha", tag + " beta", tag + " gamma", tag + " delta"},
                                    static_cast<int>(i % 4)));
    }
    return out;
}

inline quizgen::ClientOptions fast_options(std::size_t cap = 8) {
    quizgen::ClientOptions o;
    o.concurrency_cap = cap;
    o.retry.initial_backoff = std::chrono::milliseconds(1);
    return o;
}

struct MockClient {
    std::shared_ptr<quizgen::ScriptedBackend> backend = std::make_shared<quizgen::ScriptedBackend>();
    quizgen::LlmClient client;

    explicit MockClient(quizgen::ClientOptions opts = fast_options())
        : client(backend, std::move(opts)) {}
    explicit MockClient(std::shared_ptr<quizgen::ScriptedBackend> b, quizgen::ClientOptions opts = fast_options())
        : backend(std::move(b)), client(backend, std::move(opts)) {}
};

}  // namespace qt

#include <map>

#include "quizgen/retrieval.hpp"

namespace qt {

/// Embedder backed by explicit per-text vectors and token matrices.
class TableEmbedder : public quizgen::Embedder {
public:
    explicit TableEmbedder(std::size_t dim) : dim_(dim) {}

    void set(const std::string& text, quizgen::EmbeddingVector v) { vectors_[text] = std::move(v); }
    void set_tokens(const std::string& text, quizgen::Matrix m) { tokens_[text] = std::move(m); }

    std::size_t dimension() const override { return dim_; }
    quizgen::EmbeddingVector embed(std::string_view text) const override {
        return vectors_.at(std::string(text));
    }
    bool supports_tokens() const override { return true; }
    quizgen::Matrix embed_tokens(std::string_view text) const override { return tokens_.at(std::string(text)); }

private:
    std::size_t dim_;
    std::map<std::string, quizgen::EmbeddingVector> vectors_;
    std::map<std::string, quizgen::Matrix> tokens_;
};

}  // namespace qt
