#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quizgen/retrieval.hpp"

namespace quizgen {

/// Seeded hash-projection embedder. Each lowercase alphanumeric token maps to
/// a fixed pseudo-random unit vector; a text embeds as the sum of its token
/// vectors. Deterministic across runs and platforms, no network.
class HashEmbedder : public Embedder {
public:
    explicit HashEmbedder(std::size_t dimension = 64, std::uint64_t seed = 0);

    std::size_t dimension() const override { return dimension_; }
    EmbeddingVector embed(std::string_view text) const override;
    bool supports_tokens() const override { return true; }
    Matrix embed_tokens(std::string_view text) const override;

    static std::vector<std::string> tokenize(std::string_view text);

private:
    EmbeddingVector token_vector(std::string_view token) const;

    std::size_t dimension_;
    std::uint64_t seed_;
};

struct HttpEmbedderConfig {
    std::string base_url;  // e.g. https://api.openai.com/v1
    std::string api_key;
    std::string model = "text-embedding-3-small";
    std::size_t dimension = 1536;
    int timeout_seconds = 60;
};

/// OpenAI-compatible `POST {base_url}/embeddings` client (whole-text vectors only).
class HttpEmbedder : public Embedder {
public:
    explicit HttpEmbedder(HttpEmbedderConfig cfg);

    std::size_t dimension() const override { return cfg_.dimension; }
    /// Throws EmbedderFailure on transport errors or malformed replies.
    EmbeddingVector embed(std::string_view text) const override;

private:
    HttpEmbedderConfig cfg_;
};

}  // namespace quizgen
