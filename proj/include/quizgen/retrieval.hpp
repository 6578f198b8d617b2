#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quizgen/concepts.hpp"
#include "quizgen/ingest.hpp"

namespace quizgen {

using EmbeddingVector = std::vector<double>;

/// Dense row-major matrix, one row per token embedding.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
    bool empty() const noexcept { return rows == 0 || cols == 0; }
};

enum class ScoringMode { cosine, late_interaction };

std::string_view to_string(ScoringMode m);
/// Accepts "cosine" and "late_interaction" (or "late"). Throws Error otherwise.
ScoringMode scoring_mode_from_string(std::string_view s);

/// Text to vector(s). Implementations must be safe to call concurrently.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::size_t dimension() const = 0;
    virtual EmbeddingVector embed(std::string_view text) const = 0;
    virtual bool supports_tokens() const { return false; }
    /// Per-token embeddings for late interaction.
    virtual Matrix embed_tokens(std::string_view text) const;
};

struct RetrievalConfig {
    std::size_t k = 3;
    ScoringMode mode = ScoringMode::cosine;
};

/// dot(q, p) / (|q| |p|). Throws DimensionMismatch or ZeroVector.
double score_cosine(std::span<const double> q, std::span<const double> p);

/// MaxSim: sum over query rows of the best dot product with any passage row.
/// Throws DimensionMismatch for empty inputs or differing column counts.
double score_late_interaction(const Matrix& query_tokens, const Matrix& passage_tokens);

/// Embedded passages. Immutable once built and safe to share across threads.
class PassageIndex {
public:
    /// Throws std::invalid_argument for an empty corpus and EmbedderFailure
    /// when the embedder misbehaves (wrong dimension, zero vector, no token support).
    static PassageIndex build(std::vector<Passage> passages, std::shared_ptr<const Embedder> embedder,
                              ScoringMode mode = ScoringMode::cosine);

    const std::vector<Passage>& passages() const noexcept { return passages_; }
    ScoringMode mode() const noexcept { return mode_; }
    std::size_t dimension() const noexcept { return dimension_; }
    const std::vector<EmbeddingVector>& vectors() const noexcept { return vectors_; }
    const std::vector<Matrix>& token_matrices() const noexcept { return token_matrices_; }
    const Embedder& embedder() const noexcept { return *embedder_; }

    /// Scores every passage against `query` in passage order.
    std::vector<double> score_all(std::string_view query) const;

    /// Deterministic JSON rendering of the index contents.
    std::string serialize() const;

private:
    PassageIndex() = default;

    std::vector<Passage> passages_;
    std::shared_ptr<const Embedder> embedder_;
    ScoringMode mode_ = ScoringMode::cosine;
    std::size_t dimension_ = 0;
    std::vector<EmbeddingVector> vectors_;
    std::vector<Matrix> token_matrices_;
};

/// Positions of the best `k` scores: descending score, ties by id ascending.
std::vector<std::size_t> top_k_positions(std::span<const double> scores, std::span<const std::string> ids,
                                         std::size_t k);

std::vector<Passage> retrieve_for_query(const PassageIndex& index, std::string_view query, std::size_t k);

/// Query text is "title: description".
std::vector<Passage> retrieve_top_k(const PassageIndex& index, const MainIdea& idea,
                                    const RetrievalConfig& cfg = {});

}  // namespace quizgen
