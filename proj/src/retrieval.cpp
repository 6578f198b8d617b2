#include "quizgen/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "quizgen/errors.hpp"

namespace quizgen {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void normalize_in_place(std::span<double> v) {
    const double n = std::sqrt(dot(v, v));
    if (!(n > 0.0) || !std::isfinite(n)) throw EmbedderFailure("embedder produced a zero or non-finite vector");
    for (auto& x : v) x /= n;
}

}  // namespace

std::string_view to_string(ScoringMode m) {
    return m == ScoringMode::cosine ? "cosine" : "late_interaction";
}

ScoringMode scoring_mode_from_string(std::string_view s) {
    if (s == "cosine") return ScoringMode::cosine;
    if (s == "late_interaction" || s == "late") return ScoringMode::late_interaction;
    throw Error("unknown retrieval mode: " + std::string(s));
}

Matrix Embedder::embed_tokens(std::string_view) const {
    throw EmbedderFailure("embedder does not produce token-level embeddings");
}

double score_cosine(std::span<const double> q, std::span<const double> p) {
    if (q.size() != p.size() || q.empty()) throw DimensionMismatch("cosine: vector dimensions differ");
    const double nq = std::sqrt(dot(q, q));
    const double np = std::sqrt(dot(p, p));
    if (nq == 0.0 || np == 0.0) throw ZeroVector("cosine: zero-norm vector");
    return std::clamp(dot(q, p) / (nq * np), -1.0, 1.0);
}

double score_late_interaction(const Matrix& query_tokens, const Matrix& passage_tokens) {
    if (query_tokens.empty() || passage_tokens.empty())
        throw DimensionMismatch("late interaction: empty token matrix");
    if (query_tokens.cols != passage_tokens.cols)
        throw DimensionMismatch("late interaction: token dimensions differ");
    double total = 0.0;
    for (std::size_t i = 0; i < query_tokens.rows; ++i) {
        double best = -std::numeric_limits<double>::infinity();
        const auto q = query_tokens.row(i);
        for (std::size_t j = 0; j < passage_tokens.rows; ++j) best = std::max(best, dot(q, passage_tokens.row(j)));
        total += best;
    }
    return total;
}

PassageIndex PassageIndex::build(std::vector<Passage> passages, std::shared_ptr<const Embedder> embedder,
                                 ScoringMode mode) {
    if (passages.empty()) throw std::invalid_argument("build_index: no passages");
    if (!embedder) throw std::invalid_argument("build_index: no embedder");
    if (mode == ScoringMode::late_interaction && !embedder->supports_tokens())
        throw EmbedderFailure("late interaction needs a token-level embedder");

    PassageIndex idx;
    idx.mode_ = mode;
    idx.dimension_ = embedder->dimension();
    for (const auto& p : passages) {
        if (mode == ScoringMode::cosine) {
            auto v = embedder->embed(p.text);
            if (v.size() != idx.dimension_) throw EmbedderFailure("embedding dimension changed within an index");
            normalize_in_place(v);
            idx.vectors_.push_back(std::move(v));
        } else {
            auto m = embedder->embed_tokens(p.text);
            if (m.cols != idx.dimension_ || m.rows == 0)
                throw EmbedderFailure("token embedding has the wrong shape");
            idx.token_matrices_.push_back(std::move(m));
        }
    }
    idx.passages_ = std::move(passages);
    idx.embedder_ = std::move(embedder);
    return idx;
}

std::vector<double> PassageIndex::score_all(std::string_view query) const {
    std::vector<double> scores(passages_.size());
    if (mode_ == ScoringMode::cosine) {
        const auto q = embedder_->embed(query);
        for (std::size_t i = 0; i < passages_.size(); ++i) scores[i] = score_cosine(q, vectors_[i]);
    } else {
        const auto q = embedder_->embed_tokens(query);
        for (std::size_t i = 0; i < passages_.size(); ++i) scores[i] = score_late_interaction(q, token_matrices_[i]);
    }
    return scores;
}

std::string PassageIndex::serialize() const {
    nlohmann::ordered_json j;
    j["mode"] = std::string(to_string(mode_));
    j["dimension"] = dimension_;
    auto& arr = j["passages"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < passages_.size(); ++i) {
        nlohmann::ordered_json e;
        e["id"] = passages_[i].id;
        if (mode_ == ScoringMode::cosine) {
            e["vector"] = vectors_[i];
        } else {
            e["rows"] = token_matrices_[i].rows;
            e["tokens"] = token_matrices_[i].data;
        }
        arr.push_back(std::move(e));
    }
    return j.dump();
}

std::vector<std::size_t> top_k_positions(std::span<const double> scores, std::span<const std::string> ids,
                                         std::size_t k) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto take = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (scores[a] != scores[b]) return scores[a] > scores[b];
                          return ids[a] < ids[b];
                      });
    order.resize(take);
    return order;
}

std::vector<Passage> retrieve_for_query(const PassageIndex& index, std::string_view query, std::size_t k) {
    const auto scores = index.score_all(query);
    std::vector<std::string> ids;
    ids.reserve(index.passages().size());
    for (const auto& p : index.passages()) ids.push_back(p.id);
    std::vector<Passage> out;
    for (auto pos : top_k_positions(scores, ids, k)) out.push_back(index.passages()[pos]);
    return out;
}

std::vector<Passage> retrieve_top_k(const PassageIndex& index, const MainIdea& idea, const RetrievalConfig& cfg) {
    if (cfg.k == 0) throw std::invalid_argument("retrieval k must be at least 1");
    return retrieve_for_query(index, idea.as_text(), cfg.k);
}

}  // namespace quizgen
