#include "quizgen/embedders.hpp"

#include <cctype>
#include <cmath>

#include <nlohmann/json.hpp>

#include "http_util.hpp"
#include "quizgen/errors.hpp"
#include "quizgen/text.hpp"

namespace quizgen {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr const char* kEmptyToken = "<empty>";

}  // namespace

HashEmbedder::HashEmbedder(std::size_t dimension, std::uint64_t seed) : dimension_(dimension), seed_(seed) {
    if (dimension_ == 0) throw std::invalid_argument("embedding dimension must be positive");
}

std::vector<std::string> HashEmbedder::tokenize(std::string_view s) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : s) {
        auto u = static_cast<unsigned char>(c);
        if (std::isalnum(u) || u >= 0x80) {
            cur += static_cast<char>(std::tolower(u));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

EmbeddingVector HashEmbedder::token_vector(std::string_view token) const {
    std::uint64_t state = text::fnv1a64(token) ^ seed_;
    EmbeddingVector v(dimension_);
    double norm = 0.0;
    for (auto& x : v) {
        // 53 high bits to a double in [-1, 1).
        x = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-52 - 1.0;
        norm += x * x;
    }
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
    return v;
}

EmbeddingVector HashEmbedder::embed(std::string_view s) const {
    auto tokens = tokenize(s);
    if (tokens.empty()) tokens.emplace_back(kEmptyToken);
    EmbeddingVector sum(dimension_, 0.0);
    for (const auto& t : tokens) {
        auto v = token_vector(t);
        for (std::size_t i = 0; i < dimension_; ++i) sum[i] += v[i];
    }
    return sum;
}

Matrix HashEmbedder::embed_tokens(std::string_view s) const {
    auto tokens = tokenize(s);
    if (tokens.empty()) tokens.emplace_back(kEmptyToken);
    Matrix m(tokens.size(), dimension_);
    for (std::size_t r = 0; r < tokens.size(); ++r) {
        auto v = token_vector(tokens[r]);
        std::copy(v.begin(), v.end(), m.row(r).begin());
    }
    return m;
}

HttpEmbedder::HttpEmbedder(HttpEmbedderConfig cfg) : cfg_(std::move(cfg)) {}

EmbeddingVector HttpEmbedder::embed(std::string_view s) const {
    const auto url = detail::split_url(cfg_.base_url);
    auto cli = detail::make_client(url.origin, cfg_.timeout_seconds);
    httplib::Headers headers;
    if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);
    nlohmann::json body{{"model", cfg_.model}, {"input", nlohmann::json::array({std::string(s)})}};

    auto res = cli->Post(url.path + "/embeddings", headers, body.dump(), "application/json");
    if (!res) throw EmbedderFailure("embeddings endpoint unreachable: " + httplib::to_string(res.error()));
    if (res->status != 200) throw EmbedderFailure("embeddings endpoint returned HTTP " + std::to_string(res->status));
    try {
        auto doc = nlohmann::json::parse(res->body);
        auto v = doc.at("data").at(0).at("embedding").get<EmbeddingVector>();
        if (v.size() != cfg_.dimension)
            throw EmbedderFailure("embedding has dimension " + std::to_string(v.size()) + ", expected " +
                                  std::to_string(cfg_.dimension));
        return v;
    } catch (const nlohmann::json::exception& e) {
        throw EmbedderFailure(std::string("malformed embeddings reply: ") + e.what());
    }
}

}  // namespace quizgen
