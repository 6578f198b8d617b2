#include "quizgen/cost.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "quizgen/errors.hpp"

#ifndef QUIZGEN_PRICES_FILE
#define QUIZGEN_PRICES_FILE "config/prices.json"
#endif

namespace quizgen {

void CostParams::validate() const {
    if (!(A > 0 && B > 0 && b > 0 && b_s > 0 && q_out > 0 && f_ratio > 0))
        throw std::invalid_argument("cost parameters must be positive");
    if (!(cache_discount >= 0 && cache_discount <= 1))
        throw std::invalid_argument("cache discount must lie in [0, 1]");
}

double batches(double n, double b, Batching mode) {
    const double x = n / b;
    return mode == Batching::ceil ? std::ceil(x) : x;
}

double cost_direct_tokens(double n, double d, double b, double q, Batching mode) {
    return batches(n, b, mode) * d + n * q;
}

double cost_summary_tokens(double n, double d_s, double b_s, double q, double f_of_d, Batching mode) {
    return f_of_d + batches(n, b_s, mode) * d_s + n * q;
}

double cost_direct_money(double n, double d, const CostParams& p, bool cached, Batching mode) {
    const double k = batches(n, p.b, mode);
    const double output = k * p.q_out * p.b * p.B;
    if (!cached || k <= 1) return k * p.A * d + output;
    return p.A * d + (k - 1) * p.cache_discount * p.A * d + output;
}

double cost_savaal_money(double n, double d, const CostParams& p) {
    return p.f_ratio * p.A * d + p.q_out * n * p.B;
}

double cost_summary_money(double n, double d, double d_s, const CostParams& p, Batching mode) {
    return p.f_ratio * p.A * d + batches(n, p.b_s, mode) * (p.A * d_s + p.q_out * p.b_s * p.B);
}

double crossover_n(const CostParams& p, bool cached) {
    double n_star = 0.0;
    if (!cached) {
        n_star = p.f_ratio * p.b;
    } else {
        const double c = p.cache_discount;
        if (c <= 0) throw NoCrossover("cached tokens are free; direct prompting never costs more per batch");
        n_star = p.b * (p.f_ratio - (1.0 - c)) / c;
    }
    if (!std::isfinite(n_star) || n_star <= 0) throw NoCrossover("no crossover at a positive question count");
    return n_star;
}

double parity_batch_size(double n, const CostParams& p) { return n / p.f_ratio; }

Reconciliation reconcile(const std::vector<TokenUsage>& entries, const CostParams& p) {
    Reconciliation r;
    for (const auto& e : entries) {
        const auto cached = static_cast<double>(std::min(e.cached_prompt_tokens, e.prompt_tokens));
        const auto fresh = static_cast<double>(e.prompt_tokens) - cached;
        const double cost = p.A * fresh + p.cache_discount * p.A * cached +
                            p.B * static_cast<double>(e.completion_tokens);
        r.actual_cost += cost;
        r.by_stage[e.stage_tag] += cost;
    }
    return r;
}

PricePreset load_price_preset(const std::string& path, const std::string& name) {
    std::ifstream in(path);
    if (!in) throw MissingPreset("price file not found: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw MissingPreset("price file " + path + " is not valid JSON: " + e.what());
    }
    const std::string wanted = name.empty() ? j.value("default", std::string{}) : name;
    if (wanted.empty() || !j.contains("presets") || !j["presets"].contains(wanted))
        throw MissingPreset("price preset not found: " + (wanted.empty() ? std::string("(default)") : wanted));
    const auto& e = j["presets"][wanted];
    try {
        PricePreset p;
        p.name = wanted;
        p.input_per_token = e.at("input_per_token").get<double>();
        p.output_per_token = e.at("output_per_token").get<double>();
        p.cache_discount = e.value("cache_discount", 0.5);
        return p;
    } catch (const nlohmann::json::exception& ex) {
        throw MissingPreset("price preset " + wanted + " is incomplete: " + ex.what());
    }
}

std::string default_prices_path() {
    if (const char* env = std::getenv("QUIZGEN_PRICES"); env && *env) return env;
    return QUIZGEN_PRICES_FILE;
}

}  // namespace quizgen
