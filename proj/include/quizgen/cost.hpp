#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "quizgen/llm.hpp"

namespace quizgen {

struct CostParams {
    double A = 0.0;               // currency per input token
    double B = 0.0;               // currency per output token
    double b = 20;                // direct batch size
    double b_s = 20;              // summary batch size
    double q_out = 100;           // output tokens per question
    double f_ratio = 1.48;        // fixed extraction cost as a multiple of A*D
    double cache_discount = 0.5;  // fraction of the input price paid for cached tokens

    /// Throws std::invalid_argument on non-positive values or a discount above 1.
    void validate() const;
};

/// ceil for whole batches (what a run actually issues); exact for the
/// continuous closed form.
enum class Batching { ceil, exact };

double batches(double n, double b, Batching mode);

/// (N/b)*D + N*q in tokens.
double cost_direct_tokens(double n, double d, double b, double q, Batching mode = Batching::ceil);
/// f(D) + (N/b_s)*D_s + N*q in tokens.
double cost_summary_tokens(double n, double d_s, double b_s, double q, double f_of_d,
                           Batching mode = Batching::ceil);

/// Uncached: batches*(A*D + q_out*b*B). Cached: the first batch pays A*D,
/// later ones cache_discount*A*D.
double cost_direct_money(double n, double d, const CostParams& p, bool cached, Batching mode = Batching::ceil);
/// f_ratio*A*D + q_out*N*B.
double cost_savaal_money(double n, double d, const CostParams& p);
/// f_ratio*A*D + batches(N, b_s)*(A*D_s + q_out*b_s*B).
double cost_summary_money(double n, double d, double d_s, const CostParams& p, Batching mode = Batching::ceil);

/// N at which direct prompting stops being cheaper than the pipeline.
/// Uncached: f_ratio*b. Cached: b*(f_ratio - (1 - c))/c.
/// Throws NoCrossover when no positive finite N exists.
double crossover_n(const CostParams& p, bool cached);

/// Direct batch size matching the pipeline's uncached cost at `n`: n / f_ratio.
double parity_batch_size(double n, const CostParams& p);

struct Reconciliation {
    double actual_cost = 0.0;
    std::map<std::string, double> by_stage;
};

/// Sum of A*(prompt - cached) + c*A*cached + B*completion over the ledger.
Reconciliation reconcile(const std::vector<TokenUsage>& entries, const CostParams& p);

struct CostReport {
    std::string method;
    std::size_t n = 0;
    std::size_t d_tokens = 0;
    std::optional<std::size_t> d_s_tokens;
    double modeled_cost = 0.0;
    std::optional<double> actual_cost;
};

struct PricePreset {
    std::string name;
    double input_per_token = 0.0;
    double output_per_token = 0.0;
    double cache_discount = 0.5;
};

/// Reads a preset from a JSON file of the form
/// {"default": name, "presets": {name: {input_per_token, output_per_token, cache_discount}}}.
/// An empty `name` selects the file's default. Throws MissingPreset.
PricePreset load_price_preset(const std::string& path, const std::string& name = {});

/// Path of the bundled price file (overridable with QUIZGEN_PRICES).
std::string default_prices_path();

}  // namespace quizgen
