#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>

#include "quizgen/cost.hpp"
#include "quizgen/errors.hpp"
#include "quizgen/quiz_io.hpp"

using namespace quizgen;

namespace {

CostParams reference() {
    CostParams p;
    p.A = 2.5e-6;
    p.B = 1e-5;
    return p;
}

// Plain re-computation of the money formulas, batch by batch.
double oracle_direct(int n, double d, const CostParams& p, bool cached) {
    double total = 0;
    int batch = 0;
    for (int done = 0; done < n; done += static_cast<int>(p.b), ++batch) {
        const double input = (cached && batch > 0) ? p.cache_discount * p.A * d : p.A * d;
        total += input + p.q_out * p.b * p.B;
    }
    return total;
}

}  // namespace

TEST(CostTokens, DirectExamples) {
    EXPECT_DOUBLE_EQ(cost_direct_tokens(20, 10000, 20, 100), 12000);
    EXPECT_DOUBLE_EQ(cost_direct_tokens(100, 35000, 20, 100), 185000);
    // Doubling the batch count doubles the D term.
    const double d20 = cost_direct_tokens(20, 10000, 20, 100) - 20 * 100;
    const double d40 = cost_direct_tokens(40, 10000, 20, 100) - 40 * 100;
    EXPECT_DOUBLE_EQ(d40, 2 * d20);
    // Partial batches round up.
    EXPECT_DOUBLE_EQ(cost_direct_tokens(21, 1000, 20, 0), 2000);
    EXPECT_DOUBLE_EQ(cost_direct_tokens(21, 1000, 20, 0, Batching::exact), 1050);
}

TEST(CostTokens, SummaryExamples) {
    EXPECT_DOUBLE_EQ(cost_summary_tokens(100, 2000, 20, 100, 5000), 25000);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(1, 1000);
    for (int i = 0; i < 200; ++i) {
        const double n = std::floor(u(rng)), d = u(rng) * 10, b = std::floor(u(rng) / 10) + 1, q = u(rng);
        EXPECT_DOUBLE_EQ(cost_summary_tokens(n, d, b, q, 0), cost_direct_tokens(n, d, b, q));
    }
}

TEST(CostMoney, ReferenceValues) {
    const auto p = reference();
    EXPECT_NEAR(cost_direct_money(100, 35000, p, false), 0.5375, 1e-12);
    EXPECT_NEAR(cost_savaal_money(100, 35000, p), 0.2295, 1e-12);
    EXPECT_NEAR(cost_savaal_money(0, 35000, p), 1.48 * 2.5e-6 * 35000, 1e-15);
    EXPECT_NEAR(cost_savaal_money(200, 35000, p) - cost_savaal_money(100, 35000, p), 100 * 100 * 1e-5, 1e-12);
}

TEST(CostMoney, CachedSingleBatchMatchesUncached) {
    const auto p = reference();
    EXPECT_DOUBLE_EQ(cost_direct_money(20, 35000, p, true), cost_direct_money(20, 35000, p, false));
}

TEST(CostMoney, CachedTwoBatchesPayOneAndAHalfInput) {
    auto p = reference();
    p.B = 1e-30;  // isolate the input spend
    EXPECT_NEAR(cost_direct_money(40, 35000, p, true), 1.5 * p.A * 35000, 1e-12);
}

TEST(CostMoney, MatchesBatchOracle) {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 500; ++i) {
        CostParams p;
        p.A = 1e-7 * static_cast<double>(1 + rng() % 100);
        p.B = 1e-7 * static_cast<double>(1 + rng() % 100);
        p.b = static_cast<double>(1 + rng() % 40);
        p.cache_discount = static_cast<double>(rng() % 101) / 100.0;
        const int n = 1 + static_cast<int>(rng() % 300);
        const double d = static_cast<double>(1000 + rng() % 100000);
        for (bool cached : {false, true})
            EXPECT_NEAR(cost_direct_money(n, d, p, cached), oracle_direct(n, d, p, cached), 1e-9);
    }
}

TEST(CostMoney, TokenAndMoneyModelsAgreeAtUnitPrices) {
    CostParams p;
    p.A = 1;
    p.B = 1;
    p.b = 20;
    p.q_out = 100;
    for (int n = 1; n <= 200; ++n) {
        // Money charges full output batches; token form counts N*q.
        const double k = std::ceil(n / 20.0);
        EXPECT_DOUBLE_EQ(cost_direct_money(n, 5000, p, false), k * 5000 + k * 20 * 100);
        EXPECT_DOUBLE_EQ(cost_direct_money(n, 5000, p, false, Batching::exact),
                         cost_direct_tokens(n, 5000, 20, 100, Batching::exact));
    }
}

TEST(Crossover, Uncached) {
    CostParams p = reference();
    EXPECT_NEAR(crossover_n(p, false), 29.6, 1e-9);
}

TEST(Crossover, Cached) {
    CostParams p = reference();
    EXPECT_NEAR(crossover_n(p, true), 39.2, 1e-9);
}

TEST(Crossover, NoCrossoverCases) {
    CostParams p = reference();
    p.cache_discount = 0;
    EXPECT_THROW(crossover_n(p, true), NoCrossover);
    p.cache_discount = 0.5;
    p.f_ratio = 0.3;  // below 1 - c
    EXPECT_THROW(crossover_n(p, true), NoCrossover);
}

TEST(Crossover, SingleCrossingAtClosedForm) {
    // Exact batching: direct - pipeline is linear in N and changes sign once, at N*.
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.05, 5.0);
    for (int i = 0; i < 1000; ++i) {
        CostParams p;
        p.A = 1e-6 * u(rng);
        p.B = 1e-6 * u(rng);
        p.b = std::floor(u(rng) * 10) + 1;
        p.f_ratio = u(rng);
        const double d = 1000 * u(rng) * 100;
        const double n_star = crossover_n(p, false);
        auto diff = [&](double n) {
            return cost_direct_money(n, d, p, false, Batching::exact) - cost_savaal_money(n, d, p);
        };
        EXPECT_NEAR(diff(n_star), 0.0, 1e-9 * (1 + std::abs(cost_savaal_money(n_star, d, p))));
        int sign_changes = 0;
        double prev = diff(0.01);
        for (double n = 0.5; n < 4 * n_star + 10; n += n_star / 50 + 0.01) {
            const double cur = diff(n);
            if ((prev < 0) != (cur < 0)) ++sign_changes;
            prev = cur;
        }
        EXPECT_EQ(sign_changes, 1);
    }
}

TEST(Crossover, CachedClosedFormSolvesEquality) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int i = 0; i < 500; ++i) {
        CostParams p = reference();
        p.cache_discount = u(rng);
        p.f_ratio = 1.0 + u(rng);
        const double d = 20000;
        const double n = crossover_n(p, true);
        // Continuous cached form: A*D + (N/b - 1)*c*A*D + q*N*B.
        const double direct = p.A * d + (n / p.b - 1) * p.cache_discount * p.A * d + p.q_out * n * p.B;
        EXPECT_NEAR(direct, cost_savaal_money(n, d, p), 1e-12);
    }
}

TEST(Parity, BatchSizeAtHundred) {
    CostParams p = reference();
    const double b = parity_batch_size(100, p);
    EXPECT_NEAR(b, 100 / 1.48, 1e-12);
    EXPECT_EQ(static_cast<int>(std::floor(b)), 67);
}

TEST(Summary, DifferenceGrowsWhenSummaryIsDenser) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int i = 0; i < 1000; ++i) {
        CostParams p = reference();
        p.b = std::floor(u(rng) * 4) + 1;
        p.b_s = std::floor(u(rng) * 4) + 1;
        const double d = 1000 * u(rng);
        double d_s = d * u(rng) / 10;
        if (d_s / p.b_s >= d / p.b) d_s = 0.5 * d * p.b_s / p.b;
        double prev = -1e300;
        for (int n = 1; n <= 300; n += 7) {
            const double diff = cost_direct_money(n, d, p, false, Batching::exact) -
                                cost_summary_money(n, d, d_s, p, Batching::exact);
            EXPECT_GT(diff, prev);
            prev = diff;
        }
    }
}

TEST(Reconcile, Oracle) {
    CostParams p = reference();
    TokenUsage e;
    e.prompt_tokens = 1000;
    e.completion_tokens = 200;
    e.stage_tag = "generate";
    auto r = reconcile({e}, p);
    EXPECT_NEAR(r.actual_cost, 0.0045, 1e-15);
    EXPECT_NEAR(r.by_stage["generate"], 0.0045, 1e-15);
    EXPECT_EQ(reconcile({}, p).actual_cost, 0.0);

    TokenUsage c;
    c.prompt_tokens = 1000;
    c.cached_prompt_tokens = 1000;
    c.stage_tag = "map";
    EXPECT_NEAR(reconcile({c}, p).actual_cost, 0.5 * 1000 * p.A, 1e-15);
}

TEST(Reconcile, GroupsByStage) {
    CostParams p = reference();
    std::vector<TokenUsage> entries;
    double expect_map = 0, expect_gen = 0;
    std::mt19937_64 rng(10);
    for (int i = 0; i < 100; ++i) {
        TokenUsage e;
        e.prompt_tokens = rng() % 5000;
        e.cached_prompt_tokens = e.prompt_tokens / 3;
        e.completion_tokens = rng() % 800;
        e.stage_tag = i % 2 ? "map" : "generate";
        const double c = p.A * static_cast<double>(e.prompt_tokens - e.cached_prompt_tokens) +
                         0.5 * p.A * static_cast<double>(e.cached_prompt_tokens) +
                         p.B * static_cast<double>(e.completion_tokens);
        (i % 2 ? expect_map : expect_gen) += c;
        entries.push_back(e);
    }
    auto r = reconcile(entries, p);
    EXPECT_NEAR(r.by_stage["map"], expect_map, 1e-12);
    EXPECT_NEAR(r.by_stage["generate"], expect_gen, 1e-12);
    EXPECT_NEAR(r.actual_cost, expect_map + expect_gen, 1e-12);
}

TEST(Params, Validate) {
    CostParams p = reference();
    EXPECT_NO_THROW(p.validate());
    p.cache_discount = 1.5;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = reference();
    p.b = 0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    EXPECT_THROW(CostParams{}.validate(), std::invalid_argument);
}

TEST(Presets, BundledDefault) {
    auto preset = load_price_preset(default_prices_path());
    EXPECT_EQ(preset.name, "2025-02 reference prices");
    EXPECT_DOUBLE_EQ(preset.input_per_token, 2.5e-6);
    EXPECT_DOUBLE_EQ(preset.output_per_token, 1e-5);
    EXPECT_DOUBLE_EQ(preset.cache_discount, 0.5);
}

TEST(Presets, MissingThrows) {
    EXPECT_THROW(load_price_preset("/nonexistent/prices.json"), MissingPreset);
    EXPECT_THROW(load_price_preset(default_prices_path(), "no such preset"), MissingPreset);
    const auto path = (std::filesystem::temp_directory_path() / "quizgen_bad_prices.json").string();
    write_text_file(path, R"({"default":"x","presets":{"x":{"input_per_token":1}}})");
    EXPECT_THROW(load_price_preset(path), MissingPreset);
    std::filesystem::remove(path);
}
