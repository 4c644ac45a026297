#pragma once

#include <cstdint>
#include <string>

#include "qrev/bigint.hpp"
#include "qrev/pipeline.hpp"

namespace qrev {

/// Derived tolerances for every bounded-error shortcut in the circuit
/// family, sized so the end-to-end wrong-output probability stays below
/// epsilon: per-operation budgets, the comparison window, the short
/// running-sum register, and the superblock length of the parallel adder.
struct ErrorBudget {
    long long L = 0;
    double epsilon = 0.01;
    double per_mod_add = 0.0;   ///< epsilon / (4 L^2)
    double per_mod_mul = 0.0;   ///< epsilon / (4 L)
    int compare_bits = 0;       ///< ceil(2 + 2 log2 L - log2 eps), at most L
    int s_prime_width = 0;      ///< 9 + 3 ceil(log2 L)
    int superblock_len = 0;     ///< round(3 + 3 log2 L)
    double fft_op_budget = 0.0; ///< epsilon / total transform butterflies
};

/// Sizes the budget for L-bit moduli. Requires L >= 16 (the transform
/// parameter selection underlying fft_op_budget starts there) and
/// 0 < epsilon <= 1.
[[nodiscard]] ErrorBudget budget(long long L, double epsilon = 0.01);

/// 95% Wilson score interval for a binomial proportion.
struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};

[[nodiscard]] WilsonInterval wilson95(long long successes, long long trials);

/// Exact probability that the top-t-bit comparison (ties resolved as
/// "greater or equal") disagrees with the full comparison on uniform
/// w-bit pairs: 2^-t (1 - 2^-(w-t)) / 2.
[[nodiscard]] double trunc_compare_error(int width, int t);

/// Exact probability that a length-len block addition propagates an
/// incoming carry all the way through (the sum pattern is all ones), so
/// that guessing carry-in 0 flips the outgoing carry: 2^-len.
[[nodiscard]] double superblock_flip_rate(int len);

/// Empirical disagreement rate of the truncated comparison on `trials`
/// uniform width-bit pairs. Reproducible from (seed, trials); trials are
/// seeded individually by counter so any execution order agrees.
[[nodiscard]] double trunc_compare_mc(int width, int t, long long trials, std::uint64_t seed);

/// Empirical rate of carry-guess flips on uniform len-bit addend pairs.
[[nodiscard]] double superblock_carry_mc(int superblock_len, long long trials,
                                         std::uint64_t seed);

/// End-to-end measurement: the truncated-comparison exponentiation versus
/// exact modular exponentiation over random (a, x, N) triples.
struct ModexpErrorReport {
    ErrorBudget budget;
    long long trials = 0;
    long long mismatches = 0;        ///< wrong value or failed uncompute
    double observed = 0.0;
    WilsonInterval interval;         ///< 95% band around the observed rate
};

/// Runs the value-level exponentiation with comparisons truncated to the
/// budgeted window at width L_small and counts trials whose result
/// differs from exact modular exponentiation or whose uncompute legs
/// leave residue. Pass compare_bits_override >= 0 to replace the budgeted
/// window (0 restores full precision and must yield zero mismatches).
/// Requires 16 <= L_small <= 64.
[[nodiscard]] ModexpErrorReport modexp_error_mc(int L_small, double epsilon, long long trials,
                                                std::uint64_t seed,
                                                int compare_bits_override = -1);

/// Derived per-butterfly error allowance against the rate the transform
/// circuits are customarily budgeted with, 2^-40. Reports both numbers
/// and their ratio without adjudicating.
struct FftOpBudgetCheck {
    Int total_ops;              ///< butterflies across all 4L multiplications
    double derived_budget = 0;  ///< epsilon / total_ops
    double quoted_rate = 0;     ///< 2^-40
    double ratio = 0;           ///< quoted_rate / derived_budget
};

[[nodiscard]] FftOpBudgetCheck fft_op_budget_check(long long L, double epsilon = 0.01);

/// One Monte Carlo result in the report schema shared with the command
/// line front end.
struct McRecord {
    std::string test;
    long long L = 0;
    double epsilon = 0.0;
    long long trials = 0;
    std::uint64_t seed = 0;
    double observed = 0.0;
    double predicted = 0.0;
    WilsonInterval band;
};

/// Serializes a record as a single JSON object with the documented keys
/// {test, L, epsilon, trials, seed, observed, predicted, band}.
[[nodiscard]] std::string mc_record_json(const McRecord& record);

}  // namespace qrev
