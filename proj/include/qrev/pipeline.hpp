#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qrev/adders.hpp"
#include "qrev/bigint.hpp"
#include "qrev/circuit.hpp"
#include "qrev/fftmul.hpp"

namespace qrev {

/// Classical tables prepared once per (a, N) pair: the repeated squares
/// a^{2^i} mod N driving the 2L exponentiation steps, their modular
/// inverses for the uncompute legs, the per-bit shifted addends, and the
/// fixed-point reciprocals used by the transform-based multiplier.
struct Precomputation {
    Int a;
    Int N;
    int L = 0;
    std::vector<Int> powers;                    ///< a^{2^i} mod N, i < 2L
    std::vector<Int> inverses;                  ///< powers[i]^{-1} mod N
    std::vector<std::vector<Int>> shift_tables; ///< [i][j] = 2^j powers[i] mod N, j < L
    std::vector<Int> reciprocals;               ///< floor(powers[i] * 2^L / N)
};

/// Builds the table set. Requires gcd(a, N) = 1 (otherwise the caller
/// already holds a factor and has no use for the circuit) and N < 2^L.
[[nodiscard]] Precomputation precompute(const Int& a, const Int& N, int L);

/// Which multiplication machinery the exponentiation is priced and, where
/// it affects values, executed with.
enum class Backend { standard, parallel_add, fft2 };

/// Precision knobs for the value-level run. Zero means exact; a positive
/// compare_bits truncates every modular-adder comparison to that many top
/// bits (standard backend), a positive s_prime_width sizes the short
/// running-sum register that drives the reduction quotient (parallel-add
/// backend). The transform backend computes exact products either way.
struct ValuePolicy {
    int compare_bits = 0;
    int s_prime_width = 0;
};

/// Closed-form totals for the scheduled circuit plus the tallies the
/// value-level run actually performed. The transform ledger only counts
/// executed multiplications (steps whose exponent bit is set); toffoli
/// and depth always price all 2L controlled multiply/uncompute pairs.
struct ModexpCost {
    Int toffoli;
    Int depth;
    long long modmul_count = 0;  ///< scheduled modular multiplications, 4L
    ResourceLedger fft;
};

struct ModexpResult {
    Int value;
    ModexpCost cost;
    /// False when some inverse-multiply leg failed to clear its register
    /// or a comparison bit failed to uncompute (possible only under a
    /// truncating policy).
    bool uncompute_clean = true;
};

/// Value-level modular exponentiation a^x mod N through the reversible
/// scheme: 2L steps, each a controlled multiply by powers[i] followed by
/// the inverse multiply that retires the old register. Requires x < 2^{2L}
/// and, for the transform backend, L >= 16.
[[nodiscard]] ModexpResult modexp(const Int& a, const Int& x, const Int& N, int L,
                                  Backend backend, ValuePolicy policy = {});

/// A fully instantiated exponentiation circuit at toy width: constants
/// and exponent bits are baked in (the exponent register is eliminated;
/// each step drives a recycled semiclassical control wire), so the
/// circuit has no primary inputs and leaves a^x mod N on `product`.
struct MaterializedModexp {
    Circuit circuit;
    Register product;
};

/// Materializes the standard-backend circuit for the given tables and
/// exponent. With a full policy the circuit passes strict simulation;
/// with a truncated policy it misbehaves at the budgeted rate and is
/// meant for lenient-mode studies.
[[nodiscard]] MaterializedModexp materialize_modexp(const Precomputation& pre, const Int& x,
                                                    ComparePolicy policy);

/// One phase rotation of the measurement-interleaved Fourier transform.
/// The rotation on `qubit` j is 2 pi * numerator / 2^{j+1}, a classical
/// function of the j earlier measurement outcomes; `kept` marks the
/// rotations the truncated schedule actually performs.
struct QfftStep {
    int qubit = 0;
    Int numerator;          ///< sum of kept contributions 2^i over set bits i
    int denom_log2 = 0;     ///< j + 1
    Int dropped_numerator;  ///< contribution mass discarded by truncation
    bool kept = true;       ///< false when every contribution was dropped
};

struct QfftSchedule {
    int length = 0;
    int keep = 0;
    std::vector<QfftStep> steps;  ///< one per qubit, in measurement order
};

/// Phase schedule for an l-qubit semiclassical transform given the bits
/// measured so far (bit i of `measured` is qubit i's outcome, least
/// significant first). Each qubit keeps only the contributions of the
/// `keep` most recently measured bits; keep >= l reproduces the exact
/// transform. Requires |measured| <= l.
[[nodiscard]] QfftSchedule qfft_schedule(const std::vector<int>& measured, int l, int keep);

/// Draws one readout of the phase-estimation register for an exactly
/// periodic function of period r: a uniform peak index k < r rounded to
/// the nearest integer of k * 2^{2L} / r.
[[nodiscard]] Int sample_measurement(const Int& r, int L, std::mt19937_64& rng);

struct FactorResult {
    bool found = false;
    Int factor;
    Int base;             ///< the base a that produced the factor
    int trials_used = 0;
};

/// Toy end-to-end factoring run: random bases, the gcd shortcut, order
/// recovery from continued-fraction convergents of a sampled readout, and
/// the gcd(a^{r/2} +- 1, N) extraction. Requires N odd, composite, not a
/// prime power, and at most 16 bits.
[[nodiscard]] FactorResult factor_demo(const Int& N, int trials, std::uint64_t seed);

}  // namespace qrev
