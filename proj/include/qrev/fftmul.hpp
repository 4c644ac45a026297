#pragma once

#include "qrev/bigint.hpp"
#include "qrev/ringfft.hpp"

namespace qrev {

/// Parameters of the top-level cyclic FFT multiplier. Operands of L bits
/// are cut into b blocks of l bits and convolved over Z/(2^{2l~}+1); the
/// truncation inequality 2l + log2(b) < 2l~ keeps every convolution
/// coefficient below the modulus, so the product is exact.
struct Level1Params {
    int L = 0;           ///< operand bit-length
    int k = 0;           ///< block exponent after revision, 2^k >= 2L
    int b = 0;           ///< block count, a power of two; also the transform length
    int l = 0;           ///< bits per operand block, ceil(2L / b)
    int l_tilde = 0;     ///< ring half-exponent; coefficients live in Z/(2^{2l~}+1)
    int omega_log2 = 0;  ///< root of unity 2^e driving the length-b transform
    Int modulus;         ///< 2^{2 l_tilde} + 1

    /// The cyclic transform plan implied by these parameters.
    [[nodiscard]] FftPlan plan() const;
};

/// Parameters of the second-level negacyclic multiplier used for the
/// pointwise products mod 2^{2l~}+1. A residue is cut into b' blocks of
/// l~' bits (b' * l~' = 2l~), and since 2^{b' l~'} = -1 in the ring, the
/// block product is a negacyclic convolution over Z/(2^{2b'}+1).
struct Level2Params {
    int k_prime = 0;        ///< log2(2 l~)
    int b_prime = 0;        ///< block count and transform length
    int l_tilde_prime = 0;  ///< bits per block
    int omega_log2 = 4;     ///< omega' = 16 works at every size here
    int psi_log2 = 2;       ///< psi = 4 with psi^2 = omega', psi^{b'} = -1
    Int modulus;            ///< 2^{2 b_prime} + 1
    bool needs_crt = false; ///< k' even: coefficients overflow the modulus

    [[nodiscard]] FftPlan plan() const;

    /// Companion transform over Z/(2^{b'}+1) (root 4, weight 2) used to
    /// recover oversized coefficients by residue recombination.
    [[nodiscard]] FftPlan companion_plan() const;
};

/// Residual registers a single forward multiplication leaves behind in
/// the reversible scheme. A multiplication run backwards cancels the
/// matching entries; modular multiplication pairs every compute with an
/// uncompute, so its ledger ends empty.
struct GarbageLedger {
    long long transformed_operand = 0;  ///< operand kept in the Fourier basis
    long long transformed_product = 0;  ///< pointwise products before the inverse transform
    long long lower_level = 0;          ///< per-block second-level residue
    long long butterfly_bits = 0;       ///< junk bits from materialized circuits

    [[nodiscard]] bool empty() const;
    void merge(const GarbageLedger& other);
    /// Remove entries cancelled by running the paired multiplication backwards.
    void annihilate(const GarbageLedger& other);
};

/// Invocation counts for the coarse cost model. The convention matches
/// the reversible scheme: only the variable operand is transformed (the
/// constant's transform is classical precomputation), so one forward
/// multiplication charges 2 top-level transforms, and each pointwise
/// product charges 2 second-level transforms plus b' leaf products. The
/// half-width companion pass of the residue path is summarized by
/// crt_recombines rather than itemized.
struct ResourceLedger {
    long long fft1 = 0;               ///< length-b transforms over 2^{2l~}+1
    long long fft2 = 0;               ///< length-b' transforms over 2^{2b'}+1
    long long mu = 0;                 ///< leaf schoolbook multiplications
    long long crt_recombines = 0;     ///< pointwise products recombined from two residues
    long long range_corrections = 0;  ///< conditional +-N fixups applied by modmul

    void merge(const ResourceLedger& other);
};

/// Product plus the bookkeeping a reversible execution would carry.
struct MultiplyResult {
    Int product;
    GarbageLedger garbage;
    ResourceLedger cost;
};

/// Which multiplier backs a modular multiplication.
enum class MulBackend { one_level, two_level };

/// Pick top-level parameters for L-bit operands: k = ceil(log2(2L)),
/// split by parity into (b, l~), then grow k until the truncation
/// inequality holds. Throws std::invalid_argument for L < 16.
[[nodiscard]] Level1Params select_level1(long long L);

/// Pick second-level parameters for block size l~ (k' = log2(2 l~), split
/// by parity; k' even needs the companion modulus 2^{b'}+1). Throws
/// std::invalid_argument for l~ < 8 or l~ not a power of two.
[[nodiscard]] Level2Params select_level2(int l_tilde);

/// x*y mod 2^{2l~}+1 through the negacyclic second level; the top
/// residue 2^{2l~} = -1 is folded in as a sign. Charges 2 transforms and
/// b' leaf products to the ledger.
[[nodiscard]] Int block_product(const Int& x, const Int& y, const Level2Params& params,
                                ResourceLedger& cost);

/// Exact product of a and b (< 2^L) by cyclic convolution of their block
/// vectors; pointwise products are taken directly on big integers.
[[nodiscard]] MultiplyResult multiply_1level(const Int& a, const Int& b,
                                             const Level1Params& params);

/// Exact product with the pointwise products delegated to the
/// second-level negacyclic multiplier (and the companion residue pass
/// when params demand it).
[[nodiscard]] MultiplyResult multiply_2level(const Int& a, const Int& b, const Level1Params& p1,
                                             const Level2Params& p2);

/// Modular product plus its cost; the garbage ledger ends empty.
struct ModMulResult {
    Int result;
    ResourceLedger cost;
    GarbageLedger garbage;
};

/// p*A mod N via the precomputed reciprocal: q = floor(p * floor(A 2^L / N) / 2^L)
/// undershoots the true quotient by at most one, so a single conditional
/// +-N correction makes the result exact. The reversible scheme costs 8
/// forward multiplications (4 compute/uncompute pairs). Requires
/// 0 <= p < N < 2^L, 0 < A < N, and gcd(A, N) = 1 (the uncompute leg of
/// the surrounding exponentiation needs A^-1).
[[nodiscard]] ModMulResult modmul(const Int& p, const Int& A, const Int& N, long long L,
                                  MulBackend backend);

}  // namespace qrev
