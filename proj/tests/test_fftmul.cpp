#include <cstdint>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "qrev/bigint.hpp"
#include "qrev/fftmul.hpp"
#include "qrev/ringfft.hpp"

using namespace qrev;

namespace {

Int random_bits(std::mt19937_64& rng, int bits) {
    Int x = 0;
    for (int got = 0; got < bits; got += 32)
        x = (x << 32) | Int(static_cast<std::uint32_t>(rng()));
    return x & (pow2(static_cast<unsigned>(bits)) - 1);
}

Int random_below(std::mt19937_64& rng, const Int& bound) {
    return random_bits(rng, static_cast<int>(bit_length(bound)) + 16) % bound;
}

}  // namespace

TEST_CASE("level-1 parameter selection follows the block doubling rule") {
    struct Pick {
        long long L;
        int k, b, l, l_tilde, omega_log2;
    };
    const Pick picks[] = {
        Pick{16, 7, 16, 2, 8, 2},         Pick{512, 11, 64, 16, 32, 2},
        Pick{1000, 12, 128, 16, 32, 1},   Pick{1024, 12, 128, 16, 32, 1},
        Pick{4096, 14, 256, 32, 64, 1},   Pick{1 << 20, 22, 4096, 512, 1024, 1},
    };
    for (const Pick& p : picks) {
        CAPTURE(p.L);
        const Level1Params got = select_level1(p.L);
        CHECK(got.L == p.L);
        CHECK(got.k == p.k);
        CHECK(got.b == p.b);
        CHECK(got.l == p.l);
        CHECK(got.l_tilde == p.l_tilde);
        CHECK(got.omega_log2 == p.omega_log2);
        CHECK(got.modulus == pow2(2U * static_cast<unsigned>(p.l_tilde)) + 1);
    }

    // The truncation inequality and full coverage of 2L bits hold everywhere.
    for (long long L : {16LL, 17LL, 100LL, 333LL, 512LL, 777LL, 1000LL, 5000LL, 50000LL,
                        1LL << 20}) {
        CAPTURE(L);
        const Level1Params p = select_level1(L);
        CHECK((p.b & (p.b - 1)) == 0);
        CHECK((p.l_tilde & (p.l_tilde - 1)) == 0);
        int log2b = 0;
        while ((1 << log2b) < p.b) ++log2b;
        CHECK(2 * p.l + log2b < 2 * p.l_tilde);
        CHECK(1LL * p.b * p.l >= 2 * L);
        CHECK(p.omega_log2 == (p.k % 2 == 0 ? 1 : 2));
    }

    // The implied transform plans carry genuine roots of unity.
    CHECK(validate_root(select_level1(16).plan()));
    CHECK(validate_root(select_level1(512).plan()));

    CHECK_THROWS_AS((void)select_level1(15), std::invalid_argument);
}

TEST_CASE("level-2 parameter selection and the companion modulus") {
    struct Pick {
        int l_tilde, k_prime, b_prime, l_tilde_prime;
        bool needs_crt;
    };
    const Pick picks[] = {
        Pick{8, 4, 4, 4, true},      Pick{32, 6, 8, 8, true},    Pick{64, 7, 16, 8, false},
        Pick{128, 8, 16, 16, true},  Pick{1024, 11, 64, 32, false},
    };
    for (const Pick& p : picks) {
        CAPTURE(p.l_tilde);
        const Level2Params got = select_level2(p.l_tilde);
        CHECK(got.k_prime == p.k_prime);
        CHECK(got.b_prime == p.b_prime);
        CHECK(got.l_tilde_prime == p.l_tilde_prime);
        CHECK(got.needs_crt == p.needs_crt);
        CHECK(got.b_prime * got.l_tilde_prime == 2 * p.l_tilde);
        CHECK(got.omega_log2 == 4);
        CHECK(got.psi_log2 == 2);
        CHECK(got.modulus == pow2(2U * static_cast<unsigned>(p.b_prime)) + 1);
    }

    // Both the main and the companion plans pass direct root validation.
    const Level2Params tiny = select_level2(8);
    CHECK(validate_root(tiny.plan()));
    CHECK(validate_root(tiny.companion_plan()));
    const Level2Params mid = select_level2(32);
    CHECK(validate_root(mid.plan()));
    CHECK(validate_root(mid.companion_plan()));

    CHECK_THROWS_AS((void)select_level2(4), std::invalid_argument);
    CHECK_THROWS_AS((void)select_level2(24), std::invalid_argument);
}

TEST_CASE("block products in the coefficient ring") {
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);

    // k' even, companion residues required: ring Z/(2^16 + 1).
    const Level2Params p16 = select_level2(8);
    const Int m16 = pow2(16) + 1;
    ResourceLedger cost;
    CHECK(block_product(Int(65536), Int(65536), p16, cost) == 1);
    CHECK(block_product(Int(65536), Int(5), p16, cost) == m16 - 5);
    CHECK(block_product(Int(0), Int(65536), p16, cost) == 0);
    for (int round = 0; round < 200; ++round) {
        const Int x = random_below(rng, m16);
        const Int y = random_below(rng, m16);
        CAPTURE(round);
        CHECK(block_product(x, y, p16, cost) == x * y % m16);
    }

    // One call charges two transforms and b' leaf products.
    ResourceLedger one;
    (void)block_product(Int(123), Int(456), p16, one);
    CHECK(one.fft1 == 0);
    CHECK(one.fft2 == 2);
    CHECK(one.mu == p16.b_prime);
    CHECK(one.crt_recombines == 1);

    // Z/(2^64 + 1), still on the companion path.
    const Level2Params p64 = select_level2(32);
    const Int m64 = pow2(64) + 1;
    for (int round = 0; round < 60; ++round) {
        const Int x = random_below(rng, m64);
        const Int y = random_below(rng, m64);
        CAPTURE(round);
        CHECK(block_product(x, y, p64, cost) == x * y % m64);
    }

    // k' odd: the modulus alone is wide enough, no companion pass.
    const Level2Params p128 = select_level2(64);
    const Int m128 = pow2(128) + 1;
    ResourceLedger odd;
    for (int round = 0; round < 60; ++round) {
        const Int x = random_below(rng, m128);
        const Int y = random_below(rng, m128);
        CAPTURE(round);
        CHECK(block_product(x, y, p128, odd) == x * y % m128);
    }
    CHECK(odd.crt_recombines == 0);

    CHECK_THROWS_AS((void)block_product(m16, Int(1), p16, cost), std::invalid_argument);
    CHECK_THROWS_AS((void)block_product(Int(-1), Int(1), p16, cost), std::invalid_argument);
}

TEST_CASE("one-level products match schoolbook multiplication") {
    std::mt19937_64 rng(0x2545f4914f6cdd1dull);
    const Level1Params p16 = select_level1(16);
    const Level1Params p512 = select_level1(512);
    const Level1Params p1000 = select_level1(1000);

    CHECK(multiply_1level(Int(0), Int(0), p512).product == 0);
    CHECK(multiply_1level(Int(1), Int(987654321), p512).product == 987654321);
    CHECK(multiply_1level(Int(12345), Int(54321), p16).product == 670592745);

    for (int round = 0; round < 80; ++round) {
        const Int a = random_bits(rng, 16);
        const Int b = random_bits(rng, 16);
        CAPTURE(round);
        CHECK(multiply_1level(a, b, p16).product == a * b);
    }
    for (int round = 0; round < 40; ++round) {
        const Int a = random_bits(rng, 512);
        const Int b = random_bits(rng, 512);
        CAPTURE(round);
        CHECK(multiply_1level(a, b, p512).product == a * b);
    }
    for (int round = 0; round < 30; ++round) {
        const Int a = random_bits(rng, 1000);
        const Int b = random_bits(rng, 1000);
        CAPTURE(round);
        CHECK(multiply_1level(a, b, p1000).product == a * b);
    }

    // Ledger: two top-level transforms, one direct product per block.
    const MultiplyResult r = multiply_1level(random_bits(rng, 512), random_bits(rng, 512), p512);
    CHECK(r.cost.fft1 == 2);
    CHECK(r.cost.fft2 == 0);
    CHECK(r.cost.mu == p512.b);
    CHECK(r.cost.crt_recombines == 0);
    CHECK_FALSE(r.garbage.empty());
    CHECK(r.garbage.transformed_operand == 1);
    CHECK(r.garbage.transformed_product == 1);
    CHECK(r.garbage.lower_level == 0);

    CHECK_THROWS_AS((void)multiply_1level(pow2(512), Int(1), p512), std::invalid_argument);
    CHECK_THROWS_AS((void)multiply_1level(Int(-3), Int(1), p512), std::invalid_argument);
    Level1Params broken = p512;
    broken.l = broken.l_tilde;  // violates the truncation inequality
    CHECK_THROWS_AS((void)multiply_1level(Int(2), Int(3), broken), std::invalid_argument);
}

TEST_CASE("two-level products match schoolbook multiplication") {
    std::mt19937_64 rng(0xda942042e4dd58b5ull);
    const Level1Params p16 = select_level1(16);
    const Level2Params q16 = select_level2(p16.l_tilde);
    const Level1Params p512 = select_level1(512);
    const Level2Params q512 = select_level2(p512.l_tilde);
    const Level1Params p4096 = select_level1(4096);
    const Level2Params q4096 = select_level2(p4096.l_tilde);

    CHECK(q512.needs_crt);
    CHECK_FALSE(q4096.needs_crt);

    CHECK(multiply_2level(Int(0), Int(5), p512, q512).product == 0);
    CHECK(multiply_2level(Int(1), Int(987654321), p512, q512).product == 987654321);

    for (int round = 0; round < 20; ++round) {
        const Int a = random_bits(rng, 16);
        const Int b = random_bits(rng, 16);
        CAPTURE(round);
        CHECK(multiply_2level(a, b, p16, q16).product == a * b);
    }
    for (int round = 0; round < 30; ++round) {
        const Int a = random_bits(rng, 512);
        const Int b = random_bits(rng, 512);
        CAPTURE(round);
        const MultiplyResult two = multiply_2level(a, b, p512, q512);
        CHECK(two.product == a * b);
        CHECK(two.product == multiply_1level(a, b, p512).product);
    }
    for (int round = 0; round < 12; ++round) {
        const Int a = random_bits(rng, 4096);
        const Int b = random_bits(rng, 4096);
        CAPTURE(round);
        CHECK(multiply_2level(a, b, p4096, q4096).product == a * b);
    }

    // Ledger: 2 FFT1 + b x (2 FFT2 + b' leaf products).
    const MultiplyResult r =
        multiply_2level(random_bits(rng, 512), random_bits(rng, 512), p512, q512);
    CHECK(r.cost.fft1 == 2);
    CHECK(r.cost.fft2 == 2 * p512.b);
    CHECK(r.cost.mu == 1LL * p512.b * q512.b_prime);
    CHECK(r.cost.crt_recombines == p512.b);
    CHECK(r.garbage.lower_level == p512.b);

    const MultiplyResult odd =
        multiply_2level(random_bits(rng, 4096), random_bits(rng, 4096), p4096, q4096);
    CHECK(odd.cost.crt_recombines == 0);

    // Mismatched levels are rejected.
    CHECK_THROWS_AS((void)multiply_2level(Int(2), Int(3), p512, q16), std::invalid_argument);
}

TEST_CASE("disabling the companion residue pass corrupts products") {
    std::mt19937_64 rng(0xa0761d6478bd642full);
    const Level1Params p512 = select_level1(512);
    Level2Params crippled = select_level2(p512.l_tilde);
    crippled.needs_crt = false;  // pretend the small ring suffices

    int mismatches = 0;
    for (int round = 0; round < 25; ++round) {
        const Int a = random_bits(rng, 512);
        const Int b = random_bits(rng, 512);
        const MultiplyResult r = multiply_2level(a, b, p512, crippled);
        if (r.product != a * b) ++mismatches;
        CHECK(r.cost.crt_recombines == 0);
    }
    CHECK(mismatches > 0);
}

TEST_CASE("modular multiplication by reciprocal quotient") {
    std::mt19937_64 rng(0x8bb84b93962eacc9ull);

    const ModMulResult one = modmul(Int(5678), Int(1234), Int(10007), 16, MulBackend::one_level);
    CHECK(one.result == 1752);
    CHECK(one.garbage.empty());
    CHECK(one.cost.fft1 == 16);
    CHECK(one.cost.fft2 == 0);
    CHECK(one.cost.mu == 8 * 16);
    CHECK(one.cost.range_corrections <= 1);

    const ModMulResult two = modmul(Int(5678), Int(1234), Int(10007), 16, MulBackend::two_level);
    CHECK(two.result == 1752);
    CHECK(two.garbage.empty());
    CHECK(two.cost.fft1 == 16);
    CHECK(two.cost.fft2 == 16 * 16);
    CHECK(two.cost.mu == 8 * 16 * 4);
    CHECK(two.cost.crt_recombines == 8 * 16);

    CHECK(modmul(Int(0), Int(1234), Int(10007), 16, MulBackend::one_level).result == 0);

    long long corrections = 0;
    for (int round = 0; round < 300; ++round) {
        const Int n = random_bits(rng, 24) + 2;
        Int a = random_below(rng, n - 1) + 1;
        while (ext_gcd(a, n).g != 1) a = random_below(rng, n - 1) + 1;
        const Int p = random_below(rng, n);
        const MulBackend backend =
            round % 2 == 0 ? MulBackend::one_level : MulBackend::two_level;
        CAPTURE(round);
        const ModMulResult r = modmul(p, a, n, 24, backend);
        CHECK(r.result == p * a % n);
        CHECK(r.garbage.empty());
        CHECK(r.cost.range_corrections <= 1);
        corrections += r.cost.range_corrections;
    }
    // The quotient estimate genuinely undershoots sometimes.
    CHECK(corrections > 0);

    CHECK_THROWS_AS((void)modmul(Int(3), Int(2), Int(10), 16, MulBackend::one_level),
                    std::invalid_argument);  // gcd(A, N) = 2
    CHECK_THROWS_AS((void)modmul(Int(11), Int(3), Int(10), 16, MulBackend::one_level),
                    std::invalid_argument);  // residue out of range
    CHECK_THROWS_AS((void)modmul(Int(3), Int(0), Int(10), 16, MulBackend::one_level),
                    std::invalid_argument);  // constant out of range
    CHECK_THROWS_AS((void)modmul(Int(3), Int(2), pow2(16) + 1, 16, MulBackend::one_level),
                    std::invalid_argument);  // modulus too wide for L
}
