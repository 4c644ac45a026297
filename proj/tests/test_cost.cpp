#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "doctest.h"
#include "qrev/bigint.hpp"
#include "qrev/cost.hpp"

using namespace qrev;

TEST_CASE("standard algorithm headline cost") {
    const ResourceEstimate small = standard_cost(16);
    CHECK(small.algorithm == Algorithm::standard);
    CHECK(small.S == 48);
    CHECK(small.T == 49152);
    CHECK(small.T_p == small.T);

    const ResourceEstimate big = standard_cost(1000);
    CHECK(big.S == 3000);
    CHECK(big.T == Int("12000000000"));

    CHECK_THROWS_AS((void)standard_cost(15), std::invalid_argument);
}

TEST_CASE("parallel adder cost from the chosen layout") {
    const ResourceEstimate e = parallel_add_cost(5000);
    CHECK(e.algorithm == Algorithm::parallel_add);
    CHECK(e.S == 25000);
    CHECK(e.layout.block_len == 7);
    CHECK(e.layout.blocks_per_superblock == 6);
    CHECK(e.layout.block_count() == 720);
    CHECK(e.T == Int("6364000000000"));   // 4 L^2 (11 L + 12 * 720)
    CHECK(e.T_p == Int("14900000000"));   // 4 L^2 (11*7 + 12*6)
    CHECK(e.S_breakdown == 3 * 5000 + 6 * 720);
    CHECK(e.T_p <= e.T);

    // Within 5% of the headline 600 L^2.
    const double ratio = e.T_p.convert_to<double>() / (600.0 * 5000 * 5000);
    CHECK(ratio > 0.95);
    CHECK(ratio < 1.05);

    // Sequential addition takes depth 3L; the layout's depth implies the
    // headline speedup of roughly 900 at half a million bits.
    const ResourceEstimate wide = parallel_add_cost(50000);
    const long long depth = 11 * wide.layout.block_len + 12 * wide.layout.blocks_per_superblock;
    CHECK(depth == 161);
    CHECK(std::llround(3.0 * 50000 / static_cast<double>(depth)) == 932);

    CHECK(parallel_add_cost(500).layout.extrapolated);
    CHECK_FALSE(parallel_add_cost(512).layout.extrapolated);
}

TEST_CASE("fft algorithm cost formulas") {
    const ResourceEstimate e = fft_cost(1 << 20);
    CHECK(e.algorithm == Algorithm::fft2);
    CHECK(e.S == 100663296);
    CHECK(e.S == Int(96) * (1 << 20));
    CHECK(e.T == Int("608586283043782656"));
    CHECK(e.T_p == Int("2754147778560"));
    CHECK(e.T_p <= e.T);
    CHECK(e.fft_level1.b == 4096);
    CHECK(e.fft_level2.b_prime == 64);

    CHECK(wall_clock_days(e.T_p, 1.0) == doctest::Approx(31.8767).epsilon(1e-4));

    // Octave grid: S/L alternates between 48 and 96 in pairs as the two
    // parity cases of the parameter selection trade places.
    for (int exp = 9; exp <= 25; ++exp) {
        CAPTURE(exp);
        const ResourceEstimate oct = fft_cost(1LL << exp);
        const long long expect = (exp - 9) % 4 < 2 ? 48 : 96;
        CHECK(oct.S == Int(expect) * (1LL << exp));
    }

    // Off the powers of two the ratio varies; the ceil in the block size
    // can push it a touch past the nominal band.
    CHECK(fft_cost(1000).S == 49152);
    CHECK(fft_cost(4000).S == 393216);

    // Averaged over a dense logarithmic grid the space sits near 50 L.
    double sum = 0.0;
    const std::vector<long long> dense = log_grid(9, 25, 8);
    for (long long L : dense)
        sum += fft_cost(L).S.convert_to<double>() / static_cast<double>(L);
    const double mean = sum / static_cast<double>(dense.size());
    CHECK(mean > 50.0);
    CHECK(mean < 60.0);

    // The headline slowdown of the standard algorithm against fft depth.
    const Int standard_T = standard_cost(1 << 20).T;
    const double gap = std::log2(standard_T.convert_to<double>() / e.T_p.convert_to<double>());
    CHECK(gap > 20.0);
    CHECK(gap < 24.0);
}

TEST_CASE("zigzag scaling and the crossover point") {
    CHECK(zigzag_parallel_cost(1 << 13) == Int("4166341973"));
    CHECK(fft_cost(1 << 13).T_p == Int("3942645760"));

    // Single crossing on the octave grid: the space-matched adder wins
    // through 2^12, the transform from 2^13 on.
    for (int exp = 9; exp <= 25; ++exp) {
        CAPTURE(exp);
        const long long L = 1LL << exp;
        const bool fft_wins = fft_cost(L).T_p < zigzag_parallel_cost(L);
        CHECK(fft_wins == (exp >= 13));
    }

    const Crossover hit = find_crossover(octave_grid(9, 25));
    CHECK(hit.found);
    CHECK(hit.L_star == 8192);
    CHECK_FALSE(hit.at_left_edge);

    const Crossover boundary = find_crossover(octave_grid(20, 25));
    CHECK(boundary.found);
    CHECK(boundary.L_star == 1 << 20);
    CHECK(boundary.at_left_edge);

    const Crossover miss = find_crossover(octave_grid(9, 11));
    CHECK_FALSE(miss.found);
    CHECK(miss.L_star == 0);

    CHECK_THROWS_AS((void)find_crossover({}), std::invalid_argument);
    CHECK_THROWS_AS((void)find_crossover({1024, 512}), std::invalid_argument);
}

TEST_CASE("karatsuba space series") {
    CHECK(karatsuba_space(2) == 6);
    CHECK(karatsuba_space(1024) == 348150);  // 6 (3^10 - 2^10)
    CHECK(karatsuba_space(1) == 0);

    const Int at_million = karatsuba_space(1 << 20);
    CHECK(at_million == Int("20914414950"));
    CHECK(at_million > 100 * fft_cost(1 << 20).S);

    std::vector<std::pair<long long, Int>> points;
    for (int exp = 9; exp <= 25; ++exp)
        points.emplace_back(1LL << exp, karatsuba_space(1LL << exp));
    const FitResult fit = fit_powerlaw(points);
    CHECK(fit.exponent == doctest::Approx(1.58664).epsilon(1e-3));
    CHECK(std::abs(fit.exponent - std::log2(3.0)) < 0.05);

    CHECK_THROWS_AS((void)karatsuba_space(1000), std::invalid_argument);
    CHECK_THROWS_AS((void)karatsuba_space(0), std::invalid_argument);
}

TEST_CASE("power-law fits over the sweep grid") {
    // Synthetic exact cubic: the fit must recover it to rounding error.
    std::vector<ResourceEstimate> cubic;
    for (int exp = 9; exp <= 25; ++exp) {
        ResourceEstimate e;
        e.L = 1LL << exp;
        e.T = Int(7) * e.L * e.L * e.L;
        e.T_p = e.T;
        cubic.push_back(e);
    }
    const FitResult exact = fit_powerlaw(cubic, CostField::total);
    CHECK(exact.exponent == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(exact.prefactor_log2 == doctest::Approx(std::log2(7.0)).epsilon(1e-9));

    // The exact transform count grows a little faster than the quadratic
    // eyeball fit; the depth lands close to the L^1.2 description.
    std::vector<ResourceEstimate> fft;
    for (int exp = 9; exp <= 25; ++exp) fft.push_back(fft_cost(1LL << exp));
    const FitResult total = fit_powerlaw(fft, CostField::total);
    CHECK(total.exponent == doctest::Approx(2.175019).epsilon(1e-4));
    CHECK(total.prefactor_log2 == doctest::Approx(15.140076).epsilon(1e-3));
    const FitResult depth = fit_powerlaw(fft, CostField::depth);
    CHECK(depth.exponent == doctest::Approx(1.318538).epsilon(1e-4));
    CHECK(depth.prefactor_log2 == doctest::Approx(14.923620).epsilon(1e-3));

    std::vector<ResourceEstimate> few(cubic.begin(), cubic.begin() + 9);
    CHECK_THROWS_AS((void)fit_powerlaw(few, CostField::total), std::invalid_argument);

    std::vector<ResourceEstimate> flat(12, cubic.front());
    CHECK_THROWS_AS((void)fit_powerlaw(flat, CostField::total), std::invalid_argument);
}

TEST_CASE("grid construction helpers") {
    const std::vector<long long> oct = octave_grid(9, 12);
    REQUIRE(oct.size() == 4);
    CHECK(oct.front() == 512);
    CHECK(oct.back() == 4096);

    const std::vector<long long> dense = log_grid(9, 10, 4);
    REQUIRE(dense.size() == 5);
    CHECK(dense.front() == 512);
    CHECK(dense[1] == 609);   // round(2^9.25)
    CHECK(dense.back() == 1024);

    CHECK_THROWS_AS((void)octave_grid(12, 9), std::invalid_argument);
    CHECK_THROWS_AS((void)log_grid(9, 12, 0), std::invalid_argument);
}
