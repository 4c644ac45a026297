#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "oracle.hpp"
#include "qrev/errormodel.hpp"

using doctest::Approx;
using qrev::Int;

TEST_CASE("derived budget formulas") {
    const auto b = qrev::budget(1000, 0.01);
    CHECK(b.compare_bits == 29);     // ceil(2 + 2 log2 1000 + log2 100)
    CHECK(b.s_prime_width == 39);    // 9 + 3 ceil(log2 1000)
    CHECK(b.superblock_len == 33);   // round(3 + 3 log2 1000)
    CHECK(b.per_mod_add == Approx(2.5e-9).epsilon(1e-12));
    CHECK(b.per_mod_mul == Approx(2.5e-6).epsilon(1e-12));
    CHECK(std::log2(b.fft_op_budget) == Approx(-33.5638).epsilon(1e-4));

    // the window can never exceed the register
    const auto tight = qrev::budget(16, 0.01);
    CHECK(tight.compare_bits == 16);
    CHECK(tight.s_prime_width == 21);
    CHECK(tight.superblock_len == 15);

    // with the whole unit of failure probability the constant term remains
    const auto loose = qrev::budget(1024, 1.0);
    CHECK(loose.compare_bits == 22);  // 2 + 2 * 10

    CHECK_THROWS_AS((void)qrev::budget(8, 0.01), std::invalid_argument);
    CHECK_THROWS_AS((void)qrev::budget(1000, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)qrev::budget(1000, 1.5), std::invalid_argument);
}

TEST_CASE("wilson score intervals") {
    const auto none = qrev::wilson95(0, 100);
    CHECK(none.low == 0.0);
    CHECK(none.high == Approx(0.0369934982).epsilon(1e-8));

    const auto few = qrev::wilson95(5, 100);
    CHECK(few.low == Approx(0.0215436792).epsilon(1e-8));
    CHECK(few.high == Approx(0.1117504692).epsilon(1e-8));

    const auto half = qrev::wilson95(50, 100);
    CHECK(half.low == Approx(0.4038315304).epsilon(1e-8));
    CHECK(half.high == Approx(0.5961684696).epsilon(1e-8));
    CHECK(half.high - 0.5 == Approx(0.5 - half.low).epsilon(1e-12));

    // more data tightens the band around the same proportion
    const auto coarse = qrev::wilson95(10, 100);
    const auto fine = qrev::wilson95(1000, 10000);
    CHECK(fine.high - fine.low < coarse.high - coarse.low);

    const auto empty = qrev::wilson95(0, 0);
    CHECK(empty.low == 0.0);
    CHECK(empty.high == 1.0);
    CHECK_THROWS_AS((void)qrev::wilson95(5, 4), std::invalid_argument);
}

TEST_CASE("truncated comparison disagreement rate") {
    // closed form against exhaustive enumeration of every pair
    for (const int width : {4, 6, 8, 10}) {
        for (int t = 1; t <= width; ++t) {
            CHECK(qrev::trunc_compare_error(width, t) ==
                  Approx(qrev::oracle::trunc_compare_error_exhaustive(width, t)).epsilon(1e-12));
        }
    }
    CHECK(qrev::trunc_compare_error(12, 4) == Approx(255.0 / 8192.0).epsilon(1e-12));
    CHECK(qrev::trunc_compare_error(8, 8) == 0.0);
    CHECK(qrev::trunc_compare_error(4, 1) == Approx(0.21875).epsilon(1e-12));
    CHECK(qrev::trunc_compare_error(64, 8) == Approx(std::exp2(-9.0)).epsilon(1e-6));

    SUBCASE("sampled rates sit inside three sigmas of the exact rate") {
        const long long trials = 1000000;
        for (const auto& [width, t] : {std::pair{64, 8}, {12, 4}, {4, 1}}) {
            const double p = qrev::trunc_compare_error(width, t);
            const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
            const double got = qrev::trunc_compare_mc(width, t, trials, 11);
            CHECK(std::abs(got - p) < 3.0 * sigma);
        }
        // frozen draws: the counter-seeded stream is schedule independent
        CHECK(qrev::trunc_compare_mc(64, 8, trials, 11) == Approx(0.001952).epsilon(1e-9));
        CHECK(qrev::trunc_compare_mc(64, 8, trials, 11) ==
              qrev::trunc_compare_mc(64, 8, trials, 11));
    }

    CHECK_THROWS_AS((void)qrev::trunc_compare_error(8, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)qrev::trunc_compare_error(8, 9), std::invalid_argument);
    CHECK_THROWS_AS((void)qrev::trunc_compare_mc(65, 8, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS((void)qrev::trunc_compare_mc(8, 2, 0, 1), std::invalid_argument);
}

TEST_CASE("superblock carry flip rate") {
    for (int len = 1; len <= 8; ++len) {
        CHECK(qrev::superblock_flip_rate(len) ==
              Approx(qrev::oracle::superblock_flip_exhaustive(len)).epsilon(1e-12));
    }
    CHECK(qrev::superblock_flip_rate(1) == 0.5);
    CHECK(qrev::superblock_flip_rate(8) == Approx(1.0 / 256.0).epsilon(1e-12));

    const long long trials = 1000000;
    for (const int len : {1, 4, 8}) {
        const double p = qrev::superblock_flip_rate(len);
        const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
        CHECK(std::abs(qrev::superblock_carry_mc(len, trials, 12) - p) < 3.0 * sigma);
    }
    CHECK(qrev::superblock_carry_mc(8, trials, 12) == Approx(0.003884).epsilon(1e-9));

    CHECK_THROWS_AS((void)qrev::superblock_flip_rate(0), std::invalid_argument);
    CHECK_THROWS_AS((void)qrev::superblock_carry_mc(63, 10, 1), std::invalid_argument);
}

TEST_CASE("end-to-end mismatch rate of the truncated exponentiation") {
    const auto report = qrev::modexp_error_mc(32, 0.01, 4000, 1);
    CHECK(report.budget.compare_bits == 19);
    CHECK(report.mismatches == 7);  // frozen; the budgeted window keeps it far below epsilon
    CHECK(report.observed <= 0.01);
    CHECK(report.interval.high < 0.01);
    CHECK(report.interval.low <= report.observed);
    CHECK(report.observed <= report.interval.high);

    // full-precision comparisons never miss
    const auto exact = qrev::modexp_error_mc(32, 0.01, 500, 2, 0);
    CHECK(exact.mismatches == 0);

    // one-bit comparisons corrupt essentially every trial
    const auto broken = qrev::modexp_error_mc(32, 0.01, 500, 3, 1);
    CHECK(broken.observed > 0.9);

    CHECK_THROWS_AS((void)qrev::modexp_error_mc(8, 0.01, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS((void)qrev::modexp_error_mc(32, 0.01, 0, 1), std::invalid_argument);
}

TEST_CASE("transform operation budget") {
    const auto check = qrev::fft_op_budget_check(1LL << 20);
    CHECK(check.total_ops == Int("54425825574912"));
    CHECK(std::log2(check.derived_budget) == Approx(-52.2732).epsilon(1e-4));
    CHECK(check.quoted_rate == Approx(std::exp2(-40.0)).epsilon(1e-12));
    CHECK(std::log2(check.ratio) == Approx(12.2732).epsilon(1e-4));

    // the per-operation allowance shrinks as the instance grows
    double prev = 1.0;
    for (int e = 16; e <= 24; e += 2) {
        const double cur = qrev::budget(1LL << e).fft_op_budget;
        CHECK(cur < prev);
        prev = cur;
    }

    CHECK_THROWS_AS((void)qrev::fft_op_budget_check(8), std::invalid_argument);
    CHECK_THROWS_AS((void)qrev::fft_op_budget_check(1 << 20, 0.0), std::invalid_argument);
}

TEST_CASE("json record serialization") {
    qrev::McRecord r;
    r.test = "sample";
    r.L = 32;
    r.epsilon = 0.01;
    r.trials = 100;
    r.seed = 7;
    r.observed = 0.25;
    r.predicted = 0.5;
    r.band = {0.125, 0.375};
    CHECK(qrev::mc_record_json(r) ==
          "{\"L\":32,\"band\":{\"high\":0.375,\"low\":0.125},\"epsilon\":0.01,"
          "\"observed\":0.25,\"predicted\":0.5,\"seed\":7,\"test\":\"sample\",\"trials\":100}");
}
