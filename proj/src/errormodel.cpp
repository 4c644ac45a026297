#include "qrev/errormodel.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "qrev/fftmul.hpp"

namespace qrev {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// One 64-bit word per (seed, counter) pair, so trials can be replayed or
// reordered without changing their draws.
std::uint64_t counter_word(std::uint64_t seed, std::uint64_t counter) {
    return splitmix64(seed ^ splitmix64(counter));
}

int ceil_log2_ll(long long v) {
    int k = 0;
    while ((1LL << k) < v) ++k;
    return k;
}

}  // namespace

ErrorBudget budget(long long L, double epsilon) {
    if (L < 16) throw std::invalid_argument("budget: the model starts at 16-bit operands");
    if (L > (1LL << 30)) throw std::invalid_argument("budget: bit length out of range");
    if (!(epsilon > 0.0) || epsilon > 1.0)
        throw std::invalid_argument("budget: failure bound must be in (0, 1]");

    ErrorBudget b;
    b.L = L;
    b.epsilon = epsilon;
    const double dL = static_cast<double>(L);
    b.per_mod_add = epsilon / (4.0 * dL * dL);
    b.per_mod_mul = epsilon / (4.0 * dL);

    // There are 4L^2 truncated comparisons; each must fail with
    // probability below roughly eps/4L^2, and one comparison bit halves
    // the failure odds. The small tolerance keeps exact integers from
    // rounding up.
    int cb = static_cast<int>(std::ceil(2.0 + 2.0 * std::log2(dL) - std::log2(epsilon) - 1e-9));
    if (cb > L) cb = static_cast<int>(L);
    if (cb < 1) cb = 1;
    b.compare_bits = cb;

    b.s_prime_width = 9 + 3 * ceil_log2_ll(L);
    b.superblock_len = static_cast<int>(std::llround(3.0 + 3.0 * std::log2(dL)));

    const FftOpBudgetCheck ops = fft_op_budget_check(L, epsilon);
    b.fft_op_budget = ops.derived_budget;
    return b;
}

WilsonInterval wilson95(long long successes, long long trials) {
    if (trials <= 0) return {0.0, 1.0};
    if (successes < 0 || successes > trials)
        throw std::invalid_argument("wilson95: successes out of range");
    const double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = p + z2 / (2.0 * n);
    const double margin = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    WilsonInterval w;
    w.low = successes == 0 ? 0.0 : (center - margin) / denom;
    w.high = successes == trials ? 1.0 : (center + margin) / denom;
    if (w.low < 0.0) w.low = 0.0;
    if (w.high > 1.0) w.high = 1.0;
    return w;
}

double trunc_compare_error(int width, int t) {
    if (width < 1 || width > 512) throw std::invalid_argument("width out of range");
    if (t < 1 || t > width) throw std::invalid_argument("window must be between 1 and width");
    // The windows disagree only when the top halves tie, the dropped
    // low places decide the other way, and the tie-break guesses wrong:
    // half of the 2^-t * (1 - 2^-(w-t)) tie-with-distinct-tails mass.
    return std::exp2(static_cast<double>(-t)) *
           (1.0 - std::exp2(static_cast<double>(t - width))) / 2.0;
}

double superblock_flip_rate(int len) {
    if (len < 1 || len > 62) throw std::invalid_argument("superblock length out of range");
    // The incoming carry changes the outgoing carry exactly when the
    // block sum is all ones.
    return std::exp2(static_cast<double>(-len));
}

double trunc_compare_mc(int width, int t, long long trials, std::uint64_t seed) {
    if (width < 1 || width > 64) throw std::invalid_argument("sampled width must fit a word");
    if (t < 1 || t > width) throw std::invalid_argument("window must be between 1 and width");
    if (trials < 1) throw std::invalid_argument("at least one trial is required");
    const std::uint64_t mask =
        width == 64 ? ~0ULL : (1ULL << static_cast<unsigned>(width)) - 1;
    const unsigned shift = static_cast<unsigned>(width - t);
    long long disagreements = 0;
    for (long long i = 0; i < trials; ++i) {
        const std::uint64_t x = counter_word(seed, 2 * static_cast<std::uint64_t>(i)) & mask;
        const std::uint64_t y = counter_word(seed, 2 * static_cast<std::uint64_t>(i) + 1) & mask;
        const bool full = x >= y;
        const bool windowed = (x >> shift) >= (y >> shift);
        if (full != windowed) ++disagreements;
    }
    return static_cast<double>(disagreements) / static_cast<double>(trials);
}

double superblock_carry_mc(int superblock_len, long long trials, std::uint64_t seed) {
    if (superblock_len < 1 || superblock_len > 62)
        throw std::invalid_argument("superblock length out of range");
    if (trials < 1) throw std::invalid_argument("at least one trial is required");
    const std::uint64_t all_ones = (1ULL << static_cast<unsigned>(superblock_len)) - 1;
    long long flips = 0;
    for (long long i = 0; i < trials; ++i) {
        const std::uint64_t x = counter_word(seed, 2 * static_cast<std::uint64_t>(i)) & all_ones;
        const std::uint64_t y = counter_word(seed, 2 * static_cast<std::uint64_t>(i) + 1) & all_ones;
        if (x + y == all_ones) ++flips;
    }
    return static_cast<double>(flips) / static_cast<double>(trials);
}

ModexpErrorReport modexp_error_mc(int L_small, double epsilon, long long trials,
                                  std::uint64_t seed, int compare_bits_override) {
    if (L_small < 16 || L_small > 64)
        throw std::invalid_argument("sampled width must be between 16 and 64 bits");
    if (trials < 1) throw std::invalid_argument("at least one trial is required");

    ModexpErrorReport report;
    report.budget = budget(L_small, epsilon);
    report.trials = trials;
    const int window =
        compare_bits_override >= 0 ? compare_bits_override : report.budget.compare_bits;
    const ValuePolicy policy{window, 0};
    const unsigned w = static_cast<unsigned>(L_small);

    for (long long trial = 0; trial < trials; ++trial) {
        std::mt19937_64 rng(counter_word(seed, static_cast<std::uint64_t>(trial)));
        // odd modulus with the top bit set
        Int N = Int(rng()) % pow2(w);
        N |= 1;
        N |= pow2(w - 1);
        Int a = 2 + Int(rng()) % (N - 3);
        while (ext_gcd(a, N).g != 1) a = 2 + Int(rng()) % (N - 3);
        Int x = (Int(rng()) << 64) + rng();
        x = mod_floor(x, pow2(2 * w));

        const Int expect = mod_pow(a, x, N);
        const ModexpResult got = modexp(a, x, N, L_small, Backend::standard, policy);
        if (got.value != expect || !got.uncompute_clean) ++report.mismatches;
    }
    report.observed = static_cast<double>(report.mismatches) / static_cast<double>(trials);
    report.interval = wilson95(report.mismatches, trials);
    return report;
}

FftOpBudgetCheck fft_op_budget_check(long long L, double epsilon) {
    if (!(epsilon > 0.0) || epsilon > 1.0)
        throw std::invalid_argument("failure bound must be in (0, 1]");
    const Level1Params p1 = select_level1(L);
    const Level2Params p2 = select_level2(p1.l_tilde);
    const int log2b = ceil_log2_ll(p1.b);
    const int log2b_prime = ceil_log2_ll(p2.b_prime);

    // Each modular product runs 8 forward multiplications; each carries
    // 2 top-level transforms of b/2 log2 b butterflies and, per block, 2
    // second-level transforms of b'/2 log2 b' butterflies. (Counting a
    // single multiplication pass instead of all 8 gives a figure 8x
    // smaller; the ledger here charges what the scheme executes.)
    const Int per_mult = Int(log2b) * p1.b + Int(p1.b) * log2b_prime * p2.b_prime;
    FftOpBudgetCheck check;
    check.total_ops = Int(4) * L * 8 * per_mult;
    check.derived_budget = epsilon / check.total_ops.convert_to<double>();
    check.quoted_rate = std::exp2(-40.0);
    check.ratio = check.quoted_rate / check.derived_budget;
    return check;
}

std::string mc_record_json(const McRecord& record) {
    nlohmann::json j;
    j["test"] = record.test;
    j["L"] = record.L;
    j["epsilon"] = record.epsilon;
    j["trials"] = record.trials;
    j["seed"] = record.seed;
    j["observed"] = record.observed;
    j["predicted"] = record.predicted;
    j["band"] = {{"low", record.band.low}, {"high", record.band.high}};
    return j.dump();
}

}  // namespace qrev
