#include "qrev/cost.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace qrev {

namespace {

void check_size(long long L, const char* who) {
    if (L < 16) throw std::invalid_argument(std::string(who) + ": bit-length must be at least 16");
    if (L > (1LL << 30)) throw std::invalid_argument(std::string(who) + ": bit-length too large");
}

int log2_exact(long long value) {
    return std::countr_zero(static_cast<unsigned long long>(value));
}

/// Least-squares line through the given points; x is already log2(L).
FitResult fit_line(const std::vector<std::pair<double, double>>& points, const char* who) {
    if (points.size() < 10)
        throw std::invalid_argument(std::string(who) + ": need at least 10 points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : points) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(points.size());
    const double det = n * sxx - sx * sx;
    if (det < 1e-9)
        throw std::invalid_argument(std::string(who) + ": sizes are degenerate, cannot fit");
    FitResult fit;
    fit.exponent = (n * sxy - sx * sy) / det;
    fit.prefactor_log2 = (sy - fit.exponent * sx) / n;
    return fit;
}

double log2_int(const Int& value, const char* who) {
    if (value <= 0) throw std::invalid_argument(std::string(who) + ": cost values must be positive");
    return std::log2(value.convert_to<double>());
}

}  // namespace

ResourceEstimate standard_cost(long long L) {
    check_size(L, "standard_cost");
    ResourceEstimate e;
    e.algorithm = Algorithm::standard;
    e.L = L;
    e.S = Int(3) * L;
    e.T = Int(12) * L * L * L;
    e.T_p = e.T;
    e.S_breakdown = e.S;
    return e;
}

ResourceEstimate parallel_add_cost(long long L, double epsilon) {
    check_size(L, "parallel_add_cost");
    ResourceEstimate e;
    e.algorithm = Algorithm::parallel_add;
    e.L = L;
    e.layout = choose_addition_layout(static_cast<int>(L), epsilon);
    const Int additions = Int(4) * L * L;
    e.T = additions * (Int(11) * L + Int(12) * e.layout.block_count());
    e.T_p = additions * (11 * e.layout.block_len + 12 * e.layout.blocks_per_superblock);
    e.S = Int(5) * L;
    e.S_breakdown = Int(3) * L + Int(6) * e.layout.block_count();
    return e;
}

ResourceEstimate fft_cost(long long L) {
    check_size(L, "fft_cost");
    ResourceEstimate e;
    e.algorithm = Algorithm::fft2;
    e.L = L;
    e.fft_level1 = select_level1(L);
    e.fft_level2 = select_level2(e.fft_level1.l_tilde);

    const long long b = e.fft_level1.b;
    const long long lt = e.fft_level1.l_tilde;
    const long long bp = e.fft_level2.b_prime;

    // Qubit count: b ring residues of 2 l~ = b' * 2b' bits, held three
    // times over (two operands and the transform workspace).
    e.S = Int(3) * b * (bp * 2 * bp);
    e.S_breakdown = e.S;

    // Gate counts per simple multiplication. Two length-b transforms are
    // charged (the constant operand's transform is classical); every
    // butterfly is the parallel form on a 2 l~ bit residue. Each of the b
    // pointwise products runs two length-b' transforms of ripple
    // butterflies on 2b' bit residues plus b' schoolbook leaf products.
    const Int butterflies1 = Int(2) * log2_exact(b) * (b / 2) * (26 * (2 * lt + 14));
    const Int butterflies2 = Int(2) * log2_exact(bp) * (bp / 2) * (13 * 2 * bp);
    const Int leaves = Int(3) * bp * (2 * bp) * (2 * bp);
    const Int per_mult = butterflies1 + Int(b) * (butterflies2 + leaves);

    // Transform passes run sequentially; butterflies within a pass, the
    // pointwise products, and the leaf products all run side by side.
    const Int depth1 = Int(2) * log2_exact(b) * 540;
    const Int depth2 = Int(2) * log2_exact(bp) * (13 * 2 * bp);
    const Int leaf_depth = Int(3) * (2 * bp) * (2 * bp);
    const Int per_mult_depth = depth1 + depth2 + leaf_depth;

    // 2L multiplication steps, 2 modular multiplications each, 8 simple
    // multiplications per modular multiplication.
    const Int mults = Int(4) * L * 8;
    e.T = mults * per_mult;
    e.T_p = mults * per_mult_depth;
    return e;
}

Int zigzag_parallel_cost(long long L, double epsilon) {
    const ResourceEstimate adder = parallel_add_cost(L, epsilon);
    const ResourceEstimate fft = fft_cost(L);
    // Granting the adder the transform's qubit budget buys S_fft / 5L
    // independent lanes; the depth shrinks by that factor.
    return adder.T_p * (Int(5) * L) / fft.S;
}

Crossover find_crossover(const std::vector<long long>& grid, double epsilon) {
    if (grid.empty()) throw std::invalid_argument("find_crossover: empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1])
            throw std::invalid_argument("find_crossover: grid must be strictly increasing");
    Crossover result;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (fft_cost(grid[i]).T_p < zigzag_parallel_cost(grid[i], epsilon)) {
            result.L_star = grid[i];
            result.found = true;
            result.at_left_edge = i == 0;
            return result;
        }
    }
    return result;
}

Int karatsuba_space(long long n) {
    if (n < 1 || (n & (n - 1)) != 0)
        throw std::invalid_argument("karatsuba_space: size must be a power of two");
    const int t = log2_exact(n);
    Int pow3 = 1;
    for (int i = 0; i < t; ++i) pow3 *= 3;
    return Int(6) * (pow3 - pow2(t));
}

FitResult fit_powerlaw(const std::vector<ResourceEstimate>& estimates, CostField field) {
    std::vector<std::pair<double, double>> points;
    points.reserve(estimates.size());
    for (const ResourceEstimate& e : estimates) {
        const Int& value = field == CostField::total ? e.T : e.T_p;
        points.emplace_back(std::log2(static_cast<double>(e.L)),
                            log2_int(value, "fit_powerlaw"));
    }
    return fit_line(points, "fit_powerlaw");
}

FitResult fit_powerlaw(const std::vector<std::pair<long long, Int>>& points) {
    std::vector<std::pair<double, double>> logs;
    logs.reserve(points.size());
    for (const auto& [L, value] : points)
        logs.emplace_back(std::log2(static_cast<double>(L)), log2_int(value, "fit_powerlaw"));
    return fit_line(logs, "fit_powerlaw");
}

double wall_clock_days(const Int& toffoli_depth, double toffoli_us) {
    return toffoli_depth.convert_to<double>() * toffoli_us * 1e-6 / 86400.0;
}

std::vector<long long> octave_grid(int lo_exp, int hi_exp) {
    if (lo_exp < 1 || lo_exp > hi_exp || hi_exp > 62)
        throw std::invalid_argument("octave_grid: bad exponent range");
    std::vector<long long> grid;
    grid.reserve(static_cast<std::size_t>(hi_exp - lo_exp) + 1);
    for (int e = lo_exp; e <= hi_exp; ++e) grid.push_back(1LL << e);
    return grid;
}

std::vector<long long> log_grid(int lo_exp, int hi_exp, int per_octave) {
    if (lo_exp < 1 || lo_exp > hi_exp || hi_exp > 62)
        throw std::invalid_argument("log_grid: bad exponent range");
    if (per_octave < 1) throw std::invalid_argument("log_grid: need at least one point per octave");
    std::vector<long long> grid;
    grid.reserve(static_cast<std::size_t>(hi_exp - lo_exp) * per_octave + 1);
    for (int e = lo_exp; e < hi_exp; ++e)
        for (int j = 0; j < per_octave; ++j)
            grid.push_back(std::llround(std::exp2(e + static_cast<double>(j) / per_octave)));
    grid.push_back(1LL << hi_exp);
    return grid;
}

}  // namespace qrev
