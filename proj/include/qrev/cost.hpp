#pragma once

#include <utility>
#include <vector>

#include "qrev/adders.hpp"
#include "qrev/bigint.hpp"
#include "qrev/fftmul.hpp"

namespace qrev {

/// The three modular-exponentiation circuit families being compared.
enum class Algorithm { standard, parallel_add, fft2 };

/// Closed-form resource estimate for one algorithm at one input size.
/// S counts qubits, T total Toffoli gates, T_p sequential Toffoli
/// time-steps. Only the fields matching `algorithm` are meaningful:
/// `layout` for parallel_add, the two parameter sets for fft2.
struct ResourceEstimate {
    Algorithm algorithm = Algorithm::standard;
    long long L = 0;
    Int S;
    Int T;
    Int T_p;            ///< equals T when the algorithm has no parallel schedule
    Int S_breakdown;    ///< parallel_add: per-addition working set 3L + 6b
    AdditionLayout layout;
    Level1Params fft_level1;
    Level2Params fft_level2;
};

/// Least-squares power law T ~ 2^prefactor_log2 * L^exponent fitted in
/// log2-log2 space.
struct FitResult {
    double exponent = 0.0;
    double prefactor_log2 = 0.0;
};

/// Which cost column a fit runs over.
enum class CostField { total, depth };

/// Outcome of scanning a grid for the point where the FFT algorithm
/// overtakes the space-matched parallel adder.
struct Crossover {
    long long L_star = 0;     ///< first grid point where fft T_p wins (0 if none)
    bool found = false;
    bool at_left_edge = false;  ///< fft already ahead at the first grid point
};

/// Plain schoolbook modular exponentiation: S = 3L, T = 12L^3 (2L
/// multiplication steps, 2 modular multiplications each, L additions of
/// 3L Toffolis). No parallel schedule, so T_p = T.
[[nodiscard]] ResourceEstimate standard_cost(long long L);

/// Carry-select-adder variant: 4L^2 additions costing 11L + 12b Toffolis
/// each at depth 11l + 12b''; the headline qubit count is 5L with the
/// per-addition working set 3L + 6b reported as a breakdown.
[[nodiscard]] ResourceEstimate parallel_add_cost(long long L, double epsilon = 0.01);

/// Two-level FFT multiplier: S = 3b * (b' * 2b'), T and T_p from the
/// butterfly counts (serial 13n and 26(n+14)/540 parallel variants at
/// level 1, schoolbook leaves priced 3(2b')^2).
[[nodiscard]] ResourceEstimate fft_cost(long long L);

/// Toffoli depth of the parallel adder when granted the FFT algorithm's
/// qubit budget: T_p(parallel_add) * 5L / S_fft(L).
[[nodiscard]] Int zigzag_parallel_cost(long long L, double epsilon = 0.01);

/// Smallest grid point where fft T_p drops below the zigzag depth. The
/// grid must be non-empty and strictly increasing.
[[nodiscard]] Crossover find_crossover(const std::vector<long long>& grid,
                                       double epsilon = 0.01);

/// Total bits a fully allocated Karatsuba recursion holds at once:
/// sum_{i<log2 n} 3n (3/2)^i = 6 (n^{log2 3} - n). Requires n a power of two.
[[nodiscard]] Int karatsuba_space(long long n);

/// Least-squares line through (log2 L, log2 field) over the estimates.
/// Requires at least 10 points and a non-degenerate spread of L.
[[nodiscard]] FitResult fit_powerlaw(const std::vector<ResourceEstimate>& estimates,
                                     CostField field);

/// Same fit for raw (size, bit-count) points, e.g. Karatsuba space.
[[nodiscard]] FitResult fit_powerlaw(const std::vector<std::pair<long long, Int>>& points);

/// Wall-clock days for a Toffoli depth at the given microseconds per gate.
[[nodiscard]] double wall_clock_days(const Int& toffoli_depth, double toffoli_us);

/// Powers of two 2^lo_exp .. 2^hi_exp inclusive.
[[nodiscard]] std::vector<long long> octave_grid(int lo_exp, int hi_exp);

/// Uniform grid in log2 space with `per_octave` points per doubling,
/// from 2^lo_exp up to and including 2^hi_exp.
[[nodiscard]] std::vector<long long> log_grid(int lo_exp, int hi_exp, int per_octave);

}  // namespace qrev
