#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qrev/bigint.hpp"

/// Independent value-level oracles used by the test suite.
///
/// Everything in this header is deliberately written in the most direct way
/// possible (schoolbook loops, brute-force enumeration, textbook algorithms)
/// so that it shares no code path with the circuit builders or the fast
/// multipliers under test.
namespace qrev::oracle {

/// Plain linear convolution: c[n] = sum_{k+l=n} a[k]*b[l], length |a|+|b|-1.
[[nodiscard]] std::vector<Int> convolve_linear(const std::vector<Int>& a,
                                               const std::vector<Int>& b);

/// Cyclic wrap of a linear convolution to length n, each entry reduced mod m.
[[nodiscard]] std::vector<Int> wrap_cyclic(const std::vector<Int>& values,
                                           std::size_t n, const Int& m);

/// Negacyclic (mod X^n + 1) wrap: wrapped terms enter with a minus sign.
[[nodiscard]] std::vector<Int> wrap_negacyclic(const std::vector<Int>& values,
                                               std::size_t n, const Int& m);

/// Direct O(N^2) discrete Fourier transform over Z/m with root omega:
/// X[k] = sum_j v[j] * omega^(j*k) mod m.
[[nodiscard]] std::vector<Int> dft_direct(const std::vector<Int>& v,
                                          const Int& m, const Int& omega);

/// Modular exponentiation by repeated squaring on cpp_int.
[[nodiscard]] Int modexp(const Int& base, const Int& exponent, const Int& m);

/// Smallest r >= 1 with a^r = 1 mod n; requires gcd(a, n) == 1.
[[nodiscard]] Int multiplicative_order(const Int& a, const Int& n);

/// Brute-force Chinese-remainder reconstruction: the unique x in
/// [0, m1*m2) with x = r1 mod m1 and x = r2 mod m2, found by scanning.
[[nodiscard]] Int crt_brute_force(const Int& r1, const Int& m1, const Int& r2,
                                  const Int& m2);

/// Continued-fraction convergents p/q of num/den, in order of refinement.
[[nodiscard]] std::vector<std::pair<Int, Int>> convergents(const Int& num,
                                                           const Int& den);

/// The butterfly value map on the ring Z/(2^n + 1):
/// (a, b) -> ((a + b) mod M, (a - b) * 2^shift mod M).
[[nodiscard]] std::pair<Int, Int> butterfly_value(const Int& a, const Int& b,
                                                  unsigned shift, unsigned n);

/// (x * 2^shift) mod (2^n + 1), computed directly on big integers.
[[nodiscard]] Int ring_shift_value(const Int& x, unsigned shift, unsigned n);

/// Exhaustive probability that a top-t-bit comparison (ties resolved as
/// "first operand is larger") disagrees with the full >= comparison, over
/// all ordered pairs of w-bit values. Enumerates all 2^(2w) pairs.
[[nodiscard]] double trunc_compare_error_exhaustive(int width, int t);

/// Closed form for the same probability: 2^-t * (1 - 2^-(w-t)) / 2.
[[nodiscard]] double trunc_compare_error_closed_form(int width, int t);

/// Exhaustive probability that guessing carry-in 0 for a len-bit block
/// addition changes the carry-out, over all pairs of len-bit addends.
[[nodiscard]] double superblock_flip_exhaustive(int len);

/// Split x into `count` little-endian blocks of `block_bits` bits each.
[[nodiscard]] std::vector<Int> to_blocks(const Int& x, int block_bits,
                                         std::size_t count);

/// Inverse of to_blocks: sum_i blocks[i] * 2^(i*block_bits).
[[nodiscard]] Int from_blocks(const std::vector<Int>& blocks, int block_bits);

/// Karatsuba scratch-space recursion summed term by term:
/// sum_{i=0}^{log2(n)-1} 3*n*(3/2)^i, evaluated exactly.
[[nodiscard]] Int karatsuba_space_series(const Int& n);

}  // namespace qrev::oracle
