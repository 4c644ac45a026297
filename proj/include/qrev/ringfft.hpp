#pragma once

#include <stdexcept>
#include <vector>

#include "qrev/adders.hpp"
#include "qrev/bigint.hpp"
#include "qrev/circuit.hpp"

namespace qrev {

/// The ring Z/(2^n + 1). Every residue is kept in canonical form [0, M);
/// the top value M-1 = 2^n occupies the (n+1)-st bit inside circuits.
struct RingModulus {
    int n = 0;
    Int m;

    explicit RingModulus(int exponent)
        : n(exponent), m(pow2(static_cast<unsigned>(exponent < 0 ? 0 : exponent)) + 1) {
        if (exponent < 1) throw std::invalid_argument("RingModulus: exponent must be positive");
    }
};

/// A power-of-two-length transform over Z/(2^n + 1) whose root of unity
/// is itself a power of two, so every twiddle multiplication is a shift.
struct FftPlan {
    int length = 0;      ///< N, a power of two
    int omega_log2 = 0;  ///< e with omega = 2^e
    RingModulus modulus;

    FftPlan(int n_len, int e, RingModulus mod);

    [[nodiscard]] int levels() const;
};

/// Residue vectors are plain element lists; all invariants are enforced
/// by the operations that produce them.
using RingVector = std::vector<Int>;

/// Direct evaluation of the two root conditions: omega^N = 1 and
/// sum_{j<N} omega^(j*p) = 0 for every 0 < p < N.
[[nodiscard]] bool validate_root(const Int& m, const Int& omega, int length);
[[nodiscard]] bool validate_root(const FftPlan& plan);

/// x * 2^shift mod (2^n + 1), computed by splitting x << shift into
/// n-bit blocks that enter with alternating signs (2^n = -1).
[[nodiscard]] Int ring_mul_pow2(const Int& x, int shift, const RingModulus& modulus);

/// Unnormalized DFT: out_k = sum_m omega^(k*m) v_m mod M, natural order
/// in and out (the decimation reordering is undone at the end).
[[nodiscard]] RingVector fft(const RingVector& v, const FftPlan& plan);

/// Inverse transform using omega^-1 = omega^(N-1) twiddles and a final
/// multiplication by N^-1 mod M, so that ifft(fft(v)) = v exactly.
[[nodiscard]] RingVector ifft(const RingVector& v, const FftPlan& plan);

/// Result of an FFT-based convolution. When the zero-padding rule was
/// violated the cyclic wraparound is real and `wrapped` says so.
struct Convolution {
    RingVector values;
    bool wrapped = false;
};

/// Acyclic convolution mod M of two half-padded vectors, via
/// ifft(fft(a) . fft(b)). Components are exact integers whenever every
/// true convolution component is below M.
[[nodiscard]] Convolution convolve_via_fft(const RingVector& a, const RingVector& b,
                                           const FftPlan& plan);

/// Negacyclic product c_n = sum (delta_{k+l,n} - delta_{k+l,n+N}) a_k b_l
/// mod M, via psi-weighting, a cyclic convolution of full length (no
/// padding), inverse weighting, and division by N. Requires psi^2 = omega.
[[nodiscard]] RingVector negacyclic_multiply(const RingVector& a, const RingVector& b,
                                             const FftPlan& plan, int psi_log2);

/// Chinese-remainder reconstruction of x < (2^(2n)+1)(2^n+1) from
/// x1 = x mod (2^n+1) and x2 = x mod (2^(2n)+1).
[[nodiscard]] Int crt_recombine(const Int& x1, const Int& x2, int n);

/// Wires produced by a reversible butterfly: the two result registers
/// (each n+1 wires) and the junk wires left behind.
struct ButterflyPorts {
    Register sum;
    Register diff;
    std::vector<Wire> garbage;
};

/// Reversible butterfly (a, b) -> ((a+b) mod M, (a-b)*2^shift mod M) for
/// inputs below M on (n+1)-wire registers. Leaves at most 3 garbage
/// wires: the parity-reduced range-condition bit, the top bit of the
/// pre-shift difference, and the final conditional-correction carry.
/// The result registers reuse input wires; `a` and `b` are consumed.
[[nodiscard]] ButterflyPorts build_butterfly(Circuit& c, const Register& a, const Register& b,
                                             const RingModulus& modulus, int shift);

/// Parallelized butterfly for wide registers (n > 40): the two q+q
/// additions run as carry-select adders under `layout`, and every +-1
/// correction ripple is truncated to the 40 least significant bits, for
/// a per-gate error rate of about 2^-40. Inputs are assumed < 2^n (the
/// top bit of each register must be 0); garbage shrinks to 2 wires.
[[nodiscard]] ButterflyPorts build_butterfly_parallel(Circuit& c, const Register& a,
                                                      const Register& b,
                                                      const RingModulus& modulus, int shift,
                                                      const AdditionLayout& layout);

}  // namespace qrev
