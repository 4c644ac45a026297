#pragma once

#include <vector>

#include "qrev/bigint.hpp"
#include "qrev/circuit.hpp"

namespace qrev {

/// How the modular adder's magnitude comparisons are performed: over the
/// full register or only over the `bits` most significant places (which
/// trades a bounded error rate for a chain of length O(log L)).
struct ComparePolicy {
    enum class Kind { Full, Truncated };
    Kind kind = Kind::Full;
    int bits = 0;

    static ComparePolicy full() { return ComparePolicy{Kind::Full, 0}; }
    static ComparePolicy truncated(int t);
};

/// In-place a += A (mod 2^width), unconditional. Toffoli count 2w-2; the
/// carry register is allocated, used and uncomputed inside the call.
void build_const_adder(Circuit& c, const Register& a, const Int& A);

/// In-place a += A (mod 2^width) when `enable` fires, identity otherwise.
/// The forward pass adds unconditionally; only the backward sum-restoring
/// gates carry the negated enable, giving 3w-2 Toffolis.
void build_const_adder(Circuit& c, const Register& a, const Int& A, Control enable);

/// In-place s -> (s + B) mod N on a register of `s.width()` bits holding
/// s < N, when `enable` fires. The branch bit kappa = [s >= N-B] AND e is
/// computed by a (possibly truncated) comparison, consumed by mixed-place
/// add networks costing one Toffoli per place, and uncomputed from the
/// result via [s' < B]. With a truncated policy both the value and the
/// kappa wire can err at a rate below 2^-(compared bits) each.
void build_modular_const_adder(Circuit& c, const Register& s, const Int& B, const Int& N,
                               Control enable, ComparePolicy policy);

/// In-place b += a (mod 2^width), both quantum. Toffoli count 2w-2.
void build_qq_adder(Circuit& c, const Register& a, const Register& b);

/// As build_qq_adder but also produces the outgoing carry on a fresh
/// wire (returned), so the sum a+b is available on width+1 bits.
[[nodiscard]] Wire build_qq_adder_keep_carry(Circuit& c, const Register& a, const Register& b);

/// In-place b -> b + a + 1 (mod 2^width): an incoming carry of 1, used by
/// complement tricks that need b - a = NOT(NOT(b) + a) style arithmetic.
void build_qq_adder_carry_in(Circuit& c, const Register& a, const Register& b);

/// In-place b -= a (mod 2^width) via the complement technique.
void build_qq_subtractor(Circuit& c, const Register& a, const Register& b);

/// Block/superblock decomposition for the parallelized adder.
struct AdditionLayout {
    int block_len = 0;             ///< l, bits per block
    int blocks_per_superblock = 0; ///< b''
    int superblock_count = 0;      ///< b'
    int superblock_len = 0;        ///< bits per superblock, b'' * l
    bool extrapolated = false;     ///< true when L was outside 2^9..2^25

    [[nodiscard]] long long block_count() const {
        return static_cast<long long>(blocks_per_superblock) * superblock_count;
    }
};

/// Chooses l and b'' nearly equal with b''*l covering the superblock
/// target round(3 + 3*log2(L)) up to one spare bit, minimizing the time
/// estimate 11l + 12b''. Outside the supported range the layout is still
/// produced but flagged as extrapolated.
[[nodiscard]] AdditionLayout choose_addition_layout(int bit_length, double epsilon);

/// Parallelized conditional constant addition: a += A (mod 2^width) when
/// `enable` fires. Both block-carry guesses are prepared per block, the
/// selector chain is resolved per superblock with guessed superblock
/// carries, the sum is assembled into a fresh register, a mirrored second
/// pass clears the input, and a conditional swap puts the result back on
/// the input wires. The output differs from the true sum only when a
/// superblock carry guess fails.
void build_carry_select_adder(Circuit& c, const Register& a, const Int& A, Control enable,
                              const AdditionLayout& layout);

/// Result of the out-of-place parallelized quantum+quantum addition.
struct QqSelectSum {
    Register sum;
    Wire carry_out = -1;  ///< fresh wire with the outgoing carry, if kept
};

/// Out-of-place parallelized r = x + y + carry_in (mod 2^width) in
/// carry-select form under `layout`. Per-block carry chains run against a
/// zero guess and superblock selectors correct them one level deep, so a
/// wrong inter-superblock guess corrupts the result at a rate around
/// 2^-superblock_len per boundary. x is left intact; y is cancelled
/// against the result by a mirrored borrow-mode pass and freed. With
/// `complement_y` the y register enters negated (the subtraction building
/// block). The kept carry is subject to the same guess discipline.
[[nodiscard]] QqSelectSum build_carry_select_qq(Circuit& c, const Register& x, const Register& y,
                                                const AdditionLayout& layout, bool complement_y,
                                                bool carry_in, bool keep_carry);

/// One scheduled addend for the running-sum scheme.
struct Summand {
    Int value;
    Control control;
};

/// Accumulates all enabled summands (each < N) non-modularly into a fresh
/// register s while a short register s' tracks the most significant bits;
/// the quotient floor(s'/N') then drives shift-and-conditional-subtract
/// steps that reduce s below N, after which s' and the quotient are
/// uncomputed by running their computations backwards. Returns s.
[[nodiscard]] Register build_running_sum_modular(Circuit& c, const std::vector<Summand>& summands,
                                                 const Int& N, int s_prime_width);

}  // namespace qrev
