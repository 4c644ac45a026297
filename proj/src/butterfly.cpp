#include <algorithm>
#include <stdexcept>
#include <vector>

#include "qrev/adders.hpp"
#include "qrev/ringfft.hpp"

namespace qrev {

namespace {

// Rewrites s (n+2 places, value in [0, 2M-2]) to s mod M on the low n+1
// places and clears place n+1. Adding E = 2^(n+2) - M subtracts M mod
// 2^(n+2); the resulting top bit is the borrow kappa = [s < M], which is
// copied out and then used to dress the backward pass so that the
// subtraction is kept when it did not underflow and undone when it did.
// Costs 3n Toffolis; returns the kappa wire for the caller to dispose of.
Wire reduce_sum_halfway(Circuit& c, const std::vector<Wire>& s, int n) {
    const int w = n + 2;
    // E = 2^(n+1) + 2^n - 1: ones below place n, a zero at n, a one on top.
    const auto ebit = [n](int i) { return i != n; };

    std::vector<Wire> carry(w, -1);  // carry[i] enters place i; place 0 has none
    for (int i = 1; i < w; ++i) carry[i] = c.add_wire();

    // Forward: place 0 adds the constant one, so its carry is just the
    // negation of the summed wire; interior places use the majority of the
    // already-summed wire, the constant bit and the incoming carry.
    c.add_not(s[0]);
    c.add_cnot(Control{s[0], false}, carry[1]);
    for (int i = 1; i < w; ++i) {
        if (ebit(i)) c.add_not(s[i]);
        c.add_cnot(Control{carry[i], true}, s[i]);
        if (i + 1 == w) break;
        if (ebit(i)) {
            c.add_toffoli(Control{s[i], true}, Control{carry[i], false}, carry[i + 1]);
            c.add_not(carry[i + 1]);
        } else {
            c.add_toffoli(Control{s[i], false}, Control{carry[i], true}, carry[i + 1]);
        }
    }

    Wire kappa = c.add_wire();
    c.add_cnot(Control{s[w - 1], true}, kappa);

    // Backward: the top place must end clear either way, which collapses
    // its dressed restore to a plain copy of kappa.
    c.add_cnot(Control{kappa, true}, s[w - 1]);
    for (int i = w - 2; i >= 1; --i) {
        if (ebit(i)) {
            c.add_not(carry[i + 1]);
            c.add_toffoli(Control{s[i], true}, Control{carry[i], false}, carry[i + 1]);
        } else {
            c.add_toffoli(Control{s[i], false}, Control{carry[i], true}, carry[i + 1]);
        }
        c.add_toffoli(Control{kappa, true}, Control{carry[i], !ebit(i)}, s[i]);
    }
    c.add_cnot(Control{s[0], false}, carry[1]);
    c.add_cnot(Control{kappa, true}, s[0]);

    for (int i = w - 1; i >= 1; --i) c.free_wire(carry[i]);
    return kappa;
}

// The multiply-by-2^eff rewrite of the reduced difference register x
// (places 0..n, value below M). The high eff places are negated and
// incremented (computing -H mod 2^eff and the all-zero flag gamma), the
// low places absorb a conditional borrow, a set top bit folds into the
// same data path, and a final conditional increment with its carry chain
// produces the new top bit. Returns the diff register and appends the
// two leftover junk wires to `garbage`.
Register shift_reduced(Circuit& c, const std::vector<Wire>& x, int n, int eff,
                       std::vector<Wire>& garbage) {
    const int lo = n - eff;  // eff >= 1 implies lo >= 1
    const auto xh = [&](int j) { return x[static_cast<std::size_t>(n - eff + j)]; };

    // -H mod 2^eff: negate, then increment with a carry chain whose top
    // carry is exactly [H = 0].
    for (int j = 0; j < eff; ++j) c.add_not(xh(j));
    c.add_not(xh(0));
    Control gamma{xh(0), false};
    std::vector<Wire> chain;
    for (int j = 1; j < eff; ++j) {
        Wire cj = c.add_wire();
        c.add_toffoli(gamma, Control{xh(j), true}, cj);
        c.add_cnot(gamma, xh(j));
        chain.push_back(cj);
        gamma = Control{cj, true};
    }

    // Subtract [H != 0] from the low places, tracking the borrow.
    const Control not_gamma{gamma.wire, !gamma.positive};
    std::vector<Wire> borrow;
    c.add_cnot(not_gamma, x[0]);
    borrow.push_back(c.add_wire());
    c.add_toffoli(not_gamma, Control{x[0], true}, borrow.back());
    for (int j = 1; j < lo; ++j) {
        c.add_cnot(Control{borrow.back(), true}, x[static_cast<std::size_t>(j)]);
        Wire bj = c.add_wire();
        c.add_toffoli(Control{borrow.back(), true}, Control{x[static_cast<std::size_t>(j)], true},
                      bj);
        borrow.push_back(bj);
    }
    Wire sign = c.add_wire();
    c.add_cnot(Control{borrow.back(), true}, sign);
    for (int j = lo - 1; j >= 1; --j)
        c.add_toffoli(Control{borrow[static_cast<std::size_t>(j) - 1], true},
                      Control{x[static_cast<std::size_t>(j)], true},
                      borrow[static_cast<std::size_t>(j)]);
    c.add_toffoli(not_gamma, Control{x[0], true}, borrow[0]);
    for (int j = lo - 1; j >= 0; --j) c.free_wire(borrow[static_cast<std::size_t>(j)]);

    // A set top bit means H = Lo = 0 and the true value -2^eff; writing
    // all-ones below and a borrow reproduces it on the same data path.
    for (int j = 0; j < lo; ++j) c.add_cnot(Control{x[static_cast<std::size_t>(n)], true},
                                            x[static_cast<std::size_t>(j)]);
    c.add_cnot(Control{x[static_cast<std::size_t>(n)], true}, sign);

    // The increment chain wires are junk-free from here on.
    for (int j = eff - 2; j >= 0; --j) {
        const Control prev = j == 0 ? Control{xh(0), false}
                                    : Control{chain[static_cast<std::size_t>(j) - 1], true};
        c.add_toffoli(prev, Control{xh(j + 1), false}, chain[static_cast<std::size_t>(j)]);
    }
    for (int j = eff - 2; j >= 0; --j) c.free_wire(chain[static_cast<std::size_t>(j)]);

    // Conditional +1 with the borrow as control: when it fires, every
    // place from eff upward holds a one, so the carry beyond the guessed
    // window is a single wire that becomes the result's top bit.
    std::vector<Wire> v(static_cast<std::size_t>(n));
    for (int j = 0; j < eff; ++j) v[static_cast<std::size_t>(j)] = xh(j);
    for (int j = eff; j < n; ++j) v[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j - eff)];

    std::vector<Wire> k;
    c.add_cnot(Control{sign, true}, v[0]);
    k.push_back(c.add_wire());
    c.add_toffoli(Control{sign, true}, Control{v[0], false}, k.back());
    for (int j = 1; j <= eff; ++j) {
        c.add_cnot(Control{k.back(), true}, v[static_cast<std::size_t>(j)]);
        Wire kj = c.add_wire();
        c.add_toffoli(Control{k.back(), true}, Control{v[static_cast<std::size_t>(j)], false}, kj);
        k.push_back(kj);
    }
    const Wire mu = k.back();
    for (int j = eff + 1; j < n; ++j) c.add_cnot(Control{mu, true}, v[static_cast<std::size_t>(j)]);
    for (int j = eff - 1; j >= 1; --j)
        c.add_toffoli(Control{k[static_cast<std::size_t>(j) - 1], true},
                      Control{v[static_cast<std::size_t>(j)], false},
                      k[static_cast<std::size_t>(j)]);
    c.add_toffoli(Control{sign, true}, Control{v[0], false}, k[0]);
    for (int j = eff; j >= 1; --j) c.free_wire(k[static_cast<std::size_t>(j) - 1]);

    c.mark_garbage(x[static_cast<std::size_t>(n)]);
    c.mark_garbage(sign);
    garbage.push_back(x[static_cast<std::size_t>(n)]);
    garbage.push_back(sign);

    Register diff;
    diff.wires = v;
    diff.wires.push_back(mu);
    return diff;
}

// Ripple cutoff for the wide variant: carries and borrows past this many
// places are dropped, trading an error rate of about 2^-40 per correction
// for depth that no longer grows with the register width.
constexpr int kRelaxedRipple = 40;

// Conditionally adds or subtracts one on the lowest `span` places of v,
// dropping the carry (or borrow) beyond them.
void conditional_unit_add(Circuit& c, const std::vector<Wire>& v, Control ctl, int span,
                          bool subtract) {
    span = std::min<int>(span, static_cast<int>(v.size()));
    c.add_cnot(ctl, v[0]);
    if (span == 1) return;
    std::vector<Wire> k;
    k.push_back(c.add_wire());
    c.add_toffoli(ctl, Control{v[0], subtract}, k.back());
    for (int j = 1; j < span; ++j) {
        c.add_cnot(Control{k.back(), true}, v[static_cast<std::size_t>(j)]);
        if (j == span - 1) break;
        Wire kj = c.add_wire();
        c.add_toffoli(Control{k.back(), true}, Control{v[static_cast<std::size_t>(j)], subtract},
                      kj);
        k.push_back(kj);
    }
    for (int j = static_cast<int>(k.size()) - 1; j >= 1; --j)
        c.add_toffoli(Control{k[static_cast<std::size_t>(j) - 1], true},
                      Control{v[static_cast<std::size_t>(j)], subtract},
                      k[static_cast<std::size_t>(j)]);
    c.add_toffoli(ctl, Control{v[0], subtract}, k[0]);
    for (int j = static_cast<int>(k.size()) - 1; j >= 0; --j)
        c.free_wire(k[static_cast<std::size_t>(j)]);
}

// The multiply-by-2^eff rewrite with every ripple capped at `trunc`
// places. The value sits on n places here: the top place of the reduced
// difference is exactly zero in the wide variant and is handed over as
// `zero_top` to serve as the result's top bit whenever the final carry
// chain is cut short of producing one. Appends the leftover sign wire to
// `garbage`.
Register shift_reduced_relaxed(Circuit& c, const std::vector<Wire>& x, Wire zero_top, int n,
                               int eff, int trunc, std::vector<Wire>& garbage) {
    const int lo = n - eff;
    const auto xh = [&](int j) { return x[static_cast<std::size_t>(n - eff + j)]; };

    // -H mod 2^eff: negate everywhere, increment with a capped chain.
    const int hcap = std::min(eff, trunc);
    for (int j = 0; j < eff; ++j) c.add_not(xh(j));
    c.add_not(xh(0));
    Control gamma{xh(0), false};
    std::vector<Wire> chain;
    for (int j = 1; j < hcap; ++j) {
        Wire cj = c.add_wire();
        c.add_toffoli(gamma, Control{xh(j), true}, cj);
        c.add_cnot(gamma, xh(j));
        chain.push_back(cj);
        gamma = Control{cj, true};
    }

    // Subtract [H != 0] from the low places with a capped borrow ripple.
    const int locap = std::min(lo, trunc);
    const Control not_gamma{gamma.wire, !gamma.positive};
    std::vector<Wire> borrow;
    c.add_cnot(not_gamma, x[0]);
    borrow.push_back(c.add_wire());
    c.add_toffoli(not_gamma, Control{x[0], true}, borrow.back());
    for (int j = 1; j < locap; ++j) {
        c.add_cnot(Control{borrow.back(), true}, x[static_cast<std::size_t>(j)]);
        Wire bj = c.add_wire();
        c.add_toffoli(Control{borrow.back(), true}, Control{x[static_cast<std::size_t>(j)], true},
                      bj);
        borrow.push_back(bj);
    }
    Wire sign = c.add_wire();
    c.add_cnot(Control{borrow.back(), true}, sign);
    for (int j = locap - 1; j >= 1; --j)
        c.add_toffoli(Control{borrow[static_cast<std::size_t>(j) - 1], true},
                      Control{x[static_cast<std::size_t>(j)], true},
                      borrow[static_cast<std::size_t>(j)]);
    c.add_toffoli(not_gamma, Control{x[0], true}, borrow[0]);
    for (int j = locap - 1; j >= 0; --j) c.free_wire(borrow[static_cast<std::size_t>(j)]);

    for (int j = hcap - 2; j >= 0; --j) {
        const Control prev = j == 0 ? Control{xh(0), false}
                                    : Control{chain[static_cast<std::size_t>(j) - 1], true};
        c.add_toffoli(prev, Control{xh(j + 1), false}, chain[static_cast<std::size_t>(j)]);
    }
    for (int j = hcap - 2; j >= 0; --j) c.free_wire(chain[static_cast<std::size_t>(j)]);

    std::vector<Wire> v(static_cast<std::size_t>(n));
    for (int j = 0; j < eff; ++j) v[static_cast<std::size_t>(j)] = xh(j);
    for (int j = eff; j < n; ++j)
        v[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j - eff)];

    // Conditional +1. Within the cap the carry past the negated window is
    // exact and becomes the result's top bit as in the plain rewrite; a
    // window at or beyond the cap keeps the zero top place instead.
    Register diff;
    diff.wires = v;
    if (eff < trunc) {
        std::vector<Wire> k;
        c.add_cnot(Control{sign, true}, v[0]);
        k.push_back(c.add_wire());
        c.add_toffoli(Control{sign, true}, Control{v[0], false}, k.back());
        for (int j = 1; j <= eff; ++j) {
            c.add_cnot(Control{k.back(), true}, v[static_cast<std::size_t>(j)]);
            Wire kj = c.add_wire();
            c.add_toffoli(Control{k.back(), true}, Control{v[static_cast<std::size_t>(j)], false},
                          kj);
            k.push_back(kj);
        }
        const Wire mu = k.back();
        for (int j = eff + 1; j < n; ++j)
            c.add_cnot(Control{mu, true}, v[static_cast<std::size_t>(j)]);
        for (int j = eff - 1; j >= 1; --j)
            c.add_toffoli(Control{k[static_cast<std::size_t>(j) - 1], true},
                          Control{v[static_cast<std::size_t>(j)], false},
                          k[static_cast<std::size_t>(j)]);
        c.add_toffoli(Control{sign, true}, Control{v[0], false}, k[0]);
        for (int j = eff; j >= 1; --j) c.free_wire(k[static_cast<std::size_t>(j) - 1]);
        c.free_wire(zero_top);
        diff.wires.push_back(mu);
    } else {
        conditional_unit_add(c, v, Control{sign, true}, trunc, false);
        diff.wires.push_back(zero_top);
    }

    c.mark_garbage(sign);
    garbage.push_back(sign);
    return diff;
}

}  // namespace

ButterflyPorts build_butterfly(Circuit& c, const Register& a, const Register& b,
                               const RingModulus& modulus, int shift) {
    const int n = modulus.n;
    if (n < 1) throw std::invalid_argument("build_butterfly: modulus exponent must be positive");
    if (a.width() != n + 1 || b.width() != n + 1)
        throw std::invalid_argument("build_butterfly: operand registers must be n+1 wide");
    if (shift < 0 || shift >= 2 * n)
        throw std::invalid_argument("build_butterfly: shift must lie in [0, 2n)");

    // 2^n = -1 folds the upper half of the shift schedule onto the lower:
    // (a-b)*2^shift = (b-a)*2^(shift-n), realized as an operand swap.
    const bool swapped = shift >= n;
    const int eff = swapped ? shift - n : shift;

    // s = a + b on n+2 places (the incoming b wires plus a kept carry).
    std::vector<Wire> s = b.wires;
    s.push_back(build_qq_adder_keep_carry(c, a, b));
    Register s_reg;
    s_reg.wires = s;

    // x = 2a (a fresh low wire under the a wires), then the complement
    // trick turns the running sum into a signed difference: adding s to
    // NOT(x) gives a-b complemented, while an extra incoming carry and no
    // outer negations gives b-a directly.
    std::vector<Wire> x;
    x.push_back(c.add_wire());
    x.insert(x.end(), a.wires.begin(), a.wires.end());
    Register x_reg;
    x_reg.wires = x;
    for (int i = 0; i < n + 2; ++i) c.add_not(x[static_cast<std::size_t>(i)]);
    if (swapped) {
        build_qq_adder_carry_in(c, s_reg, x_reg);
    } else {
        build_qq_adder(c, s_reg, x_reg);
        for (int i = 0; i < n + 2; ++i) c.add_not(x[static_cast<std::size_t>(i)]);
    }

    // Reduce the sum below M, keeping the comparison bit for now.
    const Wire kappa = reduce_sum_halfway(c, s, n);
    c.free_wire(s[static_cast<std::size_t>(n + 1)]);
    ButterflyPorts ports;
    ports.sum.wires.assign(s.begin(), s.end() - 1);

    // Reduce the difference: its sign bit selects a +M correction on the
    // low n+1 places and stays behind as junk.
    const Wire f_minus = x[static_cast<std::size_t>(n + 1)];
    Register d_reg;
    d_reg.wires.assign(x.begin(), x.end() - 1);
    build_const_adder(c, d_reg, modulus.m, Control{f_minus, true});

    // kappa = sum_0 XOR diff_0 XOR sign XOR 1 holds for every input (both
    // reduced outputs and 2a or 2b agree mod 2), so the comparison bit
    // unwinds without any Toffolis.
    c.add_cnot(Control{ports.sum.wires[0], true}, kappa);
    c.add_cnot(Control{d_reg.wires[0], true}, kappa);
    c.add_cnot(Control{f_minus, true}, kappa);
    c.add_not(kappa);
    c.free_wire(kappa);

    c.mark_garbage(f_minus);
    ports.garbage.push_back(f_minus);

    if (eff == 0) {
        ports.diff = d_reg;
        return ports;
    }
    ports.diff = shift_reduced(c, d_reg.wires, n, eff, ports.garbage);
    return ports;
}

ButterflyPorts build_butterfly_parallel(Circuit& c, const Register& a, const Register& b,
                                        const RingModulus& modulus, int shift,
                                        const AdditionLayout& layout) {
    const int n = modulus.n;
    if (n <= kRelaxedRipple)
        throw std::invalid_argument(
            "build_butterfly_parallel: modulus exponent must exceed the ripple cutoff");
    if (a.width() != n + 1 || b.width() != n + 1)
        throw std::invalid_argument(
            "build_butterfly_parallel: operand registers must be n+1 wide");
    if (shift < 0 || shift >= 2 * n)
        throw std::invalid_argument("build_butterfly_parallel: shift must lie in [0, 2n)");

    const int eff = shift % n;

    // s = a + b out of place; b is cancelled against it and freed.
    const QqSelectSum s = build_carry_select_qq(c, a, b, layout, false, false, false);

    // s - 2a over n+2 places in complement form. With an incoming carry
    // this is b - a directly, which serves the upper half of the shift
    // schedule since 2^n = -1 absorbs the negation there; without it,
    // negating the result afterwards gives a - b for the lower half. The
    // operands stay below 2^(n+1), so the top input places carry nothing
    // and the spare a wire is dropped instead of fed to the adder.
    Register twice_a;
    twice_a.wires.push_back(c.add_wire());
    twice_a.wires.insert(twice_a.wires.end(), a.wires.begin(), a.wires.end() - 1);
    const QqSelectSum d = build_carry_select_qq(c, s.sum, twice_a, layout, true, shift >= n, true);
    c.free_wire(a.wires.back());

    const Wire f_minus = d.carry_out;
    if (shift >= n) {
        c.add_not(f_minus);
    } else {
        for (Wire w : d.sum.wires) c.add_not(w);
    }

    // Both top places of the signed difference agree, so the sign clears
    // the duplicate; folding it back as +1 (truncated) reduces mod M.
    std::vector<Wire> xw = d.sum.wires;
    c.add_cnot(Control{f_minus, true}, xw[static_cast<std::size_t>(n)]);
    const std::vector<Wire> xlow(xw.begin(), xw.end() - 1);
    conditional_unit_add(c, xlow, Control{f_minus, true}, kRelaxedRipple, false);
    c.mark_garbage(f_minus);

    // Reduce the sum likewise: a set top place takes one off the rest
    // (truncated) and then unwinds by parity, exactly as in the plain
    // butterfly: s_n = sum_0 XOR diff_0 XOR sign.
    const Wire s_top = s.sum.wires[static_cast<std::size_t>(n)];
    const std::vector<Wire> slow(s.sum.wires.begin(), s.sum.wires.end() - 1);
    conditional_unit_add(c, slow, Control{s_top, true}, kRelaxedRipple, true);
    c.add_cnot(Control{slow[0], true}, s_top);
    c.add_cnot(Control{xlow[0], true}, s_top);
    c.add_cnot(Control{f_minus, true}, s_top);

    ButterflyPorts ports;
    ports.sum = s.sum;
    ports.garbage.push_back(f_minus);

    if (eff == 0) {
        ports.diff = d.sum;
        return ports;
    }
    ports.diff = shift_reduced_relaxed(c, xlow, xw[static_cast<std::size_t>(n)], n, eff,
                                       kRelaxedRipple, ports.garbage);
    return ports;
}

}  // namespace qrev
