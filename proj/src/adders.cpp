#include "qrev/adders.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace qrev {

namespace {

Control negate(Control c) { return Control{c.wire, !c.positive}; }

int ibits(const Int& v) { return static_cast<int>(bit_length(v)); }

void check_width_positive(const Register& r, const char* who) {
    if (r.width() <= 0) throw std::invalid_argument(std::string(who) + ": empty register");
}

void check_constant_range(const Int& v, int width, const char* who) {
    if (v < 0 || ibits(v) > width)
        throw std::invalid_argument(std::string(who) + ": constant out of range for width " +
                                    std::to_string(width));
}

// Emits out ^= maj(x, bit, cin) where maj is the carry of x + bit + cin and
// the x wire still holds its pre-sum value. With bit = 1 the majority is an
// OR, realized as a negated-control Toffoli plus a NOT; `reverse` emits the
// inverse order so chains can be uncomputed gate by gate.
void emit_maj_pre(Circuit& c, Control x, bool bit, Control cin, Wire out, bool reverse) {
    if (!bit) {
        c.add_toffoli(x, cin, out);
        return;
    }
    if (reverse) c.add_not(out);
    c.add_toffoli(negate(x), negate(cin), out);
    if (!reverse) c.add_not(out);
}

// Same carry, but the x wire already holds x ^ bit ^ cin (the written sum).
void emit_maj_post(Circuit& c, Wire x, bool bit, Control cin, Wire out, bool reverse) {
    if (!bit) {
        c.add_toffoli(Control{x, false}, cin, out);
        return;
    }
    if (reverse) c.add_not(out);
    c.add_toffoli(Control{x, true}, negate(cin), out);
    if (!reverse) c.add_not(out);
}

// Comparison chain computing ge = [top_t(reg) >= top_t(y)] with ties
// resolving to "greater or equal" (the carry of x + NOT(y) + 1 over the
// compared window). Constant prefixes fold away; the chain may collapse to
// a known constant.
class GeChain {
  public:
    GeChain(const Register& reg, const Int& y, int t) : reg_(reg), y_(y), t_(t) {
        if (t_ < 1 || t_ > reg_.width())
            throw std::invalid_argument("comparison width out of range");
    }

    struct Top {
        bool is_const = false;
        bool const_value = false;
        Wire wire = -1;
    };

    Top build(Circuit& c) {
        const int w = reg_.width();
        bool const_state = true;
        bool const_value = true;  // empty suffix ties resolve to true
        Wire prev = -1;
        for (int j = w - t_; j < w; ++j) {
            const bool nb = !bit_of(y_, j);  // addend bit of NOT(y)
            if (const_state) {
                if (nb == const_value) {
                    steps_.push_back({StepKind::Fold, j, nb, -1, -1});
                    continue;  // maj(x, b, b) = b
                }
                Wire wnew = c.add_wire();
                c.add_cnot(Control{reg_[j], true}, wnew);
                steps_.push_back({StepKind::Start, j, nb, -1, wnew});
                wires_.push_back(wnew);
                prev = wnew;
                const_state = false;
            } else {
                Wire wnew = c.add_wire();
                emit_maj_pre(c, Control{reg_[j], true}, nb, Control{prev, true}, wnew, false);
                steps_.push_back({StepKind::Extend, j, nb, prev, wnew});
                wires_.push_back(wnew);
                prev = wnew;
            }
        }
        if (const_state) return Top{true, const_value, -1};
        return Top{false, false, prev};
    }

    void unbuild(Circuit& c) {
        for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
            switch (it->kind) {
                case StepKind::Fold:
                    break;
                case StepKind::Start:
                    c.add_cnot(Control{reg_[it->place], true}, it->out);
                    break;
                case StepKind::Extend:
                    emit_maj_pre(c, Control{reg_[it->place], true}, it->bit,
                                 Control{it->in, true}, it->out, true);
                    break;
            }
        }
        for (auto it = wires_.rbegin(); it != wires_.rend(); ++it) c.free_wire(*it);
        steps_.clear();
        wires_.clear();
    }

  private:
    enum class StepKind { Fold, Start, Extend };
    struct Step {
        StepKind kind;
        int place;
        bool bit;
        Wire in;
        Wire out;
    };
    const Register& reg_;
    Int y_;
    int t_;
    std::vector<Step> steps_;
    std::vector<Wire> wires_;
};

}  // namespace

ComparePolicy ComparePolicy::truncated(int t) {
    if (t < 1) throw std::invalid_argument("truncated comparison needs at least one bit");
    return ComparePolicy{Kind::Truncated, t};
}

void build_const_adder(Circuit& c, const Register& a, const Int& A) {
    check_width_positive(a, "build_const_adder");
    const int w = a.width();
    check_constant_range(A, w, "build_const_adder");

    // Carry rail c_0 = 0 plus carries into places 1..w-1, all uncomputed.
    std::vector<Wire> carry(w);
    for (int i = 0; i < w; ++i) carry[i] = c.add_wire();
    for (int i = 0; i + 1 < w; ++i)
        emit_maj_pre(c, Control{a[i], true}, bit_of(A, i), Control{carry[i], true}, carry[i + 1],
                     false);
    // Descending: undo the carry above this place, then write the sum.
    for (int i = w - 1; i >= 0; --i) {
        if (i + 1 < w)
            emit_maj_pre(c, Control{a[i], true}, bit_of(A, i), Control{carry[i], true},
                         carry[i + 1], true);
        if (bit_of(A, i)) c.add_not(a[i]);
        c.add_cnot(Control{carry[i], true}, a[i]);
    }
    for (int i = w - 1; i >= 0; --i) c.free_wire(carry[i]);
}

void build_const_adder(Circuit& c, const Register& a, const Int& A, Control enable) {
    check_width_positive(a, "build_const_adder");
    const int w = a.width();
    check_constant_range(A, w, "build_const_adder");

    std::vector<Wire> carry(w);
    for (int i = 0; i < w; ++i) carry[i] = c.add_wire();
    // Forward pass adds unconditionally: sums in place, carries from the
    // already-summed wire.
    for (int i = 0; i < w; ++i) {
        if (bit_of(A, i)) c.add_not(a[i]);
        c.add_cnot(Control{carry[i], true}, a[i]);
        if (i + 1 < w)
            emit_maj_post(c, a[i], bit_of(A, i), Control{carry[i], true}, carry[i + 1], false);
    }
    // Backward pass: only the sum-restoring gates depend on the negated
    // enable, so a set enable leaves the sum and a clear enable undoes it.
    const Control ebar = negate(enable);
    for (int i = w - 1; i >= 0; --i) {
        if (i + 1 < w)
            emit_maj_post(c, a[i], bit_of(A, i), Control{carry[i], true}, carry[i + 1], true);
        c.add_toffoli(ebar, Control{carry[i], !bit_of(A, i)}, a[i]);
    }
    for (int i = w - 1; i >= 0; --i) c.free_wire(carry[i]);
}

void build_modular_const_adder(Circuit& c, const Register& s, const Int& B, const Int& N,
                               Control enable, ComparePolicy policy) {
    check_width_positive(s, "build_modular_const_adder");
    const int w = s.width();
    if (N < 1 || ibits(N) > w)
        throw std::invalid_argument("build_modular_const_adder: modulus out of range");
    if (B < 0 || B >= N)
        throw std::invalid_argument("build_modular_const_adder: addend must satisfy 0 <= B < N");
    const int t = policy.kind == ComparePolicy::Kind::Full ? w : std::min(policy.bits, w);

    const Int C = N - B;                          // branch condition [s >= N-B]
    const Int D = mod_floor(pow2(w) + B - N, pow2(w));  // complement addend for that branch

    // Branch bit kappa = [s >= N-B] AND enable; with a clear enable kappa
    // stays 0 and the backward pass below restores the register.
    Wire kappa = c.add_wire();
    {
        GeChain chain(s, C, t);
        auto top = chain.build(c);
        if (top.is_const) {
            if (top.const_value) c.add_cnot(enable, kappa);
        } else {
            c.add_toffoli(Control{top.wire, true}, enable, kappa);
        }
        chain.unbuild(c);
    }

    std::vector<Wire> carry(w);
    for (int i = 0; i < w; ++i) carry[i] = c.add_wire();
    const Control ebar = negate(enable);

    // Forward: places where B and D agree use the plain conditional-adder
    // network; places where they differ add kappa (or NOT kappa) via the
    // mixed network that folds the branch bit into the carry wire.
    for (int i = 0; i < w; ++i) {
        const bool bb = bit_of(B, i);
        const bool db = bit_of(D, i);
        if (bb == db) {
            if (bb) c.add_not(s[i]);
            c.add_cnot(Control{carry[i], true}, s[i]);
            if (i + 1 < w)
                emit_maj_post(c, s[i], bb, Control{carry[i], true}, carry[i + 1], false);
        } else {
            const Control k{kappa, db};  // addend bit = kappa if D_i=1, else NOT kappa
            c.add_cnot(k, carry[i]);
            c.add_cnot(Control{carry[i], true}, s[i]);
            if (i + 1 < w) {
                c.add_cnot(k, s[i]);
                c.add_not(s[i]);
                c.add_toffoli(Control{s[i], true}, Control{carry[i], true}, carry[i + 1]);
                c.add_not(s[i]);
                c.add_cnot(k, s[i]);
                c.add_cnot(k, carry[i + 1]);
            }
        }
    }
    // Backward: uncompute carries; sum-restoring gates carry the negated
    // enable as in the conditional adder.
    for (int i = w - 1; i >= 0; --i) {
        const bool bb = bit_of(B, i);
        const bool db = bit_of(D, i);
        if (bb == db) {
            if (i + 1 < w)
                emit_maj_post(c, s[i], bb, Control{carry[i], true}, carry[i + 1], true);
            c.add_toffoli(ebar, Control{carry[i], !bb}, s[i]);
        } else {
            const Control k{kappa, db};
            if (i + 1 < w) {
                c.add_cnot(k, carry[i + 1]);
                c.add_cnot(k, s[i]);
                c.add_not(s[i]);
                c.add_toffoli(Control{s[i], true}, Control{carry[i], true}, carry[i + 1]);
                c.add_not(s[i]);
                c.add_cnot(k, s[i]);
            }
            c.add_toffoli(ebar, Control{carry[i], true}, s[i]);
            c.add_cnot(k, carry[i]);
        }
    }
    for (int i = w - 1; i >= 0; --i) c.free_wire(carry[i]);

    // Uncompute kappa from the result: [s' < B] AND enable, realized as the
    // negated [s' >= B] chain top.
    {
        GeChain chain(s, B, t);
        auto top = chain.build(c);
        if (top.is_const) {
            if (!top.const_value) c.add_cnot(enable, kappa);
        } else {
            c.add_toffoli(Control{top.wire, false}, enable, kappa);
        }
        chain.unbuild(c);
    }
    c.free_wire(kappa);
}

namespace {

void validate_qq(const Register& a, const Register& b) {
    if (a.width() != b.width())
        throw std::invalid_argument("quantum+quantum addition needs equal widths");
    check_width_positive(a, "build_qq_adder");
}

// Shared core of the quantum+quantum adders: b += a + carry_in, with an
// optional kept carry-out wire. Nine gates per place; the backward pass
// leaves away the two leading sum gates so the sum survives while carries
// are uncomputed.
void qq_add_core(Circuit& c, const Register& a, const Register& b, bool carry_in_one,
                 Wire carry_out) {
    validate_qq(a, b);
    const int w = a.width();

    std::vector<Wire> carry(w);
    for (int i = 0; i < w; ++i) carry[i] = c.add_wire();
    if (carry_in_one) c.add_not(carry[0]);

    const int last_full = carry_out >= 0 ? w - 1 : w - 2;
    for (int i = 0; i < w; ++i) {
        if (i <= last_full) {
            const Wire cn = i + 1 < w ? carry[i + 1] : carry_out;
            c.add_cnot(Control{a[i], true}, b[i]);
            c.add_cnot(Control{carry[i], true}, b[i]);
            c.add_not(b[i]);
            c.add_cnot(Control{a[i], true}, b[i]);
            c.add_cnot(Control{a[i], true}, carry[i]);
            c.add_toffoli(Control{b[i], true}, Control{carry[i], true}, cn);
            c.add_cnot(Control{a[i], true}, b[i]);
            c.add_cnot(Control{a[i], true}, cn);
            c.add_not(b[i]);
        } else {
            // Top place without carry-out: the sum needs two frees only.
            c.add_cnot(Control{a[i], true}, b[i]);
            c.add_cnot(Control{carry[i], true}, b[i]);
        }
    }
    // The kept-carry top place morphed its carry-in; restore just that.
    if (carry_out >= 0) c.add_cnot(Control{a[w - 1], true}, carry[w - 1]);
    for (int i = w - 2; i >= 0; --i) {
        const Wire cn = carry[i + 1];
        c.add_not(b[i]);
        c.add_cnot(Control{a[i], true}, cn);
        c.add_cnot(Control{a[i], true}, b[i]);
        c.add_toffoli(Control{b[i], true}, Control{carry[i], true}, cn);
        c.add_cnot(Control{a[i], true}, carry[i]);
        c.add_cnot(Control{a[i], true}, b[i]);
        c.add_not(b[i]);
    }
    if (carry_in_one) c.add_not(carry[0]);
    for (int i = w - 1; i >= 0; --i) c.free_wire(carry[i]);
}

}  // namespace

void build_qq_adder(Circuit& c, const Register& a, const Register& b) {
    qq_add_core(c, a, b, false, -1);
}

Wire build_qq_adder_keep_carry(Circuit& c, const Register& a, const Register& b) {
    validate_qq(a, b);
    Wire out = c.add_wire();
    qq_add_core(c, a, b, false, out);
    return out;
}

void build_qq_adder_carry_in(Circuit& c, const Register& a, const Register& b) {
    qq_add_core(c, a, b, true, -1);
}

void build_qq_subtractor(Circuit& c, const Register& a, const Register& b) {
    // b - a = NOT(NOT(b) + a), the complement technique.
    for (int i = 0; i < b.width(); ++i) c.add_not(b[i]);
    qq_add_core(c, a, b, false, -1);
    for (int i = 0; i < b.width(); ++i) c.add_not(b[i]);
}

AdditionLayout choose_addition_layout(int bit_length, double epsilon) {
    if (bit_length < 4) throw std::invalid_argument("choose_addition_layout: width too small");
    if (epsilon <= 0 || epsilon >= 1)
        throw std::invalid_argument("choose_addition_layout: error budget must be in (0,1)");

    AdditionLayout out;
    out.extrapolated = bit_length < (1 << 9) || bit_length > (1 << 25);
    const int target = static_cast<int>(std::lround(3.0 + 3.0 * std::log2(double(bit_length))));

    // Pick l and b'' nearly equal, covering the superblock up to one spare
    // bit, minimizing the depth estimate 11l + 12b''.
    int best_cost = -1;
    for (int l = 2; l <= target + 1; ++l) {
        for (int d = -1; d <= 1; ++d) {
            const int b2 = l + d;
            if (b2 < 1) continue;
            if (b2 * l < target - 1) continue;
            const int cost = 11 * l + 12 * b2;
            if (best_cost < 0 || cost < best_cost) {
                best_cost = cost;
                out.block_len = l;
                out.blocks_per_superblock = b2;
            }
        }
    }
    out.superblock_len = out.block_len * out.blocks_per_superblock;
    out.superblock_count =
        (bit_length + out.superblock_len - 1) / out.superblock_len;
    return out;
}

namespace {

// Block geometry shared by the two passes of the carry-select adder.
struct CsGeometry {
    std::vector<std::pair<int, int>> blocks;  // (low bit, length)
    int per_superblock = 0;

    [[nodiscard]] int superblock_of(int k) const { return k / per_superblock; }
    [[nodiscard]] int local_index(int k) const { return k % per_superblock; }
    [[nodiscard]] int superblock_count() const {
        return (static_cast<int>(blocks.size()) + per_superblock - 1) / per_superblock;
    }
    [[nodiscard]] int last_block_of(int sb) const {
        return std::min(static_cast<int>(blocks.size()), (sb + 1) * per_superblock) - 1;
    }
};

// Guessed carry (or borrow) chain of one block against the constant, seeded
// with 0. chain[j] is the carry out of local place j. The network shape is
// kept independent of the constant's bit pattern (only gate polarities vary
// with it), so counts and depth do not drift with the addend. `reverse`
// uncomputes.
void emit_block_chain(Circuit& c, const Register& data, const Int& A, int lo, int len, bool xpol,
                      std::vector<Wire>& chain, bool reverse) {
    if (!reverse) {
        chain.assign(len, -1);
        for (int j = 0; j < len; ++j) {
            chain[j] = c.add_wire();
            if (j == 0) {
                if (bit_of(A, lo)) c.add_cnot(Control{data[lo], xpol}, chain[0]);
            } else {
                emit_maj_pre(c, Control{data[lo + j], xpol}, bit_of(A, lo + j),
                             Control{chain[j - 1], true}, chain[j], false);
            }
        }
    } else {
        for (int j = len - 1; j >= 0; --j) {
            if (j == 0) {
                if (bit_of(A, lo)) c.add_cnot(Control{data[lo], xpol}, chain[0]);
            } else {
                emit_maj_pre(c, Control{data[lo + j], xpol}, bit_of(A, lo + j),
                             Control{chain[j - 1], true}, chain[j], true);
            }
            c.free_wire(chain[j]);
        }
        chain.clear();
    }
}

// XORs the constant's bits and the chain carries into the data block,
// morphing it into the guessed in-block sum (or difference). Self-inverse.
void emit_block_morph(Circuit& c, const Register& data, const Int& A, int lo, int len,
                      const std::vector<Wire>& chain) {
    for (int j = 0; j < len; ++j) {
        if (bit_of(A, lo + j)) c.add_not(data[lo + j]);
        if (j >= 1 && chain[j - 1] >= 0) c.add_cnot(Control{chain[j - 1], true}, data[lo + j]);
    }
}

// Propagate prefixes over the morphed block: prefix[t] tells whether an
// incoming carry would ripple past local places 0..t+1 (all ones in carry
// mode, all zeros in borrow mode).
void emit_block_prefix(Circuit& c, const Register& data, int lo, int len, bool ppol,
                       std::vector<Wire>& prefix, bool reverse) {
    if (len < 2) return;
    if (!reverse) {
        prefix.resize(len - 1);
        prefix[0] = c.add_wire();
        c.add_toffoli(Control{data[lo], ppol}, Control{data[lo + 1], ppol}, prefix[0]);
        for (int t = 1; t + 1 < len; ++t) {
            prefix[t] = c.add_wire();
            c.add_toffoli(Control{prefix[t - 1], true}, Control{data[lo + t + 1], ppol},
                          prefix[t]);
        }
    } else {
        for (int t = len - 2; t >= 1; --t)
            c.add_toffoli(Control{prefix[t - 1], true}, Control{data[lo + t + 1], ppol},
                          prefix[t]);
        c.add_toffoli(Control{data[lo], ppol}, Control{data[lo + 1], ppol}, prefix[0]);
        for (int t = len - 2; t >= 0; --t) c.free_wire(prefix[t]);
        prefix.clear();
    }
}

// A selector value: absent = known constant 0, otherwise a control on a
// live wire (possibly aliasing a chain top rather than a fresh wire).
struct SelState {
    std::optional<Control> out;
    Wire alloc = -1;
};

// sel_out = block_carry_out XOR (sel_in AND propagate). When the incoming
// selector is a known 0 the output aliases the chain top for free.
SelState mux_forward(Circuit& c, const std::optional<Control>& sel_in, Wire block_out,
                     Control prop) {
    SelState s;
    if (!sel_in) {
        if (block_out >= 0) s.out = Control{block_out, true};
        return s;
    }
    s.alloc = c.add_wire();
    if (block_out >= 0) c.add_cnot(Control{block_out, true}, s.alloc);
    c.add_toffoli(*sel_in, prop, s.alloc);
    s.out = Control{s.alloc, true};
    return s;
}

void mux_reverse(Circuit& c, const SelState& s, const std::optional<Control>& sel_in,
                 Wire block_out, Control prop) {
    if (s.alloc < 0) return;
    c.add_toffoli(*sel_in, prop, s.alloc);
    if (block_out >= 0) c.add_cnot(Control{block_out, true}, s.alloc);
    c.free_wire(s.alloc);
}

// Emits one full carry-select pass: per-block guessed chains against the
// constant, superblock-seeded selector chains, a masked copy of the
// selected candidate into `target`, and the mirror-image uncomputation of
// every scratch wire. In borrow mode the chains subtract the constant (the
// second pass uses this to cancel the input register against the sum).
void carry_select_pass(Circuit& c, const Register& data, const Register& target, const Int& A,
                       bool borrow, Control enable, const CsGeometry& geo) {
    const bool xpol = !borrow;  // data polarity inside chain carries
    const bool ppol = !borrow;  // morphed-data polarity inside propagate tests
    const int nblocks = static_cast<int>(geo.blocks.size());
    const int nsb = geo.superblock_count();

    std::vector<std::vector<Wire>> chain(nblocks);
    std::vector<std::vector<Wire>> prefix(nblocks);
    std::vector<SelState> p(nblocks);
    std::vector<SelState> f(nblocks);
    std::vector<Wire> mask(nblocks, -1);
    std::vector<Wire> esup(nsb, -1);
    std::vector<Wire> ecopy(nblocks, -1);

    auto block_out = [&](int k) -> Wire {
        return chain[k].empty() ? -1 : chain[k][geo.blocks[k].second - 1];
    };
    auto prop = [&](int k) -> Control {
        auto [lo, len] = geo.blocks[k];
        if (len >= 2) return Control{prefix[k].back(), true};
        return Control{data[lo], ppol};
    };
    auto p_sel_in = [&](int k) -> std::optional<Control> {
        if (geo.local_index(k) == 0) return std::nullopt;
        return p[k - 1].out;
    };
    auto seed = [&](int s) -> std::optional<Control> {
        if (s == 0) return std::nullopt;
        return p[geo.last_block_of(s - 1)].out;
    };
    // Selector into block k along the corrected chain of its superblock.
    auto f_sel_in = [&](int k) -> std::optional<Control> {
        if (geo.local_index(k) == 0) return seed(geo.superblock_of(k));
        return f[k - 1].out;
    };

    // Enable fan-out, charged up front: one copy per superblock shared by
    // that superblock's masks, one per block for its copy legs. Filling and
    // clearing happen outside the Toffoli schedule so blocks stay
    // time-independent of each other.
    for (int s = 0; s < nsb; ++s) {
        esup[s] = c.add_wire();
        c.add_cnot(enable, esup[s]);
    }
    for (int k = 0; k < nblocks; ++k) {
        ecopy[k] = c.add_wire();
        c.add_cnot(enable, ecopy[k]);
    }
    for (int k = 0; k < nblocks; ++k) {
        auto [lo, len] = geo.blocks[k];
        emit_block_chain(c, data, A, lo, len, xpol, chain[k], false);
    }
    for (int k = 0; k < nblocks; ++k) {
        auto [lo, len] = geo.blocks[k];
        emit_block_morph(c, data, A, lo, len, chain[k]);
    }
    for (int k = 0; k < nblocks; ++k) {
        auto [lo, len] = geo.blocks[k];
        emit_block_prefix(c, data, lo, len, ppol, prefix[k], false);
    }
    // Guess selectors: carry out of each superblock relative to a zero seed.
    // The last superblock feeds nothing downstream and is skipped.
    for (int k = 0; k < nblocks && geo.superblock_of(k) + 1 < nsb; ++k)
        p[k] = mux_forward(c, p_sel_in(k), block_out(k), prop(k));
    // Corrected selectors within each superblock, seeded by the previous
    // superblock's guess. The carry out of a superblock's last block is
    // never consumed, so those muxes are skipped.
    for (int k = 0; k + 1 < nblocks; ++k) {
        if (geo.local_index(k) == geo.per_superblock - 1) continue;
        f[k] = mux_forward(c, f_sel_in(k), block_out(k), prop(k));
    }
    // Enable masks: each superblock's masks share its enable copy, so they
    // serialize on it (the selector chain they read is serial anyway).
    for (int k = 0; k < nblocks; ++k) {
        auto sel = f_sel_in(k);
        if (!sel) continue;
        mask[k] = c.add_wire();
        c.add_toffoli(*sel, Control{esup[geo.superblock_of(k)], true}, mask[k]);
    }
    // Masked copy: the enable leg writes the guessed candidate, the mask leg
    // XORs in the ripple a selected incoming carry would cause.
    for (int k = 0; k < nblocks; ++k) {
        auto [lo, len] = geo.blocks[k];
        for (int j = 0; j < len; ++j)
            c.add_toffoli(Control{ecopy[k], true}, Control{data[lo + j], true}, target[lo + j]);
        if (mask[k] >= 0) {
            c.add_cnot(Control{mask[k], true}, target[lo]);
            if (len >= 2)
                c.add_toffoli(Control{mask[k], true}, Control{data[lo], ppol}, target[lo + 1]);
            for (int j = 2; j < len; ++j)
                c.add_toffoli(Control{mask[k], true}, Control{prefix[k][j - 2], true},
                              target[lo + j]);
        }
    }
    // Mirror image: everything below uncomputes from the still intact data.
    for (int k = nblocks - 1; k >= 0; --k) {
        if (mask[k] < 0) continue;
        c.add_toffoli(*f_sel_in(k), Control{esup[geo.superblock_of(k)], true}, mask[k]);
        c.free_wire(mask[k]);
    }
    for (int k = nblocks - 2; k >= 0; --k) {
        if (geo.local_index(k) == geo.per_superblock - 1) continue;
        mux_reverse(c, f[k], f_sel_in(k), block_out(k), prop(k));
    }
    for (int k = nblocks - 1; k >= 0; --k) {
        if (geo.superblock_of(k) + 1 >= nsb) continue;
        mux_reverse(c, p[k], p_sel_in(k), block_out(k), prop(k));
    }
    for (int k = nblocks - 1; k >= 0; --k) {
        auto [lo, len] = geo.blocks[k];
        emit_block_prefix(c, data, lo, len, ppol, prefix[k], true);
    }
    for (int k = nblocks - 1; k >= 0; --k) {
        auto [lo, len] = geo.blocks[k];
        emit_block_morph(c, data, A, lo, len, chain[k]);
    }
    for (int k = nblocks - 1; k >= 0; --k) {
        auto [lo, len] = geo.blocks[k];
        emit_block_chain(c, data, A, lo, len, xpol, chain[k], true);
    }
    for (int k = nblocks - 1; k >= 0; --k) {
        c.add_cnot(enable, ecopy[k]);
        c.free_wire(ecopy[k]);
    }
    for (int s = nsb - 1; s >= 0; --s) {
        c.add_cnot(enable, esup[s]);
        c.free_wire(esup[s]);
    }
}

}  // namespace

void build_carry_select_adder(Circuit& c, const Register& a, const Int& A, Control enable,
                              const AdditionLayout& layout) {
    check_width_positive(a, "build_carry_select_adder");
    const int w = a.width();
    check_constant_range(A, w, "build_carry_select_adder");
    if (layout.block_len < 1 || layout.blocks_per_superblock < 1 || layout.superblock_count < 1)
        throw std::invalid_argument("build_carry_select_adder: malformed layout");
    const long long capacity = 1LL * layout.block_len * layout.blocks_per_superblock *
                               layout.superblock_count;
    if (capacity < w)
        throw std::invalid_argument("build_carry_select_adder: layout does not cover the register");

    CsGeometry geo;
    geo.per_superblock = layout.blocks_per_superblock;
    for (int lo = 0; lo < w; lo += layout.block_len)
        geo.blocks.emplace_back(lo, std::min(layout.block_len, w - lo));

    // First pass builds r = enable ? a + A : 0 next to the input; the second
    // cancels the input against it, and the swap leaves the sum in place.
    Register r = c.add_register(w);
    carry_select_pass(c, a, r, A, false, enable, geo);
    carry_select_pass(c, r, a, A, true, enable, geo);
    for (int j = 0; j < w; ++j) c.add_cnot(Control{r[j], true}, a[j]);
    std::vector<Wire> ecopy(geo.blocks.size(), -1);
    for (std::size_t k = 0; k < geo.blocks.size(); ++k) {
        ecopy[k] = c.add_wire();
        c.add_cnot(enable, ecopy[k]);
    }
    for (std::size_t k = 0; k < geo.blocks.size(); ++k) {
        auto [lo, len] = geo.blocks[k];
        for (int j = 0; j < len; ++j)
            c.add_toffoli(Control{ecopy[k], true}, Control{a[lo + j], true}, r[lo + j]);
    }
    for (std::size_t k = geo.blocks.size(); k-- > 0;) {
        c.add_cnot(enable, ecopy[k]);
        c.free_wire(ecopy[k]);
    }
    c.free_register(r);
}

namespace {

// One pass of the quantum+quantum carry-select network. The host register
// is morphed placewise (host ^= x) for the duration; block chains then
// compute the carries of x + host (carry mode) or the borrows of host - x
// (borrow mode) against zero-seeded guesses, prefix ladders expose the
// propagate windows, and the selected candidate is XOR-copied into the
// target. The mirror image restores host and x exactly. An incoming carry
// (or borrow) folds into the first block's chain and a NOT on the lowest
// target place. With a non-negative carry_out the selected top carry is
// copied onto it before the unwind.
void qq_select_pass(Circuit& c, const Register& x, const Register& host, const Register& target,
                    bool borrow, bool carry_in, Wire carry_out, const CsGeometry& geo) {
    const bool ppol = !borrow;  // morphed-host polarity that lets a carry through
    const int nblocks = static_cast<int>(geo.blocks.size());
    const int nsb = geo.superblock_count();
    const int w = x.width();

    for (int j = 0; j < w; ++j) c.add_cnot(Control{x[j], true}, host[j]);

    // Zero-seeded chains: each interior place costs one Toffoli through
    // the morph trick (carry = x XOR (p AND (prev XOR x)) with p read off
    // the morphed host wire).
    std::vector<std::vector<Wire>> chain(nblocks);
    std::vector<std::vector<Wire>> prefix(nblocks);
    std::vector<SelState> p(nblocks);
    std::vector<SelState> f(nblocks);
    for (int k = 0; k < nblocks; ++k) {
        auto [lo, len] = geo.blocks[k];
        chain[k].resize(len);
        for (int j = 0; j < len; ++j) chain[k][j] = c.add_wire();
        const bool fold = lo == 0 && carry_in;
        c.add_toffoli(Control{x[lo], !fold}, Control{host[lo], !ppol}, chain[k][0]);
        if (fold) c.add_not(chain[k][0]);
        for (int j = 1; j < len; ++j) {
            c.add_cnot(Control{x[lo + j], true}, chain[k][j - 1]);
            c.add_toffoli(Control{host[lo + j], ppol}, Control{chain[k][j - 1], true}, chain[k][j]);
            c.add_cnot(Control{x[lo + j], true}, chain[k][j]);
            c.add_cnot(Control{x[lo + j], true}, chain[k][j - 1]);
        }
    }
    for (int k = 0; k < nblocks; ++k) {
        auto [lo, len] = geo.blocks[k];
        emit_block_prefix(c, host, lo, len, ppol, prefix[k], false);
    }

    auto block_out = [&](int k) -> Wire { return chain[k][geo.blocks[k].second - 1]; };
    auto prop = [&](int k) -> Control {
        auto [lo, len] = geo.blocks[k];
        if (len >= 2) return Control{prefix[k].back(), true};
        return Control{host[lo], ppol};
    };
    auto p_sel_in = [&](int k) -> std::optional<Control> {
        if (geo.local_index(k) == 0) return std::nullopt;
        return p[k - 1].out;
    };
    auto seed = [&](int s) -> std::optional<Control> {
        if (s == 0) return std::nullopt;
        return p[geo.last_block_of(s - 1)].out;
    };
    auto f_sel_in = [&](int k) -> std::optional<Control> {
        if (geo.local_index(k) == 0) return seed(geo.superblock_of(k));
        return f[k - 1].out;
    };

    for (int k = 0; k < nblocks && geo.superblock_of(k) + 1 < nsb; ++k)
        p[k] = mux_forward(c, p_sel_in(k), block_out(k), prop(k));
    for (int k = 0; k + 1 < nblocks; ++k) {
        if (geo.local_index(k) == geo.per_superblock - 1) continue;
        f[k] = mux_forward(c, f_sel_in(k), block_out(k), prop(k));
    }
    if (carry_out >= 0) {
        const int k = nblocks - 1;
        f[k] = mux_forward(c, f_sel_in(k), block_out(k), prop(k));
        c.add_cnot(*f[k].out, carry_out);
    }

    // Copy legs: the guessed candidate enters for free, the selected
    // incoming carry adds the ripple its propagate window allows.
    for (int k = 0; k < nblocks; ++k) {
        auto [lo, len] = geo.blocks[k];
        for (int j = 0; j < len; ++j) {
            c.add_cnot(Control{host[lo + j], true}, target[lo + j]);
            if (j >= 1) c.add_cnot(Control{chain[k][j - 1], true}, target[lo + j]);
        }
        if (lo == 0 && carry_in) c.add_not(target[lo]);
        auto sel = f_sel_in(k);
        if (!sel) continue;
        c.add_cnot(*sel, target[lo]);
        if (len >= 2) c.add_toffoli(*sel, Control{host[lo], ppol}, target[lo + 1]);
        for (int j = 2; j < len; ++j)
            c.add_toffoli(*sel, Control{prefix[k][j - 2], true}, target[lo + j]);
    }

    if (carry_out >= 0) {
        const int k = nblocks - 1;
        mux_reverse(c, f[k], f_sel_in(k), block_out(k), prop(k));
    }
    for (int k = nblocks - 2; k >= 0; --k) {
        if (geo.local_index(k) == geo.per_superblock - 1) continue;
        mux_reverse(c, f[k], f_sel_in(k), block_out(k), prop(k));
    }
    for (int k = nblocks - 1; k >= 0; --k) {
        if (geo.superblock_of(k) + 1 >= nsb) continue;
        mux_reverse(c, p[k], p_sel_in(k), block_out(k), prop(k));
    }
    for (int k = nblocks - 1; k >= 0; --k) {
        auto [lo, len] = geo.blocks[k];
        emit_block_prefix(c, host, lo, len, ppol, prefix[k], true);
    }
    for (int k = nblocks - 1; k >= 0; --k) {
        auto [lo, len] = geo.blocks[k];
        for (int j = len - 1; j >= 1; --j) {
            c.add_cnot(Control{x[lo + j], true}, chain[k][j - 1]);
            c.add_cnot(Control{x[lo + j], true}, chain[k][j]);
            c.add_toffoli(Control{host[lo + j], ppol}, Control{chain[k][j - 1], true}, chain[k][j]);
            c.add_cnot(Control{x[lo + j], true}, chain[k][j - 1]);
        }
        const bool fold = lo == 0 && carry_in;
        if (fold) c.add_not(chain[k][0]);
        c.add_toffoli(Control{x[lo], !fold}, Control{host[lo], !ppol}, chain[k][0]);
        for (int j = len - 1; j >= 0; --j) c.free_wire(chain[k][j]);
        chain[k].clear();
    }
    for (int j = w - 1; j >= 0; --j) c.add_cnot(Control{x[j], true}, host[j]);
}

}  // namespace

QqSelectSum build_carry_select_qq(Circuit& c, const Register& x, const Register& y,
                                  const AdditionLayout& layout, bool complement_y, bool carry_in,
                                  bool keep_carry) {
    if (x.width() != y.width())
        throw std::invalid_argument("build_carry_select_qq: register widths differ");
    check_width_positive(x, "build_carry_select_qq");
    const int w = x.width();
    if (layout.block_len < 1 || layout.blocks_per_superblock < 1)
        throw std::invalid_argument("build_carry_select_qq: malformed layout");

    CsGeometry geo;
    geo.per_superblock = layout.blocks_per_superblock;
    for (int lo = 0; lo < w; lo += layout.block_len)
        geo.blocks.emplace_back(lo, std::min(layout.block_len, w - lo));

    if (complement_y)
        for (int j = 0; j < w; ++j) c.add_not(y[j]);

    // First pass writes the sum next to the operands; the second cancels
    // y against it in borrow mode, after which y's wires are blank.
    QqSelectSum out;
    out.sum = c.add_register(w);
    if (keep_carry) out.carry_out = c.add_wire();
    qq_select_pass(c, x, y, out.sum, false, carry_in, out.carry_out, geo);
    qq_select_pass(c, x, out.sum, y, true, carry_in, -1, geo);
    c.free_register(y);
    return out;
}

Register build_running_sum_modular(Circuit& c, const std::vector<Summand>& summands, const Int& N,
                                   int s_prime_width) {
    if (N < 1) throw std::invalid_argument("build_running_sum_modular: modulus must be positive");
    for (const auto& sm : summands)
        if (sm.value < 0 || sm.value >= N)
            throw std::invalid_argument("build_running_sum_modular: summand out of range");
    if (s_prime_width < 2)
        throw std::invalid_argument("build_running_sum_modular: estimate register too narrow");

    const int L = std::max(1, ibits(N));
    const int count = static_cast<int>(summands.size());
    const int extra = std::max(1, ibits(Int(count)));
    const int ws = L + extra;
    Register s = c.add_register(ws);
    if (summands.empty()) return s;

    // The estimate register tracks floor(s / 2^sigma) up to one dropped
    // carry per summand; sigma keeps it within the requested width with a
    // clear sign bit on top.
    const int wp = s_prime_width;
    const int sigma = std::max(0, ws - wp + 1);
    const Int Np = N >> sigma;
    if (Np < 1)
        throw std::invalid_argument(
            "build_running_sum_modular: estimate register too narrow for the modulus");
    const int q_bits = std::max(0, (ws - sigma) - ibits(Np) + 1);

    Register sp = c.add_register(wp);
    for (const auto& sm : summands) {
        build_const_adder(c, s, sm.value, sm.control);
        build_const_adder(c, sp, sm.value >> sigma, sm.control);
    }

    // Restoring division of the estimate by the truncated modulus: subtract,
    // read the sign, conditionally add back.
    std::vector<Wire> q(q_bits, -1);
    for (int j = q_bits - 1; j >= 0; --j) {
        const Int sub = Np << j;
        build_const_adder(c, sp, mod_floor(-sub, pow2(wp)));
        q[j] = c.add_wire();
        c.add_cnot(Control{sp[wp - 1], false}, q[j]);
        build_const_adder(c, sp, sub, Control{q[j], false});
    }
    // Reduce the sum by the estimated quotient times the modulus.
    for (int j = 0; j < q_bits; ++j)
        build_const_adder(c, s, mod_floor(-(N << j), pow2(ws)), Control{q[j], true});
    // Unwind the division to clear the quotient bits and the estimate.
    for (int j = 0; j < q_bits; ++j) {
        const Int sub = Np << j;
        build_const_adder(c, sp, mod_floor(-sub, pow2(wp)), Control{q[j], false});
        c.add_cnot(Control{sp[wp - 1], false}, q[j]);
        build_const_adder(c, sp, sub);
        c.free_wire(q[j]);
    }
    for (auto it = summands.rbegin(); it != summands.rend(); ++it)
        build_const_adder(c, sp, mod_floor(-(it->value >> sigma), pow2(wp)), it->control);
    c.free_register(sp);
    return s;
}

}  // namespace qrev
