#include "qrev/pipeline.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "qrev/cost.hpp"

namespace qrev {

namespace {

// Counter-based mixer so per-trial randomness does not depend on how
// trials are scheduled.
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Unbiased draw in [0, bound) via rejection, independent of library
// distribution internals so results are reproducible across platforms.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t x = rng();
        if (x >= threshold) return x % bound;
    }
}

struct AddOutcome {
    Int value;
    bool clean;
};

// Value-level mirror of build_modular_const_adder on a w-bit register:
// the select bit compares only the top t places of s against N - B, the
// chosen constant (B, or B - N modulo 2^w) is added, and uncomputing the
// select bit compares the top t places of the sum against B. The result
// and the select bit are each wrong with probability below 2^-t; `clean`
// reports whether the select bit really returned to zero.
AddOutcome trunc_mod_add(const Int& s, const Int& B, const Int& N, int w, int t) {
    const int shift = w - t;
    const bool kappa = (s >> shift) >= ((N - B) >> shift);
    const Int r = mod_floor(kappa ? Int(s + B - N) : Int(s + B), pow2(static_cast<unsigned>(w)));
    const bool clean = kappa == ((r >> shift) < (B >> shift));
    return {r, clean};
}

struct MulOutcome {
    Int value;
    bool clean;
};

// One controlled multiply of the serial scheme: L conditional modular
// additions of precomputed addends into an accumulator that starts at
// zero (forward leg) or at the retiring register's value (inverse leg).
MulOutcome serial_modmul(const Int& start, const Int& select, const std::vector<Int>& addends,
                         const Int& N, int L, int t) {
    Int r = start;
    bool clean = true;
    for (int j = 0; j < L; ++j) {
        if (!bit_of(select, static_cast<unsigned>(j))) continue;
        AddOutcome out = trunc_mod_add(r, addends[static_cast<std::size_t>(j)], N, L, t);
        r = out.value;
        clean = clean && out.clean;
    }
    return {r, clean};
}

// One multiply of the running-sum scheme: the tall sum of selected
// addends is reduced by a quotient read off a short register holding
// only the top s_prime_width places of the sum and the modulus. The
// subtraction wraps on the full-width register, so an off-by-one
// quotient leaves junk above the result bits.
MulOutcome running_sum_modmul(const Int& select, const std::vector<Int>& addends, const Int& N,
                              int L, int s_prime_width) {
    Int s = 0;
    for (int j = 0; j < L; ++j) {
        if (bit_of(select, static_cast<unsigned>(j))) s += addends[static_cast<std::size_t>(j)];
    }
    if (s_prime_width <= 0) return {mod_floor(s, N), true};
    const int w_s = L + static_cast<int>(bit_length(Int(L))) + 1;
    const int shift = std::max(0, w_s - s_prime_width);
    Int s_short = 0;
    for (int j = 0; j < L; ++j) {
        if (bit_of(select, static_cast<unsigned>(j)))
            s_short += addends[static_cast<std::size_t>(j)] >> shift;
    }
    const Int n_short = N >> shift;
    const Int q = n_short == 0 ? Int(0) : Int(s_short / n_short);
    const Int wrapped = mod_floor(s - q * N, pow2(static_cast<unsigned>(w_s)));
    const bool clean = (wrapped >> static_cast<unsigned>(L)) == 0;
    return {mod_floor(wrapped, pow2(static_cast<unsigned>(L))), clean};
}

// Negated addend table for an inverse leg: subtracting c mod N is adding
// (N - c) mod N.
std::vector<Int> negate_addends(const std::vector<Int>& addends, const Int& N) {
    std::vector<Int> out;
    out.reserve(addends.size());
    for (const Int& c : addends) out.push_back(mod_floor(N - c, N));
    return out;
}

std::vector<Int> shifted_addends(const Int& A, const Int& N, int L) {
    std::vector<Int> out;
    out.reserve(static_cast<std::size_t>(L));
    for (int j = 0; j < L; ++j) out.push_back(mod_floor(A << j, N));
    return out;
}

bool is_prime_u32(std::uint32_t n) {
    if (n < 2) return false;
    for (std::uint32_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

std::uint32_t smallest_prime_factor(std::uint32_t n) {
    for (std::uint32_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) return d;
    }
    return n;
}

// Multiplicative order of a modulo n by iteration; n is at most 16 bits
// so the loop is short.
std::uint64_t multiplicative_order_u64(std::uint64_t a, std::uint64_t n) {
    std::uint64_t v = a % n;
    std::uint64_t r = 1;
    while (v != 1) {
        v = v * a % n;
        ++r;
        if (r > n) throw std::logic_error("order search exceeded the group size");
    }
    return r;
}

std::uint64_t pow_mod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
    std::uint64_t acc = 1 % mod;
    base %= mod;
    while (exp != 0) {
        if (exp & 1) acc = acc * base % mod;
        base = base * base % mod;
        exp >>= 1;
    }
    return acc;
}

// Denominators of the continued-fraction convergents of num/den, capped
// at `bound` since larger values cannot be a group order.
std::vector<std::uint64_t> convergent_denominators(Int num, Int den, std::uint64_t bound) {
    std::vector<std::uint64_t> out;
    Int k1 = 1;
    Int k2 = 0;
    bool first = true;
    while (den != 0) {
        const Int a = num / den;
        const Int rem = num - a * den;
        num = den;
        den = rem;
        const Int k = first ? Int(1) : Int(a * k1 + k2);
        first = false;
        if (k > bound) break;
        out.push_back(k.convert_to<std::uint64_t>());
        k2 = k1;
        k1 = k;
    }
    return out;
}

}  // namespace

Precomputation precompute(const Int& a, const Int& N, int L) {
    if (L < 2 || L > 1 << 20) throw std::invalid_argument("register width out of range");
    if (N < 2) throw std::invalid_argument("modulus must be at least 2");
    if (N >= pow2(static_cast<unsigned>(L))) throw std::invalid_argument("modulus must fit the register");
    if (a < 1) throw std::invalid_argument("base must be positive");
    const Int a0 = mod_floor(a, N);
    if (ext_gcd(a0, N).g != 1)
        throw std::invalid_argument("base shares a factor with the modulus");

    Precomputation pre;
    pre.a = a;
    pre.N = N;
    pre.L = L;
    const int steps = 2 * L;
    pre.powers.reserve(static_cast<std::size_t>(steps));
    pre.inverses.reserve(static_cast<std::size_t>(steps));
    pre.shift_tables.reserve(static_cast<std::size_t>(steps));
    pre.reciprocals.reserve(static_cast<std::size_t>(steps));
    Int p = a0;
    for (int i = 0; i < steps; ++i) {
        pre.powers.push_back(p);
        pre.inverses.push_back(mod_inverse(p, N));
        pre.shift_tables.push_back(shifted_addends(p, N, L));
        pre.reciprocals.push_back(Int((p << static_cast<unsigned>(L)) / N));
        p = p * p % N;
    }
    return pre;
}

ModexpResult modexp(const Int& a, const Int& x, const Int& N, int L, Backend backend,
                    ValuePolicy policy) {
    if (L < 16) throw std::invalid_argument("the cost model starts at 16-bit operands");
    if (x < 0 || x >= pow2(static_cast<unsigned>(2 * L)))
        throw std::invalid_argument("exponent must fit the 2L-bit register");
    const Precomputation pre = precompute(a, N, L);

    const int t = policy.compare_bits <= 0 ? L : std::min(policy.compare_bits, L);
    ModexpResult res;
    Int v = 1;
    bool clean = true;
    for (int i = 0; i < 2 * L; ++i) {
        if (!bit_of(x, static_cast<unsigned>(i))) continue;
        switch (backend) {
            case Backend::standard: {
                MulOutcome fwd = serial_modmul(Int(0), v, pre.shift_tables[static_cast<std::size_t>(i)],
                                               N, L, t);
                clean = clean && fwd.clean;
                const std::vector<Int> sub = negate_addends(
                    shifted_addends(pre.inverses[static_cast<std::size_t>(i)], N, L), N);
                MulOutcome back = serial_modmul(v, fwd.value, sub, N, L, t);
                clean = clean && back.clean && back.value == 0;
                v = fwd.value;
                break;
            }
            case Backend::parallel_add: {
                MulOutcome fwd = running_sum_modmul(v, pre.shift_tables[static_cast<std::size_t>(i)],
                                                    N, L, policy.s_prime_width);
                clean = clean && fwd.clean;
                MulOutcome back = running_sum_modmul(
                    fwd.value, shifted_addends(pre.inverses[static_cast<std::size_t>(i)], N, L), N, L,
                    policy.s_prime_width);
                clean = clean && back.clean && back.value == v;
                v = fwd.value;
                break;
            }
            case Backend::fft2: {
                ModMulResult fwd =
                    modmul(v, pre.powers[static_cast<std::size_t>(i)], N, L, MulBackend::two_level);
                res.cost.fft.merge(fwd.cost);
                ModMulResult back = modmul(fwd.result, pre.inverses[static_cast<std::size_t>(i)], N, L,
                                           MulBackend::two_level);
                res.cost.fft.merge(back.cost);
                clean = clean && back.result == v;
                v = fwd.result;
                break;
            }
        }
    }
    res.value = v;
    res.uncompute_clean = clean;

    switch (backend) {
        case Backend::standard: {
            const ResourceEstimate est = standard_cost(L);
            res.cost.toffoli = est.T;
            res.cost.depth = est.T_p;
            break;
        }
        case Backend::parallel_add: {
            const ResourceEstimate est = parallel_add_cost(L);
            res.cost.toffoli = est.T;
            res.cost.depth = est.T_p;
            break;
        }
        case Backend::fft2: {
            const ResourceEstimate est = fft_cost(L);
            res.cost.toffoli = est.T;
            res.cost.depth = est.T_p;
            break;
        }
    }
    res.cost.modmul_count = 4LL * L;
    return res;
}

MaterializedModexp materialize_modexp(const Precomputation& pre, const Int& x,
                                      ComparePolicy policy) {
    const int L = pre.L;
    if (x < 0 || x >= pow2(static_cast<unsigned>(2 * L)))
        throw std::invalid_argument("exponent must fit the 2L-bit register");

    MaterializedModexp out;
    Circuit& c = out.circuit;
    Register v = c.add_register(L);
    c.add_not(v[0]);  // accumulator starts at 1

    for (int i = 0; i < 2 * L; ++i) {
        const bool xi = bit_of(x, static_cast<unsigned>(i));
        Register r = c.add_register(L);
        const Wire ctrl = c.add_wire();
        if (xi) c.add_not(ctrl);

        // Identity path: with the step disabled, copy the accumulator so
        // the final swap still hands the value forward.
        for (int j = 0; j < L; ++j)
            c.add_toffoli(Control{ctrl, false}, Control{v[j], true}, r[j]);

        // Forward leg: r += v_j * (2^j a^{2^i}) mod N for each set bit,
        // gated through a control-and-select ancilla.
        for (int j = 0; j < L; ++j) {
            const Wire sel = c.add_wire();
            c.add_toffoli(Control{ctrl, true}, Control{v[j], true}, sel);
            build_modular_const_adder(c, r,
                                      pre.shift_tables[static_cast<std::size_t>(i)]
                                                      [static_cast<std::size_t>(j)],
                                      pre.N, Control{sel, true}, policy);
            c.add_toffoli(Control{ctrl, true}, Control{v[j], true}, sel);
            c.free_wire(sel);
        }

        // Inverse leg: v -= r_j * (2^j a^{-2^i}) mod N retires the old
        // accumulator to zero.
        for (int j = 0; j < L; ++j) {
            const Wire sel = c.add_wire();
            c.add_toffoli(Control{ctrl, true}, Control{r[j], true}, sel);
            const Int step = mod_floor(pre.inverses[static_cast<std::size_t>(i)] << j, pre.N);
            build_modular_const_adder(c, v, mod_floor(pre.N - step, pre.N), pre.N,
                                      Control{sel, true}, policy);
            c.add_toffoli(Control{ctrl, true}, Control{r[j], true}, sel);
            c.free_wire(sel);
        }

        // Identity path again: clear the copied bits against the product.
        for (int j = 0; j < L; ++j)
            c.add_toffoli(Control{ctrl, false}, Control{r[j], true}, v[j]);

        if (xi) c.add_not(ctrl);
        c.free_wire(ctrl);
        c.free_register(v);
        v = r;
    }
    out.product = v;
    return out;
}

QfftSchedule qfft_schedule(const std::vector<int>& measured, int l, int keep) {
    if (l < 1) throw std::invalid_argument("transform length must be positive");
    if (keep < 0) throw std::invalid_argument("keep window must be non-negative");
    if (static_cast<int>(measured.size()) > l)
        throw std::invalid_argument("more outcomes than qubits");
    for (int b : measured) {
        if (b != 0 && b != 1) throw std::invalid_argument("outcomes must be bits");
    }

    QfftSchedule sched;
    sched.length = l;
    sched.keep = keep;
    const int known = static_cast<int>(measured.size());
    const int last = std::min(known, l - 1);
    for (int j = 0; j <= last; ++j) {
        QfftStep st;
        st.qubit = j;
        st.denom_log2 = j + 1;
        for (int i = 0; i < j; ++i) {
            if (!measured[static_cast<std::size_t>(i)]) continue;
            if (j - i <= keep) {
                st.numerator += pow2(static_cast<unsigned>(i));
            } else {
                st.dropped_numerator += pow2(static_cast<unsigned>(i));
            }
        }
        st.kept = !(st.numerator == 0 && st.dropped_numerator != 0);
        sched.steps.push_back(st);
    }
    return sched;
}

Int sample_measurement(const Int& r, int L, std::mt19937_64& rng) {
    if (r < 1) throw std::invalid_argument("period must be positive");
    if (L < 1) throw std::invalid_argument("register width must be positive");
    if (r > pow2(62)) throw std::invalid_argument("period too large for the sampler");
    const std::uint64_t k = uniform_below(rng, r.convert_to<std::uint64_t>());
    // Round k * 2^{2L} / r to the nearest integer.
    return Int((Int(k) * pow2(static_cast<unsigned>(2 * L)) * 2 + r) / (2 * r));
}

FactorResult factor_demo(const Int& N, int trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("at least one trial is required");
    if (N > pow2(16)) throw std::invalid_argument("demo handles moduli of at most 16 bits");
    if (N < 9 || !bit_of(N, 0)) throw std::invalid_argument("modulus must be odd and composite");
    const std::uint32_t n = N.convert_to<std::uint32_t>();
    if (is_prime_u32(n)) throw std::invalid_argument("modulus is prime");
    std::uint32_t reduced = n;
    const std::uint32_t spf = smallest_prime_factor(n);
    while (reduced % spf == 0) reduced /= spf;
    if (reduced == 1) throw std::invalid_argument("modulus is a prime power");

    const int L = static_cast<int>(bit_length(N));
    FactorResult res;
    for (int trial = 0; trial < trials; ++trial) {
        res.trials_used = trial + 1;
        std::mt19937_64 rng(splitmix64(seed ^ (0x51ed270b0a1c2ff5ULL * static_cast<std::uint64_t>(trial + 1))));
        const std::uint64_t a = 2 + uniform_below(rng, n - 3);

        const std::uint64_t shortcut = std::gcd(a, static_cast<std::uint64_t>(n));
        if (shortcut > 1) {
            res.found = true;
            res.factor = shortcut;
            res.base = a;
            return res;
        }

        // The readout distribution depends only on the true order, so the
        // demo samples it directly instead of simulating the register.
        const std::uint64_t order = multiplicative_order_u64(a, n);
        const Int sample = sample_measurement(Int(order), L, rng);

        // Recover a candidate order from the convergents of sample/2^{2L},
        // trying small multiples of each denominator.
        std::uint64_t candidate = 0;
        const std::vector<std::uint64_t> denoms =
            convergent_denominators(sample, pow2(static_cast<unsigned>(2 * L)), n);
        for (const std::uint64_t q : denoms) {
            if (q == 0) continue;
            for (std::uint64_t mult = 1; mult <= 8; ++mult) {
                const std::uint64_t cand = q * mult;
                if (cand > n) break;
                if (pow_mod_u64(a, cand, n) == 1) {
                    candidate = cand;
                    break;
                }
            }
            if (candidate != 0) break;
        }
        if (candidate == 0 || candidate % 2 != 0) continue;

        const std::uint64_t y = pow_mod_u64(a, candidate / 2, n);
        if (y == 1 || y == n - 1) continue;
        for (const std::uint64_t f : {std::gcd(y - 1, static_cast<std::uint64_t>(n)),
                                      std::gcd(y + 1, static_cast<std::uint64_t>(n))}) {
            if (f > 1 && f < n) {
                res.found = true;
                res.factor = f;
                res.base = a;
                return res;
            }
        }
    }
    return res;
}

}  // namespace qrev
