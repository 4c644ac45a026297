#include <bit>
#include <stdexcept>
#include <utility>

#include "qrev/fftmul.hpp"

namespace qrev {

namespace {

int ceil_log2(long long x) {
    int k = 0;
    while ((1LL << k) < x) ++k;
    return k;
}

void validate_level1(const Level1Params& p) {
    if (p.L < 16 || p.b < 2 || p.l < 1 || p.l_tilde < 1)
        throw std::invalid_argument("multiply: malformed level-1 parameters");
    if (!std::has_single_bit(static_cast<unsigned>(p.b)) ||
        !std::has_single_bit(static_cast<unsigned>(p.l_tilde)))
        throw std::invalid_argument("multiply: block count and ring exponent must be powers of two");
    if (2 * p.l + std::countr_zero(static_cast<unsigned>(p.b)) >= 2 * p.l_tilde)
        throw std::invalid_argument("multiply: parameters would truncate the convolution");
    if (1LL * p.b * p.l < 2LL * p.L)
        throw std::invalid_argument("multiply: blocks do not cover the double-length product");
    if (p.modulus != pow2(2U * static_cast<unsigned>(p.l_tilde)) + 1)
        throw std::invalid_argument("multiply: modulus does not match the ring exponent");
}

void validate_level2(const Level2Params& p) {
    if (p.b_prime < 2 || p.l_tilde_prime < 1 ||
        !std::has_single_bit(static_cast<unsigned>(p.b_prime)) ||
        !std::has_single_bit(static_cast<unsigned>(p.l_tilde_prime)))
        throw std::invalid_argument("block_product: malformed level-2 parameters");
    if (p.modulus != pow2(2U * static_cast<unsigned>(p.b_prime)) + 1)
        throw std::invalid_argument("block_product: modulus does not match the block count");
    if (2 * p.psi_log2 != p.omega_log2)
        throw std::invalid_argument("block_product: psi^2 must equal omega");
}

RingVector split_blocks(const Int& x, int count, int bits) {
    RingVector v(static_cast<std::size_t>(count), Int(0));
    const Int mask = pow2(static_cast<unsigned>(bits)) - 1;
    Int rest = x;
    for (int i = 0; i < count && rest != 0; ++i) {
        v[static_cast<std::size_t>(i)] = rest & mask;
        rest >>= bits;
    }
    return v;
}

Int join_blocks(const RingVector& c, int bits) {
    Int acc = 0;
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) {
        acc <<= bits;
        acc += c[static_cast<std::size_t>(i)];
    }
    return acc;
}

// Shared convolution shell: split, transform, apply the supplied
// pointwise product, transform back, and reassemble with carries.
template <typename PointwiseFn>
MultiplyResult multiply_core(const Int& a, const Int& b, const Level1Params& params,
                             PointwiseFn&& pointwise) {
    validate_level1(params);
    const Int bound = pow2(static_cast<unsigned>(params.L));
    if (a < 0 || b < 0 || a >= bound || b >= bound)
        throw std::invalid_argument("multiply: operands must be nonnegative L-bit integers");

    const FftPlan plan = params.plan();
    MultiplyResult out;
    const RingVector fa = fft(split_blocks(a, params.b, params.l), plan);
    const RingVector fb = fft(split_blocks(b, params.b, params.l), plan);
    out.cost.fft1 += 2;  // the constant operand's transform is classical precomputation

    RingVector fc(static_cast<std::size_t>(params.b));
    for (std::size_t i = 0; i < fc.size(); ++i) fc[i] = pointwise(fa[i], fb[i], out.cost);

    out.product = join_blocks(ifft(fc, plan), params.l);
    out.garbage.transformed_operand = 1;
    out.garbage.transformed_product = 1;
    return out;
}

}  // namespace

FftPlan Level1Params::plan() const { return FftPlan(b, omega_log2, RingModulus(2 * l_tilde)); }

FftPlan Level2Params::plan() const {
    return FftPlan(b_prime, omega_log2, RingModulus(2 * b_prime));
}

FftPlan Level2Params::companion_plan() const {
    return FftPlan(b_prime, 2, RingModulus(b_prime));
}

bool GarbageLedger::empty() const {
    return transformed_operand == 0 && transformed_product == 0 && lower_level == 0 &&
           butterfly_bits == 0;
}

void GarbageLedger::merge(const GarbageLedger& other) {
    transformed_operand += other.transformed_operand;
    transformed_product += other.transformed_product;
    lower_level += other.lower_level;
    butterfly_bits += other.butterfly_bits;
}

void GarbageLedger::annihilate(const GarbageLedger& other) {
    transformed_operand -= other.transformed_operand;
    transformed_product -= other.transformed_product;
    lower_level -= other.lower_level;
    butterfly_bits -= other.butterfly_bits;
}

void ResourceLedger::merge(const ResourceLedger& other) {
    fft1 += other.fft1;
    fft2 += other.fft2;
    mu += other.mu;
    crt_recombines += other.crt_recombines;
    range_corrections += other.range_corrections;
}

Level1Params select_level1(long long L) {
    if (L < 16) throw std::invalid_argument("select_level1: bit length must be at least 16");
    if (L > (1LL << 30)) throw std::invalid_argument("select_level1: bit length out of range");
    int k = ceil_log2(2 * L);
    for (;;) {
        const bool even = k % 2 == 0;
        const int log2b = even ? k / 2 + 1 : (k + 1) / 2;
        const int b = 1 << log2b;
        const int l_tilde = 1 << (even ? k / 2 - 1 : (k - 1) / 2);
        const int l = static_cast<int>((2 * L + b - 1) / b);
        if (2 * l + log2b < 2 * l_tilde) {
            Level1Params p;
            p.L = static_cast<int>(L);
            p.k = k;
            p.b = b;
            p.l = l;
            p.l_tilde = l_tilde;
            p.omega_log2 = even ? 1 : 2;
            p.modulus = pow2(2U * static_cast<unsigned>(l_tilde)) + 1;
            return p;
        }
        ++k;
    }
}

Level2Params select_level2(int l_tilde) {
    if (l_tilde < 8 || !std::has_single_bit(static_cast<unsigned>(l_tilde)))
        throw std::invalid_argument("select_level2: block size must be a power of two, at least 8");
    const int k_prime = std::countr_zero(static_cast<unsigned>(2 * l_tilde));
    Level2Params p;
    p.k_prime = k_prime;
    if (k_prime % 2 == 0) {
        p.b_prime = 1 << (k_prime / 2);
        p.l_tilde_prime = p.b_prime;
        p.needs_crt = true;  // coefficients reach b' * 2^{2b'}, past the modulus
    } else {
        p.b_prime = 1 << ((k_prime + 1) / 2);
        p.l_tilde_prime = 1 << ((k_prime - 1) / 2);
        p.needs_crt = false;
    }
    p.modulus = pow2(2U * static_cast<unsigned>(p.b_prime)) + 1;
    return p;
}

Int block_product(const Int& x, const Int& y, const Level2Params& params, ResourceLedger& cost) {
    validate_level2(params);
    const int n = params.b_prime * params.l_tilde_prime;  // the ring is Z/(2^n + 1)
    const Int m = pow2(static_cast<unsigned>(n)) + 1;
    if (x < 0 || x >= m || y < 0 || y >= m)
        throw std::invalid_argument("block_product: residues out of range");

    cost.fft2 += 2;  // again only the variable side is charged
    cost.mu += params.b_prime;
    if (params.needs_crt) cost.crt_recombines += 1;

    // The top residue 2^n = -1 has no block decomposition; fold it in as a sign.
    const Int top = m - 1;
    if (x == top) return mod_floor(-y, m);
    if (y == top) return mod_floor(-x, m);

    const RingVector xa = split_blocks(x, params.b_prime, params.l_tilde_prime);
    const RingVector xb = split_blocks(y, params.b_prime, params.l_tilde_prime);
    const RingVector main = negacyclic_multiply(xa, xb, params.plan(), params.psi_log2);

    RingVector companion;
    if (params.needs_crt)
        companion = negacyclic_multiply(xa, xb, params.companion_plan(), 1);

    // Recover the signed coefficients, then evaluate at 2^{l~'}.
    Int acc = 0;
    const Int wide = params.modulus * (pow2(static_cast<unsigned>(params.b_prime)) + 1);
    for (int j = 0; j < params.b_prime; ++j) {
        Int c;
        if (params.needs_crt) {
            c = crt_recombine(companion[static_cast<std::size_t>(j)],
                              main[static_cast<std::size_t>(j)], params.b_prime);
            if (2 * c >= wide) c -= wide;
        } else {
            c = main[static_cast<std::size_t>(j)];
            if (2 * c > params.modulus) c -= params.modulus;
        }
        acc += c << (static_cast<unsigned>(params.l_tilde_prime) * static_cast<unsigned>(j));
    }
    return mod_floor(acc, m);
}

MultiplyResult multiply_1level(const Int& a, const Int& b, const Level1Params& params) {
    return multiply_core(a, b, params,
                         [&params](const Int& u, const Int& v, ResourceLedger& cost) {
                             cost.mu += 1;
                             return u * v % params.modulus;
                         });
}

MultiplyResult multiply_2level(const Int& a, const Int& b, const Level1Params& p1,
                               const Level2Params& p2) {
    validate_level2(p2);
    if (p2.b_prime * p2.l_tilde_prime != 2 * p1.l_tilde)
        throw std::invalid_argument("multiply_2level: second level does not match the first");
    MultiplyResult out =
        multiply_core(a, b, p1, [&p2](const Int& u, const Int& v, ResourceLedger& cost) {
            return block_product(u, v, p2, cost);
        });
    out.garbage.lower_level = p1.b;
    return out;
}

ModMulResult modmul(const Int& p, const Int& A, const Int& N, long long L, MulBackend backend) {
    if (N < 2 || N >= pow2(static_cast<unsigned>(L < 0 ? 0 : L)))
        throw std::invalid_argument("modmul: modulus must fit in L bits");
    if (p < 0 || p >= N) throw std::invalid_argument("modmul: input residue out of range");
    if (A <= 0 || A >= N) throw std::invalid_argument("modmul: constant out of range");
    if (ext_gcd(A, N).g != 1)
        throw std::invalid_argument("modmul: constant must be coprime to the modulus");

    const Level1Params p1 = select_level1(L);
    const Level2Params p2 =
        backend == MulBackend::two_level ? select_level2(p1.l_tilde) : Level2Params{};
    const auto mult = [&](const Int& x, const Int& y) {
        return backend == MulBackend::two_level ? multiply_2level(x, y, p1, p2)
                                                : multiply_1level(x, y, p1);
    };

    ModMulResult out;
    // Each of the four steps computes a product and then uncomputes its
    // garbage, so it charges two forward multiplications.
    const auto charge_pair = [&out](const MultiplyResult& r) {
        out.cost.merge(r.cost);
        out.garbage.merge(r.garbage);
        out.cost.merge(r.cost);
        out.garbage.annihilate(r.garbage);
    };

    const Int reciprocal = (A << static_cast<unsigned>(L)) / N;
    const MultiplyResult scaled = mult(p, reciprocal);
    charge_pair(scaled);
    const Int q = scaled.product >> static_cast<unsigned>(L);

    const MultiplyResult back = mult(q, N);
    charge_pair(back);

    charge_pair(scaled);  // the quotient register is cleared by the reverse run

    const MultiplyResult direct = mult(p, A);
    charge_pair(direct);

    Int r = direct.product - back.product;
    if (r < 0) {
        r += N;
        out.cost.range_corrections += 1;
    } else if (r >= N) {
        r -= N;
        out.cost.range_corrections += 1;
    }
    out.result = r;
    return out;
}

}  // namespace qrev
