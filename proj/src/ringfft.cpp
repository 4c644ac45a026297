#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qrev/ringfft.hpp"

namespace qrev {

namespace {

void check_input(const RingVector& v, const FftPlan& plan, const char* who) {
    if (static_cast<int>(v.size()) != plan.length)
        throw std::invalid_argument(std::string(who) + ": input length must equal the plan length");
    for (const Int& x : v)
        if (x < 0 || x >= plan.modulus.m)
            throw std::invalid_argument(std::string(who) + ": values must lie in [0, M)");
}

// In-place decimation-in-frequency pass with twiddles 2^(e*j*stride); the
// outputs land in bit-reversed order.
void dif_pass(RingVector& x, const FftPlan& plan, int e) {
    const int n2 = 2 * plan.modulus.n;
    const int len = plan.length;
    for (int half = len / 2; half >= 1; half /= 2) {
        const int stride = len / (2 * half);
        for (int start = 0; start < len; start += 2 * half) {
            for (int j = 0; j < half; ++j) {
                Int& u = x[static_cast<std::size_t>(start + j)];
                Int& v = x[static_cast<std::size_t>(start + j + half)];
                Int sum = u + v;
                if (sum >= plan.modulus.m) sum -= plan.modulus.m;
                Int diff = u - v;
                if (diff < 0) diff += plan.modulus.m;
                const int twiddle = static_cast<int>(1LL * e * j * stride % n2);
                u = std::move(sum);
                v = ring_mul_pow2(diff, twiddle, plan.modulus);
            }
        }
    }
}

void bit_reverse(RingVector& x, int levels) {
    const std::size_t len = x.size();
    for (std::size_t i = 0; i < len; ++i) {
        std::size_t r = 0;
        for (int b = 0; b < levels; ++b)
            if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (levels - 1 - b);
        if (i < r) std::swap(x[i], x[r]);
    }
}

}  // namespace

FftPlan::FftPlan(int n_len, int e, RingModulus mod)
    : length(n_len), omega_log2(e), modulus(std::move(mod)) {
    if (length < 2 || !std::has_single_bit(static_cast<unsigned>(length)))
        throw std::invalid_argument("FftPlan: length must be a power of two, at least 2");
    if (omega_log2 < 1) throw std::invalid_argument("FftPlan: omega exponent must be positive");
}

int FftPlan::levels() const { return std::countr_zero(static_cast<unsigned>(length)); }

bool validate_root(const Int& m, const Int& omega, int length) {
    if (length < 1 || m < 2 || omega < 0 || omega >= m) return false;
    if (mod_pow(omega, Int(length), m) != 1) return false;
    for (int p = 1; p < length; ++p) {
        const Int step = mod_pow(omega, Int(p), m);
        Int sum = 0;
        Int term = 1;
        for (int j = 0; j < length; ++j) {
            sum += term;
            term = term * step % m;
        }
        if (sum % m != 0) return false;
    }
    return true;
}

bool validate_root(const FftPlan& plan) {
    return validate_root(plan.modulus.m, mod_pow(Int(2), Int(plan.omega_log2), plan.modulus.m),
                         plan.length);
}

Int ring_mul_pow2(const Int& x, int shift, const RingModulus& modulus) {
    if (x < 0 || x >= modulus.m)
        throw std::invalid_argument("ring_mul_pow2: value out of range");
    if (shift < 0) throw std::invalid_argument("ring_mul_pow2: shift must be nonnegative");
    const int s = shift % (2 * modulus.n);
    Int rest = x << s;
    const Int mask = pow2(static_cast<unsigned>(modulus.n)) - 1;
    Int acc = 0;
    bool negative = false;
    while (rest != 0) {
        acc += negative ? Int(-(rest & mask)) : (rest & mask);
        rest >>= modulus.n;
        negative = !negative;
    }
    return mod_floor(acc, modulus.m);
}

RingVector fft(const RingVector& v, const FftPlan& plan) {
    check_input(v, plan, "fft");
    RingVector x = v;
    dif_pass(x, plan, plan.omega_log2 % (2 * plan.modulus.n));
    bit_reverse(x, plan.levels());
    return x;
}

RingVector ifft(const RingVector& v, const FftPlan& plan) {
    check_input(v, plan, "ifft");
    const int n2 = 2 * plan.modulus.n;
    RingVector x = v;
    dif_pass(x, plan, (n2 - plan.omega_log2 % n2) % n2);
    bit_reverse(x, plan.levels());
    const int unscale = (n2 - plan.levels() % n2) % n2;  // multiply by N^-1 = 2^-levels
    for (Int& xi : x) xi = ring_mul_pow2(xi, unscale, plan.modulus);
    return x;
}

Convolution convolve_via_fft(const RingVector& a, const RingVector& b, const FftPlan& plan) {
    const std::size_t len = static_cast<std::size_t>(plan.length);
    if (a.size() > len || b.size() > len)
        throw std::invalid_argument("convolve_via_fft: inputs longer than the plan length");

    int da = -1;
    int db = -1;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0) da = static_cast<int>(i);
    for (std::size_t i = 0; i < b.size(); ++i)
        if (b[i] != 0) db = static_cast<int>(i);

    RingVector pa(len, Int(0));
    RingVector pb(len, Int(0));
    std::copy(a.begin(), a.end(), pa.begin());
    std::copy(b.begin(), b.end(), pb.begin());

    RingVector fa = fft(pa, plan);
    const RingVector fb = fft(pb, plan);
    for (std::size_t k = 0; k < len; ++k) fa[k] = fa[k] * fb[k] % plan.modulus.m;

    Convolution out;
    out.values = ifft(fa, plan);
    out.wrapped = da >= 0 && db >= 0 && da + db > plan.length - 1;
    return out;
}

RingVector negacyclic_multiply(const RingVector& a, const RingVector& b, const FftPlan& plan,
                               int psi_log2) {
    const int n2 = 2 * plan.modulus.n;
    if (static_cast<int>(a.size()) != plan.length || static_cast<int>(b.size()) != plan.length)
        throw std::invalid_argument("negacyclic_multiply: operands must fill the whole block");
    if (psi_log2 < 1 || ((2 * psi_log2 - plan.omega_log2) % n2 + n2) % n2 != 0)
        throw std::invalid_argument("negacyclic_multiply: psi^2 must equal omega");
    if (1LL * psi_log2 * plan.length % n2 != plan.modulus.n)
        throw std::invalid_argument("negacyclic_multiply: psi^N must equal -1");

    RingVector wa = a;
    RingVector wb = b;
    for (int j = 0; j < plan.length; ++j) {
        const int w = static_cast<int>(1LL * psi_log2 * j % n2);
        wa[static_cast<std::size_t>(j)] = ring_mul_pow2(wa[static_cast<std::size_t>(j)], w,
                                                        plan.modulus);
        wb[static_cast<std::size_t>(j)] = ring_mul_pow2(wb[static_cast<std::size_t>(j)], w,
                                                        plan.modulus);
    }
    RingVector c = convolve_via_fft(wa, wb, plan).values;
    for (int j = 0; j < plan.length; ++j) {
        const int w = static_cast<int>(1LL * psi_log2 * j % n2);
        c[static_cast<std::size_t>(j)] =
            ring_mul_pow2(c[static_cast<std::size_t>(j)], (n2 - w) % n2, plan.modulus);
    }
    return c;
}

Int crt_recombine(const Int& x1, const Int& x2, int n) {
    if (n < 1) throw std::invalid_argument("crt_recombine: n must be positive");
    const Int m1 = pow2(static_cast<unsigned>(n)) + 1;
    const Int m2 = pow2(static_cast<unsigned>(2 * n)) + 1;
    if (x1 < 0 || x1 >= m1 || x2 < 0 || x2 >= m2)
        throw std::invalid_argument("crt_recombine: residues out of range");
    // The big modulus reduces to 2 mod m1, and -2^(n-1) inverts 2 there.
    const Int offset = mod_floor(pow2(static_cast<unsigned>(n - 1)) * (x2 - x1), m1);
    return x2 + m2 * offset;
}

}  // namespace qrev
