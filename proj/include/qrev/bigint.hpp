#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>

namespace qrev {

/// Arbitrary-precision signed integer used for all value-level
/// arithmetic (ring elements, modular exponentiation, cost formulas at
/// cryptographic sizes).
using Int = boost::multiprecision::cpp_int;

[[nodiscard]] inline Int pow2(unsigned k) { return Int(1) << k; }

/// Floor modulus with a positive representative in [0, m).
[[nodiscard]] inline Int mod_floor(const Int& a, const Int& m) {
    if (m <= 0) throw std::invalid_argument("mod_floor: modulus must be positive");
    Int r = a % m;
    if (r < 0) r += m;
    return r;
}

/// Modular exponentiation by squaring.
[[nodiscard]] inline Int mod_pow(Int base, Int exp, const Int& m) {
    if (exp < 0) throw std::invalid_argument("mod_pow: negative exponent");
    Int result = mod_floor(1, m);
    base = mod_floor(base, m);
    while (exp > 0) {
        if (boost::multiprecision::bit_test(exp, 0)) result = result * base % m;
        base = base * base % m;
        exp >>= 1;
    }
    return result;
}

/// Extended Euclid: returns g = gcd(a,b) and x,y with a*x + b*y = g.
struct ExtGcd {
    Int g, x, y;
};

[[nodiscard]] inline ExtGcd ext_gcd(Int a, Int b) {
    Int x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (b != 0) {
        Int q = a / b;
        Int t = a - q * b;
        a = b;
        b = t;
        t = x0 - q * x1;
        x0 = x1;
        x1 = t;
        t = y0 - q * y1;
        y0 = y1;
        y1 = t;
    }
    if (a < 0) {
        a = -a;
        x0 = -x0;
        y0 = -y0;
    }
    return ExtGcd{a, x0, y0};
}

/// Modular inverse; throws when gcd(a, m) != 1.
[[nodiscard]] inline Int mod_inverse(const Int& a, const Int& m) {
    ExtGcd e = ext_gcd(mod_floor(a, m), m);
    if (e.g != 1) throw std::runtime_error("mod_inverse: operand not coprime to modulus");
    return mod_floor(e.x, m);
}

/// Number of bits in the binary representation (0 for zero).
[[nodiscard]] inline unsigned bit_length(const Int& a) {
    if (a == 0) return 0;
    if (a < 0) throw std::invalid_argument("bit_length: negative value");
    return boost::multiprecision::msb(a) + 1;
}

[[nodiscard]] inline bool bit_of(const Int& a, unsigned i) {
    return boost::multiprecision::bit_test(a, i);
}

}  // namespace qrev
