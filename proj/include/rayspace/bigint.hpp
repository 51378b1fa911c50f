#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>

namespace rayspace {

using Int = boost::multiprecision::cpp_int;

inline Int gcd(Int a, Int b) { return boost::multiprecision::gcd(a, b); }
inline Int abs(const Int& a) { return boost::multiprecision::abs(a); }

inline int sign(const Int& a) { return a.sign(); }

/// Floor of sqrt for n >= 0.
inline Int isqrt(const Int& n) {
    if (n < 0) throw std::domain_error("isqrt of negative");
    return boost::multiprecision::sqrt(n);
}

inline bool is_square(const Int& n, Int* root = nullptr) {
    if (n < 0) return false;
    Int r = isqrt(n);
    if (r * r == n) {
        if (root) *root = r;
        return true;
    }
    return false;
}

/// Splits n > 0 as s^2 * d with d square-free, by trial division up to
/// `bound` plus a perfect-square check on the cofactor. Complete whenever
/// n <= bound^2 * largest-prime-square considerations allow; for larger n the
/// returned d may retain a square factor of primes > bound, which is harmless:
/// all comparisons work for any d, canonical form is best-effort.
inline void squarefree_split(const Int& n, Int& s, Int& d, std::uint64_t bound = 1000000) {
    if (n <= 0) throw std::domain_error("squarefree_split needs n > 0");
    s = 1;
    d = 1;
    Int m = n;
    for (std::uint64_t p = 2; p <= bound; p = (p == 2 ? 3 : p + 2)) {
        Int pp = Int(p) * p;
        if (pp > m) break;
        while (m % pp == 0) {
            m /= pp;
            s *= p;
        }
        if (m % p == 0) {
            m /= p;
            d *= p;
        }
    }
    Int r;
    if (is_square(m, &r)) {
        s *= r;
    } else {
        d *= m;
    }
}

inline double to_double(const Int& a) { return a.convert_to<double>(); }

}  // namespace rayspace
