#pragma once

#include <cmath>
#include <ostream>
#include <string>
#include <utility>

#include "rayspace/bigint.hpp"
#include "rayspace/errors.hpp"
#include "rayspace/rational.hpp"

namespace rayspace {

/// Sign of a + b*sqrt(d) for integers a, b and d > 0, computed exactly by
/// squaring with case analysis. Returns -1, 0 or +1.
inline int sign_sum_root(const Int& a, const Int& b, const Int& d) {
    if (b == 0) return sign(a);
    if (a == 0) return sign(b);
    int sa = sign(a), sb = sign(b);
    if (sa == sb) return sa;
    // opposite signs: |a| vs |b|sqrt(d)  <=>  a^2 vs b^2 d
    Int lhs = a * a, rhs = b * b * d;
    if (lhs == rhs) return 0;
    return (lhs > rhs) ? sa : sb;
}

/// Sign of A + B*sqrt(d1) + C*sqrt(d2), d1, d2 > 0, all exact.
inline int sign_sum_two_roots(const Int& A, const Int& B, const Int& d1, const Int& C,
                              const Int& d2) {
    if (C == 0) return sign_sum_root(A, B, d1);
    if (B == 0) return sign_sum_root(A, C, d2);
    int sx = sign_sum_root(A, B, d1);  // X = A + B sqrt(d1)
    int sy = sign(C);                  // Y = C sqrt(d2)
    if (sx == 0) return sy;
    if (sx == sy) return sx;
    // X, Y have opposite signs: compare X^2 with Y^2.
    // X^2 - Y^2 = (A^2 + B^2 d1 - C^2 d2) + 2AB sqrt(d1)
    int s2 = sign_sum_root(A * A + B * B * d1 - C * C * d2, 2 * A * B, d1);
    if (s2 == 0) return 0;
    return (s2 > 0) ? sx : sy;
}

/// Real quadratic surd (u + v*sqrt(d)) / w with integer entries, w > 0,
/// v != 0, d > 0 not a perfect square (square-free after canonicalization,
/// best-effort for very large d).
class QuadSurd {
    Int u_, v_, w_, d_;

    void canonicalize() {
        check(w_ != 0, "surd with zero denominator");
        check(v_ != 0, "surd with zero irrational part is a rational");
        check(d_ > 0, "surd discriminant must be positive");
        Int s, df;
        squarefree_split(d_, s, df);
        check(df > 1, "surd discriminant is a perfect square");
        v_ *= s;
        d_ = df;
        if (w_ < 0) {
            u_ = -u_;
            v_ = -v_;
            w_ = -w_;
        }
        Int g = gcd(gcd(abs(u_), abs(v_)), w_);
        if (g > 1) {
            u_ /= g;
            v_ /= g;
            w_ /= g;
        }
    }

public:
    QuadSurd(Int u, Int v, Int d, Int w) : u_(std::move(u)), v_(std::move(v)), w_(std::move(w)), d_(std::move(d)) {
        canonicalize();
    }

    const Int& u() const { return u_; }
    const Int& v() const { return v_; }
    const Int& w() const { return w_; }
    const Int& d() const { return d_; }

    /// The algebraic conjugate (u - v*sqrt(d))/w.
    QuadSurd conjugate() const { return QuadSurd(u_, -v_, d_, w_); }

    int sign() const { return sign_sum_root(u_, v_, d_); }

    /// Exact comparison with a rational.
    int compare(const Rational& r) const {
        // (u + v sqrt d)/w - n/m  ~  (u m - n w) + v m sqrt(d)
        return sign_sum_root(u_ * r.den() - r.num() * w_, v_ * r.den(), d_);
    }

    /// Exact comparison with another surd, over any pair of discriminants.
    int compare(const QuadSurd& o) const {
        // common denominator w * o.w > 0:
        // (u ow - ou w) + (v ow) sqrt(d) + (-ov w) sqrt(od)
        return sign_sum_two_roots(u_ * o.w_ - o.u_ * w_, v_ * o.w_, d_, -o.v_ * w_, o.d_);
    }

    bool operator==(const QuadSurd& o) const {
        if (u_ == o.u_ && v_ == o.v_ && w_ == o.w_ && d_ == o.d_) return true;
        if (d_ == o.d_) return false;
        return compare(o) == 0;
    }

    double to_double() const {
        return (rayspace::to_double(u_) + rayspace::to_double(v_) * std::sqrt(rayspace::to_double(d_))) /
               rayspace::to_double(w_);
    }

    /// Largest integer <= value, exact.
    Int floor() const {
        Int k = Int(std::floor(to_double()));
        while (compare(Rational(k)) < 0) --k;
        while (compare(Rational(k + 1)) >= 0) ++k;
        return k;
    }

    /// Serialized as "(u+v*sqrt(d))/w" with v signed.
    std::string str() const {
        std::string s = "(" + u_.str();
        s += (v_ < 0) ? "-" : "+";
        s += abs(v_).str() + "*sqrt(" + d_.str() + "))/" + w_.str();
        return s;
    }

    /// Certified rational enclosure with 2^-bits absolute slack on sqrt(d).
    std::pair<Rational, Rational> enclosure(int bits = 64) const {
        Int scale = Int(1) << bits;
        Int s = isqrt(d_ * scale * scale);  // s <= sqrt(d) 2^bits < s + 1
        Rational rlo(s, scale), rhi(s + 1, scale);
        if (v_ < 0) std::swap(rlo, rhi);
        Rational lo = (Rational(u_) + Rational(v_) * rlo) / Rational(w_);
        Rational hi = (Rational(u_) + Rational(v_) * rhi) / Rational(w_);
        return {lo, hi};
    }
};

inline std::ostream& operator<<(std::ostream& os, const QuadSurd& s) { return os << s.str(); }

}  // namespace rayspace
