#pragma once

#include <compare>
#include <ostream>
#include <string>

#include "rayspace/bigint.hpp"
#include "rayspace/errors.hpp"

namespace rayspace {

/// Exact rational, always reduced, denominator > 0. Zero is 0/1.
class Rational {
    Int num_;
    Int den_;

    void reduce() {
        if (den_ == 0) throw Error("Rational with zero denominator");
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        Int g = rayspace::gcd(rayspace::abs(num_), den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
        if (num_ == 0) den_ = 1;
    }

public:
    Rational() : num_(0), den_(1) {}
    Rational(Int n) : num_(std::move(n)), den_(1) {}
    Rational(long n) : num_(n), den_(1) {}
    Rational(int n) : num_(n), den_(1) {}
    Rational(Int n, Int d) : num_(std::move(n)), den_(std::move(d)) { reduce(); }
    Rational(long n, long d) : num_(n), den_(d) { reduce(); }

    const Int& num() const { return num_; }
    const Int& den() const { return den_; }

    bool is_integer() const { return den_ == 1; }
    int sign() const { return num_.sign(); }

    Rational operator-() const { return Rational(-num_, den_); }
    Rational operator+(const Rational& r) const {
        return Rational(num_ * r.den_ + r.num_ * den_, den_ * r.den_);
    }
    Rational operator-(const Rational& r) const {
        return Rational(num_ * r.den_ - r.num_ * den_, den_ * r.den_);
    }
    Rational operator*(const Rational& r) const { return Rational(num_ * r.num_, den_ * r.den_); }
    Rational operator/(const Rational& r) const {
        if (r.num_ == 0) throw Error("Rational division by zero");
        return Rational(num_ * r.den_, den_ * r.num_);
    }

    bool operator==(const Rational& r) const { return num_ == r.num_ && den_ == r.den_; }
    std::strong_ordering operator<=>(const Rational& r) const {
        Int lhs = num_ * r.den_, rhs = r.num_ * den_;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    /// Largest integer <= value.
    Int floor() const {
        Int q = num_ / den_;
        if (num_ < 0 && q * den_ != num_) --q;
        return q;
    }

    double to_double() const { return rayspace::to_double(num_) / rayspace::to_double(den_); }

    /// Serialized as "n/d", always with the denominator.
    std::string str() const { return num_.str() + "/" + den_.str(); }
};

inline Rational mediant(const Rational& a, const Rational& b) {
    return Rational(a.num() + b.num(), a.den() + b.den());
}

inline std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace rayspace
