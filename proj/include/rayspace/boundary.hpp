#pragma once

#include <cctype>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <variant>

#include "rayspace/errors.hpp"
#include "rayspace/rational.hpp"
#include "rayspace/surd.hpp"

namespace rayspace {

struct Infinity {
    bool operator==(const Infinity&) const { return true; }
};

struct RationalInterval {
    Rational lo, hi;  // lo <= hi on the real line
};

/// A real number known only through a nested sequence of rational intervals.
/// `at(level)` returns the enclosure at the given refinement level; enclosures
/// are non-increasing in level. Immutable and shareable.
class IntervalReal {
    std::shared_ptr<const std::function<RationalInterval(int)>> refine_;
    int max_level_;

public:
    IntervalReal(std::function<RationalInterval(int)> f, int max_level)
        : refine_(std::make_shared<const std::function<RationalInterval(int)>>(std::move(f))),
          max_level_(max_level) {}

    static IntervalReal constant(Rational lo, Rational hi) {
        return IntervalReal([lo, hi](int) { return RationalInterval{lo, hi}; }, 0);
    }

    int max_level() const { return max_level_; }
    RationalInterval at(int level) const {
        if (level > max_level_) level = max_level_;
        if (level < 0) level = 0;
        return (*refine_)(level);
    }

    double to_double() const {
        RationalInterval I = at(max_level_ < 16 ? max_level_ : 16);
        return (I.lo.to_double() + I.hi.to_double()) / 2;
    }
};

/// Exact point of the boundary circle C = R u {inf}. Rational, Infinity and
/// QuadSurd support exact total comparison; IntervalReal resolves up to a
/// refinement budget.
class BoundaryPoint {
    std::variant<Infinity, Rational, QuadSurd, IntervalReal> v_;

public:
    BoundaryPoint() : v_(Infinity{}) {}
    BoundaryPoint(Infinity i) : v_(i) {}
    BoundaryPoint(Rational r) : v_(std::move(r)) {}
    BoundaryPoint(QuadSurd s) : v_(std::move(s)) {}
    BoundaryPoint(IntervalReal i) : v_(std::move(i)) {}

    static BoundaryPoint infinity() { return BoundaryPoint(Infinity{}); }

    bool is_infinity() const { return std::holds_alternative<Infinity>(v_); }
    bool is_rational() const { return std::holds_alternative<Rational>(v_); }
    bool is_surd() const { return std::holds_alternative<QuadSurd>(v_); }
    bool is_interval() const { return std::holds_alternative<IntervalReal>(v_); }
    bool is_exact() const { return !is_interval(); }

    const Rational& rational() const { return std::get<Rational>(v_); }
    const QuadSurd& surd() const { return std::get<QuadSurd>(v_); }
    const IntervalReal& interval() const { return std::get<IntervalReal>(v_); }

    double to_double() const {
        if (is_infinity()) return std::numeric_limits<double>::infinity();
        if (is_rational()) return rational().to_double();
        if (is_surd()) return surd().to_double();
        return interval().to_double();
    }

    std::string str() const {
        if (is_infinity()) return "inf";
        if (is_rational()) return rational().str();
        if (is_surd()) return surd().str();
        RationalInterval I = interval().at(interval().max_level());
        return "approx[" + I.lo.str() + "," + I.hi.str() + "]";
    }

    /// Exact equality; IntervalReal points are never equal to anything.
    bool operator==(const BoundaryPoint& o) const {
        if (is_infinity() || o.is_infinity()) return is_infinity() && o.is_infinity();
        if (is_interval() || o.is_interval()) return false;
        if (is_rational() && o.is_rational()) return rational() == o.rational();
        if (is_surd() && o.is_surd()) return surd() == o.surd();
        if (is_rational() && o.is_surd()) return false;  // surds are irrational
        if (is_surd() && o.is_rational()) return false;
        return false;
    }
};

/// Exact strict comparison of finite exact points on the real line.
inline int compare_finite(const BoundaryPoint& a, const BoundaryPoint& b) {
    check(a.is_exact() && b.is_exact() && !a.is_infinity() && !b.is_infinity(),
          "compare_finite needs finite exact points");
    if (a.is_rational() && b.is_rational()) {
        auto c = a.rational() <=> b.rational();
        return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    if (a.is_rational()) return -b.surd().compare(a.rational());
    if (b.is_rational()) return a.surd().compare(b.rational());
    return a.surd().compare(b.surd());
}

enum class Order { Positive, Negative, Degenerate };

namespace detail {

/// Resolve an IntervalReal against an exact point: -1 if x < e, +1 if x > e,
/// nullopt if unresolved within the budget.
inline std::optional<int> interval_vs_exact(const IntervalReal& x, const BoundaryPoint& e,
                                            int budget) {
    check(!e.is_infinity(), "interval_vs_exact needs a finite exact point");
    for (int level = 0; level <= std::min(budget, x.max_level()); ++level) {
        RationalInterval I = x.at(level);
        BoundaryPoint lo(I.lo), hi(I.hi);
        if (compare_finite(hi, e) < 0) return -1;
        if (compare_finite(lo, e) > 0) return 1;
    }
    return std::nullopt;
}

}  // namespace detail

inline constexpr int kDefaultRefineBudget = 64;

/// cyclic_order with the convention: positive orientation on C = R u {inf}
/// is increasing real coordinate, with inf between +inf and -inf.
/// Throws UnresolvedPrecision if an IntervalReal straddles at its refinement.
inline Order cyclic_order(const BoundaryPoint& x, const BoundaryPoint& y, const BoundaryPoint& z,
                          int budget = kDefaultRefineBudget) {
    // A linear key on C \ {inf}; inf handled by case split. IntervalReal points
    // compare via enclosures; equality with them is never asserted.
    auto eq = [&](const BoundaryPoint& a, const BoundaryPoint& b) { return a == b; };
    if (eq(x, y) || eq(y, z) || eq(x, z)) return Order::Degenerate;

    auto less = [&](const BoundaryPoint& a, const BoundaryPoint& b) -> bool {
        // strict a < b on the real line; neither is inf
        if (a.is_interval() && b.is_interval()) {
            const IntervalReal& A = a.interval();
            const IntervalReal& B = b.interval();
            for (int level = 0; level <= budget; ++level) {
                RationalInterval IA = A.at(std::min(level, A.max_level()));
                RationalInterval IB = B.at(std::min(level, B.max_level()));
                if (IA.hi < IB.lo) return true;
                if (IB.hi < IA.lo) return false;
                if (level >= A.max_level() && level >= B.max_level()) break;
            }
            throw UnresolvedPrecision("IntervalReal comparison unresolved");
        }
        if (a.is_interval()) {
            auto r = detail::interval_vs_exact(a.interval(), b, budget);
            if (!r) throw UnresolvedPrecision("IntervalReal comparison unresolved");
            return *r < 0;
        }
        if (b.is_interval()) {
            auto r = detail::interval_vs_exact(b.interval(), a, budget);
            if (!r) throw UnresolvedPrecision("IntervalReal comparison unresolved");
            return *r > 0;
        }
        return compare_finite(a, b) < 0;
    };

    if (x.is_infinity()) return less(y, z) ? Order::Positive : Order::Negative;
    if (y.is_infinity()) return less(z, x) ? Order::Positive : Order::Negative;
    if (z.is_infinity()) return less(x, y) ? Order::Positive : Order::Negative;
    // distinct reals: positively ordered iff exactly two of the cyclic
    // comparisons x<y, y<z, z<x hold
    int cnt = int(less(x, y)) + int(less(y, z)) + int(less(z, x));
    return (cnt == 2) ? Order::Positive : Order::Negative;
}

/// Open interval of the circle from `left` to `right` in positive orientation.
struct CircleInterval {
    BoundaryPoint left, right;

    CircleInterval(BoundaryPoint l, BoundaryPoint r) : left(std::move(l)), right(std::move(r)) {
        check(!(left == right), "degenerate circle interval");
    }
};

enum class Containment { Yes, No, Unresolved };

/// Exact membership for exact points; Unresolved only for IntervalReal at
/// insufficient refinement.
inline Containment interval_contains(const CircleInterval& I, const BoundaryPoint& x,
                                     int budget = kDefaultRefineBudget) {
    if (x == I.left || x == I.right) return Containment::No;  // open interval
    try {
        Order o = cyclic_order(I.left, x, I.right, budget);
        if (o == Order::Degenerate) return Containment::No;
        return o == Order::Positive ? Containment::Yes : Containment::No;
    } catch (const UnresolvedPrecision&) {
        return Containment::Unresolved;
    }
}

/// The simplest rational strictly between two finite exact points, by
/// Stern-Brocot descent with exact comparisons.
inline Rational simplest_rational_between(const BoundaryPoint& lo, const BoundaryPoint& hi) {
    check(lo.is_exact() && hi.is_exact() && !lo.is_infinity() && !hi.is_infinity(),
          "simplest_rational_between needs finite exact endpoints");
    check(compare_finite(lo, hi) < 0, "empty interval");
    auto below = [&](const Rational& r) { return compare_finite(BoundaryPoint(r), lo) <= 0; };
    auto above = [&](const Rational& r) { return compare_finite(BoundaryPoint(r), hi) >= 0; };
    // integer candidates first
    Int n = lo.is_rational() ? lo.rational().floor() : lo.surd().floor();
    Rational cand(n + 1);
    if (!below(cand) && !above(cand)) return cand;
    // descend mediants between n and n+1
    Rational left(n), right(n + 1);
    for (int iter = 0; iter < 100000; ++iter) {
        Rational mid = mediant(left, right);
        if (below(mid))
            left = mid;
        else if (above(mid))
            right = mid;
        else
            return mid;
    }
    throw Error("simplest_rational_between did not converge");
}

inline std::ostream& operator<<(std::ostream& os, const BoundaryPoint& p) { return os << p.str(); }

inline std::ostream& operator<<(std::ostream& os, const CircleInterval& I) {
    return os << "(" << I.left << "," << I.right << ")";
}

namespace detail {

inline Int parse_int(const std::string& s, size_t& pos) {
    bool neg = false;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
        neg = (s[pos] == '-');
        ++pos;
    }
    size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) throw Error("expected integer in point literal: " + s);
    Int v(s.substr(start, pos - start));
    return neg ? Int(-v) : v;
}

}  // namespace detail

/// Parses "inf", "n/d", "n", a decimal like "1.25" (which becomes an
/// IntervalReal pinned to its last printed digit), or "(u+v*sqrt(d))/w".
inline BoundaryPoint parse_point(const std::string& s) {
    if (s == "inf" || s == "Inf" || s == "INF" || s == "oo") return BoundaryPoint::infinity();
    if (!s.empty() && s.front() == '(') {
        // (u+v*sqrt(d))/w
        size_t pos = 1;
        Int u = detail::parse_int(s, pos);
        Int v = detail::parse_int(s, pos);
        if (s.compare(pos, 6, "*sqrt(") != 0) throw Error("bad surd literal: " + s);
        pos += 6;
        Int d = detail::parse_int(s, pos);
        if (s.compare(pos, 3, "))/") != 0) throw Error("bad surd literal: " + s);
        pos += 3;
        Int w = detail::parse_int(s, pos);
        if (pos != s.size()) throw Error("bad surd literal: " + s);
        return BoundaryPoint(QuadSurd(u, v, d, w));
    }
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        size_t pos = 0;
        Int n = detail::parse_int(s, pos);
        if (pos != slash) throw Error("bad rational literal: " + s);
        pos = slash + 1;
        Int d = detail::parse_int(s, pos);
        if (pos != s.size()) throw Error("bad rational literal: " + s);
        return BoundaryPoint(Rational(n, d));
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        size_t pos = 0;
        bool neg = !s.empty() && s[0] == '-';
        Int whole = detail::parse_int(s, pos);
        if (pos != dot) throw Error("bad decimal literal: " + s);
        std::string frac = s.substr(dot + 1);
        if (frac.empty()) throw Error("bad decimal literal: " + s);
        Int den = 1, num = abs(whole);
        for (char c : frac) {
            if (!std::isdigit(static_cast<unsigned char>(c))) throw Error("bad decimal literal: " + s);
            num = num * 10 + (c - '0');
            den *= 10;
        }
        if (neg) num = -num;
        // Pin to the last printed digit: the value is within half an ulp.
        Rational lo(num * 2 - 1, den * 2), hi(num * 2 + 1, den * 2);
        return BoundaryPoint(IntervalReal::constant(lo, hi));
    }
    size_t pos = 0;
    Int n = detail::parse_int(s, pos);
    if (pos != s.size()) throw Error("bad point literal: " + s);
    return BoundaryPoint(Rational(n));
}

}  // namespace rayspace
