#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <utility>

#include "rayspace/bigint.hpp"
#include "rayspace/boundary.hpp"
#include "rayspace/errors.hpp"

namespace rayspace {

enum class MapClass { Identity, Parabolic, Hyperbolic, Elliptic };

/// Integer 2x2 matrix of determinant one, identified with its negation.
/// Canonical sign: the first nonzero entry of (a, b, c, d) is positive, so
/// equality in PSL(2,Z) is a field-by-field comparison.
class MoebiusMap {
    Int a_, b_, c_, d_;

    void canonicalize() {
        check(a_ * d_ - b_ * c_ == 1, "MoebiusMap must have determinant 1");
        const Int* first = &a_;
        if (*first == 0) first = &b_;
        if (*first == 0) first = &c_;
        if (*first == 0) first = &d_;
        if (*first < 0) {
            a_ = -a_;
            b_ = -b_;
            c_ = -c_;
            d_ = -d_;
        }
    }

public:
    MoebiusMap() : a_(1), b_(0), c_(0), d_(1) {}
    MoebiusMap(Int a, Int b, Int c, Int d)
        : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
        canonicalize();
    }

    static MoebiusMap identity() { return MoebiusMap(); }

    const Int& a() const { return a_; }
    const Int& b() const { return b_; }
    const Int& c() const { return c_; }
    const Int& d() const { return d_; }

    Int trace_abs() const { return abs(a_ + d_); }

    bool is_identity() const { return b_ == 0 && c_ == 0 && a_ == d_; }

    MoebiusMap inverse() const { return MoebiusMap(d_, -b_, -c_, a_); }

    bool operator==(const MoebiusMap& o) const {
        return a_ == o.a_ && b_ == o.b_ && c_ == o.c_ && d_ == o.d_;
    }

    std::string str() const {
        return "[[" + a_.str() + "," + b_.str() + "],[" + c_.str() + "," + d_.str() + "]]";
    }

    /// Key for hashing and deterministic ordering.
    std::array<Int, 4> key() const { return {a_, b_, c_, d_}; }
};

inline MoebiusMap compose(const MoebiusMap& m, const MoebiusMap& n) {
    return MoebiusMap(m.a() * n.a() + m.b() * n.c(), m.a() * n.b() + m.b() * n.d(),
                      m.c() * n.a() + m.d() * n.c(), m.c() * n.b() + m.d() * n.d());
}

inline MoebiusMap operator*(const MoebiusMap& m, const MoebiusMap& n) { return compose(m, n); }

inline MapClass classify(const MoebiusMap& m) {
    if (m.is_identity()) return MapClass::Identity;
    Int t = m.trace_abs();
    if (t == 2) return MapClass::Parabolic;
    if (t > 2) return MapClass::Hyperbolic;
    return MapClass::Elliptic;
}

/// Image of a boundary point, with the projective conventions: inf maps to
/// a/c, and a vanishing denominator maps to inf.
inline BoundaryPoint apply(const MoebiusMap& m, const BoundaryPoint& x) {
    if (x.is_infinity()) {
        if (m.c() == 0) return BoundaryPoint::infinity();
        return BoundaryPoint(Rational(m.a(), m.c()));
    }
    if (x.is_rational()) {
        const Rational& r = x.rational();
        Int num = m.a() * r.num() + m.b() * r.den();
        Int den = m.c() * r.num() + m.d() * r.den();
        if (den == 0) return BoundaryPoint::infinity();
        return BoundaryPoint(Rational(num, den));
    }
    if (x.is_surd()) {
        const QuadSurd& s = x.surd();
        // numerator (A1 + B1 sqrt(D)), denominator (A2 + B2 sqrt(D))
        Int A1 = m.a() * s.u() + m.b() * s.w(), B1 = m.a() * s.v();
        Int A2 = m.c() * s.u() + m.d() * s.w(), B2 = m.c() * s.v();
        Int norm = A2 * A2 - B2 * B2 * s.d();
        check(norm != 0, "surd landed on the pole of a Moebius map");
        Int uu = A1 * A2 - B1 * B2 * s.d();
        Int vv = B1 * A2 - A1 * B2;
        return BoundaryPoint(QuadSurd(uu, vv, s.d(), norm));
    }
    const IntervalReal& I = x.interval();
    MoebiusMap mc = m;
    IntervalReal img(
        [mc, I](int level) -> RationalInterval {
            // Refine past any pole so the image is a bounded real interval.
            for (int l = level; l <= I.max_level() + 64; ++l) {
                RationalInterval J = I.at(l);
                Int den_lo = mc.c() * J.lo.num() + mc.d() * J.lo.den();
                Int den_hi = mc.c() * J.hi.num() + mc.d() * J.hi.den();
                if (den_lo == 0 || den_hi == 0 || sign(den_lo) != sign(den_hi)) continue;
                Rational ilo(mc.a() * J.lo.num() + mc.b() * J.lo.den(), den_lo);
                Rational ihi(mc.a() * J.hi.num() + mc.b() * J.hi.den(), den_hi);
                if (ihi < ilo) std::swap(ilo, ihi);
                return RationalInterval{ilo, ihi};
            }
            throw UnresolvedPrecision("IntervalReal too close to a Moebius pole");
        },
        I.max_level());
    return BoundaryPoint(img);
}

/// Attracting and repelling fixed points of a hyperbolic map, or the single
/// fixed point of a parabolic one.
struct FixedPoints {
    BoundaryPoint attracting;
    BoundaryPoint repelling;  // equal to attracting for parabolic maps
    bool parabolic = false;
};

namespace detail {

/// |c z + d| > 1 test for an exact point z, i.e. |derivative| < 1 at z.
inline bool contracts_at(const MoebiusMap& m, const BoundaryPoint& z) {
    if (z.is_infinity()) return m.c() == 0 && abs(m.d()) < abs(m.a());
    if (z.is_rational()) {
        const Rational& r = z.rational();
        Int t = m.c() * r.num() + m.d() * r.den();
        return t * t > r.den() * r.den();
    }
    const QuadSurd& s = z.surd();
    Int A = m.c() * s.u() + m.d() * s.w(), B = m.c() * s.v();
    // (A + B sqrt(d))^2 vs w^2
    return sign_sum_root(A * A + B * B * s.d() - s.w() * s.w(), 2 * A * B, s.d()) > 0;
}

}  // namespace detail

inline FixedPoints fixed_points(const MoebiusMap& m) {
    MapClass k = classify(m);
    if (k == MapClass::Identity) throw IdentityInput("fixed_points of the identity");
    if (k == MapClass::Elliptic) throw EllipticInput("fixed_points of an elliptic map");
    if (k == MapClass::Parabolic) {
        BoundaryPoint p = m.c() == 0 ? BoundaryPoint::infinity()
                                     : BoundaryPoint(Rational(m.a() - m.d(), 2 * m.c()));
        return FixedPoints{p, p, true};
    }
    // roots of c z^2 + (d - a) z - b = 0
    if (m.c() == 0) {
        // affine: fixes inf and b/(d-a)
        BoundaryPoint fin(Rational(m.b(), m.d() - m.a()));
        BoundaryPoint inf = BoundaryPoint::infinity();
        bool inf_attracting = abs(m.a()) > abs(m.d());
        FixedPoints fp{inf_attracting ? inf : fin, inf_attracting ? fin : inf, false};
        check(detail::contracts_at(m, fp.attracting), "attracting fixed point misidentified");
        return fp;
    }
    Int disc = (m.d() - m.a()) * (m.d() - m.a()) + 4 * m.b() * m.c();
    check(disc == m.trace_abs() * m.trace_abs() - 4, "discriminant identity failed");
    QuadSurd r1(m.a() - m.d(), 1, disc, 2 * m.c());
    QuadSurd r2(m.a() - m.d(), -1, disc, 2 * m.c());
    BoundaryPoint z1(r1), z2(r2);
    bool one_attracts = detail::contracts_at(m, z1);
    bool two_attracts = detail::contracts_at(m, z2);
    check(one_attracts != two_attracts, "hyperbolic map needs exactly one attracting fixed point");
    return FixedPoints{one_attracts ? z1 : z2, one_attracts ? z2 : z1, false};
}

/// Hyperbolic translation length 2*arccosh(|tr|/2) in length units.
inline double translation_length(const MoebiusMap& m) {
    if (classify(m) != MapClass::Hyperbolic) throw NotHyperbolic("translation_length needs a hyperbolic map");
    double t = to_double(m.trace_abs()) / 2.0;
    return 2.0 * std::acosh(t);
}

/// Image of an interval under an orientation-preserving map.
inline CircleInterval apply(const MoebiusMap& m, const CircleInterval& I) {
    return CircleInterval(apply(m, I.left), apply(m, I.right));
}

inline std::ostream& operator<<(std::ostream& os, const MoebiusMap& m) { return os << m.str(); }

struct MoebiusHash {
    size_t operator()(const MoebiusMap& m) const {
        std::hash<std::string> h;
        return h(m.str());
    }
};

/// Class of an integer matrix in the abelianization PSL(2,Z) -> Z/6, with
/// T = [[1,1],[0,1]] mapping to 1 and S = [[0,-1],[1,0]] to 3. The kernel is
/// the commutator subgroup, i.e. the modular-torus group.
inline int modular_class_mod6(const MoebiusMap& m) {
    Int a = m.a(), b = m.b(), c = m.c(), d = m.d();
    Int cls = 0;
    while (c != 0) {
        // M = T^q S M' where M' = [[c, d], [qc - a, qd - b]] has |qc - a| < |c|
        Int q = a / c;
        Int r = a - q * c;
        if (r < 0) {  // normalize the remainder into [0, |c|)
            q -= (c > 0) ? 1 : -1;
            r = a - q * c;
        }
        Int nb = d, nd = q * d - b;
        cls += q + 3;
        a = c;
        b = nb;
        c = -r;
        d = nd;
    }
    // c == 0: +-[[1,t],[0,1]]
    Int t = (a > 0) ? b : -b;
    cls += t;
    cls %= 6;
    if (cls < 0) cls += 6;
    return static_cast<int>(cls);
}

}  // namespace rayspace
