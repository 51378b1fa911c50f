#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rayspace/boundary.hpp"
#include "rayspace/errors.hpp"
#include "rayspace/farey.hpp"
#include "rayspace/moebius.hpp"
#include "rayspace/surface.hpp"

namespace rayspace {

/// Shortcut pair for a pair in Delta: g_pq carries p to q, g_qp carries q to
/// p, and g_qp g_pq = theta(p) exactly. Endpoints and the three intervals are
/// exact, with q inside I_full and the six fixed points in verified cyclic
/// position.
struct Gap {
    ParabolicPoint p, q;
    GroupElement g_pq, g_qp;
    BoundaryPoint a_pq, b_pq, a_qp, b_qp;
    CircleInterval I_plus, I_minus, I_full;
};

namespace detail {

/// Gap data in the chart where the base point is inf; there the validated
/// six-point configuration reads b_pq < a_pq < q < b_qp < a_qp on the line.
struct ChartGap {
    Rational q;
    GroupElement g;  // g(inf, q)
    QuadSurd a_pq, b_pq, a_qp, b_qp;

    CircleInterval full() const { return CircleInterval(BoundaryPoint(a_pq), BoundaryPoint(b_qp)); }
    CircleInterval plus() const { return CircleInterval(BoundaryPoint(a_pq), BoundaryPoint(q)); }
    CircleInterval minus() const { return CircleInterval(BoundaryPoint(q), BoundaryPoint(b_qp)); }
};

inline QuadSurd as_surd(const BoundaryPoint& p, const char* what) {
    check(p.is_surd(), what);
    return p.surd();
}

/// Builds and fully verifies the chart gap of a foot-normalized element g
/// with g(inf) = q and g^-1(inf) in (q - c, q).
inline ChartGap finish_chart_gap(const SurfaceGroup& G, const Rational& q, GroupElement g) {
    const Rational c = G.cusp_width;
    check(c.is_integer(), "chart gaps need an integer cusp width");
    check(apply(g.matrix, BoundaryPoint::infinity()) == BoundaryPoint(q),
          "shortcut element must carry inf to q");
    BoundaryPoint footp = apply(g.matrix.inverse(), BoundaryPoint::infinity());
    check(footp.is_rational(), "shortcut foot must be parabolic");
    const Rational& foot = footp.rational();
    check(q - c < foot && foot < q, "shortcut foot must lie in (q - c, q)");
    check(classify(g.matrix) == MapClass::Hyperbolic, "shortcut element must be hyperbolic");
    check(G.evaluate(g.word) == g.matrix, "shortcut word does not evaluate to its matrix");

    GroupElement theta = G.theta_infinity();
    Word qp_word = concat(theta.word, inverse(g.word));
    GroupElement gqp{qp_word, theta.matrix * g.matrix.inverse()};
    check(classify(gqp.matrix) == MapClass::Hyperbolic, "partner element must be hyperbolic");

    FixedPoints f1 = fixed_points(g.matrix);
    FixedPoints f2 = fixed_points(gqp.matrix);
    ChartGap out{q,
                 std::move(g),
                 as_surd(f1.attracting, "a(p,q) must be a surd"),
                 as_surd(f1.repelling, "b(p,q) must be a surd"),
                 as_surd(f2.attracting, "a(q,p) must be a surd"),
                 as_surd(f2.repelling, "b(q,p) must be a surd")};

    // six-point configuration in the chart
    check(out.b_pq.compare(out.a_pq) < 0, "six-point order: b_pq < a_pq");
    check(out.a_pq.compare(q) < 0, "six-point order: a_pq < q");
    check(out.b_qp.compare(q) > 0, "six-point order: q < b_qp");
    check(out.a_qp.compare(out.b_qp) > 0, "six-point order: b_qp < a_qp");

    // I_full avoids its theta-translates: a_pq + cn >= b_qp for n = 1..3,
    // and by symmetry the same inequality covers negative shifts
    Int cint = c.num();
    for (int n = 1; n <= 3; ++n) {
        QuadSurd shifted(out.a_pq.u() + out.a_pq.w() * cint * n, out.a_pq.v(), out.a_pq.d(),
                         out.a_pq.w());
        check(shifted.compare(out.b_qp) >= 0, "gap must avoid its theta-translates");
    }
    return out;
}

}  // namespace detail

/// The shortcut element g(inf, q): any witness carrying inf to q, normalized
/// by the unique theta-power whose foot lands in (q - c, q).
inline GroupElement chart_shortcut(const SurfaceGroup& G, const Rational& q) {
    ParabolicPoint w = G.parabolic_witness(BoundaryPoint(q));
    GroupElement theta = G.theta_infinity();
    const Rational c = G.cusp_width;
    BoundaryPoint footp = apply(w.witness.matrix.inverse(), BoundaryPoint::infinity());
    check(footp.is_rational(), "witness foot must be rational");
    Rational t = (footp.rational() - q) / c;
    check(!t.is_integer(), "foot landed on the window boundary");
    Int n = t.floor() + 1;
    Word theta_w = n >= 0 ? theta.word : inverse(theta.word);
    Word gw = w.witness.word;
    for (Int i = 0, reps = abs(n); i < reps; ++i) gw = concat(gw, theta_w);
    return G.element(gw);
}

/// Transports a chart gap at base inf to base p along the group element M
/// (M carries the chart configuration onto the (p, M q') one).
inline Gap transport_gap(const SurfaceGroup& G, const detail::ChartGap& cg,
                         const ParabolicPoint& p, const GroupElement& M) {
    BoundaryPoint q_pt = apply(M.matrix, BoundaryPoint(cg.q));
    Word qwit_w = concat(M.word, cg.g.word);
    ParabolicPoint q{q_pt, GroupElement{qwit_w, G.evaluate(qwit_w)}};

    Word pq_w = concat(concat(M.word, cg.g.word), inverse(M.word));
    GroupElement g_pq{pq_w, G.evaluate(pq_w)};
    GroupElement theta_p = G.theta(p);
    Word qp_w = concat(theta_p.word, inverse(pq_w));
    GroupElement g_qp{qp_w, theta_p.matrix * g_pq.matrix.inverse()};

    BoundaryPoint a_pq = apply(M.matrix, BoundaryPoint(cg.a_pq));
    BoundaryPoint b_pq = apply(M.matrix, BoundaryPoint(cg.b_pq));
    BoundaryPoint a_qp = apply(M.matrix, BoundaryPoint(cg.a_qp));
    BoundaryPoint b_qp = apply(M.matrix, BoundaryPoint(cg.b_qp));

    check(apply(g_pq.matrix, p.point) == q_pt, "g(p,q) must carry p to q");
    check(apply(g_qp.matrix, q_pt) == p.point, "g(q,p) must carry q to p");
    check(fixed_points(g_pq.matrix).attracting == a_pq, "transported a(p,q) mismatch");

    return Gap{p,
               q,
               std::move(g_pq),
               std::move(g_qp),
               a_pq,
               b_pq,
               a_qp,
               b_qp,
               CircleInterval(a_pq, q_pt),
               CircleInterval(q_pt, b_qp),
               CircleInterval(a_pq, b_qp)};
}

/// Deterministic verified gap enumeration and location at base inf, built
/// from the integer-center seed gaps by recursive splitting. Shared context
/// for classify/expand; caches children.
class GapTree {
    const SurfaceGroup* G_;
    std::vector<detail::ChartGap> seeds_;  // centers 0..c
    mutable std::map<std::pair<std::string, std::string>, detail::ChartGap> child_cache_;

public:
    explicit GapTree(const SurfaceGroup& G) : G_(&G) {
        check(G.cusp_width.is_integer(), "gap tree needs an integer cusp width");
        long c = static_cast<long>(G.cusp_width.num());
        for (long n = 0; n <= c; ++n)
            seeds_.push_back(detail::finish_chart_gap(*G_, Rational(n), chart_shortcut(*G_, Rational(n))));
    }

    const SurfaceGroup& group() const { return *G_; }
    const std::vector<detail::ChartGap>& seeds() const { return seeds_; }

    const detail::ChartGap& child(const detail::ChartGap& L, const detail::ChartGap& R) const {
        auto key = std::make_pair(L.q.str(), R.q.str());
        auto it = child_cache_.find(key);
        if (it == child_cache_.end()) {
            Word w = concat(R.g.word, L.g.word);
            GroupElement g{w, R.g.matrix * L.g.matrix};
            BoundaryPoint qp = apply(g.matrix, BoundaryPoint::infinity());
            check(qp.is_rational(), "child center must be rational");
            Rational q = qp.rational();
            check(L.q < q && q < R.q, "child center must separate its parents");
            it = child_cache_.emplace(key, detail::finish_chart_gap(*G_, q, std::move(g))).first;
        }
        return it->second;
    }

    /// All gaps with reduced shortcut word length <= L, centers in [0, c),
    /// sorted by left endpoint. The recursion overshoots the budget a little
    /// because child word lengths are not monotone under free reduction.
    std::vector<detail::ChartGap> enumerate_chart(int L, int slack = 8) const {
        std::vector<detail::ChartGap> out;
        for (size_t i = 0; i + 1 < seeds_.size(); ++i) {
            if (static_cast<int>(seeds_[i].g.word.size()) <= L) out.push_back(seeds_[i]);
            descend(seeds_[i], seeds_[i + 1], L, L + slack, out);
        }
        std::sort(out.begin(), out.end(), [](const detail::ChartGap& x, const detail::ChartGap& y) {
            return x.a_pq.compare(y.a_pq) < 0;
        });
        return out;
    }

    enum class Where { Center, Boundary, Plus, Minus };
    struct Located {
        detail::ChartGap gap;
        Where where;
        int depth;
    };

    /// Walks the tree toward x (already reduced into [0, c)); nullopt when
    /// undecided within the depth budget.
    std::optional<Located> locate(const BoundaryPoint& x, int max_depth) const;

private:
    enum class Side { Inside, Left, Right, Unknown };

    Side side_of(const detail::ChartGap& g, const BoundaryPoint& x) const {
        Containment right = interval_contains(
            CircleInterval(BoundaryPoint(g.b_qp), BoundaryPoint::infinity()), x);
        if (right == Containment::Yes) return Side::Right;
        Containment left = interval_contains(
            CircleInterval(BoundaryPoint::infinity(), BoundaryPoint(g.a_pq)), x);
        if (left == Containment::Yes) return Side::Left;
        if (left == Containment::Unresolved || right == Containment::Unresolved)
            return Side::Unknown;
        return Side::Inside;
    }

    void descend(const detail::ChartGap& L, const detail::ChartGap& R, int keep, int hard,
                 std::vector<detail::ChartGap>& out) const {
        const detail::ChartGap& C = child(L, R);
        int len = static_cast<int>(C.g.word.size());
        if (len > hard) return;
        if (len <= keep) out.push_back(C);
        descend(L, C, keep, hard, out);
        descend(C, R, keep, hard, out);
    }
};

inline std::optional<GapTree::Located> GapTree::locate(const BoundaryPoint& x,
                                                       int max_depth) const {
    auto probe = [&](const detail::ChartGap& g, int depth) -> std::optional<Located> {
        if (x == BoundaryPoint(g.q)) return Located{g, Where::Center, depth};
        if (x == BoundaryPoint(g.a_pq) || x == BoundaryPoint(g.b_qp))
            return Located{g, Where::Boundary, depth};
        Containment in_plus = interval_contains(g.plus(), x);
        if (in_plus == Containment::Yes) return Located{g, Where::Plus, depth};
        Containment in_minus = interval_contains(g.minus(), x);
        if (in_minus == Containment::Yes) return Located{g, Where::Minus, depth};
        return std::nullopt;
    };

    const detail::ChartGap* L = nullptr;
    const detail::ChartGap* R = nullptr;
    for (size_t i = 0; i < seeds_.size(); ++i) {
        if (auto hit = probe(seeds_[i], 0)) return hit;
        Side s = side_of(seeds_[i], x);
        if (s == Side::Unknown) return std::nullopt;
        if (s == Side::Inside) return std::nullopt;  // straddles an endpoint: IntervalReal only
        if (s == Side::Left) {
            check(i > 0, "x below the first seed: not reduced into the period");
            L = &seeds_[i - 1];
            R = &seeds_[i];
            break;
        }
    }
    check(L != nullptr, "x above the last seed: not reduced into the period");

    detail::ChartGap left = *L, right = *R;
    for (int depth = 1; depth <= max_depth; ++depth) {
        const detail::ChartGap& C = child(left, right);
        if (auto hit = probe(C, depth)) return hit;
        Side s = side_of(C, x);
        if (s == Side::Unknown || s == Side::Inside) return std::nullopt;
        if (s == Side::Left)
            right = C;
        else
            left = C;
    }
    return std::nullopt;
}

/// gap(p, q): requires (p, q) in Delta (nu = 0, checked unless skipped).
inline Gap gap(const SurfaceGroup& G, const ParabolicPoint& p, const BoundaryPoint& q,
               bool skip_delta_check = false, long nu_budget = 200000) {
    if (p.point == q) throw SamePoint("gap needs p != q");
    if (!skip_delta_check) {
        long nu = self_intersection_count(G, p, q, NuOracle::CuttingSequence, nu_budget);
        if (nu != 0) throw NotInDelta("nu(p,q) = " + std::to_string(nu) + ", pair not in Delta");
    }
    BoundaryPoint qc = apply(p.witness.matrix.inverse(), q);
    check(qc.is_rational(), "gap center must be parabolic");
    detail::ChartGap cg = detail::finish_chart_gap(G, qc.rational(), chart_shortcut(G, qc.rational()));
    return transport_gap(G, cg, p, p.witness);
}

/// enumerate_gaps(p, L): all verified gaps of shortcut word length <= L in
/// one period of the p = inf chart, transported to base p.
inline std::vector<Gap> enumerate_gaps(const GapTree& tree, const ParabolicPoint& p, int L) {
    std::vector<Gap> out;
    for (const auto& cg : tree.enumerate_chart(L))
        out.push_back(transport_gap(tree.group(), cg, p, p.witness));
    return out;
}

struct Classification {
    enum class Kind { InGap, InR, Unresolved } kind;
    int eps = 0;                    // +1 for I_plus, -1 for I_minus
    std::optional<Gap> gap;         // base coordinates
    std::optional<GroupElement> g;  // the loop-cutting element g(p)(x)
    int depth = 0;
};

/// classify_point(p, x): InGap with the unique containing gap; InR for
/// members of R(p) (rationals with nu = 0, gap centers, and gap-boundary
/// surds by convention); Unresolved within the budget otherwise.
inline Classification classify_point(const GapTree& tree, const ParabolicPoint& p,
                                     const BoundaryPoint& x, int max_depth = 64,
                                     bool nu_precheck = true, long nu_budget = 200000) {
    const SurfaceGroup& G = tree.group();
    if (x == p.point) throw SamePoint("classify_point needs x != p");
    BoundaryPoint y = apply(p.witness.matrix.inverse(), x);
    check(!y.is_infinity(), "x = p after chart transport");

    if (nu_precheck && y.is_rational()) {
        long nu = self_intersection_count(G, p, x, NuOracle::CuttingSequence, nu_budget);
        if (nu == 0)
            return Classification{Classification::Kind::InR, 0, std::nullopt, std::nullopt, 0};
    }

    // reduce into the fundamental period [0, c)
    const Rational c = G.cusp_width;
    Int k;
    if (y.is_rational())
        k = (y.rational() / c).floor();
    else if (y.is_surd()) {
        const QuadSurd& s = y.surd();
        k = QuadSurd(s.u(), s.v(), s.d(), s.w() * c.num()).floor();
    } else {
        RationalInterval I = y.interval().at(y.interval().max_level());
        Int klo = (I.lo / c).floor(), khi = (I.hi / c).floor();
        if (klo != khi)
            return Classification{Classification::Kind::Unresolved, 0, std::nullopt, std::nullopt, 0};
        k = klo;
    }
    MoebiusMap down(1, -k * c.num(), 0, 1);
    BoundaryPoint y_red = apply(down, y);

    auto loc = tree.locate(y_red, max_depth);
    if (!loc)
        return Classification{Classification::Kind::Unresolved, 0, std::nullopt, std::nullopt,
                              max_depth};
    if (loc->where == GapTree::Where::Center || loc->where == GapTree::Where::Boundary)
        return Classification{Classification::Kind::InR, 0, std::nullopt, std::nullopt, loc->depth};

    // transporter p.witness * theta^k
    GroupElement theta = G.theta_infinity();
    Word tw = p.witness.word;
    Word theta_w = k >= 0 ? theta.word : inverse(theta.word);
    for (Int i = 0, reps = abs(k); i < reps; ++i) tw = concat(tw, theta_w);
    GroupElement M = G.element(tw);
    Gap full = transport_gap(G, loc->gap, p, M);
    int eps = (loc->where == GapTree::Where::Plus) ? +1 : -1;
    GroupElement g;
    if (eps > 0)
        g = full.g_pq;
    else
        g = GroupElement{inverse(full.g_qp.word), full.g_qp.matrix.inverse()};
    check(interval_contains(eps > 0 ? full.I_plus : full.I_minus, x) != Containment::No,
          "classified gap does not contain x");
    return Classification{Classification::Kind::InGap, eps, std::move(full), std::move(g),
                          loc->depth};
}

struct ExpansionStep {
    GroupElement g;      // g_i
    ParabolicPoint p;    // p_i = g_i p_{i-1}
    int eps;             // epsilon_i
    Gap gap;             // the gap of (p_{i-1}, q) containing x
    long nu_after = -1;  // nu(p_i, x) when tracked
};

enum class Terminal { LandedInR, Exhausted, Unresolved };

struct DerivedExpansion {
    ParabolicPoint base;
    BoundaryPoint x;
    std::vector<ExpansionStep> steps;
    std::vector<GroupElement> partials;  // h_0 = 1, h_i = g_i ... g_1
    Terminal terminal = Terminal::Exhausted;
    std::vector<long> nu_chain;  // nu(p_i, x) for rational x

    const GroupElement& h(size_t i) const { return partials.at(i); }
};

/// Runs the loop-cutting iteration from the cusp. For rational x the
/// expansion terminates with a strictly decreasing nu chain; both are
/// asserted at runtime.
inline DerivedExpansion derived_expansion(const GapTree& tree, const BoundaryPoint& x,
                                          int max_steps, int classify_depth = 64,
                                          long nu_budget = 200000) {
    const SurfaceGroup& G = tree.group();
    ParabolicPoint p0 = G.cusp();
    if (x == p0.point) throw SamePoint("derived_expansion needs x != cusp");
    bool rational = x.is_rational();

    DerivedExpansion e{p0, x, {}, {G.element(Word{})}, Terminal::Exhausted, {}};
    ParabolicPoint p = p0;
    if (rational)
        e.nu_chain.push_back(self_intersection_count(G, p, x, NuOracle::CuttingSequence, nu_budget));

    for (int i = 0; i < max_steps; ++i) {
        Classification cls = classify_point(tree, p, x, classify_depth, rational, nu_budget);
        if (cls.kind == Classification::Kind::InR) {
            e.terminal = Terminal::LandedInR;
            if (rational) check(e.nu_chain.back() == 0, "LandedInR with nonzero nu");
            return e;
        }
        if (cls.kind == Classification::Kind::Unresolved) {
            if (rational) throw StepBudgetExceeded("classification unresolved on a rational point");
            e.terminal = Terminal::Unresolved;
            return e;
        }
        ExpansionStep step{*cls.g, cls.gap->q, cls.eps, *cls.gap, -1};
        check(apply(step.g.matrix, p.point) == step.p.point, "p_i = g_i p_{i-1} failed");
        e.partials.push_back(G.element(concat(step.g.word, e.partials.back().word)));
        if (rational) {
            long nu_next =
                self_intersection_count(G, step.p, x, NuOracle::CuttingSequence, nu_budget);
            check(nu_next < e.nu_chain.back(), "nu must strictly decrease along a rational expansion");
            e.nu_chain.push_back(nu_next);
            step.nu_after = nu_next;
        }
        e.steps.push_back(std::move(step));
        p = e.steps.back().p;
    }
    if (rational) throw StepBudgetExceeded("rational expansion did not terminate in the budget");
    e.terminal = Terminal::Exhausted;
    return e;
}

/// Intersection of two circle intervals around a common interior point.
inline CircleInterval intersect_around(const CircleInterval& A, const CircleInterval& B,
                                       const BoundaryPoint& x) {
    BoundaryPoint left = A.left;
    if (interval_contains(CircleInterval(A.left, x), B.left) == Containment::Yes) left = B.left;
    BoundaryPoint right = A.right;
    if (interval_contains(CircleInterval(x, A.right), B.right) == Containment::Yes) right = B.right;
    return CircleInterval(left, right);
}

/// agreement_neighborhood(e, n): the open interval around x cut out by the
/// first n steps; every point inside shares the length-n prefix with x.
inline CircleInterval agreement_neighborhood(const DerivedExpansion& e, size_t n) {
    if (n < 1 || e.steps.size() < n) throw TooFewSteps("agreement_neighborhood needs 1 <= n <= steps");
    CircleInterval U = e.steps[0].eps > 0 ? e.steps[0].gap.I_plus : e.steps[0].gap.I_minus;
    for (size_t i = 1; i < n; ++i) {
        CircleInterval I = e.steps[i].eps > 0 ? e.steps[i].gap.I_plus : e.steps[i].gap.I_minus;
        U = intersect_around(U, I, e.x);
    }
    check(interval_contains(U, e.x) != Containment::No, "agreement neighborhood must contain x");
    return U;
}

/// Line-delimited transcript (exact strings).
inline std::string expansion_transcript(const DerivedExpansion& e) {
    std::ostringstream os;
    os << "base=" << e.base.point.str() << " x=" << e.x.str() << "\n";
    for (size_t i = 0; i < e.steps.size(); ++i) {
        const ExpansionStep& s = e.steps[i];
        const CircleInterval& I = s.eps > 0 ? s.gap.I_plus : s.gap.I_minus;
        os << "step=" << (i + 1) << " g=" << word_str(s.g.word) << " mat=" << s.g.matrix.str()
           << " p=" << s.p.point.str() << " eps=" << (s.eps > 0 ? "+" : "-") << " I=(" << I.left.str()
           << "," << I.right.str() << ")";
        if (s.nu_after >= 0) os << " nu=" << s.nu_after;
        os << "\n";
    }
    os << "terminal=";
    switch (e.terminal) {
        case Terminal::LandedInR: os << "LandedInR"; break;
        case Terminal::Exhausted: os << "Exhausted(" << e.steps.size() << ")"; break;
        case Terminal::Unresolved: os << "Unresolved"; break;
    }
    os << "\n";
    return os.str();
}

}  // namespace rayspace
