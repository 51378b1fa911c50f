#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "rayspace/gaps.hpp"

using namespace rayspace;

namespace {

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(uint64_t seed) : eng(seed) {}
    uint64_t below(uint64_t n) { return eng() % n; }
    long range(long lo, long hi) { return lo + static_cast<long>(below(static_cast<uint64_t>(hi - lo + 1))); }
};

const SurfaceGroup& torus() {
    static SurfaceGroup G = modular_torus();
    return G;
}

const GapTree& tree() {
    static GapTree t(torus());
    return t;
}

Rational rand_rational_in_period(Rng& rng, long max_den = 40) {
    long den = rng.range(2, max_den);
    long num = rng.range(0, 6 * den - 1);
    return Rational(num, den);
}

}  // namespace

TEST_CASE("seed gaps match the hand-derived integer-center data") {
    const auto& seeds = tree().seeds();
    REQUIRE(seeds.size() == 7);
    CHECK(word_str(seeds[0].g.word) == "BA");
    CHECK(word_str(seeds[1].g.word) == "A");
    CHECK(word_str(seeds[2].g.word) == "b");
    CHECK(word_str(seeds[3].g.word) == "ba");
    CHECK(word_str(seeds[4].g.word) == "baB");
    CHECK(word_str(seeds[5].g.word) == "baBAB");
    CHECK(seeds[0].g.matrix == MoebiusMap(0, -1, 1, 3));
    CHECK(seeds[3].g.matrix == MoebiusMap(3, -1, 1, 0));
    // gap at 0: endpoints (-3+sqrt5)/2 and (3-sqrt5)/2
    CHECK(seeds[0].a_pq == QuadSurd(-3, 1, 5, 2));
    CHECK(seeds[0].b_qp == QuadSurd(3, -1, 5, 2));
}

TEST_CASE("self_intersection_count: gap centers are simple") {
    auto gaps = enumerate_gaps(tree(), torus().cusp(), 6);
    REQUIRE(gaps.size() >= 10);
    for (size_t i = 0; i < gaps.size(); ++i) {
        long nu = self_intersection_count(torus(), torus().cusp(), gaps[i].q.point);
        CHECK(nu == 0);
    }
}

TEST_CASE("self_intersection_count: symmetric on random rational pairs") {
    Rng rng(101);
    const SurfaceGroup& G = torus();
    for (int i = 0; i < 100; ++i) {
        Rational a = rand_rational_in_period(rng, 12);
        Rational b = rand_rational_in_period(rng, 12);
        if (a == b) continue;
        ParabolicPoint pa = G.parabolic_witness(BoundaryPoint(a));
        ParabolicPoint pb = G.parabolic_witness(BoundaryPoint(b));
        CHECK(self_intersection_count(G, pa, BoundaryPoint(b)) ==
              self_intersection_count(G, pb, BoundaryPoint(a)));
    }
}

TEST_CASE("self_intersection_count: first non-simple direction, oracle agreement") {
    const SurfaceGroup& G = torus();
    // scan denominators <= 20 in [0,6) for the first nu >= 1
    std::optional<Rational> qstar;
    long nu_star = 0;
    for (long den = 2; den <= 20 && !qstar; ++den)
        for (long num = 0; num < 6 * den && !qstar; ++num) {
            Rational q(num, den);
            if (q.den() != den) continue;  // only fractions in lowest terms at this denominator
            long nu = self_intersection_count(G, G.cusp(), BoundaryPoint(q));
            if (nu >= 1) {
                qstar = q;
                nu_star = nu;
            }
        }
    REQUIRE(qstar.has_value());
    CHECK(*qstar == Rational(1, 3));  // inside the gap at 0
    CHECK(nu_star >= 1);
    // secondary oracle agrees once the word bound is large enough
    long oracle = self_intersection_count(G, G.cusp(), BoundaryPoint(*qstar),
                                          NuOracle::BoundedWordSearch, 200000, 10);
    CHECK(oracle == nu_star);
}

TEST_CASE("shortcut pairs: composition, six-point order, axis disjointness") {
    const SurfaceGroup& G = torus();
    GroupElement theta = G.theta_infinity();
    auto gaps = enumerate_gaps(tree(), G.cusp(), 10);
    REQUIRE(gaps.size() >= 50);
    size_t checked = 0;
    for (const Gap& g : gaps) {
        if (checked++ >= 50) break;
        // g(q,p) g(p,q) = theta(p) exactly
        CHECK(g.g_qp.matrix * g.g_pq.matrix == theta.matrix);
        // six-point circular order in the validated reading: the reversed
        // paper sequence is positively ordered around C
        std::vector<BoundaryPoint> seq = {g.b_pq, g.a_pq, g.q.point, g.b_qp, g.a_qp, g.p.point};
        for (size_t i = 0; i < seq.size(); ++i)
            CHECK(cyclic_order(seq[i], seq[(i + 1) % 6], seq[(i + 2) % 6]) == Order::Positive);
        // axis of g(p,q) misses [p, theta^-1 q] and [p, theta q]
        FixedPoints ax = fixed_points(g.g_pq.matrix);
        for (int s : {-1, +1}) {
            MoebiusMap th = s > 0 ? theta.matrix : theta.matrix.inverse();
            BoundaryPoint tq = apply(th, g.q.point);
            CHECK_FALSE(linked(g.p.point, tq, ax.attracting, ax.repelling));
        }
    }
    CHECK(checked >= 50);
}

TEST_CASE("shortcut loop stays off the arc: bounded-word crossing check") {
    const SurfaceGroup& G = torus();
    auto gaps = enumerate_gaps(tree(), G.cusp(), 4);
    for (const Gap& g : gaps) {
        FixedPoints ax = fixed_points(g.g_pq.matrix);
        // no translate h alpha(g) within word length 8 crosses [p, q]
        std::vector<std::pair<Word, MoebiusMap>> frontier{{Word{}, MoebiusMap::identity()}};
        bool crossed = linked(g.p.point, g.q.point, ax.attracting, ax.repelling);
        for (int depth = 1; depth <= 8 && !crossed; ++depth) {
            std::vector<std::pair<Word, MoebiusMap>> next;
            for (auto& [w, m] : frontier) {
                for (size_t k = 0; k < G.ngens(); ++k)
                    for (int s : {+1, -1}) {
                        Letter l = static_cast<Letter>(s * static_cast<int>(k + 1));
                        if (!w.empty() && w.back() == -l) continue;
                        Word nw = w;
                        nw.push_back(l);
                        MoebiusMap nm = m * G.letter_matrix(l);
                        if (linked(g.p.point, g.q.point, apply(nm, ax.attracting),
                                   apply(nm, ax.repelling)))
                            crossed = true;
                        next.emplace_back(std::move(nw), nm);
                    }
            }
            frontier = std::move(next);
        }
        CHECK_FALSE(crossed);
    }
}

TEST_CASE("gap: interval endpoints and translate disjointness") {
    const SurfaceGroup& G = torus();
    Gap g0 = gap(G, G.cusp(), BoundaryPoint(Rational(0)));
    CHECK(g0.I_plus.right == g0.q.point);
    CHECK(g0.I_plus.left == fixed_points(g0.g_pq.matrix).attracting);
    // theta-translate disjointness, checked directly
    MoebiusMap th = G.theta_infinity().matrix;
    CircleInterval shifted = apply(th, g0.I_full);
    CHECK(interval_contains(g0.I_full, shifted.left) == Containment::No);
    CHECK(interval_contains(g0.I_full, shifted.right) == Containment::No);
    CHECK(interval_contains(shifted, g0.I_full.left) == Containment::No);
    // endpoints of the smallest-center gap: width 3 - sqrt5 > 0
    CHECK(g0.a_pq == BoundaryPoint(QuadSurd(-3, 1, 5, 2)));
    CHECK(g0.b_qp == BoundaryPoint(QuadSurd(3, -1, 5, 2)));
    // not in Delta: 1/3 lies inside the gap at 0
    CHECK_THROWS_AS(gap(G, G.cusp(), BoundaryPoint(Rational(1, 3))), NotInDelta);
}

TEST_CASE("enumerate_gaps: disjointness, monotonicity, mass") {
    const SurfaceGroup& G = torus();
    auto g8 = enumerate_gaps(tree(), G.cusp(), 8);
    // pairwise disjoint via exact endpoint comparisons in the chart
    for (size_t i = 0; i + 1 < g8.size(); ++i) {
        const QuadSurd right_end = g8[i].b_qp.surd();
        const QuadSurd next_left = g8[i + 1].a_pq.surd();
        CHECK(right_end.compare(next_left) <= 0);
    }
    // monotone inclusion of center sets
    auto g5 = enumerate_gaps(tree(), G.cusp(), 5);
    std::set<std::string> centers8;
    for (auto& g : g8) centers8.insert(g.q.point.str());
    for (auto& g : g5) CHECK(centers8.count(g.q.point.str()) == 1);
    CHECK(g8.size() > g5.size());

    // normalized width at L = 8 is already substantial, and bounded by 1
    Rational lo_sum(0), hi_sum(0);
    for (auto& g : g8) {
        auto [llo, lhi] = g.a_pq.surd().enclosure();
        auto [rlo, rhi] = g.b_qp.surd().enclosure();
        lo_sum = lo_sum + (rlo - lhi);
        hi_sum = hi_sum + (rhi - llo);
    }
    CHECK(lo_sum > Rational(9, 2));  // > 0.75 * 6
    CHECK(hi_sum < Rational(6));     // disjoint gaps inside one period
}

TEST_CASE("classify_point: spec examples") {
    const SurfaceGroup& G = torus();
    // a gap center lands in R
    Classification c0 = classify_point(tree(), G.cusp(), BoundaryPoint(Rational(1, 2)));
    CHECK(c0.kind == Classification::Kind::InR);
    // the non-simple direction 1/3 lands in the gap at 0, minus side
    Classification c1 = classify_point(tree(), G.cusp(), BoundaryPoint(Rational(1, 3)));
    REQUIRE(c1.kind == Classification::Kind::InGap);
    CHECK(c1.gap->q.point == BoundaryPoint(Rational(0)));
    CHECK(c1.eps == -1);
    CHECK(interval_contains(c1.gap->I_minus, BoundaryPoint(Rational(1, 3))) == Containment::Yes);
    // epsilon = +1 side
    Classification c2 = classify_point(tree(), G.cusp(), BoundaryPoint(Rational(-1, 3)));
    REQUIRE(c2.kind == Classification::Kind::InGap);
    CHECK(c2.eps == +1);
    CHECK(c2.gap->q.point == BoundaryPoint(Rational(0)));
    // gap boundary surd returns InR by convention
    Classification c3 = classify_point(tree(), G.cusp(), BoundaryPoint(QuadSurd(3, -1, 5, 2)));
    CHECK(c3.kind == Classification::Kind::InR);
    // same point rejected
    CHECK_THROWS_AS(classify_point(tree(), G.cusp(), BoundaryPoint::infinity()), SamePoint);
}

TEST_CASE("derived_expansion: termination, nu descent, periodic surd") {
    const SurfaceGroup& G = torus();
    // x in Pi(p0): empty sequence, LandedInR
    DerivedExpansion e0 = derived_expansion(tree(), BoundaryPoint(Rational(5, 2)), 10);
    CHECK(e0.terminal == Terminal::LandedInR);
    CHECK(e0.steps.empty());

    // x = 1/3: finite expansion with strict nu descent to zero
    DerivedExpansion e1 = derived_expansion(tree(), BoundaryPoint(Rational(1, 3)), 50);
    CHECK(e1.terminal == Terminal::LandedInR);
    CHECK(e1.steps.size() >= 1);
    for (size_t i = 0; i + 1 < e1.nu_chain.size(); ++i) CHECK(e1.nu_chain[i] > e1.nu_chain[i + 1]);
    CHECK(e1.nu_chain.back() == 0);
    // h_i = g_i ... g_1
    MoebiusMap h = MoebiusMap::identity();
    for (size_t i = 0; i < e1.steps.size(); ++i) {
        h = e1.steps[i].g.matrix * h;
        CHECK(e1.partials[i + 1].matrix == h);
        CHECK(apply(h, BoundaryPoint::infinity()) == e1.steps[i].p.point);
    }

    // fixed point of the non-simple hyperbolic a b a b^-1: infinite expansion,
    // eventually periodic g_i
    MoebiusMap m = G.evaluate(parse_word("abaB"));
    REQUIRE(classify(m) == MapClass::Hyperbolic);
    FixedPoints f = fixed_points(m);
    DerivedExpansion e2 = derived_expansion(tree(), f.attracting, 24);
    CHECK(e2.terminal == Terminal::Exhausted);
    REQUIRE(e2.steps.size() == 24);
    // periodicity modulo the cyclic group of the fixing element: the tail
    // satisfies g_{i+p} = delta g_i delta^-1 with delta carrying p_i to p_{i+p}
    bool periodic = false;
    for (size_t period = 1; period <= 8 && !periodic; ++period) {
        size_t i0 = 8;
        MoebiusMap delta = e2.partials[i0 + period].matrix * e2.partials[i0].matrix.inverse();
        bool ok = true;
        for (size_t i = i0; i + period < e2.steps.size(); ++i)
            if (!(e2.steps[i + period].g.matrix == delta * e2.steps[i].g.matrix * delta.inverse())) {
                ok = false;
                break;
            }
        periodic = ok;
    }
    CHECK(periodic);
    // the epsilon sequence itself is eventually periodic
    bool eps_periodic = false;
    for (size_t period = 1; period <= 8 && !eps_periodic; ++period) {
        bool ok = true;
        for (size_t i = 8; i + period < e2.steps.size(); ++i)
            if (e2.steps[i].eps != e2.steps[i + period].eps) {
                ok = false;
                break;
            }
        eps_periodic = ok;
    }
    CHECK(eps_periodic);
}

TEST_CASE("agreement_neighborhood: nesting and membership") {
    DerivedExpansion e = derived_expansion(tree(), BoundaryPoint(Rational(1, 3)), 50);
    REQUIRE(e.steps.size() >= 1);
    CircleInterval U1 = agreement_neighborhood(e, 1);
    const CircleInterval& I1 = e.steps[0].eps > 0 ? e.steps[0].gap.I_plus : e.steps[0].gap.I_minus;
    CHECK(U1.left == I1.left);
    CHECK(U1.right == I1.right);
    for (size_t n = 1; n < e.steps.size(); ++n) {
        CircleInterval a = agreement_neighborhood(e, n);
        CircleInterval b = agreement_neighborhood(e, n + 1);
        CHECK(detail::subset_open(b, a));
    }
    CHECK_THROWS_AS(agreement_neighborhood(e, e.steps.size() + 1), TooFewSteps);

    Rng rng(2718);
    int tested = 0;
    for (int i = 0; tested < 50 && i < 400; ++i) {
        Rational x = rand_rational_in_period(rng);
        DerivedExpansion ex = derived_expansion(tree(), BoundaryPoint(x), 60);
        if (ex.steps.empty()) continue;
        for (size_t n = 1; n <= ex.steps.size(); ++n)
            CHECK(interval_contains(agreement_neighborhood(ex, n), BoundaryPoint(x)) ==
                  Containment::Yes);
        ++tested;
    }
    CHECK(tested == 50);
}

TEST_CASE("translation consistency: theta moves gaps to gaps") {
    const SurfaceGroup& G = torus();
    MoebiusMap th = G.theta_infinity().matrix;
    for (long n = 0; n < 3; ++n) {
        Gap g = gap(G, G.cusp(), BoundaryPoint(Rational(2 * n + 1, 2)), true);
        Gap gt = gap(G, G.cusp(), BoundaryPoint(Rational(2 * n + 13, 2)), true);
        CHECK(apply(th, g.I_full.left) == gt.I_full.left);
        CHECK(apply(th, g.I_full.right) == gt.I_full.right);
        CHECK(th * g.g_pq.matrix * th.inverse() == gt.g_pq.matrix);
    }
}

TEST_CASE("classify determinism inside an agreement neighborhood") {
    DerivedExpansion e = derived_expansion(tree(), BoundaryPoint(Rational(7, 9)), 60);
    REQUIRE(e.steps.size() >= 1);
    size_t n = e.steps.size();
    CircleInterval U = agreement_neighborhood(e, n);
    Rational y = simplest_rational_between(U.left, U.right);
    DerivedExpansion ey = derived_expansion(tree(), BoundaryPoint(y), 60);
    REQUIRE(ey.steps.size() >= n);
    for (size_t i = 0; i < n; ++i) CHECK(ey.steps[i].g.matrix == e.steps[i].g.matrix);
}

TEST_CASE("expansion transcript carries the exact strings") {
    DerivedExpansion e = derived_expansion(tree(), BoundaryPoint(Rational(1, 3)), 50);
    std::string t = expansion_transcript(e);
    CHECK(t.find("base=inf") == 0);
    CHECK(t.find("terminal=LandedInR") != std::string::npos);
    CHECK(t.find("eps=") != std::string::npos);
}
