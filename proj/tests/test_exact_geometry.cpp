#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "rayspace/boundary.hpp"
#include "rayspace/moebius.hpp"
#include "rayspace/rational.hpp"
#include "rayspace/surd.hpp"
#include "rayspace/words.hpp"

using namespace rayspace;

namespace {

// deterministic bounded integer, independent of std::uniform_int_distribution
struct Rng {
    std::mt19937_64 eng;
    explicit Rng(uint64_t seed) : eng(seed) {}
    uint64_t below(uint64_t n) { return eng() % n; }
    long range(long lo, long hi) { return lo + static_cast<long>(below(static_cast<uint64_t>(hi - lo + 1))); }
};

Word random_reduced_word(Rng& rng, size_t len, size_t ngens = 2) {
    Word w;
    while (w.size() < len) {
        int k = static_cast<int>(rng.below(ngens)) + 1;
        Letter l = static_cast<Letter>(rng.below(2) ? k : -k);
        if (!w.empty() && w.back() == -l) continue;
        w.push_back(l);
    }
    return w;
}

const std::vector<MoebiusMap> kGens = {MoebiusMap(2, -1, -1, 1), MoebiusMap(2, 1, 1, 1)};

BoundaryPoint random_exact_point(Rng& rng) {
    switch (rng.below(3)) {
        case 0:
            return BoundaryPoint::infinity();
        case 1:
            return BoundaryPoint(Rational(rng.range(-60, 60), rng.range(1, 12)));
        default: {
            MoebiusMap m = evaluate(random_reduced_word(rng, 3 + rng.below(4)), kGens);
            if (classify(m) != MapClass::Hyperbolic)
                return BoundaryPoint(Rational(rng.range(-10, 10)));
            return fixed_points(m).attracting;
        }
    }
}

}  // namespace

TEST_CASE("compose: spec examples") {
    MoebiusMap A(1, 1, 1, 2), B(1, -1, -1, 2);
    CHECK(compose(A, MoebiusMap::identity()) == A);
    CHECK(compose(A, B) == MoebiusMap(0, 1, -1, 3));
    MoebiusMap comm = A * B * A.inverse() * B.inverse();
    CHECK(comm == MoebiusMap(1, 0, 6, 1));  // canonical sign of [[-1,0],[-6,-1]]
}

TEST_CASE("compose: associativity and inverses on random words") {
    Rng rng(12345);
    for (int i = 0; i < 1000; ++i) {
        MoebiusMap m = evaluate(random_reduced_word(rng, 1 + rng.below(8)), kGens);
        MoebiusMap n = evaluate(random_reduced_word(rng, 1 + rng.below(8)), kGens);
        MoebiusMap p = evaluate(random_reduced_word(rng, 1 + rng.below(8)), kGens);
        CHECK((m * n) * p == m * (n * p));
        CHECK(m.inverse() * m == MoebiusMap::identity());
    }
}

TEST_CASE("classify: spec examples and conjugation invariance") {
    CHECK(classify(MoebiusMap::identity()) == MapClass::Identity);
    CHECK(classify(MoebiusMap(1, 0, 6, 1)) == MapClass::Parabolic);
    CHECK(classify(MoebiusMap(1, 1, 1, 2)) == MapClass::Hyperbolic);
    CHECK(classify(MoebiusMap(0, -1, 1, 0)) == MapClass::Elliptic);

    Rng rng(777);
    for (int i = 0; i < 200; ++i) {
        MoebiusMap h = evaluate(random_reduced_word(rng, 1 + rng.below(6)), kGens);
        MoebiusMap g = evaluate(random_reduced_word(rng, 1 + rng.below(6)), kGens);
        CHECK(classify(g * h * g.inverse()) == classify(h));
    }
}

TEST_CASE("fixed_points: spec examples") {
    // parabolic [[1,0],[6,1]] fixes 0
    FixedPoints p = fixed_points(MoebiusMap(1, 0, 6, 1));
    CHECK(p.parabolic);
    CHECK(p.attracting == BoundaryPoint(Rational(0)));

    // [[1,1],[1,2]]: attracting (-1+sqrt5)/2, repelling (-1-sqrt5)/2
    FixedPoints f = fixed_points(MoebiusMap(1, 1, 1, 2));
    CHECK(f.attracting == BoundaryPoint(QuadSurd(-1, 1, 5, 2)));
    CHECK(f.repelling == BoundaryPoint(QuadSurd(-1, -1, 5, 2)));

    // [[2,1],[1,1]]: attracting (1+sqrt5)/2, repelling (1-sqrt5)/2
    FixedPoints g = fixed_points(MoebiusMap(2, 1, 1, 1));
    CHECK(g.attracting == BoundaryPoint(QuadSurd(1, 1, 5, 2)));
    CHECK(g.repelling == BoundaryPoint(QuadSurd(1, -1, 5, 2)));

    CHECK_THROWS_AS(fixed_points(MoebiusMap::identity()), IdentityInput);
    CHECK_THROWS_AS(fixed_points(MoebiusMap(0, -1, 1, 0)), EllipticInput);
}

TEST_CASE("fixed_points: exactly fixed under apply") {
    Rng rng(4242);
    int done = 0;
    for (int i = 0; done < 200 && i < 2000; ++i) {
        MoebiusMap m = evaluate(random_reduced_word(rng, 1 + rng.below(7)), kGens);
        if (classify(m) != MapClass::Hyperbolic) continue;
        FixedPoints f = fixed_points(m);
        CHECK(apply(m, f.attracting) == f.attracting);
        CHECK(apply(m, f.repelling) == f.repelling);
        ++done;
    }
    CHECK(done == 200);
}

TEST_CASE("translation_length: spec values and symmetry") {
    double l3 = translation_length(MoebiusMap(1, 1, 1, 2));
    CHECK(l3 == Catch::Approx(1.9248473002384139).epsilon(1e-12));
    double l6 = translation_length(MoebiusMap(3, 4, 2, 3));
    CHECK(l6 == Catch::Approx(3.5254943480782017).epsilon(1e-12));
    MoebiusMap m(5, -11, 1, -2);
    CHECK(translation_length(m) == Catch::Approx(translation_length(m.inverse())));
    CHECK_THROWS_AS(translation_length(MoebiusMap(1, 0, 6, 1)), NotHyperbolic);
}

TEST_CASE("cyclic_order: convention anchors") {
    BoundaryPoint z(Rational(0)), o(Rational(1)), inf = BoundaryPoint::infinity();
    CHECK(cyclic_order(z, o, inf) == Order::Positive);
    CHECK(cyclic_order(z, inf, o) == Order::Negative);
    CHECK(cyclic_order(z, z, o) == Order::Degenerate);
}

TEST_CASE("cyclic_order: invariance under orientation-preserving maps") {
    Rng rng(2024);
    int done = 0;
    for (int i = 0; done < 1000 && i < 20000; ++i) {
        BoundaryPoint x = random_exact_point(rng);
        BoundaryPoint y = random_exact_point(rng);
        BoundaryPoint z = random_exact_point(rng);
        Order o = cyclic_order(x, y, z);
        if (o == Order::Degenerate) continue;
        MoebiusMap m = evaluate(random_reduced_word(rng, 1 + rng.below(6)), kGens);
        CHECK(cyclic_order(apply(m, x), apply(m, y), apply(m, z)) == o);
        ++done;
    }
    CHECK(done == 1000);
}

TEST_CASE("interval_contains: spec examples") {
    BoundaryPoint inf = BoundaryPoint::infinity();
    CHECK(interval_contains(CircleInterval(BoundaryPoint(Rational(0)), inf),
                            BoundaryPoint(Rational(5))) == Containment::Yes);
    CHECK(interval_contains(CircleInterval(BoundaryPoint(Rational(0)), BoundaryPoint(Rational(1))),
                            BoundaryPoint(Rational(2))) == Containment::No);
    // I = ((-1-sqrt5)/2, 0) contains -1 since -1-sqrt5 < -2
    CircleInterval I(BoundaryPoint(QuadSurd(-1, -1, 5, 2)), BoundaryPoint(Rational(0)));
    CHECK(interval_contains(I, BoundaryPoint(Rational(-1))) == Containment::Yes);
}

TEST_CASE("surd arithmetic and comparisons") {
    QuadSurd golden(1, 1, 5, 2);  // (1+sqrt5)/2
    CHECK(golden.compare(Rational(1)) > 0);
    CHECK(golden.compare(Rational(2)) < 0);
    CHECK(golden.compare(golden) == 0);
    // cross-discriminant: sqrt2 < (1+sqrt5)/2 < sqrt3
    QuadSurd r2(0, 1, 2, 1), r3(0, 1, 3, 1);
    CHECK(r2.compare(golden) < 0);
    CHECK(r3.compare(golden) > 0);
    // sqrt8 == 2*sqrt2 after canonicalization
    CHECK(QuadSurd(0, 1, 8, 1) == QuadSurd(0, 2, 2, 1));
    CHECK(QuadSurd(0, 1, 8, 1).compare(QuadSurd(0, 2, 2, 1)) == 0);
    CHECK(golden.floor() == 1);
    CHECK(QuadSurd(-1, -1, 5, 2).floor() == -2);

    // random cross-checks against double arithmetic
    Rng rng(99);
    auto nonsquare = [&](Rng& r) {
        long d;
        do {
            d = r.range(2, 80);
        } while (is_square(Int(d)));
        return d;
    };
    for (int i = 0; i < 500; ++i) {
        QuadSurd s(rng.range(-20, 20), rng.range(1, 9), nonsquare(rng), rng.range(1, 9));
        QuadSurd t(rng.range(-20, 20), rng.range(1, 9), nonsquare(rng), rng.range(1, 9));
        double ds = s.to_double(), dt = t.to_double();
        if (std::abs(ds - dt) > 1e-9) CHECK(s.compare(t) == (ds < dt ? -1 : 1));
    }
}

TEST_CASE("serialization round-trips") {
    CHECK(parse_point("inf").is_infinity());
    CHECK(parse_point("22/7") == BoundaryPoint(Rational(22, 7)));
    CHECK(parse_point("-3") == BoundaryPoint(Rational(-3)));
    BoundaryPoint s(QuadSurd(3, -1, 5, 2));
    CHECK(parse_point(s.str()) == s);
    CHECK(s.str() == "(3-1*sqrt(5))/2");
    CHECK(BoundaryPoint(Rational(5)).str() == "5/1");
    BoundaryPoint dec = parse_point("1.25");
    REQUIRE(dec.is_interval());
    RationalInterval I = dec.interval().at(0);
    CHECK(I.lo < Rational(5, 4));
    CHECK(Rational(5, 4) < I.hi);

    Rng rng(31337);
    for (int i = 0; i < 200; ++i) {
        BoundaryPoint p = random_exact_point(rng);
        CHECK(parse_point(p.str()) == p);
    }
}
