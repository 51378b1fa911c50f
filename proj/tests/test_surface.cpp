#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>

#include "rayspace/surface.hpp"

using namespace rayspace;

namespace {

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

}  // namespace

TEST_CASE("modular_torus: construction and invariants") {
    SurfaceGroup G = modular_torus();
    // commutator of the unconjugated pair is parabolic and fixes 0
    MoebiusMap A(1, 1, 1, 2), B(1, -1, -1, 2);
    MoebiusMap comm = A * B * A.inverse() * B.inverse();
    CHECK(comm == MoebiusMap(1, 0, 6, 1));
    CHECK(classify(comm) == MapClass::Parabolic);
    CHECK(apply(comm, BoundaryPoint(Rational(0))) == BoundaryPoint(Rational(0)));
    // conjugated peripheral has canonical form [[1,+-6],[0,1]]
    MoebiusMap K = G.evaluate(G.peripheral_word);
    CHECK(K == MoebiusMap(1, 6, 0, 1));
    CHECK(G.euler_characteristic == -1);
    CHECK(G.cusp_width == Rational(6));
    // theta(inf) = z + 6
    CHECK(apply(G.theta_infinity().matrix, BoundaryPoint(Rational(0))) == BoundaryPoint(Rational(6)));
}

TEST_CASE("modular class map") {
    CHECK(modular_class_mod6(MoebiusMap::identity()) == 0);
    CHECK(modular_class_mod6(MoebiusMap(1, 1, 0, 1)) == 1);   // T
    CHECK(modular_class_mod6(MoebiusMap(0, -1, 1, 0)) == 3);  // S
    CHECK(modular_class_mod6(MoebiusMap(1, 1, 1, 2)) == 0);
    CHECK(modular_class_mod6(MoebiusMap(2, 1, 1, 1)) == 0);
    // homomorphism property on random products of T and S
    Rng rng(5);
    MoebiusMap T(1, 1, 0, 1), S(0, -1, 1, 0);
    for (int i = 0; i < 200; ++i) {
        MoebiusMap m = MoebiusMap::identity(), n = MoebiusMap::identity();
        int cm = 0, cn = 0;
        for (int j = 0; j < 8; ++j) {
            if (rng.below(2)) { m = m * T; cm += 1; } else { m = m * S; cm += 3; }
            if (rng.below(2)) { n = n * T; cn += 1; } else { n = n * S; cn += 3; }
        }
        CHECK(modular_class_mod6(m) == cm % 6);
        CHECK(modular_class_mod6(m * n) == (cm + cn) % 6);
    }
}

TEST_CASE("contains: spec examples") {
    SurfaceGroup G = modular_torus();
    auto w = G.contains(G.generators[0]);
    REQUIRE(w.has_value());
    CHECK(word_str(*w) == "a");
    CHECK_FALSE(G.contains(MoebiusMap(1, 1, 0, 1)).has_value());  // T has class 1
    auto w2 = G.contains(G.evaluate(parse_word("BA")));
    REQUIRE(w2.has_value());
    CHECK(word_str(*w2) == "BA");
}

TEST_CASE("contains: 500 random word round-trips") {
    SurfaceGroup G = modular_torus();
    Rng rng(99);
    for (int i = 0; i < 500; ++i) {
        Word w = random_reduced_word(rng, 1 + rng.below(12));
        auto back = G.contains(G.evaluate(w));
        REQUIRE(back.has_value());
        CHECK(*back == w);
    }
}

TEST_CASE("parabolic_witness: spec examples and round-trips") {
    SurfaceGroup G = modular_torus();
    CHECK(G.parabolic_witness(BoundaryPoint::infinity()).witness.word.empty());

    auto p0 = G.parabolic_witness(BoundaryPoint(Rational(0)));
    CHECK(apply(p0.witness.matrix, BoundaryPoint::infinity()) == BoundaryPoint(Rational(0)));

    auto p227 = G.parabolic_witness(BoundaryPoint(Rational(22, 7)));
    CHECK(apply(p227.witness.matrix, BoundaryPoint::infinity()) == BoundaryPoint(Rational(22, 7)));

    CHECK_THROWS_AS(G.parabolic_witness(BoundaryPoint(QuadSurd(0, 1, 2, 1))), NotRational);

    Rng rng(123);
    for (int i = 0; i < 200; ++i) {
        Rational x(rng.range(0, 600), rng.range(1, 100));
        ParabolicPoint p = G.parabolic_witness(BoundaryPoint(x));
        CHECK(apply(p.witness.matrix, BoundaryPoint::infinity()) == BoundaryPoint(x));
        CHECK(G.evaluate(p.witness.word) == p.witness.matrix);
    }
}

TEST_CASE("theta: fixes p, conjugation equivariance") {
    SurfaceGroup G = modular_torus();
    ParabolicPoint inf = G.cusp();
    GroupElement t = G.theta(inf);
    CHECK(t.matrix == MoebiusMap(1, 6, 0, 1));

    Rng rng(55);
    for (int i = 0; i < 50; ++i) {
        Rational x(rng.range(-40, 40), rng.range(1, 15));
        ParabolicPoint p = G.parabolic_witness(BoundaryPoint(x));
        GroupElement tp = G.theta(p);
        CHECK(classify(tp.matrix) == MapClass::Parabolic);
        CHECK(apply(tp.matrix, p.point) == p.point);
        // equivariance: theta(g p) = g theta(p) g^-1
        Word gw = random_reduced_word(rng, 1 + rng.below(5));
        MoebiusMap g = G.evaluate(gw);
        BoundaryPoint gp = apply(g, p.point);
        ParabolicPoint pgp = G.parabolic_witness(gp);
        CHECK(G.theta(pgp).matrix == g * tp.matrix * g.inverse());
    }
}

TEST_CASE("ping-pong freeness certificate") {
    SurfaceGroup G = modular_torus();
    // for each letter l and each point x in the other letters' intervals,
    // l x lands in l's interval
    for (int li = 0; li < 4; ++li) {
        Letter l = static_cast<Letter>((li % 2 == 0 ? 1 : -1) * (li / 2 + 1));
        MoebiusMap m = G.letter_matrix(l);
        for (int mi = 0; mi < 4; ++mi) {
            Letter other = static_cast<Letter>((mi % 2 == 0 ? 1 : -1) * (mi / 2 + 1));
            if (other == -l) continue;
            const CircleInterval& I = G.letter_interval(other);
            for (int k = 0; k < 25; ++k) {
                Rational lo = I.left.is_infinity() ? Rational(-1000) : I.left.rational();
                Rational hi = I.right.is_infinity() ? Rational(1000) : I.right.rational();
                Rational x = lo + (hi - lo) * Rational(k + 1, 27);
                CHECK(interval_contains(G.letter_interval(l), apply(m, BoundaryPoint(x))) ==
                      Containment::Yes);
            }
        }
    }
}

TEST_CASE("surface config loader") {
    SurfaceGroup M = modular_torus();
    std::string path = "surface_test_config.txt";
    {
        std::ofstream out(path);
        out << "# modular punctured torus\n";
        out << "generator a 2 -1 -1 1\n";
        out << "generator b 2 1 1 1\n";
        out << "peripheral baBA\n";
        out << "orientation 1\n";
        out << "cusp_width 6/1\n";
        out << "euler_characteristic -1\n";
        out << "interval a inf -1\n";
        out << "interval A 0 1\n";
        out << "interval b 1 inf\n";
        out << "interval B -1 0\n";
    }
    SurfaceGroup G = load_surface_config(path);
    CHECK(G.modular);
    CHECK(G.generators == M.generators);
    CHECK(G.cusp_width == Rational(6));

    {
        std::ofstream out(path);
        out << "generator a 2 -1 -1 1\n";
        out << "generator b 1 1 0 1\n";
        out << "oops nonsense\n";
    }
    try {
        load_surface_config(path);
        FAIL("expected ConfigParseError");
    } catch (const ConfigParseError& e) {
        CHECK(e.line == 3);
    }

    {
        std::ofstream out(path);
        out << "generator a 2 -1 -1 1\n";
        out << "generator b 2 1 1 1\n";
        out << "peripheral baBA\n";
        out << "orientation -1\n";  // theta would translate negatively
        out << "cusp_width 6\n";
        out << "euler_characteristic -1\n";
        out << "interval a inf -1\n";
        out << "interval A 0 1\n";
        out << "interval b 1 inf\n";
        out << "interval B -1 0\n";
    }
    CHECK_THROWS_AS(load_surface_config(path), ConfigParseError);
}
