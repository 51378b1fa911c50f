#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rayspace/boundary.hpp"
#include "rayspace/errors.hpp"
#include "rayspace/moebius.hpp"
#include "rayspace/words.hpp"

namespace rayspace {

struct GroupElement {
    Word word;
    MoebiusMap matrix;

    bool operator==(const GroupElement& o) const { return matrix == o.matrix; }
};

/// A parabolic point together with a group element carrying the cusp to it.
struct ParabolicPoint {
    BoundaryPoint point;        // Rational or Infinity
    GroupElement witness;       // witness * inf = point
};

/// One-cusp Fuchsian surface group: free generators, peripheral word, cusp
/// normalized to infinity, and a stored ping-pong interval family certifying
/// freeness. The default instance is the modular punctured torus, for which
/// membership and witnesses are exact.
class SurfaceGroup {
public:
    std::vector<MoebiusMap> generators;     // indexed by generator, letter k+1
    Word peripheral_word;                   // evaluates to the cusp generator
    Rational cusp_width;
    int euler_characteristic = -1;
    int orientation_sign = +1;              // +1: peripheral word itself is theta(inf)
    std::vector<CircleInterval> pingpong;   // 2k: generator k, 2k+1: its inverse
    bool modular = false;                   // exact membership via abelianization

    size_t ngens() const { return generators.size(); }

    MoebiusMap evaluate(const Word& w) const { return rayspace::evaluate(w, generators); }

    GroupElement element(const Word& w) const {
        Word r = reduce(w);
        return GroupElement{r, evaluate(r)};
    }

    /// theta(inf): the generator of the cusp stabilizer translating in the
    /// positive direction, as a group element.
    GroupElement theta_infinity() const {
        Word w = orientation_sign > 0 ? peripheral_word : inverse(peripheral_word);
        return element(w);
    }

    const CircleInterval& letter_interval(Letter l) const {
        size_t k = static_cast<size_t>((l > 0 ? l : -l) - 1);
        check(k < ngens(), "letter outside generator range");
        return pingpong[2 * k + (l > 0 ? 0 : 1)];
    }

    MoebiusMap letter_matrix(Letter l) const {
        size_t k = static_cast<size_t>((l > 0 ? l : -l) - 1);
        check(k < ngens(), "letter outside generator range");
        return l > 0 ? generators[k] : generators[k].inverse();
    }

    void validate() const;

    /// Membership test; returns the unique reduced word when g is in the
    /// group. Exact for the modular torus; bounded descent otherwise.
    std::optional<Word> contains(const MoebiusMap& g, int budget = 10000) const;

    ParabolicPoint parabolic_witness(const BoundaryPoint& x, int budget = 14) const;

    ParabolicPoint cusp() const {
        return ParabolicPoint{BoundaryPoint::infinity(), element(Word{})};
    }

    /// theta(p) = witness theta(inf) witness^-1.
    GroupElement theta(const ParabolicPoint& p) const {
        GroupElement t = theta_infinity();
        Word w = concat(concat(p.witness.word, t.word), inverse(p.witness.word));
        GroupElement out{w, evaluate(w)};
        check(classify(out.matrix) == MapClass::Parabolic, "theta(p) must be parabolic");
        check(apply(out.matrix, p.point) == p.point, "theta(p) must fix p");
        // positivity convention re-verified in the chart moving p to inf
        MoebiusMap chart = p.witness.matrix.inverse();
        check(chart * out.matrix * chart.inverse() == t.matrix,
              "theta(p) positivity normalization failed");
        return out;
    }
};

namespace detail {

inline bool contains_closed(const CircleInterval& I, const BoundaryPoint& x) {
    if (x == I.left || x == I.right) return true;
    return cyclic_order(I.left, x, I.right) == Order::Positive;
}

/// Open-in-open subset test for circle intervals with exact endpoints.
inline bool subset_open(const CircleInterval& inner, const CircleInterval& outer) {
    if (!contains_closed(outer, inner.left)) return false;
    if (!contains_closed(outer, inner.right)) return false;
    if (interval_contains(inner, outer.left) == Containment::Yes) return false;
    if (interval_contains(inner, outer.right) == Containment::Yes) return false;
    return true;
}

inline bool intervals_disjoint(const CircleInterval& I, const CircleInterval& J) {
    if (I.left == J.left && I.right == J.right) return false;
    if (interval_contains(I, J.left) == Containment::Yes) return false;
    if (interval_contains(I, J.right) == Containment::Yes) return false;
    if (interval_contains(J, I.left) == Containment::Yes) return false;
    if (interval_contains(J, I.right) == Containment::Yes) return false;
    return true;
}

}  // namespace detail

inline void SurfaceGroup::validate() const {
    check(!generators.empty(), "surface needs generators");
    check(pingpong.size() == 2 * ngens(), "one ping-pong interval per generator letter");
    check(euler_characteristic < 0, "euler characteristic must be negative");
    check(orientation_sign == 1 || orientation_sign == -1, "orientation sign is +-1");
    check(cusp_width.sign() > 0, "cusp width must be positive");

    for (const auto& g : generators) check(!g.is_identity(), "identity generator");

    // peripheral element is parabolic and fixes inf
    MoebiusMap K = evaluate(peripheral_word);
    check(classify(K) == MapClass::Parabolic, "peripheral element must be parabolic");
    check(K.c() == 0, "peripheral element must fix the cusp at inf");

    // theta(inf) translates in the positive direction: apply(theta, 0) > 0
    MoebiusMap T = theta_infinity().matrix;
    BoundaryPoint t0 = apply(T, BoundaryPoint(Rational(0)));
    check(t0.is_rational() && t0.rational().sign() > 0, "theta(inf) must translate positively");
    check(t0.rational() == cusp_width, "cusp width disagrees with theta(inf)");

    // ping-pong: intervals pairwise disjoint, and every letter maps the other
    // letters' intervals strictly inside its own
    for (size_t i = 0; i < pingpong.size(); ++i)
        for (size_t j = i + 1; j < pingpong.size(); ++j)
            check(detail::intervals_disjoint(pingpong[i], pingpong[j]),
                  "ping-pong intervals must be pairwise disjoint");
    for (size_t k = 0; k < ngens(); ++k) {
        for (int s : {+1, -1}) {
            Letter l = static_cast<Letter>(s * static_cast<int>(k + 1));
            MoebiusMap g = letter_matrix(l);
            const CircleInterval& target = letter_interval(l);
            for (size_t m = 0; m < pingpong.size(); ++m) {
                if (m == 2 * k + (s > 0 ? 1 : 0)) continue;  // skip the inverse letter's interval
                CircleInterval img = apply(g, pingpong[m]);
                check(detail::subset_open(img, target), "ping-pong property failed");
            }
        }
    }
}

inline std::optional<Word> SurfaceGroup::contains(const MoebiusMap& g0, int budget) const {
    if (modular && modular_class_mod6(g0) != 0) return std::nullopt;
    MoebiusMap g = g0;
    Word w;
    for (int iter = 0; iter < budget; ++iter) {
        if (g.is_identity()) return w;
        std::vector<CircleInterval> images;
        images.reserve(pingpong.size());
        for (const auto& I : pingpong) images.push_back(apply(g, I));
        // the first letter of g maps all intervals but at most one into its own
        Letter found = 0;
        for (size_t k = 0; k < ngens() && !found; ++k) {
            for (int s : {+1, -1}) {
                Letter l = static_cast<Letter>(s * static_cast<int>(k + 1));
                const CircleInterval& target = letter_interval(l);
                int hits = 0;
                for (const auto& img : images)
                    if (detail::subset_open(img, target)) ++hits;
                if (hits >= static_cast<int>(pingpong.size()) - 1) {
                    found = l;
                    break;
                }
            }
        }
        if (found == 0) {
            if (modular) throw InvariantViolation("ping-pong descent stuck on a member");
            return std::nullopt;
        }
        g = letter_matrix(found).inverse() * g;
        w.push_back(found);
    }
    if (modular) throw InvariantViolation("ping-pong descent exceeded budget on a member");
    return std::nullopt;
}

inline ParabolicPoint SurfaceGroup::parabolic_witness(const BoundaryPoint& x, int budget) const {
    if (x.is_infinity()) return cusp();
    if (!x.is_rational()) throw NotRational("parabolic witness needs a rational point or inf");
    const Rational& r = x.rational();

    if (modular) {
        // Column (p, q) extends to SL(2,Z); then right-multiply by T^k to land
        // in the kernel of the abelianization.
        Int p = r.num(), q = r.den();
        Int s, t;  // p t - s q = 1
        {
            // extended gcd(p, q) = 1
            Int old_r = p, rr = q, old_s = 1, ss = 0, old_t = 0, tt = 1;
            while (rr != 0) {
                Int quo = old_r / rr;
                Int tmp = old_r - quo * rr; old_r = rr; rr = tmp;
                tmp = old_s - quo * ss; old_s = ss; ss = tmp;
                tmp = old_t - quo * tt; old_t = tt; tt = tmp;
            }
            // old_r = +-1 = old_s p + old_t q
            check(old_r == 1 || old_r == -1, "rational not reduced");
            Int sgn = old_r;
            s = -old_t * sgn;
            t = old_s * sgn;
        }
        MoebiusMap M0(p, s, q, t);
        int cls = modular_class_mod6(M0);
        int k = (6 - cls) % 6;
        MoebiusMap Tk(1, k, 0, 1);
        MoebiusMap M = M0 * Tk;
        check(modular_class_mod6(M) == 0, "abelianization congruence failed");
        auto w = contains(M);
        check(w.has_value(), "witness not recognized as a member");
        GroupElement h{*w, M};
        check(apply(M, BoundaryPoint::infinity()) == x, "witness does not hit the target");
        return ParabolicPoint{x, h};
    }

    // generic surface: bounded breadth-first word search
    std::vector<Word> frontier{Word{}};
    for (int depth = 0; depth <= budget; ++depth) {
        std::vector<Word> next;
        for (const Word& w : frontier) {
            MoebiusMap m = evaluate(w);
            if (apply(m, BoundaryPoint::infinity()) == x) return ParabolicPoint{x, {w, m}};
            for (size_t k = 0; k < ngens(); ++k)
                for (int sgn : {+1, -1}) {
                    Letter l = static_cast<Letter>(sgn * static_cast<int>(k + 1));
                    if (!w.empty() && w.back() == -l) continue;
                    Word nw = w;
                    nw.push_back(l);
                    next.push_back(std::move(nw));
                }
        }
        frontier = std::move(next);
    }
    throw WitnessSearchExhausted("no witness within word-length budget");
}

/// The default desk-scale surface: the modular once-punctured torus, with the
/// spec generators conjugated so the commutator fixes inf.
inline SurfaceGroup modular_torus() {
    MoebiusMap A(1, 1, 1, 2), B(1, -1, -1, 2), S(0, -1, 1, 0);
    SurfaceGroup G;
    G.generators = {S * A * S.inverse(), S * B * S.inverse()};
    check(G.generators[0] == MoebiusMap(2, -1, -1, 1), "unexpected conjugated generator a");
    check(G.generators[1] == MoebiusMap(2, 1, 1, 1), "unexpected conjugated generator b");
    G.peripheral_word = parse_word("baBA");
    G.cusp_width = Rational(6);
    G.euler_characteristic = -1;
    G.orientation_sign = +1;
    BoundaryPoint inf = BoundaryPoint::infinity();
    BoundaryPoint m1(Rational(-1)), z0(Rational(0)), p1(Rational(1));
    G.pingpong = {
        CircleInterval(inf, m1),  // a
        CircleInterval(z0, p1),   // a^-1
        CircleInterval(p1, inf),  // b
        CircleInterval(m1, z0),   // b^-1
    };
    G.modular = true;
    G.validate();
    return G;
}

/// Plain-text key-value config loader; rejects invalid data with a
/// line-numbered error and re-validates every invariant.
inline SurfaceGroup load_surface_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open surface config: " + path);
    SurfaceGroup G;
    std::vector<std::pair<char, CircleInterval>> intervals;
    std::vector<char> names;
    bool have_peripheral = false, have_width = false, have_chi = false, have_orient = false;
    std::string line;
    int lineno = 0;
    auto parse_endpoint = [](const std::string& tok) { return parse_point(tok); };
    while (std::getline(in, line)) {
        ++lineno;
        std::string stripped = line.substr(0, line.find('#'));
        std::istringstream ss(stripped);
        std::string key;
        if (!(ss >> key)) continue;
        try {
            if (key == "generator") {
                std::string name;
                long a, b, c, d;
                if (!(ss >> name >> a >> b >> c >> d)) throw Error("expected: generator NAME a b c d");
                if (name.size() != 1 || name[0] != static_cast<char>('a' + names.size()))
                    throw Error("generators must be named a, b, c, ... in order");
                names.push_back(name[0]);
                G.generators.emplace_back(a, b, c, d);
            } else if (key == "peripheral") {
                std::string w;
                if (!(ss >> w)) throw Error("expected: peripheral WORD");
                G.peripheral_word = parse_word(w);
                have_peripheral = true;
            } else if (key == "orientation") {
                int s;
                if (!(ss >> s) || (s != 1 && s != -1)) throw Error("expected: orientation +1|-1");
                G.orientation_sign = s;
                have_orient = true;
            } else if (key == "cusp_width") {
                std::string w;
                if (!(ss >> w)) throw Error("expected: cusp_width RATIONAL");
                BoundaryPoint p = parse_endpoint(w);
                if (!p.is_rational()) throw Error("cusp_width must be rational");
                G.cusp_width = p.rational();
                have_width = true;
            } else if (key == "euler_characteristic") {
                if (!(ss >> G.euler_characteristic)) throw Error("expected: euler_characteristic INT");
                have_chi = true;
            } else if (key == "interval") {
                std::string name, l, r;
                if (!(ss >> name >> l >> r)) throw Error("expected: interval LETTER LEFT RIGHT");
                if (name.size() != 1) throw Error("interval letter must be a single character");
                intervals.emplace_back(name[0], CircleInterval(parse_endpoint(l), parse_endpoint(r)));
            } else {
                throw Error("unknown key '" + key + "'");
            }
        } catch (const Error& e) {
            throw ConfigParseError(lineno, e.what());
        }
    }
    if (G.generators.empty()) throw ConfigParseError(lineno, "no generators");
    if (!have_peripheral) throw ConfigParseError(lineno, "missing peripheral word");
    if (!have_width) throw ConfigParseError(lineno, "missing cusp_width");
    if (!have_chi) throw ConfigParseError(lineno, "missing euler_characteristic");
    if (!have_orient) throw ConfigParseError(lineno, "missing orientation");
    G.pingpong.clear();
    for (size_t k = 0; k < G.generators.size(); ++k) {
        char lower = static_cast<char>('a' + k);
        char upper = static_cast<char>(std::toupper(lower));
        const CircleInterval* lo = nullptr;
        const CircleInterval* hi = nullptr;
        for (auto& [n, iv] : intervals) {
            if (n == lower) lo = &iv;
            if (n == upper) hi = &iv;
        }
        if (!lo || !hi) throw ConfigParseError(lineno, std::string("missing interval for generator ") + lower);
        G.pingpong.push_back(*lo);
        G.pingpong.push_back(*hi);
    }
    // detect the default modular instance, which unlocks exact membership
    SurfaceGroup M = modular_torus();
    G.modular = (G.generators == M.generators);
    try {
        G.validate();
    } catch (const Error& e) {
        throw ConfigParseError(lineno, std::string("validation failed: ") + e.what());
    }
    return G;
}

}  // namespace rayspace
