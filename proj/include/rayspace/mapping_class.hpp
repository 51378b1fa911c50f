#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rayspace/errors.hpp"
#include "rayspace/gaps.hpp"
#include "rayspace/surface.hpp"
#include "rayspace/words.hpp"

namespace rayspace {

/// Mapping class as a normalized automorphism datum of the rank-2 surface
/// group: image words per generator, a verified inverse datum, and the
/// peripheral normalization phi(K) = K^orientation holding exactly (not just
/// up to conjugacy).
struct MappingClass {
    std::vector<Word> images;
    std::vector<Word> inverse_images;
    int orientation = +1;

    Word operator()(const Word& w) const { return substitute(w, images); }
    Word inv(const Word& w) const { return substitute(w, inverse_images); }

    std::array<long, 4> abelianization() const {
        auto ea = rayspace::abelianization(images[0], 2);
        auto eb = rayspace::abelianization(images[1], 2);
        // columns are the images of the generators
        return {ea[0], eb[0], ea[1], eb[1]};
    }

    bool is_identity_class() const {
        auto m = abelianization();
        return m[0] == 1 && m[1] == 0 && m[2] == 0 && m[3] == 1;
    }
};

inline MappingClass compose(const MappingClass& f, const MappingClass& g) {
    // (f o g)(x) = f(g(x))
    MappingClass out;
    out.images = {substitute(g.images[0], f.images), substitute(g.images[1], f.images)};
    out.inverse_images = {substitute(f.inverse_images[0], g.inverse_images),
                          substitute(f.inverse_images[1], g.inverse_images)};
    out.orientation = f.orientation * g.orientation;
    return out;
}

namespace detail {

/// Bounded Nielsen search for the inverse of an endomorphism datum given by
/// a candidate generating pair. Walks the image pair (x, y) = (phi(a), phi(b))
/// down to the basis (a, b) by elementary moves that never grow the total
/// length (peak reduction holds in rank 2), maintaining the accumulated
/// precomposition P with phi o P = current; at the end P = phi^-1.
inline std::optional<std::pair<Word, Word>> nielsen_inverse(const Word& u, const Word& v,
                                                            int budget = 200000) {
    struct State {
        Word x, y;    // current image pair
        Word pa, pb;  // images of the accumulated precomposition P
    };
    auto key = [](const Word& x, const Word& y) { return word_str(x) + "|" + word_str(y); };
    std::set<std::string> seen;
    std::vector<State> frontier{{reduce(u), reduce(v), parse_word("a"), parse_word("b")}};
    seen.insert(key(frontier[0].x, frontier[0].y));
    size_t initial = frontier[0].x.size() + frontier[0].y.size();

    while (!frontier.empty()) {
        std::vector<State> next;
        for (const State& s : frontier) {
            if (word_str(s.x) == "a" && word_str(s.y) == "b")
                return std::make_pair(s.pa, s.pb);
            // a move takes (x,y) to (mu applied to the pair) and P to P o mu;
            // (P o mu)(a) = substitute(mu(a), {pa, pb})
            auto push = [&](Word nx, Word ny, const char* mu_a, const char* mu_b) {
                if (nx.size() + ny.size() > initial) return;
                std::string k = key(nx, ny);
                if (seen.count(k)) return;
                seen.insert(k);
                std::vector<Word> P = {s.pa, s.pb};
                next.push_back(State{std::move(nx), std::move(ny),
                                     substitute(parse_word(mu_a), P),
                                     substitute(parse_word(mu_b), P)});
            };
            Word ax = inverse(s.x), ay = inverse(s.y);
            push(concat(s.x, s.y), s.y, "ab", "b");   // (xy, y)
            push(concat(s.x, ay), s.y, "aB", "b");    // (xy^-1, y)
            push(s.x, concat(s.y, s.x), "a", "ba");   // (x, yx)
            push(s.x, concat(s.y, ax), "a", "bA");    // (x, yx^-1)
            push(ax, s.y, "A", "b");                  // (x^-1, y)
            push(s.x, ay, "a", "B");                  // (x, y^-1)
            push(s.y, s.x, "b", "a");                 // swap
            if (seen.size() > static_cast<size_t>(budget)) return std::nullopt;
        }
        frontier = std::move(next);
    }
    return std::nullopt;
}

inline bool is_rotation_of(const Word& w, const Word& of, size_t* shift) {
    if (w.size() != of.size()) return false;
    for (size_t r = 0; r < of.size(); ++r) {
        bool ok = true;
        for (size_t i = 0; i < of.size(); ++i)
            if (w[i] != of[(r + i) % of.size()]) {
                ok = false;
                break;
            }
        if (ok) {
            *shift = r;
            return true;
        }
    }
    return false;
}

}  // namespace detail

/// normalize_mapping_class: checks invertibility (searching for an inverse by
/// bounded Nielsen moves when none is supplied), conjugates so that
/// phi(K) = K^{+-1} exactly, and records the orientation.
inline MappingClass normalize_mapping_class(const SurfaceGroup& G, std::vector<Word> raw_images,
                                            std::optional<std::vector<Word>> raw_inverse = {}) {
    check(raw_images.size() == G.ngens() && G.ngens() == 2,
          "mapping classes need images for both rank-2 generators");
    MappingClass phi;
    phi.images = {reduce(raw_images[0]), reduce(raw_images[1])};

    if (raw_inverse) {
        phi.inverse_images = {reduce((*raw_inverse)[0]), reduce((*raw_inverse)[1])};
    } else {
        auto inv = detail::nielsen_inverse(phi.images[0], phi.images[1]);
        if (!inv) throw NotAnAutomorphism("no inverse found by bounded Nielsen search");
        phi.inverse_images = {inv->first, inv->second};
    }
    // invertibility: the stored inverse composes to the identity on generators
    for (int k = 0; k < 2; ++k) {
        Word w{static_cast<Letter>(k + 1)};
        if (substitute(phi.inv(w), phi.images) != w || substitute(phi(w), phi.inverse_images) != w)
            throw NotAnAutomorphism("inverse datum does not invert the images");
    }

    // peripheral normalization
    const Word K = G.peripheral_word;
    Word k_img = phi(K);
    // cyclically reduce, keeping the conjugator: k_img = c k0 c^-1
    Word c, k0 = k_img;
    while (k0.size() >= 2 && k0.front() == -k0.back()) {
        c.push_back(k0.front());
        k0 = Word(k0.begin() + 1, k0.end() - 1);
    }
    size_t shift = 0;
    int sigma;
    Word Kinv = inverse(K);
    if (detail::is_rotation_of(k0, K, &shift))
        sigma = +1;
    else if (detail::is_rotation_of(k0, Kinv, &shift))
        sigma = -1;
    else
        throw PeripheralNotPreserved("phi(K) is not conjugate to K or K^-1");
    // k0 = rot_shift(K^sigma) = pref^-1 K^sigma pref with pref the shifted-off prefix
    const Word& base = (sigma > 0) ? K : Kinv;
    Word pref(base.begin(), base.begin() + shift);
    // phi(K) = (c pref^-1) K^sigma (c pref^-1)^-1; post-compose with the inner
    // automorphism by w^-1, w = c pref^-1
    Word w = concat(c, inverse(pref));
    Word winv = inverse(w);
    for (auto& img : phi.images) img = concat(concat(winv, img), w);
    std::vector<Word> old_inverse = phi.inverse_images;
    for (int k = 0; k < 2; ++k) {
        // inverse becomes phi^-1 composed with conjugation by w on the source
        Word g{static_cast<Letter>(k + 1)};
        phi.inverse_images[k] = substitute(concat(concat(w, g), winv), old_inverse);
    }
    phi.orientation = sigma;

    // verified exactly
    Word final_k = phi(K);
    check(final_k == (sigma > 0 ? K : Kinv), "peripheral normalization failed");
    for (int k = 0; k < 2; ++k) {
        Word g{static_cast<Letter>(k + 1)};
        check(substitute(phi.inv(g), phi.images) == g, "normalized inverse broken");
        check(substitute(phi(g), phi.inverse_images) == g, "normalized inverse broken");
    }
    auto m = phi.abelianization();
    check(m[0] * m[3] - m[1] * m[2] == sigma, "abelianization determinant must equal deg(phi)");
    return phi;
}

/// The two twist maps generating the orientation-preserving classes.
inline MappingClass twist_a(const SurfaceGroup& G) {
    return normalize_mapping_class(G, {parse_word("a"), parse_word("ba")},
                                   {{parse_word("a"), parse_word("bA")}});
}
inline MappingClass twist_b(const SurfaceGroup& G) {
    return normalize_mapping_class(G, {parse_word("ab"), parse_word("b")},
                                   {{parse_word("aB"), parse_word("b")}});
}

/// All distinct nontrivial classes of twist-word length <= W, deduplicated by
/// their action on the abelianization (a complete invariant here), in
/// deterministic (length, lexicographic) enumeration order.
inline std::vector<MappingClass> enumerate_twist_classes(const SurfaceGroup& G, int W) {
    std::vector<MappingClass> gens = {twist_a(G), twist_b(G)};
    std::vector<MappingClass> gens_inv = {
        normalize_mapping_class(G, {parse_word("a"), parse_word("bA")},
                                {{parse_word("a"), parse_word("ba")}}),
        normalize_mapping_class(G, {parse_word("aB"), parse_word("b")},
                                {{parse_word("ab"), parse_word("b")}})};
    struct Node {
        MappingClass cls;
        int last;  // 0..3, or -1
    };
    std::vector<Node> frontier{{MappingClass{{parse_word("a"), parse_word("b")},
                                             {parse_word("a"), parse_word("b")},
                                             +1},
                                -1}};
    std::set<std::array<long, 4>> seen;
    std::map<std::array<long, 4>, MappingClass> reps;
    std::vector<MappingClass> out;
    for (int len = 1; len <= W; ++len) {
        std::vector<Node> next;
        for (const Node& n : frontier) {
            for (int moveix = 0; moveix < 4; ++moveix) {
                // moves: Ta, Ta^-1, Tb, Tb^-1; skip immediate backtracking
                if (n.last >= 0 && (n.last ^ 1) == moveix) continue;
                const MappingClass& m = (moveix % 2 == 0) ? gens[moveix / 2] : gens_inv[moveix / 2];
                MappingClass c = compose(m, n.cls);
                next.push_back({c, moveix});
                if (c.is_identity_class()) continue;
                auto ab = c.abelianization();
                if (seen.insert(ab).second) {
                    out.push_back(c);
                    reps.emplace(ab, c);
                } else {
                    // same abelianization: confirm the two are the same class,
                    // i.e. differ by an inner automorphism by a theta power
                    const MappingClass& other = reps.at(ab);
                    MappingClass other_inv{other.inverse_images, other.images, other.orientation};
                    MappingClass diff = compose(other_inv, c);
                    Word K = G.peripheral_word;
                    bool matched = false;
                    int bound = 2 * W + 2;
                    for (int mm = -bound; mm <= bound && !matched; ++mm) {
                        Word conj;
                        Word Km = mm >= 0 ? K : inverse(K);
                        for (int t = 0; t < std::abs(mm); ++t) conj = concat(conj, Km);
                        Word expect_a = concat(concat(conj, parse_word("a")), inverse(conj));
                        Word expect_b = concat(concat(conj, parse_word("b")), inverse(conj));
                        matched = (diff.images[0] == expect_a && diff.images[1] == expect_b);
                    }
                    check(matched, "abelianization collision between distinct classes");
                }
            }
        }
        frontier = std::move(next);
    }
    return out;
}

/// Image of a boundary point under a mapping class. Parabolic points go by
/// the exact word route; other points go by the expansion route and come
/// back as an IntervalReal of nested transported gap intervals.
inline BoundaryPoint apply_mapping_class(const GapTree& tree, const MappingClass& phi,
                                         const BoundaryPoint& x, int depth = 24,
                                         bool verify_c4 = false) {
    const SurfaceGroup& G = tree.group();
    if (x.is_infinity()) return x;  // classes here fix the cusp
    if (x.is_rational()) {
        ParabolicPoint p = G.parabolic_witness(x);
        return apply(G.evaluate(phi(p.witness.word)), BoundaryPoint::infinity());
    }

    DerivedExpansion e = derived_expansion(tree, x, depth);
    if (e.steps.empty())
        throw InsufficientDepth("no expansion steps available for the image interval");

    // transported image intervals I^{deg(phi) eps_i}(phi p_{i-1}, phi p_i)
    std::vector<CircleInterval> intervals;
    ParabolicPoint p_prev = G.cusp();
    for (size_t i = 0; i < e.steps.size(); ++i) {
        Word hw = phi(e.partials[i + 1].word);
        BoundaryPoint q_img = apply(G.evaluate(hw), BoundaryPoint::infinity());
        Gap gimg = gap(G, p_prev, q_img, /*skip_delta_check=*/true);
        if (verify_c4) {
            Word expect = phi(e.steps[i].g.word);
            MoebiusMap em = G.evaluate(expect);
            MoebiusMap got = e.steps[i].eps * phi.orientation > 0
                                 ? gimg.g_pq.matrix
                                 : gimg.g_qp.matrix.inverse();
            check(em == got, "Lemma-C4 route mismatch");
        }
        int eps_img = e.steps[i].eps * phi.orientation;
        intervals.push_back(eps_img > 0 ? gimg.I_plus : gimg.I_minus);
        Word pw = concat(hw, Word{});
        p_prev = ParabolicPoint{q_img, GroupElement{pw, G.evaluate(pw)}};
    }

    // nested rational enclosures; level k uses the first k+1 intervals
    auto enclose = [](const CircleInterval& I, int bits) -> RationalInterval {
        auto lo = I.left.is_rational() ? std::pair<Rational, Rational>{I.left.rational(), I.left.rational()}
                                       : I.left.surd().enclosure(bits);
        auto hi = I.right.is_rational() ? std::pair<Rational, Rational>{I.right.rational(), I.right.rational()}
                                        : I.right.surd().enclosure(bits);
        return RationalInterval{lo.first, hi.second};
    };
    int max_level = static_cast<int>(intervals.size()) - 1;
    IntervalReal img(
        [intervals, enclose](int level) -> RationalInterval {
            RationalInterval out = enclose(intervals[0], 32 + 8 * level);
            for (int i = 1; i <= level && i < static_cast<int>(intervals.size()); ++i) {
                RationalInterval next = enclose(intervals[static_cast<size_t>(i)], 32 + 8 * level);
                if (next.lo > out.lo) out.lo = next.lo;
                if (next.hi < out.hi) out.hi = next.hi;
            }
            return out;
        },
        max_level);
    return BoundaryPoint(img);
}

}  // namespace rayspace
