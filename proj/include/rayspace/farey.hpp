#pragma once

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "rayspace/boundary.hpp"
#include "rayspace/errors.hpp"
#include "rayspace/moebius.hpp"
#include "rayspace/surface.hpp"

namespace rayspace {

/// Strict linking of two endpoint pairs on the circle: the pairs separate
/// each other. Pairs sharing a point are not linked.
inline bool linked(const BoundaryPoint& a, const BoundaryPoint& b, const BoundaryPoint& x,
                   const BoundaryPoint& y) {
    if (a == x || a == y || b == x || b == y) return false;
    CircleInterval I(a, b);
    bool cx = interval_contains(I, x) == Containment::Yes;
    bool cy = interval_contains(I, y) == Containment::Yes;
    return cx != cy;
}

/// The Farey tessellation walk of the geodesic [inf, r]: the triangles whose
/// interior the geodesic crosses, each as a det-1 matrix sending the base
/// triangle (inf, 0, 1) onto it, plus the edges crossed between consecutive
/// triangles. Empty when r is an integer (the geodesic is an edge).
struct FareyWalk {
    std::vector<MoebiusMap> triangles;
    std::vector<MoebiusMap> crossed_edges;  // edge k between triangles k, k+1
};

inline FareyWalk farey_walk(const Rational& r, long budget = 200000) {
    FareyWalk walk;
    if (r.is_integer()) return walk;
    Int n = r.floor();
    // entry triangle (inf, n, n+1)
    walk.triangles.emplace_back(1, n, 0, 1);
    // edge (u, v) with u < r < v, as fractions pu/qu, pv/qv
    Int pu = n, qu = 1, pv = n + 1, qv = 1;
    for (long step = 0; step < budget; ++step) {
        // exit through edge (u, v); record it with determinant +1
        walk.crossed_edges.emplace_back(pv, pu, qv, qu);
        Int pw = pu + pv, qw = qu + qv;
        // triangle below the edge, with vertices (v, u, mediant)
        walk.triangles.emplace_back(pv, pu, qv, qu);
        Rational w(pw, qw);
        if (w == r) return walk;
        if (r < w) {
            pv = pw;
            qv = qw;
        } else {
            pu = pw;
            qu = qw;
        }
    }
    throw DepthExceeded("farey walk exceeded its triangle budget");
}

namespace detail {

/// Rotation of the base triangle: inf -> 0 -> 1 -> inf, class 2 in Z/6.
inline const MoebiusMap& farey_rotation() {
    static const MoebiusMap R(0, 1, -1, 1);
    return R;
}

/// The flip of the base edge (inf, 0), class 3 in Z/6.
inline const MoebiusMap& edge_flip() {
    static const MoebiusMap S(0, -1, 1, 0);
    return S;
}

struct MoebiusLess {
    bool operator()(const MoebiusMap& x, const MoebiusMap& y) const { return x.key() < y.key(); }
};

}  // namespace detail

/// Chart data for a cusp-to-cusp arc, normalized so the arc is [inf, r].
struct ArcChart {
    MoebiusMap chart;  // element of the ambient group with chart(inf, r) = the arc
    Rational r;
    FareyWalk walk;

    bool is_edge() const { return r.is_integer(); }
    /// The single tessellation edge the arc runs along (edge arcs only).
    MoebiusMap own_edge() const {
        check(is_edge(), "own_edge on a non-edge arc");
        return MoebiusMap(1, r.num(), 0, 1);
    }
};

inline ArcChart make_arc_chart(const SurfaceGroup& G, const ParabolicPoint& from,
                               const BoundaryPoint& to, long budget = 200000) {
    check(!(from.point == to), "arc needs distinct endpoints");
    BoundaryPoint r = apply(from.witness.matrix.inverse(), to);
    check(r.is_rational(), "arc endpoints must be parabolic");
    (void)G;
    return ArcChart{from.witness.matrix, r.rational(), farey_walk(r.rational(), budget)};
}

/// All elements h of the modular-torus group such that h applied to the
/// J-arc crosses the I-arc, in I's chart coordinates. Each element is one
/// crossing; for the self case (I and J the same arc) the list contains h
/// and h^-1 for every crossing, so the geometric count is half the size.
inline std::vector<MoebiusMap> crossing_elements(const ArcChart& I, const ArcChart& J) {
    std::vector<MoebiusMap> candidates;

    auto push_edge_pair = [&](const MoebiusMap& e, const MoebiusMap& f) {
        // h f = e with h in the kernel of the mod-6 class map
        for (int flip = 0; flip < 2; ++flip) {
            MoebiusMap h = flip ? MoebiusMap(e * detail::edge_flip() * f.inverse())
                                : MoebiusMap(e * f.inverse());
            if (modular_class_mod6(h) == 0) candidates.push_back(h);
        }
    };

    if (I.is_edge() && J.is_edge()) {
        // two tessellation edges never cross
    } else if (I.is_edge()) {
        for (const auto& f : J.walk.crossed_edges) push_edge_pair(I.own_edge(), f);
    } else if (J.is_edge()) {
        for (const auto& f : I.walk.crossed_edges) push_edge_pair(f, J.own_edge());
    } else {
        std::vector<int> phiI, phiJ;
        phiI.reserve(I.walk.triangles.size());
        phiJ.reserve(J.walk.triangles.size());
        for (const auto& m : I.walk.triangles) phiI.push_back(modular_class_mod6(m));
        for (const auto& m : J.walk.triangles) phiJ.push_back(modular_class_mod6(m));
        const MoebiusMap& R = detail::farey_rotation();
        for (size_t i = 0; i < I.walk.triangles.size(); ++i) {
            for (size_t j = 0; j < J.walk.triangles.size(); ++j) {
                int diff = ((phiJ[j] - phiI[i]) % 6 + 6) % 6;
                if (diff % 2 != 0) continue;  // different triangle orbits
                int k = (diff / 2) % 3;       // phi(M_i R^k M_j^-1) = 0
                MoebiusMap g = I.walk.triangles[i];
                for (int t = 0; t < k; ++t) g = g * R;
                g = g * J.walk.triangles[j].inverse();
                check(modular_class_mod6(g) == 0, "triangle-pair candidate not in the group");
                candidates.push_back(g);
            }
        }
    }

    // keep the linked ones, deduplicated and in deterministic order
    BoundaryPoint inf = BoundaryPoint::infinity();
    BoundaryPoint rI(I.r), rJ(J.r);
    std::set<MoebiusMap, detail::MoebiusLess> out;
    for (const auto& h : candidates) {
        if (h.is_identity()) continue;
        if (linked(inf, rI, apply(h, inf), apply(h, rJ))) out.insert(h);
    }
    return std::vector<MoebiusMap>(out.begin(), out.end());
}

/// Exact self-intersection count of the arc [p, q] projected to the surface,
/// by the cutting-sequence method.
inline long self_intersections_chart(const ArcChart& C) {
    if (C.is_edge()) return 0;
    std::vector<MoebiusMap> H = crossing_elements(C, C);
    check(H.size() % 2 == 0, "self-crossing elements must pair with inverses");
    return static_cast<long>(H.size() / 2);
}

enum class NuOracle { CuttingSequence, BoundedWordSearch };

/// nu(p, q): self-intersection number of the cusp arc between two parabolic
/// points. The bounded word search is a lower-bound oracle for testing.
inline long self_intersection_count(const SurfaceGroup& G, const ParabolicPoint& p,
                                    const BoundaryPoint& q,
                                    NuOracle oracle = NuOracle::CuttingSequence,
                                    long budget = 200000, int word_bound = 8) {
    if (p.point == q) throw SamePoint("nu needs distinct endpoints");
    if (oracle == NuOracle::CuttingSequence) {
        ArcChart C = make_arc_chart(G, p, q, budget);
        return self_intersections_chart(C);
    }
    // word-search oracle: count linked translates over all reduced words
    BoundaryPoint x = p.point, y = q;
    long count = 0;
    std::vector<std::pair<Word, MoebiusMap>> frontier{{Word{}, MoebiusMap::identity()}};
    for (int depth = 1; depth <= word_bound; ++depth) {
        std::vector<std::pair<Word, MoebiusMap>> next;
        for (auto& [w, m] : frontier) {
            for (size_t k = 0; k < G.ngens(); ++k)
                for (int s : {+1, -1}) {
                    Letter l = static_cast<Letter>(s * static_cast<int>(k + 1));
                    if (!w.empty() && w.back() == -l) continue;
                    Word nw = w;
                    nw.push_back(l);
                    MoebiusMap nm = m * G.letter_matrix(l);
                    if (linked(x, y, apply(nm, x), apply(nm, y))) ++count;
                    next.emplace_back(std::move(nw), nm);
                }
        }
        frontier = std::move(next);
    }
    check(count % 2 == 0, "linked translates must pair with inverses");
    return count / 2;
}

}  // namespace rayspace
