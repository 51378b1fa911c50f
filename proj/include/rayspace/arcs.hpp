#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "rayspace/errors.hpp"
#include "rayspace/farey.hpp"
#include "rayspace/gaps.hpp"
#include "rayspace/surface.hpp"

namespace rayspace {

/// Oriented cusp-to-cusp geodesic arc with its chart normalization.
struct CuspArc {
    ParabolicPoint from, to;
    ArcChart chart;          // arc = chart(inf, r)
    Rational r_back;         // chart value of the reversed arc
    long self_crossings = 0;

    /// Key identifying the underlying unoriented arc on the surface.
    std::pair<std::string, std::string> surface_key(const Rational& c) const {
        auto norm = [&](const Rational& r) {
            Rational m = r - c * Rational((r / c).floor());
            return m.str();
        };
        std::string k1 = norm(chart.r), k2 = norm(r_back);
        if (k2 < k1) std::swap(k1, k2);
        return {k1, k2};
    }
};

inline CuspArc make_cusp_arc(const SurfaceGroup& G, const ParabolicPoint& from,
                             const BoundaryPoint& to_pt, long budget = 200000) {
    ParabolicPoint to = G.parabolic_witness(to_pt);
    ArcChart chart = make_arc_chart(G, from, to_pt, budget);
    BoundaryPoint rb = apply(to.witness.matrix.inverse(), from.point);
    check(rb.is_rational(), "reversed arc endpoint must be rational");
    CuspArc arc{from, to, chart, rb.rational(), 0};
    arc.self_crossings = self_intersections_chart(chart);
    return arc;
}

/// One geometric crossing point between two arcs of the system (or a
/// self-crossing). h is the group element in base coordinates carrying the
/// b-arc's reference lift across the a-arc's; positions are squared heights
/// along each arc's chart vertical, exact.
struct CrossingPoint {
    size_t arc_a, arc_b;
    MoebiusMap h;        // base coordinates
    Rational pos_a;      // squared height along arc_a (larger = closer to 'from')
    Rational pos_b;      // squared height along arc_b
};

struct ArcSystem {
    std::vector<CuspArc> arcs;  // deduplicated as arcs on the surface
    std::vector<CrossingPoint> crossings;
    // cusp marks: (mark in [0,c), arc index, end: 0 = from, 1 = to)
    std::vector<std::tuple<Rational, size_t, int>> cusp_cyclic_order;
};

namespace detail {

inline Rational height_sq(const Rational& r, const BoundaryPoint& u, const BoundaryPoint& v) {
    check(u.is_rational() && v.is_rational(), "crossing heights need rational endpoints");
    Rational a = u.rational(), b = v.rational();
    if (b < a) std::swap(a, b);
    check(a < r && r < b, "crossing endpoints must straddle the vertical");
    return (r - a) * (b - r);
}

}  // namespace detail

/// Pairwise crossing data for two arcs, as Gamma-orbit representatives; for
/// the same arc given twice (in either orientation) the list is empty.
inline std::vector<CrossingPoint> arc_crossings(const SurfaceGroup& G, const CuspArc& A,
                                                const CuspArc& B, size_t ia, size_t ib) {
    std::vector<CrossingPoint> out;
    bool same = A.surface_key(G.cusp_width) == B.surface_key(G.cusp_width);
    if (ia != ib && same) return out;  // identical arcs never listed as crossing pairs
    if (ia == ib) {
        // self crossings: elements come in inverse pairs; keep one per pair
        std::vector<MoebiusMap> H = crossing_elements(A.chart, A.chart);
        std::set<std::string> used;
        for (const MoebiusMap& h : H) {
            MoebiusMap hi = h.inverse();
            std::string k1 = h.str(), k2 = hi.str();
            if (used.count(k1) || used.count(k2)) continue;
            used.insert(k1);
            BoundaryPoint inf = BoundaryPoint::infinity();
            BoundaryPoint rr(A.chart.r);
            Rational pos1 = detail::height_sq(A.chart.r, apply(h, inf), apply(h, rr));
            Rational pos2 = detail::height_sq(A.chart.r, apply(hi, inf), apply(hi, rr));
            MoebiusMap hb = A.chart.chart * h * A.chart.chart.inverse();
            out.push_back(CrossingPoint{ia, ib, hb, pos1, pos2});
        }
        return out;
    }
    std::vector<MoebiusMap> H = crossing_elements(A.chart, B.chart);
    for (const MoebiusMap& h : H) {
        BoundaryPoint inf = BoundaryPoint::infinity();
        Rational pos_a = detail::height_sq(A.chart.r, apply(h, inf), apply(h, BoundaryPoint(B.chart.r)));
        MoebiusMap hi = h.inverse();
        Rational pos_b = detail::height_sq(B.chart.r, apply(hi, inf), apply(hi, BoundaryPoint(A.chart.r)));
        MoebiusMap hb = A.chart.chart * h * B.chart.chart.inverse();
        out.push_back(CrossingPoint{ia, ib, hb, pos_a, pos_b});
    }
    return out;
}

/// Builds the deduplicated arc system with full crossing data and the cusp
/// rotation marks.
inline ArcSystem build_arc_system(const SurfaceGroup& G,
                                  const std::vector<std::pair<ParabolicPoint, BoundaryPoint>>& raw) {
    ArcSystem sys;
    std::set<std::pair<std::string, std::string>> keys;
    for (const auto& [from, to] : raw) {
        CuspArc arc = make_cusp_arc(G, from, to);
        auto key = arc.surface_key(G.cusp_width);
        if (keys.count(key)) continue;
        keys.insert(key);
        sys.arcs.push_back(std::move(arc));
    }
    for (size_t i = 0; i < sys.arcs.size(); ++i)
        for (size_t j = i; j < sys.arcs.size(); ++j) {
            auto cs = arc_crossings(G, sys.arcs[i], sys.arcs[j], i, j);
            sys.crossings.insert(sys.crossings.end(), cs.begin(), cs.end());
        }
    const Rational c = G.cusp_width;
    auto mark = [&](const Rational& r) { return r - c * Rational((r / c).floor()); };
    for (size_t i = 0; i < sys.arcs.size(); ++i) {
        sys.cusp_cyclic_order.emplace_back(mark(sys.arcs[i].chart.r), i, 0);
        sys.cusp_cyclic_order.emplace_back(mark(sys.arcs[i].r_back), i, 1);
    }
    std::sort(sys.cusp_cyclic_order.begin(), sys.cusp_cyclic_order.end(),
              [](const auto& x, const auto& y) { return std::get<0>(x) < std::get<0>(y); });
    for (size_t i = 0; i + 1 < sys.cusp_cyclic_order.size(); ++i)
        check(!(std::get<0>(sys.cusp_cyclic_order[i]) == std::get<0>(sys.cusp_cyclic_order[i + 1])),
              "two arc ends share a cusp mark");
    return sys;
}

/// Census of the compactified arrangement: the puncture becomes a vertex, the
/// crossings are 4-valent vertices, faces are traced from the rotation
/// system.
struct FillingResult {
    bool filling = false;
    bool connected = false;
    long V = 0, E = 0, F = 0;
    long euler_target = 0;
    std::vector<std::vector<long>> faces;  // face walks as directed-edge ids
    std::optional<size_t> witness_face;    // certifying face when not filling
};

inline FillingResult is_filling(const SurfaceGroup& G, const ArcSystem& sys) {
    check(!sys.arcs.empty(), "filling test needs at least one arc");

    // vertices: 0 = cusp, then the crossings
    size_t nv = 1 + sys.crossings.size();

    // per-arc ordered positions along the arc (descending squared height:
    // from the 'from' end toward the 'to' end)
    struct Hit {
        Rational pos;
        size_t vertex;
        bool branch_b;  // this hit is the arc_b branch of the crossing
    };
    std::vector<std::vector<Hit>> hits(sys.arcs.size());
    for (size_t ci = 0; ci < sys.crossings.size(); ++ci) {
        const CrossingPoint& cp = sys.crossings[ci];
        hits[cp.arc_a].push_back(Hit{cp.pos_a, 1 + ci, false});
        hits[cp.arc_b].push_back(Hit{cp.pos_b, 1 + ci, true});
    }
    for (auto& hv : hits) {
        std::sort(hv.begin(), hv.end(), [](const Hit& x, const Hit& y) { return y.pos < x.pos; });
        for (size_t i = 0; i + 1 < hv.size(); ++i)
            if (hv[i].pos == hv[i + 1].pos)
                throw InconsistentRotation("triple point: two crossings at one position");
    }

    // edges: per arc, segments between consecutive hits
    struct Edge {
        size_t tail, head;      // vertex ids
        size_t arc;
    };
    std::vector<Edge> edges;
    // directed edge id: 2*e forward (tail->head), 2*e+1 backward; rotations
    // list outgoing directed edges per vertex in ccw order
    std::vector<std::pair<long, long>> arc_extremal(sys.arcs.size(), {-1, -1});
    for (size_t ai = 0; ai < sys.arcs.size(); ++ai) {
        const auto& hv = hits[ai];
        size_t prev_vertex = 0;
        for (size_t s = 0; s <= hv.size(); ++s) {
            size_t next_vertex = (s == hv.size()) ? 0 : hv[s].vertex;
            long e = static_cast<long>(edges.size());
            edges.push_back(Edge{prev_vertex, next_vertex, ai});
            if (s == 0) arc_extremal[ai].first = e;
            if (s == hv.size()) arc_extremal[ai].second = e;
            prev_vertex = next_vertex;
        }
    }

    // rotation at the cusp: marks ascending
    std::vector<long> cusp_rotation;
    for (const auto& [mark, arc, end] : sys.cusp_cyclic_order) {
        long e = end == 0 ? arc_extremal[arc].first : arc_extremal[arc].second;
        // outgoing directed edge at the cusp: forward for the 'from' end,
        // backward for the 'to' end
        cusp_rotation.push_back(end == 0 ? 2 * e : 2 * e + 1);
        (void)mark;
    }

    // rotation at each crossing: order the four ideal targets positively
    // around the circle (linearized with inf first)
    std::vector<std::vector<long>> rotations(nv);
    rotations[0] = cusp_rotation;
    for (size_t ci = 0; ci < sys.crossings.size(); ++ci) {
        const CrossingPoint& cp = sys.crossings[ci];
        const CuspArc& A = sys.arcs[cp.arc_a];
        const CuspArc& B = sys.arcs[cp.arc_b];
        // branch directions at the lifted crossing: arc_a runs from->to on its
        // reference lift; arc_b runs along h(from_b) -> h(to_b)
        BoundaryPoint a_from = A.from.point, a_to = A.to.point;
        BoundaryPoint b_from = apply(cp.h, B.from.point), b_to = apply(cp.h, B.to.point);

        // locate the in/out edges on each arc at this vertex
        auto edges_at = [&](size_t arc, bool branch_b) -> std::pair<long, long> {
            const auto& hv = hits[arc];
            for (size_t s = 0; s < hv.size(); ++s)
                if (hv[s].vertex == 1 + ci && hv[s].branch_b == branch_b) {
                    // edge s arrives, edge s+1 leaves; count edges of earlier arcs
                    long base = 0;
                    for (size_t k = 0; k < arc; ++k) base += static_cast<long>(hits[k].size()) + 1;
                    return {base + static_cast<long>(s), base + static_cast<long>(s) + 1};
                }
            throw InconsistentRotation("crossing not found on its arc");
        };
        auto [a_in, a_out] = edges_at(cp.arc_a, false);
        auto [b_in, b_out] = edges_at(cp.arc_b, true);

        struct Dir {
            BoundaryPoint target;
            long dir_edge;
            int branch;  // 0 = the a-branch lift, 1 = the b-branch lift
        };
        std::vector<Dir> dirs = {
            {a_to, 2 * a_out, 0},       // forward along arc_a
            {a_from, 2 * a_in + 1, 0},  // back along arc_a
            {b_to, 2 * b_out, 1},
            {b_from, 2 * b_in + 1, 1},
        };
        // positive cyclic order, linearized with inf first
        std::sort(dirs.begin(), dirs.end(), [](const Dir& x, const Dir& y) {
            if (x.target.is_infinity()) return !y.target.is_infinity();
            if (y.target.is_infinity()) return false;
            return compare_finite(x.target, y.target) < 0;
        });
        // the two branches of a transverse crossing alternate around it
        check(dirs[0].branch == dirs[2].branch && dirs[1].branch == dirs[3].branch &&
                  dirs[0].branch != dirs[1].branch,
              "crossing rotation must alternate between the two branches");
        std::vector<long> rot;
        for (const Dir& d : dirs) rot.push_back(d.dir_edge);
        rotations[1 + ci] = rot;
    }

    // next(dir) = rotation successor at the head vertex of dir
    long ne = static_cast<long>(edges.size());
    auto head_of = [&](long dir) {
        const Edge& e = edges[static_cast<size_t>(dir / 2)];
        return (dir % 2 == 0) ? e.head : e.tail;
    };
    std::vector<long> next(2 * static_cast<size_t>(ne), -1);
    for (size_t v = 0; v < nv; ++v) {
        const auto& rot = rotations[v];
        for (size_t s = 0; s < rot.size(); ++s) {
            long out = rot[s];
            long in = (out % 2 == 0) ? out + 1 : out - 1;  // arriving twin
            next[static_cast<size_t>(in)] = rot[(s + 1) % rot.size()];
        }
    }
    for (long d = 0; d < 2 * ne; ++d) check(next[static_cast<size_t>(d)] >= 0, "rotation system incomplete");

    // faces: orbits of next
    FillingResult res;
    std::vector<int> seen(2 * static_cast<size_t>(ne), 0);
    for (long d = 0; d < 2 * ne; ++d) {
        if (seen[static_cast<size_t>(d)]) continue;
        std::vector<long> walk;
        long cur = d;
        while (!seen[static_cast<size_t>(cur)]) {
            seen[static_cast<size_t>(cur)] = 1;
            walk.push_back(cur);
            cur = next[static_cast<size_t>(cur)];
        }
        res.faces.push_back(std::move(walk));
    }

    // connectivity over vertices
    std::vector<size_t> uf(nv);
    for (size_t i = 0; i < nv; ++i) uf[i] = i;
    std::function<size_t(size_t)> find = [&](size_t x) { return uf[x] == x ? x : uf[x] = find(uf[x]); };
    for (const Edge& e : edges) uf[find(e.tail)] = find(e.head);
    size_t comps = 0;
    for (size_t i = 0; i < nv; ++i)
        if (find(i) == i) ++comps;

    res.V = static_cast<long>(nv);
    res.E = ne;
    res.F = static_cast<long>(res.faces.size());
    res.connected = comps == 1;
    res.euler_target = G.euler_characteristic + 1;  // closed surface
    res.filling = res.connected && (res.V - res.E + res.F == res.euler_target);
    if (!res.filling) {
        size_t witness = 0;
        for (size_t f = 1; f < res.faces.size(); ++f)
            if (res.faces[f].size() > res.faces[witness].size()) witness = f;
        res.witness_face = witness;
    }
    return res;
}

/// Arc system of the first n arcs of a derived expansion.
inline ArcSystem expansion_arc_system(const SurfaceGroup& G, const DerivedExpansion& e, size_t n) {
    check(n >= 1 && n <= e.steps.size(), "expansion arc system needs 1 <= n <= steps");
    std::vector<std::pair<ParabolicPoint, BoundaryPoint>> raw;
    ParabolicPoint prev = e.base;
    for (size_t i = 0; i < n; ++i) {
        raw.emplace_back(prev, e.steps[i].p.point);
        prev = e.steps[i].p;
    }
    return build_arc_system(G, raw);
}

}  // namespace rayspace
