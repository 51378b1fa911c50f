#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rayspace/arcs.hpp"
#include "rayspace/errors.hpp"
#include "rayspace/gaps.hpp"
#include "rayspace/mapping_class.hpp"

namespace rayspace {

/// Boundary point with the provenance needed to push it through a mapping
/// class exactly: either a parabolic point (witness word) or a fixed point of
/// a hyperbolic element (element word plus which fixed point).
struct TrackedPoint {
    enum class Kind { Parabolic, FixedPoint } kind;
    BoundaryPoint point;
    Word word;
    bool attracting = true;  // meaningful for fixed points
};

inline TrackedPoint tracked_parabolic(const SurfaceGroup& G, const ParabolicPoint& p) {
    return TrackedPoint{TrackedPoint::Kind::Parabolic, p.point, p.witness.word, true};
}

inline TrackedPoint tracked_fixed(const SurfaceGroup& G, const GroupElement& g, bool attracting) {
    FixedPoints f = fixed_points(g.matrix);
    (void)G;
    return TrackedPoint{TrackedPoint::Kind::FixedPoint, attracting ? f.attracting : f.repelling,
                        g.word, attracting};
}

/// Exact image of a tracked point under a mapping class: parabolic points go
/// through the word route, fixed points map to the matching fixed point of
/// the image element.
inline TrackedPoint phi_image(const SurfaceGroup& G, const MappingClass& phi,
                              const TrackedPoint& t) {
    Word w = phi(t.word);
    if (t.kind == TrackedPoint::Kind::Parabolic) {
        BoundaryPoint pt = apply(G.evaluate(w), BoundaryPoint::infinity());
        return TrackedPoint{t.kind, pt, w, true};
    }
    MoebiusMap m = G.evaluate(w);
    check(classify(m) == MapClass::Hyperbolic, "image of a hyperbolic element must be hyperbolic");
    FixedPoints f = fixed_points(m);
    return TrackedPoint{t.kind, t.attracting ? f.attracting : f.repelling, w, t.attracting};
}

struct TrackedInterval {
    CircleInterval I;
    TrackedPoint left, right;
};

/// agreement_neighborhood with tracked endpoints, for certificate checks.
inline TrackedInterval agreement_neighborhood_tracked(const SurfaceGroup& G,
                                                      const DerivedExpansion& e, size_t n) {
    if (n < 1 || e.steps.size() < n) throw TooFewSteps("agreement neighborhood needs 1 <= n <= steps");
    auto step_interval = [&](size_t i) -> TrackedInterval {
        const ExpansionStep& s = e.steps[i];
        if (s.eps > 0)
            return TrackedInterval{s.gap.I_plus, tracked_fixed(G, s.gap.g_pq, true),
                                   tracked_parabolic(G, s.gap.q)};
        return TrackedInterval{s.gap.I_minus, tracked_parabolic(G, s.gap.q),
                               tracked_fixed(G, s.gap.g_qp, false)};
    };
    TrackedInterval U = step_interval(0);
    for (size_t i = 1; i < n; ++i) {
        TrackedInterval I = step_interval(i);
        if (interval_contains(CircleInterval(U.I.left, e.x), I.I.left) == Containment::Yes) {
            U.left = I.left;
        }
        if (interval_contains(CircleInterval(e.x, U.I.right), I.I.right) == Containment::Yes) {
            U.right = I.right;
        }
        U.I = CircleInterval(U.left.point, U.right.point);
    }
    check(interval_contains(U.I, e.x) != Containment::No, "agreement neighborhood must contain x");
    return U;
}

namespace detail {

inline BoundaryPoint translate_point(const BoundaryPoint& p, const Int& shift) {
    return apply(MoebiusMap(1, shift, 0, 1), p);
}

inline std::pair<Rational, Rational> enclose_point(const BoundaryPoint& p, int bits = 64) {
    if (p.is_rational()) return {p.rational(), p.rational()};
    check(p.is_surd(), "finite exact point expected");
    return p.surd().enclosure(bits);
}

/// left <= right finite exact points.
inline bool leq(const BoundaryPoint& a, const BoundaryPoint& b) {
    return compare_finite(a, b) <= 0;
}

}  // namespace detail

/// Quotient-faithful wandering test: checks theta^k phi(U) against U for
/// every k that could meet it, all by exact endpoint comparisons.
inline bool wandering_disjoint(const SurfaceGroup& G, const MappingClass& phi,
                               const TrackedInterval& U) {
    TrackedPoint l = phi_image(G, phi, U.left);
    TrackedPoint r = phi_image(G, phi, U.right);
    BoundaryPoint s = l.point, t = r.point;
    if (phi.orientation < 0) std::swap(s, t);
    check(!s.is_infinity() && !t.is_infinity(), "image interval must avoid the cusp");
    check(compare_finite(s, t) < 0, "image interval must be positively oriented");

    const BoundaryPoint& u1 = U.I.left;
    const BoundaryPoint& u2 = U.I.right;
    const Rational c = G.cusp_width;
    check(c.is_integer(), "wandering check needs an integer cusp width");
    Int cc = c.num();

    // possible overlaps: s + ck < u2 and t + ck > u1; certified window from
    // rational enclosures, each candidate k then checked exactly
    auto [u1lo, u1hi] = detail::enclose_point(u1);
    auto [u2lo, u2hi] = detail::enclose_point(u2);
    auto [slo, shi] = detail::enclose_point(s);
    auto [tlo, thi] = detail::enclose_point(t);
    Int klo = ((u1lo - thi) / Rational(cc)).floor();
    Int khi = ((u2hi - slo) / Rational(cc)).floor() + 1;
    for (Int k = klo; k <= khi; ++k) {
        BoundaryPoint sk = detail::translate_point(s, k * cc);
        BoundaryPoint tk = detail::translate_point(t, k * cc);
        bool disjoint = detail::leq(u2, sk) || detail::leq(tk, u1);
        if (!disjoint) return false;
    }
    return true;
}

struct WanderingCertificate {
    BoundaryPoint x;
    size_t prefix_len = 0;
    DerivedExpansion expansion;
    ArcSystem arcs;
    FillingResult filling;
    TrackedInterval U;
    struct Checked {
        MappingClass phi;
        bool disjoint;
    };
    std::vector<Checked> checked;
};

/// wandering_certificate: minimal filling prefix, the agreement interval U,
/// and exact phi U disjointness for every nontrivial twist class of word
/// length <= W. DisjointnessFailure would falsify the construction.
inline WanderingCertificate wandering_certificate(const GapTree& tree, const BoundaryPoint& x,
                                                  int depth, int mcg_bound) {
    const SurfaceGroup& G = tree.group();
    DerivedExpansion e = derived_expansion(tree, x, depth);
    std::optional<size_t> filling_n;
    ArcSystem arcs;
    FillingResult fill;
    for (size_t n = 1; n <= e.steps.size(); ++n) {
        ArcSystem trial = expansion_arc_system(G, e, n);
        FillingResult f = is_filling(G, trial);
        if (f.filling) {
            filling_n = n;
            arcs = std::move(trial);
            fill = std::move(f);
            break;
        }
    }
    if (!filling_n)
        throw NotFillingWithinDepth("no filling prefix within depth " + std::to_string(depth) +
                                    " (" + std::to_string(e.steps.size()) + " steps available)");

    TrackedInterval U = agreement_neighborhood_tracked(G, e, *filling_n);
    WanderingCertificate cert{x,          *filling_n,   std::move(e), std::move(arcs),
                              std::move(fill), std::move(U), {}};

    for (const MappingClass& phi : enumerate_twist_classes(G, mcg_bound)) {
        bool ok = wandering_disjoint(G, phi, cert.U);
        cert.checked.push_back({phi, ok});
        if (!ok) {
            std::ostringstream os;
            os << "phi U meets U for the class with images a->" << word_str(phi.images[0])
               << ", b->" << word_str(phi.images[1]);
            throw DisjointnessFailure(os.str());
        }
    }
    return cert;
}

/// Structured record serialization, sufficient for third-party re-checking
/// without recomputing expansions.
inline std::string certificate_records(const WanderingCertificate& cert) {
    std::ostringstream os;
    os << "certificate x=" << cert.x.str() << " prefix=" << cert.prefix_len << "\n";
    os << expansion_transcript(cert.expansion);
    for (size_t i = 0; i < cert.arcs.arcs.size(); ++i) {
        const CuspArc& a = cert.arcs.arcs[i];
        os << "arc=" << i << " from=" << a.from.point.str() << " to=" << a.to.point.str()
           << " self=" << a.self_crossings << "\n";
    }
    for (const CrossingPoint& cp : cert.arcs.crossings)
        os << "crossing a=" << cp.arc_a << " b=" << cp.arc_b << " h=" << cp.h.str()
           << " pos_a=" << cp.pos_a.str() << " pos_b=" << cp.pos_b.str() << "\n";
    for (const auto& [mark, arc, end] : cert.arcs.cusp_cyclic_order)
        os << "cusp_mark=" << mark.str() << " arc=" << arc << " end=" << (end == 0 ? "from" : "to")
           << "\n";
    os << "census V=" << cert.filling.V << " E=" << cert.filling.E << " F=" << cert.filling.F
       << " connected=" << (cert.filling.connected ? 1 : 0)
       << " filling=" << (cert.filling.filling ? 1 : 0) << "\n";
    for (size_t f = 0; f < cert.filling.faces.size(); ++f) {
        os << "face=" << f << " walk=";
        for (size_t k = 0; k < cert.filling.faces[f].size(); ++k)
            os << (k ? "," : "") << cert.filling.faces[f][k];
        os << "\n";
    }
    auto tp = [&](const char* side, const TrackedPoint& t) {
        os << "U_" << side << " kind="
           << (t.kind == TrackedPoint::Kind::Parabolic ? "parabolic" : "fixed")
           << " word=" << word_str(t.word) << " attracting=" << (t.attracting ? 1 : 0)
           << " point=" << t.point.str() << "\n";
    };
    tp("left", cert.U.left);
    tp("right", cert.U.right);
    for (size_t i = 0; i < cert.checked.size(); ++i) {
        const auto& ch = cert.checked[i];
        auto ab = ch.phi.abelianization();
        os << "class=" << i << " a->" << word_str(ch.phi.images[0]) << " b->"
           << word_str(ch.phi.images[1]) << " ab=[" << ab[0] << "," << ab[1] << "," << ab[2] << ","
           << ab[3] << "] orientation=" << ch.phi.orientation
           << " verdict=" << (ch.disjoint ? "disjoint" : "MEETS") << "\n";
    }
    return os.str();
}

}  // namespace rayspace
