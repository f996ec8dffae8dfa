#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cone.hpp"

namespace semitoric {

/// Affine-linear map x -> linear * x + translation of the lattice.
/// Only the linear part acts on cones.
struct GroupElement {
    IntMatrix linear;
    IntVector translation;

    static GroupElement identity(std::size_t r) { return {IntMatrix::identity(r), IntVector(r, 0)}; }

    void check(std::size_t r) const
    {
        if (linear.rows() != r || linear.cols() != r || translation.size() != r) {
            throw invalid_input("malformed group generator: shape does not match rank " + std::to_string(r));
        }
        Integer d = determinant(linear);
        if (d != 1 && d != -1) {
            throw invalid_input("malformed group generator: |det| = " + abs(d).get_str() + " != 1");
        }
    }

    friend bool operator==(const GroupElement& a, const GroupElement& b)
    {
        return a.linear == b.linear && a.translation == b.translation;
    }
};

/// Finite presentation of a locally rational polyhedral decomposition:
/// orbit representatives (relative interiors) plus group generators.
struct Decomposition {
    std::size_t rank = 0;
    std::vector<Cone> members;
    std::vector<GroupElement> group;
    Cone support;                 // closed cone whose rational hull is C_+
    bool support_has_origin = true;
};

// ---------------------------------------------------------------------------
// Support membership

/// x in C_+ where C_+ is the convex hull of the closed support's rational
/// points. Proper faces with irrational generators are excluded; the origin
/// is included exactly when the flag is set.
inline bool in_support(const Cone& support, bool has_origin, const Vector& x)
{
    if (is_zero(x)) {
        return has_origin;
    }
    if (!support.contains_closed(x)) {
        return false;
    }
    if (support.is_rational() || support.contains_relint(x)) {
        return true;
    }
    for (const auto& g : support.generators()) {
        bool on_minimal_face = true;
        for (const auto& u : support.facet_normals()) {
            if (dot(u, x).is_zero() && !dot(u, g).is_zero()) {
                on_minimal_face = false;
                break;
            }
        }
        if (on_minimal_face && !is_rational(g)) {
            return false;
        }
    }
    return true;
}

inline bool in_support(const Decomposition& p, const Vector& x)
{
    return in_support(p.support, p.support_has_origin, x);
}

inline bool same_support(const Decomposition& a, const Decomposition& b)
{
    return a.rank == b.rank && a.support_has_origin == b.support_has_origin && a.support.same_set(b.support);
}

// ---------------------------------------------------------------------------
// Group words

/// Distinct linear parts of all words of length <= depth in the generators
/// and their inverses (identity first).
inline std::vector<IntMatrix> group_words(const std::vector<GroupElement>& gens, std::size_t r, std::size_t depth,
                                          std::size_t limit = 4096)
{
    std::vector<IntMatrix> letters;
    for (const auto& g : gens) {
        letters.push_back(g.linear);
        letters.push_back(unimodular_inverse(g.linear));
    }
    std::vector<IntMatrix> words{IntMatrix::identity(r)};
    std::vector<IntMatrix> frontier = words;
    for (std::size_t d = 0; d < depth; ++d) {
        std::vector<IntMatrix> next;
        for (const auto& w : frontier) {
            for (const auto& l : letters) {
                IntMatrix x = l * w;
                if (std::find(words.begin(), words.end(), x) == words.end()) {
                    words.push_back(x);
                    next.push_back(std::move(x));
                    if (words.size() > limit) {
                        throw resource_error("group word enumeration exceeded " + std::to_string(limit) + " elements");
                    }
                }
            }
        }
        frontier = std::move(next);
        if (frontier.empty()) {
            break;
        }
    }
    return words;
}

/// Members and their translates by words of length <= depth, deduplicated.
inline std::vector<Cone> member_pool(const Decomposition& p, std::size_t depth)
{
    std::vector<Cone> pool;
    std::set<std::string> keys;
    for (const auto& w : group_words(p.group, p.rank, p.group.empty() ? 0 : depth)) {
        for (const auto& m : p.members) {
            Cone c = apply(w, m);
            if (keys.insert(c.key()).second) {
                pool.push_back(std::move(c));
            }
        }
    }
    return pool;
}

// ---------------------------------------------------------------------------
// Covering

namespace detail {

inline std::optional<Vector> uncovered(const Cone& region, std::size_t target, const std::vector<Cone>& pieces,
                                       std::size_t idx)
{
    if (idx == pieces.size()) {
        return region.relint_point();
    }
    const Cone& q = pieces[idx];
    if (q.dim() < target) {
        return uncovered(region, target, pieces, idx + 1);
    }
    std::vector<Vector> prefix;
    for (const auto& u : q.facet_normals()) {
        std::vector<Vector> ineqs = region.facet_normals();
        ineqs.insert(ineqs.end(), prefix.begin(), prefix.end());
        ineqs.push_back(scaled(u, Scalar(-1)));
        Cone piece = Cone::from_inequalities(region.rank(), region.equations(), ineqs);
        if (piece.dim() == target) {
            if (auto w = uncovered(piece, target, pieces, idx + 1)) {
                return w;
            }
        }
        prefix.push_back(u);
    }
    return std::nullopt;
}

} // namespace detail

/// A point of the closed cone `region` outside every closed piece, if any.
/// Exact: recursively subtracts each piece's half-spaces.
inline std::optional<Vector> uncovered_point(const Cone& region, const std::vector<Cone>& pieces)
{
    std::vector<Cone> clipped;
    for (const auto& p : pieces) {
        Cone c = cone_intersection(region.closure(), p.closure());
        if (c.dim() == region.dim()) {
            clipped.push_back(std::move(c));
        }
    }
    return detail::uncovered(region.closure(), region.dim(), clipped, 0);
}

// ---------------------------------------------------------------------------
// Validation

struct ConditionVerdict {
    bool pass = true;
    std::string detail;
    std::vector<std::string> witnesses;

    void fail(std::string w)
    {
        pass = false;
        witnesses.push_back(std::move(w));
    }
};

struct ProbeCertificate {
    Cone probe;
    bool certified = false;
    std::size_t meeting_members = 0;
    std::size_t words_used = 0;
};

struct ValidationReport {
    ConditionVerdict disjoint_cover;   // (i)
    ConditionVerdict rational_spans;   // (ii)
    ConditionVerdict face_closure;     // (iii)
    ConditionVerdict local_finiteness; // (iv)
    std::vector<std::pair<Cone, Cone>> overlaps;
    std::vector<Vector> uncovered_points;
    std::vector<Cone> missing_faces;
    std::vector<ProbeCertificate> probes;

    bool ok() const
    {
        return disjoint_cover.pass && rational_spans.pass && face_closure.pass && local_finiteness.pass;
    }
};

/// The R-span of a cone is defined over Q iff its reduced row echelon basis
/// is rational.
inline bool span_is_rational(const Cone& c)
{
    for (const auto& row : span_basis(c.generators(), c.rank())) {
        if (!is_rational(row)) {
            return false;
        }
    }
    return true;
}

namespace detail {

inline bool face_on_support_boundary(const Cone& support, const Cone& face)
{
    for (const auto& u : support.facet_normals()) {
        bool all_zero = std::all_of(face.generators().begin(), face.generators().end(),
                                    [&](const Vector& g) { return dot(u, g).is_zero(); });
        if (all_zero) {
            return true;
        }
    }
    return false;
}

inline std::optional<std::size_t> find_key(const std::vector<Cone>& pool, const std::string& key)
{
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (pool[i].key() == key) {
            return i;
        }
    }
    return std::nullopt;
}

inline ProbeCertificate certify_probe(const Decomposition& p, const Cone& probe, std::size_t max_depth)
{
    ProbeCertificate cert{probe.closure()};
    const Cone region = probe.closure();
    std::size_t depth = p.group.empty() ? 0 : 1;
    while (true) {
        auto words = group_words(p.group, p.rank, depth);
        std::vector<Cone> meeting;
        std::set<std::string> keys;
        for (const auto& w : words) {
            for (const auto& m : p.members) {
                Cone c = apply(w, m);
                if (!keys.insert(c.key()).second) {
                    continue;
                }
                Cone i = cone_intersection(region, c.closure());
                if (c.contains_relint(i.relint_point())) {
                    meeting.push_back(std::move(c));
                }
            }
        }
        cert.meeting_members = meeting.size();
        cert.words_used = words.size();
        if (p.group.empty()) {
            cert.certified = true;
            return cert;
        }
        if (!uncovered_point(region, meeting)) {
            cert.certified = true;
            return cert;
        }
        if (depth >= max_depth) {
            return cert;
        }
        depth *= 2;
    }
}

} // namespace detail

/// Checks conditions (i)-(iv) of a locally rational polyhedral decomposition
/// on the representatives extended by one shell of group translates;
/// condition (iv) is certified per probe by exhibiting a finite meeting set
/// whose closures cover the probe.
inline ValidationReport validate_decomposition(const Decomposition& p, const std::vector<Cone>& probes = {},
                                               std::size_t max_probe_depth = 64)
{
    for (const auto& g : p.group) {
        g.check(p.rank);
    }
    if (p.support.rank() != p.rank) {
        throw invalid_input("support rank does not match decomposition rank");
    }
    ValidationReport rep;
    const auto pool = member_pool(p, 1);

    // (i) members inside C_+, pairwise disjoint, covering C_+.
    for (const auto& m : p.members) {
        if (m.rank() != p.rank) {
            throw invalid_input("member " + m.str() + " has wrong rank");
        }
        if (!m.is_strongly_convex()) {
            rep.disjoint_cover.fail("member " + m.str() + " is not strongly convex");
            continue;
        }
        bool inside = in_support(p, m.relint_point()) &&
                      std::all_of(m.generators().begin(), m.generators().end(),
                                  [&](const Vector& g) { return p.support.contains_closed(g); });
        if (!inside) {
            rep.disjoint_cover.fail("member " + m.str() + " is not contained in the support");
        }
    }
    for (std::size_t i = 0; i < p.members.size(); ++i) {
        const Cone& a = p.members[i];
        for (const auto& b : pool) {
            if (b.key() == a.key()) {
                continue;
            }
            bool earlier_rep = false;
            for (std::size_t j = 0; j < i; ++j) {
                if (p.members[j].key() == b.key()) {
                    earlier_rep = true;
                }
            }
            if (earlier_rep) {
                continue;
            }
            if (relints_meet(a, b)) {
                rep.overlaps.emplace_back(a, b);
                rep.disjoint_cover.fail("overlap: " + a.str() + " and " + b.str());
            }
        }
    }
    const std::size_t sdim = p.support.dim();
    std::vector<Cone> full;
    for (const auto& c : pool) {
        if (c.dim() == sdim) {
            full.push_back(c);
        }
    }
    if (full.empty() && sdim > 0) {
        rep.disjoint_cover.fail("no member of full dimension " + std::to_string(sdim));
    } else if (p.group.empty()) {
        if (auto w = uncovered_point(p.support, full)) {
            rep.uncovered_points.push_back(*w);
            rep.disjoint_cover.fail("support point " + to_string(*w) + " lies in no member closure");
        }
    } else {
        // Pseudo-manifold criterion on representatives plus one shell: every
        // interior wall is shared with a cone on the other side.
        for (const auto& m : p.members) {
            if (m.dim() != sdim) {
                continue;
            }
            Cone cl = m.closure();
            for (const auto& u : cl.facet_normals()) {
                std::vector<Vector> wall;
                for (const auto& g : cl.generators()) {
                    if (dot(u, g).is_zero()) {
                        wall.push_back(g);
                    }
                }
                Cone f(p.rank, wall);
                if (detail::face_on_support_boundary(p.support, f)) {
                    continue;
                }
                bool glued = std::any_of(full.begin(), full.end(), [&](const Cone& other) {
                    if (other.key() == m.key()) {
                        return false;
                    }
                    bool contains_wall = std::all_of(f.generators().begin(), f.generators().end(),
                                                     [&](const Vector& g) { return other.contains_closed(g); });
                    bool other_side = std::any_of(other.generators().begin(), other.generators().end(),
                                                  [&](const Vector& g) { return dot(u, g).sign() < 0; });
                    return contains_wall && other_side;
                });
                if (!glued) {
                    rep.uncovered_points.push_back(f.relint_point());
                    rep.disjoint_cover.fail("wall " + f.str() + " of " + m.str() + " has no neighbour");
                }
            }
        }
    }
    // Relative interiors of faces lying in C_+ must be covered by some member.
    for (const auto& m : p.members) {
        if (!m.is_strongly_convex()) {
            continue;
        }
        for (const auto& f : faces(m.closure())) {
            Vector x = f.relint_point();
            if (!in_support(p, x)) {
                continue;
            }
            bool covered = std::any_of(pool.begin(), pool.end(), [&](const Cone& c) { return c.contains_relint(x); });
            if (!covered) {
                rep.uncovered_points.push_back(x);
                rep.disjoint_cover.fail("point " + to_string(x) + " lies in no member");
            }
        }
    }

    // (ii)
    for (const auto& m : p.members) {
        if (!span_is_rational(m)) {
            rep.rational_spans.fail("span of " + m.str() + " is not defined over Q");
        }
    }

    // (iii)
    std::set<std::string> reported;
    for (const auto& m : p.members) {
        if (!m.is_strongly_convex()) {
            continue;
        }
        for (const auto& f : faces(m.closure())) {
            if (!in_support(p, f.relint_point())) {
                continue;
            }
            Cone ri = f.relint();
            if (detail::find_key(pool, ri.key())) {
                continue;
            }
            if (reported.insert(ri.key()).second) {
                rep.missing_faces.push_back(ri);
                rep.face_closure.fail("face " + ri.str() + " of " + m.str() + " is not a member");
            }
        }
    }

    // (iv)
    for (const auto& probe : probes) {
        if (probe.rank() != p.rank || !probe.is_rational()) {
            rep.local_finiteness.fail("probe " + probe.str() + " is not a rational cone of rank " +
                                      std::to_string(p.rank));
            continue;
        }
        bool inside = std::all_of(probe.generators().begin(), probe.generators().end(),
                                  [&](const Vector& g) { return in_support(p, g); }) &&
                      in_support(p, probe.relint_point());
        if (!inside) {
            rep.local_finiteness.fail("probe " + probe.str() + " is not contained in the support");
            continue;
        }
        auto cert = detail::certify_probe(p, probe, max_probe_depth);
        if (!cert.certified) {
            rep.local_finiteness.fail("probe " + probe.str() + " not certified within word depth " +
                                      std::to_string(max_probe_depth));
        }
        rep.probes.push_back(std::move(cert));
    }
    rep.local_finiteness.detail = std::to_string(rep.probes.size()) + " probe(s) certified";
    return rep;
}

// ---------------------------------------------------------------------------
// Constructions and predicates

/// Relative interiors of all nonempty faces of the support. An irrational
/// support has no proper rational faces: only its interior (and the origin
/// when flagged) are members.
inline Decomposition sbb_decomposition(const Cone& support, bool has_origin = true)
{
    Decomposition d;
    d.rank = support.rank();
    d.support = support.closure();
    d.support_has_origin = has_origin;
    if (!support.is_rational()) {
        d.members.push_back(support.relint());
        if (has_origin) {
            d.members.push_back(Cone::zero(d.rank, ConeKind::relative_interior));
        }
        return d;
    }
    if (!support.is_strongly_convex()) {
        throw invalid_input("sbb_decomposition: support is not strongly convex");
    }
    for (const auto& f : faces(support.closure())) {
        if (f.dim() == 0 && !has_origin) {
            continue;
        }
        d.members.push_back(f.relint());
    }
    return d;
}

inline bool is_mumford_type(const Decomposition& p)
{
    return std::all_of(p.members.begin(), p.members.end(), [&](const Cone& c) {
        return c.is_rational() && is_unimodular_part_of_basis(c.closure(), p.rank);
    });
}

struct Stratum {
    Cone cone;
    std::size_t complex_dim = 0;
    std::size_t dlp_dim = 0;
};

/// Stratum D(sigma) has complex dimension r - dim(sigma); its distinguished
/// limit points form a real torus of dimension r - k with k = dim(sigma).
inline std::vector<Stratum> strata(const Decomposition& p)
{
    std::vector<Stratum> out;
    for (const auto& c : p.members) {
        std::size_t k = c.dim();
        out.push_back({c, p.rank - k, p.rank - k});
    }
    return out;
}

/// Coordinate chart (D_sigma / L)^- for a unimodular member.
struct Chart {
    Cone cone;
    std::size_t k = 0;
    std::size_t r = 0;
    IntMatrix basis; // rows l^1..l^r, the first k generate the cone
    std::vector<std::string> coordinates;

    std::string open_set() const
    {
        std::string s = "{w in C^" + std::to_string(r) + " : ";
        for (std::size_t j = 0; j < r; ++j) {
            s += (j ? ", " : "") + std::string(j < k ? "0<|" : "|") + coordinates[j] + (j < k ? "|<1" : "|=1");
        }
        return s + "}";
    }

    std::string closure_set() const
    {
        std::string s = "{w in C^" + std::to_string(r) + " : ";
        for (std::size_t j = 0; j < r; ++j) {
            s += (j ? ", " : "") + std::string(j < k ? "0<=|" : "|") + coordinates[j] + (j < k ? "|<1" : "|=1");
        }
        return s + "}";
    }

    /// Distinguished limit points: w_j = 0 for j <= k.
    std::string distinguished_limit_points() const
    {
        std::string s = "{";
        for (std::size_t j = 0; j < r; ++j) {
            s += (j ? ", " : "") + coordinates[j] + (j < k ? "=0" : " in S^1");
        }
        return s + "}";
    }
};

/// Extends the (unimodular) generators of a cone to a Z-basis of Z^r.
inline IntMatrix complete_to_basis(const std::vector<IntVector>& gens, std::size_t r)
{
    if (gens.empty()) {
        return IntMatrix::identity(r);
    }
    IntMatrix g = IntMatrix::from_rows(gens, r);
    auto h = hermite_normal_form(g.transpose());
    // U G^T = [I_k; 0]  =>  G U^T = [I_k | 0]  =>  G = [I_k | 0] (U^T)^{-1}
    for (std::size_t i = 0; i < gens.size(); ++i) {
        for (std::size_t j = 0; j < gens.size(); ++j) {
            if (h.H(i, j) != (i == j ? 1 : 0)) {
                throw invalid_input("generators are not part of a lattice basis");
            }
        }
    }
    return unimodular_inverse(h.U.transpose());
}

inline Chart chart_for(const Cone& c)
{
    if (!c.is_rational() || !is_unimodular_part_of_basis(c.closure(), c.rank())) {
        throw invalid_input("chart_for: cone " + c.str() + " is not generated by part of a lattice basis");
    }
    std::vector<IntVector> gens;
    for (const auto& g : c.generators()) {
        gens.push_back(primitive(to_qvector(g)));
    }
    Chart ch{c, gens.size(), c.rank(), complete_to_basis(gens, c.rank()), {}};
    for (std::size_t j = 0; j < ch.r; ++j) {
        ch.coordinates.push_back("w" + std::to_string(j + 1));
    }
    return ch;
}

/// Every member of `fine` lies in some member of `coarse` (up to one shell of
/// the coarse group). A refinement induces a dominant morphism of the
/// compactifications; only the verdict is reported.
struct RefinementVerdict {
    bool refines = true;
    std::optional<Cone> witness; // fine member contained in no coarse member
};

inline RefinementVerdict refinement_check(const Decomposition& fine, const Decomposition& coarse)
{
    if (!same_support(fine, coarse)) {
        throw invalid_input("is_refinement: support mismatch");
    }
    auto pool = member_pool(coarse, 1);
    for (const auto& f : fine.members) {
        bool inside = std::any_of(pool.begin(), pool.end(), [&](const Cone& c) { return relint_contained(f, c); });
        if (!inside) {
            return {false, f};
        }
    }
    return {};
}

inline bool is_refinement(const Decomposition& fine, const Decomposition& coarse)
{
    return refinement_check(fine, coarse).refines;
}

inline bool same_group(const std::vector<GroupElement>& a, const std::vector<GroupElement>& b)
{
    auto contains_all = [](const std::vector<GroupElement>& x, const std::vector<GroupElement>& y) {
        return std::all_of(y.begin(), y.end(),
                           [&](const GroupElement& g) { return std::find(x.begin(), x.end(), g) != x.end(); });
    };
    return contains_all(a, b) && contains_all(b, a);
}

/// Nonempty relative interiors of pairwise intersections of members.
inline Decomposition common_refinement(const Decomposition& a, const Decomposition& b)
{
    if (!same_support(a, b)) {
        throw invalid_input("common_refinement: support mismatch");
    }
    if (!same_group(a.group, b.group)) {
        throw invalid_input("common_refinement: incompatible group actions");
    }
    Decomposition out;
    out.rank = a.rank;
    out.support = a.support;
    out.support_has_origin = a.support_has_origin;
    out.group = a.group;
    auto others = member_pool(b, 1);
    auto words = group_words(out.group, out.rank, out.group.empty() ? 0 : 1);
    std::set<std::string> keys;
    for (const auto& x : a.members) {
        for (const auto& y : others) {
            Cone i = cone_intersection(x.closure(), y.closure());
            Vector pt = i.relint_point();
            if (!x.contains_relint(pt) || !y.contains_relint(pt)) {
                continue;
            }
            Cone ri = i.relint();
            bool dup = std::any_of(words.begin(), words.end(),
                                   [&](const IntMatrix& w) { return keys.count(apply(w, ri).key()) > 0; });
            if (!dup) {
                keys.insert(ri.key());
                out.members.push_back(std::move(ri));
            }
        }
    }
    std::sort(out.members.begin(), out.members.end(), [](const Cone& x, const Cone& y) {
        return x.dim() != y.dim() ? x.dim() < y.dim() : x.key() < y.key();
    });
    return out;
}

/// Member sets agree up to the group action (one shell).
inline bool same_members(const Decomposition& a, const Decomposition& b)
{
    if (!same_support(a, b) || !same_group(a.group, b.group)) {
        return false;
    }
    auto pa = member_pool(a, 1);
    auto pb = member_pool(b, 1);
    auto covered = [](const std::vector<Cone>& reps, const std::vector<Cone>& pool) {
        return std::all_of(reps.begin(), reps.end(), [&](const Cone& c) {
            return std::any_of(pool.begin(), pool.end(), [&](const Cone& d) { return d.key() == c.key(); });
        });
    };
    return covered(a.members, pb) && covered(b.members, pa);
}

struct AdmissibilityVerdict {
    bool certified = false;
    std::optional<Vector> witness; // probe point covered by no translate of Pi
};

/// Checks a supplied covering certificate: the translates g.Pi (g in the
/// certificate, identity always included) cover the probe region.
inline AdmissibilityVerdict admissibility_check(std::size_t rank, const Cone& support, bool has_origin,
                                                const std::vector<GroupElement>& generators, const Cone& pi,
                                                const std::vector<GroupElement>& certificate, const Cone& probe)
{
    for (const auto& g : generators) {
        g.check(rank);
    }
    if (!pi.is_rational()) {
        throw invalid_input("admissibility_check: Pi must be rational polyhedral");
    }
    for (const auto& g : pi.generators()) {
        if (!in_support(support, has_origin || is_zero(g), g)) {
            throw invalid_input("admissibility_check: Pi is not contained in the support");
        }
    }
    if (!in_support(support, true, pi.relint_point())) {
        throw invalid_input("admissibility_check: Pi is not contained in the support");
    }
    std::vector<Cone> pieces{pi.closure()};
    for (const auto& g : certificate) {
        g.check(rank);
        pieces.push_back(apply(g.linear, pi.closure()));
    }
    AdmissibilityVerdict v;
    v.witness = uncovered_point(probe, pieces);
    v.certified = !v.witness.has_value();
    return v;
}

} // namespace semitoric
