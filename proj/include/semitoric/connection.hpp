#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cusp.hpp"
#include "decomposition.hpp"

namespace semitoric {

/// A maximal-depth normal crossing point: row j of the frame expresses the
/// flat section alpha_j in the basis d log v_k.
struct MaxDepthPoint {
    std::string id;
    QMatrix frame;
};

struct BoundaryAtlas {
    std::size_t rank = 0;
    bool coverage = true; // every boundary component has a maximal-depth point
    std::vector<MaxDepthPoint> points;
    std::vector<GroupElement> monodromy;
};

struct LocalLattice {
    std::vector<QVector> basis; // l^1, ..., l^r
    Cone cone;                  // relint <l^1, ..., l^r>
};

/// The dual basis to the rows of A_p: l^i is column i of A_p^{-1}.
inline LocalLattice local_lattice(const MaxDepthPoint& p)
{
    if (!p.frame.is_square() || p.frame.rows() == 0) {
        throw invalid_input("frame of point '" + p.id + "' is not square");
    }
    QMatrix inv;
    try {
        inv = inverse(p.frame);
    } catch (const invalid_input&) {
        throw invalid_input("frame of point '" + p.id + "' is singular");
    }
    LocalLattice out;
    std::vector<Vector> gens;
    for (std::size_t i = 0; i < inv.cols(); ++i) {
        out.basis.push_back(inv.col(i));
        gens.push_back(to_vector(out.basis.back()));
    }
    out.cone = Cone(p.frame.rows(), gens, ConeKind::relative_interior);
    return out;
}

// ---------------------------------------------------------------------------
// Rational lattices in Q^r, held in canonical Hermite form.

/// Canonical basis (nonzero HNF rows) of the Z-span of rational vectors.
inline QMatrix lattice_hnf(const std::vector<QVector>& vs, std::size_t r)
{
    Integer den = 1;
    for (const auto& v : vs) {
        for (const auto& x : v) {
            den = lcm(den, x.get_den());
        }
    }
    IntMatrix m(vs.size(), r);
    for (std::size_t i = 0; i < vs.size(); ++i) {
        for (std::size_t j = 0; j < r; ++j) {
            Rational s = vs[i][j] * Rational(den);
            m(i, j) = s.get_num();
        }
    }
    if (m.is_zero()) {
        return QMatrix(0, r);
    }
    IntMatrix b = lattice_basis(m);
    QMatrix out = to_rational(b);
    for (std::size_t i = 0; i < out.rows(); ++i) {
        for (std::size_t j = 0; j < r; ++j) {
            out(i, j) /= Rational(den);
        }
    }
    return out;
}

/// Covolume of a full-rank lattice basis.
inline Rational covolume(const QMatrix& basis)
{
    if (!basis.is_square()) {
        return 0;
    }
    return abs(determinant(basis));
}

inline std::vector<QVector> rows_of(const QMatrix& m) { return m.row_list(); }

// ---------------------------------------------------------------------------
// Compatibility

struct CompatibilityReport {
    ConditionVerdict coverage;     // (1) recorded flag
    ConditionVerdict common_lattice; // (2)
    ConditionVerdict fundamental_group; // (3) surrogate check
    ConditionVerdict decomposition; // (4)
    std::optional<Integer> index_witness;
    QMatrix lattice;
    std::optional<ValidationReport> validation;

    bool ok() const
    {
        return coverage.pass && common_lattice.pass && fundamental_group.pass && decomposition.pass;
    }
};

class incompatible_atlas : public error {
public:
    incompatible_atlas(const std::string& what, CompatibilityReport rep) : error(what), report(std::move(rep)) {}
    CompatibilityReport report;
};

namespace detail {

inline bool is_identity(const IntMatrix& m) { return m == IntMatrix::identity(m.rows()); }

inline std::vector<GroupElement> linear_generators(const BoundaryAtlas& a)
{
    std::vector<GroupElement> out;
    for (const auto& g : a.monodromy) {
        if (!is_identity(g.linear)) {
            out.push_back({g.linear, IntVector(a.rank, 0)});
        }
    }
    return out;
}

/// Support of the reconstructed fan: hull of the orbit of the local cones
/// for a finite linear group, or the eigen-cone of one hyperbolic rank-2
/// generator.
inline std::pair<Cone, bool> reconstructed_support(std::size_t r, const std::vector<LocalLattice>& locals,
                                                   const std::vector<GroupElement>& linear)
{
    std::vector<IntMatrix> words;
    bool finite = true;
    try {
        words = group_words(linear, r, 24, 512);
        auto longer = group_words(linear, r, 25, 512);
        finite = longer.size() == words.size();
    } catch (const resource_error&) {
        finite = false;
    }
    if (finite) {
        std::vector<Vector> gens;
        for (const auto& w : words) {
            for (const auto& l : locals) {
                for (const auto& g : l.cone.generators()) {
                    gens.push_back(apply(w, Cone(r, {g})).generators()[0]);
                }
            }
        }
        return {Cone(r, gens), true};
    }
    if (r == 2 && linear.size() == 1) {
        IntVector inside = primitive(to_qvector(locals.front().cone.relint_point()));
        return {eigen_support(linear.front().linear, inside), false};
    }
    throw invalid_input("cannot determine the support cone for this monodromy group");
}

/// Relative interiors of the faces of the local cones, one per group orbit.
inline Decomposition assemble(std::size_t r, const std::vector<LocalLattice>& locals,
                              const std::vector<GroupElement>& linear, const Cone& support, bool origin)
{
    Decomposition d;
    d.rank = r;
    d.support = support;
    d.support_has_origin = origin;
    d.group = linear;
    auto words = group_words(linear, r, linear.empty() ? 0 : 1);
    std::set<std::string> keys;
    for (const auto& l : locals) {
        for (const auto& f : faces(l.cone.closure())) {
            if (!in_support(support, origin, f.relint_point())) {
                continue;
            }
            Cone ri = f.relint();
            bool seen = std::any_of(words.begin(), words.end(),
                                    [&](const IntMatrix& w) { return keys.count(apply(w, ri).key()) > 0; });
            if (!seen) {
                keys.insert(ri.key());
                d.members.push_back(ri);
            }
        }
    }
    std::sort(d.members.begin(), d.members.end(), [](const Cone& a, const Cone& b) {
        return a.dim() != b.dim() ? a.dim() < b.dim() : a.key() < b.key();
    });
    return d;
}

} // namespace detail

/// Combinatorial surrogate of compatibility: (1) the caller's coverage flag,
/// (2) equal local lattices, (3) translations generate exactly L and linear
/// parts act faithfully and preserve L, (4) the faces of the sigma_p form a
/// valid decomposition (the sigma_p closures serve as probes).
inline CompatibilityReport compatibility_check(const BoundaryAtlas& atlas)
{
    CompatibilityReport rep;
    if (atlas.points.empty()) {
        throw invalid_input("atlas has no points");
    }
    const std::size_t r = atlas.rank;
    for (const auto& g : atlas.monodromy) {
        g.check(r);
    }
    rep.coverage.detail = atlas.coverage ? "recorded: every component has a maximal-depth point" : "recorded: no";
    if (!atlas.coverage) {
        rep.coverage.fail("coverage flag not set");
    }

    std::vector<LocalLattice> locals;
    for (const auto& p : atlas.points) {
        if (p.frame.rows() != r) {
            throw invalid_input("frame of point '" + p.id + "' has size " + std::to_string(p.frame.rows()) +
                                ", expected " + std::to_string(r));
        }
        locals.push_back(local_lattice(p));
    }

    // (2) every L_p agrees with L_{p_0} and with the lattice of pure translations
    std::vector<QVector> translations;
    for (const auto& g : atlas.monodromy) {
        if (detail::is_identity(g.linear)) {
            translations.push_back(QVector(g.translation.begin(), g.translation.end()));
        }
    }
    rep.lattice = lattice_hnf(locals[0].basis, r);
    Integer worst = 1;
    auto compare = [&](const QMatrix& li, const std::string& name) {
        if (li == rep.lattice) {
            return;
        }
        std::vector<QVector> both = rows_of(rep.lattice);
        for (const auto& row : rows_of(li)) {
            both.push_back(row);
        }
        Rational s = covolume(lattice_hnf(both, r));
        Integer idx = std::max(Rational(covolume(rep.lattice) / s).get_num(), Rational(covolume(li) / s).get_num());
        worst = std::max(worst, idx);
        rep.common_lattice.fail(name + " differs from L_" + atlas.points[0].id + " (index " + idx.get_str() + ")");
    };
    for (std::size_t i = 1; i < locals.size(); ++i) {
        compare(lattice_hnf(locals[i].basis, r), "L_" + atlas.points[i].id);
    }
    QMatrix tl;
    if (!translations.empty()) {
        tl = lattice_hnf(translations, r);
        if (tl.rows() == r) {
            compare(tl, "the translation lattice");
        }
    }
    if (!rep.common_lattice.pass) {
        rep.index_witness = worst;
    }

    // (3)
    rep.fundamental_group.detail = "surrogate check";
    if (translations.empty() || tl != rep.lattice) {
        rep.fundamental_group.fail("translations do not generate the common lattice");
    }
    for (const auto& g : atlas.monodromy) {
        if (detail::is_identity(g.linear)) {
            continue;
        }
        std::vector<QVector> image;
        QMatrix lin = to_rational(g.linear);
        for (const auto& row : rows_of(rep.lattice)) {
            image.push_back(lin * row);
        }
        if (lattice_hnf(image, r) != rep.lattice) {
            rep.fundamental_group.fail("linear part does not preserve the common lattice");
        }
    }
    auto linear = detail::linear_generators(atlas);
    for (std::size_t i = 0; i < linear.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (linear[i].linear == linear[j].linear) {
                rep.fundamental_group.fail("two generators act by the same linear map");
            }
        }
    }

    // (4)
    try {
        auto [support, origin] = detail::reconstructed_support(r, locals, linear);
        if (!support.is_strongly_convex()) {
            rep.decomposition.fail("support cone is not strongly convex");
        } else {
            Decomposition d = detail::assemble(r, locals, linear, support, origin);
            std::vector<Cone> probes;
            for (const auto& l : locals) {
                probes.push_back(l.cone.closure());
            }
            for (const auto& l : locals) {
                for (const auto& m : d.members) {
                    for (const auto& w : group_words(linear, r, linear.empty() ? 0 : 1)) {
                        Cone img = apply(w, m);
                        if (img.key() != l.cone.key() && relints_meet(img, l.cone)) {
                            rep.decomposition.fail("sigma cones overlap: " + l.cone.str() + " and " + img.str());
                        }
                    }
                }
            }
            rep.validation = validate_decomposition(d, probes);
            if (!rep.validation->ok()) {
                for (const auto* c : {&rep.validation->disjoint_cover, &rep.validation->rational_spans,
                                      &rep.validation->face_closure, &rep.validation->local_finiteness}) {
                    for (const auto& w : c->witnesses) {
                        rep.decomposition.fail(w);
                    }
                }
            }
        }
    } catch (const invalid_input& e) {
        rep.decomposition.fail(e.what());
    }
    return rep;
}

struct Reconstruction {
    QMatrix lattice;
    Cone support;
    bool support_has_origin = true;
    Decomposition fan;
    std::vector<GroupElement> gamma;      // translations and linear generators
    bool gamma0_nontrivial = false;       // some generator has a nontrivial linear part
};

/// (L, C_+, P, Gamma) from a compatible atlas, in reference coordinates.
inline Reconstruction reconstruct(const BoundaryAtlas& atlas)
{
    CompatibilityReport rep = compatibility_check(atlas);
    if (!rep.ok()) {
        throw incompatible_atlas("atlas is not compatible", rep);
    }
    const std::size_t r = atlas.rank;
    std::vector<LocalLattice> locals;
    for (const auto& p : atlas.points) {
        locals.push_back(local_lattice(p));
    }
    auto linear = detail::linear_generators(atlas);
    auto [support, origin] = detail::reconstructed_support(r, locals, linear);
    Reconstruction out{rep.lattice, support, origin, detail::assemble(r, locals, linear, support, origin),
                       atlas.monodromy, !linear.empty()};
    return out;
}

/// One point per full-dimensional simplicial member (frame = inverse of the
/// generator columns), translations e_1..e_r plus the group generators.
inline BoundaryAtlas atlas_from_fan(const Decomposition& fan)
{
    BoundaryAtlas a;
    a.rank = fan.rank;
    std::size_t idx = 0;
    for (const auto& m : fan.members) {
        if (m.dim() != fan.rank) {
            continue;
        }
        if (m.generators().size() != fan.rank || !m.is_rational()) {
            throw invalid_input("atlas_from_fan: member " + m.str() + " is not rational simplicial");
        }
        std::vector<QVector> cols;
        for (const auto& g : m.generators()) {
            QVector q;
            for (const auto& x : primitive(to_qvector(g))) {
                q.emplace_back(x);
            }
            cols.push_back(q);
        }
        a.points.push_back({"p" + std::to_string(idx++), inverse(QMatrix::from_columns(cols))});
    }
    for (std::size_t i = 0; i < fan.rank; ++i) {
        IntVector e(fan.rank, 0);
        e[i] = 1;
        a.monodromy.push_back({IntMatrix::identity(fan.rank), e});
    }
    for (const auto& g : fan.group) {
        a.monodromy.push_back(g);
    }
    return a;
}

/// Action on the flat frame d log w_j: pullback by g, i.e. the transpose.
/// Contravariant: transform(g h) = transform(h) transform(g).
inline IntMatrix flat_frame_transform(const IntMatrix& g)
{
    if (!g.is_square()) {
        throw invalid_input("flat_frame_transform: matrix is not square");
    }
    Integer d = determinant(g);
    if (d != 1 && d != -1) {
        throw invalid_input("flat_frame_transform: |det| = " + abs(d).get_str() + " != 1");
    }
    return g.transpose();
}

/// Developing map on a chart: log coordinates (log w_1, ..., log w_r) relative
/// to a basepoint, sent to sum_i (log w_i - base_i) l^i in E*.
inline QVector develop(const LocalLattice& chart, const QVector& log_coords, const QVector& base)
{
    std::size_t r = chart.basis.size();
    QVector out(r, Rational(0));
    for (std::size_t i = 0; i < r; ++i) {
        Rational c = log_coords[i] - base[i];
        for (std::size_t k = 0; k < r; ++k) {
            out[k] += c * chart.basis[i][k];
        }
    }
    return out;
}

/// Linear part M of the transition between the developments of two charts,
/// coordinates of chart p to coordinates of chart q.
inline QMatrix transition(const LocalLattice& p, const LocalLattice& q)
{
    QMatrix lp = QMatrix::from_columns(p.basis);
    QMatrix lq = QMatrix::from_columns(q.basis);
    return inverse(lq) * lp;
}

// ---------------------------------------------------------------------------
// Non-descent witness

/// Finite Laurent polynomial in one variable with integer exponents.
using Laurent = std::map<long, Rational>;

inline Laurent derivative(const Laurent& f)
{
    Laurent out;
    for (const auto& [e, c] : f) {
        if (e != 0) {
            out[e - 1] += c * Rational(e);
        }
    }
    std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
    return out;
}

/// tau -> (a tau + b)/(c tau + d), restricted to affine maps (c = 0) and
/// inversions (d = 0), the cases whose derivative is a Laurent monomial.
struct Mobius {
    Rational a, b, c, d;
};

struct NondescentRecord {
    Laurent pullback;   // g with phi^*(d tau) = g(tau) d tau
    Laurent covariant;  // nabla(g d tau) = g'(tau) d tau (x) d tau
    Rational coefficient = 0;
    long pole_order = 0;
    bool vanishes = true;
};

inline NondescentRecord flat_derivative_of_pullback(const Mobius& m)
{
    Rational det = m.a * m.d - m.b * m.c;
    if (det == 0) {
        throw invalid_input("degenerate Mobius transformation");
    }
    NondescentRecord rec;
    if (m.c == 0) {
        rec.pullback[0] = m.a / m.d;
    } else if (m.d == 0) {
        rec.pullback[-2] = det / (m.c * m.c);
    } else {
        throw invalid_input("pullback is not a Laurent polynomial in tau");
    }
    rec.covariant = derivative(rec.pullback);
    rec.vanishes = rec.covariant.empty();
    if (!rec.vanishes) {
        auto [e, c] = *rec.covariant.begin();
        rec.pole_order = -e;
        rec.coefficient = c;
    }
    return rec;
}

/// The inversion tau -> -1/tau: nabla(tau^-2 d tau) = -2 tau^-3 d tau (x) d tau.
inline NondescentRecord nondescent_witness()
{
    NondescentRecord rec = flat_derivative_of_pullback({0, -1, 1, 0});
    if (rec.vanishes || rec.coefficient != -2 || rec.pole_order != 3) {
        throw error("non-descent witness failed to reproduce -2 tau^-3");
    }
    return rec;
}

} // namespace semitoric
