#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace semitoric {

/// Largest ambient rank handled by the exact facet enumeration.
inline constexpr std::size_t max_cone_rank = 4;

// ---------------------------------------------------------------------------
// Vector helpers

inline Vector to_vector(const IntVector& v) { return Vector(v.begin(), v.end()); }

inline Vector to_vector(const QVector& v) { return Vector(v.begin(), v.end()); }

inline bool is_rational(const Vector& v)
{
    return std::all_of(v.begin(), v.end(), [](const Scalar& x) { return x.is_rational(); });
}

inline bool is_zero(const Vector& v)
{
    return std::all_of(v.begin(), v.end(), [](const Scalar& x) { return x.is_zero(); });
}

inline QVector to_qvector(const Vector& v)
{
    QVector out;
    out.reserve(v.size());
    for (const auto& x : v) {
        if (!x.is_rational()) {
            throw invalid_input("vector has irrational entries");
        }
        out.push_back(x.rational_part());
    }
    return out;
}

/// The primitive integer vector on the ray through a nonzero rational vector.
inline IntVector primitive(const QVector& v)
{
    Integer den = 1;
    for (const auto& x : v) {
        den = lcm(den, x.get_den());
    }
    IntVector out;
    Integer g = 0;
    for (const auto& x : v) {
        Integer z = x.get_num() * (den / x.get_den());
        g = gcd(g, z);
        out.push_back(z);
    }
    if (g == 0) {
        throw invalid_input("zero vector has no primitive representative");
    }
    for (auto& z : out) {
        z /= g;
    }
    return out;
}

inline IntVector primitive(const IntVector& v)
{
    return primitive(QVector(v.begin(), v.end()));
}

/// Positive rescaling to a canonical representative of the ray.
inline Vector normalize_ray(const Vector& v)
{
    if (is_rational(v)) {
        return to_vector(primitive(to_qvector(v)));
    }
    for (const auto& x : v) {
        if (!x.is_zero()) {
            Scalar s = x.sign() > 0 ? x : -x;
            Vector out;
            for (const auto& y : v) {
                out.push_back(y / s);
            }
            return out;
        }
    }
    throw invalid_input("zero vector has no ray");
}

inline bool lex_less(const Vector& a, const Vector& b)
{
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        if (a[i] != b[i]) {
            return a[i] < b[i];
        }
    }
    return a.size() < b.size();
}

inline std::string to_string(const Vector& v)
{
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? "," : "") + v[i].str();
    }
    return s + ")";
}

inline Vector operator+(const Vector& a, const Vector& b)
{
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] + b[i];
    }
    return out;
}

inline Vector scaled(const Vector& a, const Scalar& s)
{
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] * s;
    }
    return out;
}

template <typename F>
void for_each_subset(std::size_t n, std::size_t k, F&& f)
{
    if (k > n) {
        return;
    }
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) {
        idx[i] = i;
    }
    while (true) {
        f(idx);
        if (k == 0) {
            return;
        }
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) {
            --i;
        }
        if (i == 0) {
            return;
        }
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

enum class ConeKind { closed, relative_interior };

namespace detail {

struct HRep {
    std::vector<Vector> equations;   // e.x == 0
    std::vector<Vector> inequalities; // u.x >= 0
    std::size_t dim = 0;
};

inline void check_rank(std::size_t r)
{
    if (r == 0) {
        throw invalid_input("ambient rank must be positive");
    }
    if (r > max_cone_rank) {
        throw unsupported_rank("ambient rank " + std::to_string(r) + " exceeds supported bound " +
                               std::to_string(max_cone_rank));
    }
}

inline void push_unique_ray(std::vector<Vector>& out, const Vector& v)
{
    Vector n = normalize_ray(v);
    for (const auto& w : out) {
        if (w == n) {
            return;
        }
    }
    out.push_back(std::move(n));
}

/// Facet description of cone(gens) by brute force over spanning subsets.
inline HRep facets_of(std::size_t r, const std::vector<Vector>& gens)
{
    HRep h;
    auto span = span_basis(gens, r);
    h.dim = span.size();
    h.equations = orthogonal_complement(span, r);
    if (h.dim == 0) {
        return h;
    }
    for_each_subset(gens.size(), h.dim - 1, [&](const std::vector<std::size_t>& idx) {
        std::vector<Vector> rows;
        for (auto i : idx) {
            rows.push_back(gens[i]);
        }
        if (rank_of(rows, r) != idx.size()) {
            return;
        }
        rows.insert(rows.end(), h.equations.begin(), h.equations.end());
        auto ns = nullspace(ScalarMatrix::from_rows(rows, r));
        if (ns.size() != 1) {
            return;
        }
        Vector u = ns.front();
        int seen = 0;
        for (const auto& g : gens) {
            int s = dot(u, g).sign();
            if (s == 0) {
                continue;
            }
            if (seen == 0) {
                seen = s;
            } else if (seen != s) {
                return;
            }
        }
        if (seen == 0) {
            return;
        }
        if (seen < 0) {
            u = scaled(u, Scalar(-1));
        }
        push_unique_ray(h.inequalities, u);
    });
    return h;
}

inline bool satisfies(const HRep& h, const Vector& x, bool strict)
{
    for (const auto& e : h.equations) {
        if (!dot(e, x).is_zero()) {
            return false;
        }
    }
    for (const auto& u : h.inequalities) {
        int s = dot(u, x).sign();
        if (s < 0 || (strict && s == 0)) {
            return false;
        }
    }
    return true;
}

} // namespace detail

/// Finitely generated convex cone over Q or Q(sqrt D), ambient rank <= 4.
///
/// Generators are reduced to a minimal set on construction (primitive
/// integer vectors for rational rays) and the facet description is cached.
/// A relative-interior cone stores its closure plus the flag; membership
/// branches on it.
class Cone {
public:
    Cone() = default;

    Cone(std::size_t rank, std::vector<Vector> generators, ConeKind kind = ConeKind::closed)
        : rank_(rank), kind_(kind)
    {
        detail::check_rank(rank);
        std::vector<Vector> rays;
        for (const auto& g : generators) {
            if (g.size() != rank) {
                throw invalid_input("generator " + to_string(g) + " has wrong rank");
            }
            if (is_zero(g)) {
                throw invalid_input("cone generators must be nonzero");
            }
            detail::push_unique_ray(rays, g);
        }
        h_ = detail::facets_of(rank, rays);
        gens_ = minimize(rays);
        std::sort(gens_.begin(), gens_.end(), lex_less);
    }

    static Cone zero(std::size_t rank, ConeKind kind = ConeKind::closed) { return Cone(rank, {}, kind); }

    /// {x : e.x = 0, u.x >= 0}.
    static Cone from_inequalities(std::size_t rank, const std::vector<Vector>& equations,
                                  const std::vector<Vector>& inequalities, ConeKind kind = ConeKind::closed);

    std::size_t rank() const { return rank_; }
    std::size_t dim() const { return h_.dim; }
    ConeKind kind() const { return kind_; }
    bool is_relint() const { return kind_ == ConeKind::relative_interior; }
    const std::vector<Vector>& generators() const { return gens_; }
    const std::vector<Vector>& equations() const { return h_.equations; }
    const std::vector<Vector>& facet_normals() const { return h_.inequalities; }

    Cone closure() const
    {
        Cone c = *this;
        c.kind_ = ConeKind::closed;
        return c;
    }

    Cone relint() const
    {
        Cone c = *this;
        c.kind_ = ConeKind::relative_interior;
        return c;
    }

    bool contains_closed(const Vector& x) const { return detail::satisfies(h_, x, false); }

    bool contains_relint(const Vector& x) const
    {
        if (h_.dim == 0) {
            return is_zero(x);
        }
        return detail::satisfies(h_, x, true);
    }

    bool contains(const Vector& x) const { return is_relint() ? contains_relint(x) : contains_closed(x); }

    /// A point in the relative interior (sum of generators; zero for {0}).
    Vector relint_point() const
    {
        Vector s(rank_, Scalar(0));
        for (const auto& g : gens_) {
            s = s + g;
        }
        return s;
    }

    bool is_rational() const
    {
        return std::all_of(gens_.begin(), gens_.end(), [](const Vector& g) { return semitoric::is_rational(g); });
    }

    std::size_t lineality_dim() const
    {
        std::vector<Vector> rows = h_.equations;
        rows.insert(rows.end(), h_.inequalities.begin(), h_.inequalities.end());
        if (rows.empty()) {
            return rank_;
        }
        return nullspace(ScalarMatrix::from_rows(rows, rank_)).size();
    }

    bool is_strongly_convex() const { return lineality_dim() == 0; }

    /// Closed cones: generator sets describe the same set.
    bool same_set(const Cone& o) const
    {
        if (rank_ != o.rank_ || h_.dim != o.h_.dim) {
            return false;
        }
        for (const auto& g : gens_) {
            if (!o.contains_closed(g)) {
                return false;
            }
        }
        for (const auto& g : o.gens_) {
            if (!contains_closed(g)) {
                return false;
            }
        }
        return true;
    }

    friend bool operator==(const Cone& a, const Cone& b) { return a.kind_ == b.kind_ && a.same_set(b); }
    friend bool operator!=(const Cone& a, const Cone& b) { return !(a == b); }

    /// Canonical text key (exact for strongly convex cones).
    std::string key() const
    {
        std::string s = is_relint() ? "ri<" : "cl<";
        for (const auto& g : gens_) {
            s += to_string(g);
        }
        return s + ">";
    }

    std::string str() const
    {
        std::string s = is_relint() ? "relint cone<" : "cone<";
        for (std::size_t i = 0; i < gens_.size(); ++i) {
            s += (i ? "," : "") + to_string(gens_[i]);
        }
        return s + ">";
    }

private:
    std::vector<Vector> minimize(const std::vector<Vector>& rays) const
    {
        if (rays.size() <= 1) {
            return rays;
        }
        // Pointed: a ray is extreme iff the facets through it span a
        // complement of dimension dim - 1 inside the span.
        if (lineality_dim() == 0) {
            std::vector<Vector> out;
            for (const auto& g : rays) {
                std::vector<Vector> tight = h_.equations;
                for (const auto& u : h_.inequalities) {
                    if (dot(u, g).is_zero()) {
                        tight.push_back(u);
                    }
                }
                if (rank_of(tight, rank_) == rank_ - 1) {
                    out.push_back(g);
                }
            }
            return out;
        }
        std::vector<Vector> out = rays;
        for (std::size_t i = 0; i < out.size();) {
            std::vector<Vector> others;
            for (std::size_t j = 0; j < out.size(); ++j) {
                if (j != i) {
                    others.push_back(out[j]);
                }
            }
            if (detail::satisfies(detail::facets_of(rank_, others), out[i], false)) {
                out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
            } else {
                ++i;
            }
        }
        return out;
    }

    std::size_t rank_ = 1;
    ConeKind kind_ = ConeKind::closed;
    std::vector<Vector> gens_;
    detail::HRep h_;
};

inline Cone Cone::from_inequalities(std::size_t rank, const std::vector<Vector>& equations,
                                    const std::vector<Vector>& inequalities, ConeKind kind)
{
    detail::check_rank(rank);
    std::vector<Vector> eqs = equations;
    std::vector<Vector> all = equations;
    all.insert(all.end(), inequalities.begin(), inequalities.end());
    std::vector<Vector> gens;
    auto lineality = all.empty() ? orthogonal_complement<Scalar>({}, rank)
                                 : nullspace(ScalarMatrix::from_rows(all, rank));
    for (const auto& l : lineality) {
        gens.push_back(l);
        gens.push_back(scaled(l, Scalar(-1)));
        eqs.push_back(l);
    }
    std::size_t eq_rank = rank_of(eqs, rank);
    if (eq_rank < rank) {
        std::size_t need = rank - 1 - eq_rank;
        for_each_subset(inequalities.size(), need, [&](const std::vector<std::size_t>& idx) {
            std::vector<Vector> rows = eqs;
            for (auto i : idx) {
                rows.push_back(inequalities[i]);
            }
            auto ns = nullspace(ScalarMatrix::from_rows(rows, rank));
            if (ns.size() != 1) {
                return;
            }
            for (int s : {1, -1}) {
                Vector d = scaled(ns.front(), Scalar(s));
                bool ok = std::all_of(inequalities.begin(), inequalities.end(),
                                      [&](const Vector& u) { return dot(u, d).sign() >= 0; });
                if (ok) {
                    gens.push_back(d);
                    break;
                }
            }
        });
    }
    return Cone(rank, gens, kind);
}

// ---------------------------------------------------------------------------
// Operations

inline bool is_strongly_convex(const Cone& c) { return c.is_strongly_convex(); }

/// All nonempty faces of a closed strongly convex cone, as closed cones.
inline std::vector<Cone> faces(const Cone& c)
{
    if (!c.is_strongly_convex()) {
        throw invalid_input("faces: cone " + c.str() + " is not strongly convex");
    }
    const auto& gens = c.generators();
    const auto& normals = c.facet_normals();
    std::set<std::vector<std::size_t>> seen;
    std::vector<Cone> out;
    // Faces are exactly the intersections of subsets of facets.
    const std::size_t f = normals.size();
    if (f > 20) {
        throw resource_error("faces: too many facets");
    }
    for (std::size_t mask = 0; mask < (std::size_t{1} << f); ++mask) {
        std::vector<std::size_t> idx;
        for (std::size_t g = 0; g < gens.size(); ++g) {
            bool tight = true;
            for (std::size_t k = 0; k < f && tight; ++k) {
                if ((mask >> k) & 1U) {
                    tight = dot(normals[k], gens[g]).is_zero();
                }
            }
            if (tight) {
                idx.push_back(g);
            }
        }
        if (!seen.insert(idx).second) {
            continue;
        }
        std::vector<Vector> fg;
        for (auto g : idx) {
            fg.push_back(gens[g]);
        }
        out.emplace_back(c.rank(), fg);
    }
    std::sort(out.begin(), out.end(), [](const Cone& a, const Cone& b) {
        if (a.dim() != b.dim()) {
            return a.dim() < b.dim();
        }
        return a.key() < b.key();
    });
    return out;
}

/// True iff the minimal generators are part of a Z-basis of Z^r.
inline bool is_unimodular_part_of_basis(const Cone& c, std::size_t r)
{
    if (c.rank() != r) {
        throw invalid_input("rank mismatch");
    }
    if (!c.is_rational()) {
        throw invalid_input("requires rational cone");
    }
    const auto& gens = c.generators();
    if (gens.empty()) {
        return true;
    }
    IntMatrix m(gens.size(), r);
    for (std::size_t i = 0; i < gens.size(); ++i) {
        auto p = primitive(to_qvector(gens[i]));
        for (std::size_t j = 0; j < r; ++j) {
            m(i, j) = p[j];
        }
    }
    auto divs = elementary_divisors(m);
    if (divs.size() != gens.size()) {
        return false;
    }
    return std::all_of(divs.begin(), divs.end(), [](const Integer& d) { return d == 1; });
}

/// Closed intersection of two closed cones.
inline Cone cone_intersection(const Cone& a, const Cone& b)
{
    if (a.rank() != b.rank()) {
        throw invalid_input("cone_intersection: rank mismatch");
    }
    std::vector<Vector> eqs = a.equations();
    eqs.insert(eqs.end(), b.equations().begin(), b.equations().end());
    std::vector<Vector> ineqs = a.facet_normals();
    ineqs.insert(ineqs.end(), b.facet_normals().begin(), b.facet_normals().end());
    return Cone::from_inequalities(a.rank(), eqs, ineqs);
}

/// relint(a) ∩ relint(b) is nonempty (closures are intersected).
inline bool relints_meet(const Cone& a, const Cone& b)
{
    Cone i = cone_intersection(a.closure(), b.closure());
    Vector p = i.relint_point();
    return a.contains_relint(p) && b.contains_relint(p);
}

/// relint(inner) ⊆ relint(outer).
inline bool relint_contained(const Cone& inner, const Cone& outer)
{
    for (const auto& g : inner.generators()) {
        if (!outer.contains_closed(g)) {
            return false;
        }
    }
    return outer.contains_relint(inner.relint_point());
}

inline Cone apply(const IntMatrix& g, const Cone& c)
{
    ScalarMatrix m = g.cast<Scalar>();
    std::vector<Vector> gens;
    for (const auto& v : c.generators()) {
        gens.push_back(m * v);
    }
    return Cone(c.rank(), gens, c.kind());
}

} // namespace semitoric
