#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "decomposition.hpp"
#include "quad_field.hpp"

namespace semitoric {

/// Hull vertices v_0, ..., v_{k*m} in lattice (tube) coordinates together with
/// the unit action U, v_{j+m} = U v_j.
struct VertexChain {
    std::vector<IntVector> vertices;
    std::size_t period = 0;
    IntMatrix unit_action = IntMatrix::identity(2);

    /// v_j for any integer j, by periodic extension.
    IntVector vertex(long j) const
    {
        if (period == 0 || vertices.size() < period) {
            throw invalid_input("empty vertex chain");
        }
        long m = static_cast<long>(period);
        long k = j >= 0 ? j / m : -((-j + m - 1) / m);
        long i = j - k * m;
        return power(unit_action, k) * vertices[static_cast<std::size_t>(i)];
    }

    std::size_t periods() const { return period == 0 ? 0 : (vertices.size() - 1) / period; }
};

struct CycleResolution {
    std::size_t m = 0;
    std::vector<long> b;           // lexicographically smallest rotation
    std::vector<long> b_by_vertex; // b at v_1, ..., v_m
    std::optional<Decomposition> fan;
};

inline Integer det2(const IntVector& a, const IntVector& b) { return a[0] * b[1] - a[1] * b[0]; }

inline std::vector<long> smallest_rotation(const std::vector<long>& b)
{
    std::vector<long> best = b;
    for (std::size_t s = 1; s < b.size(); ++s) {
        std::vector<long> r(b.begin() + static_cast<long>(s), b.end());
        r.insert(r.end(), b.begin(), b.begin() + static_cast<long>(s));
        best = std::min(best, r);
    }
    return best;
}

/// b_j with v_{j-1} + v_{j+1} = b_j v_j, exactly.
inline long relation_coefficient(const IntVector& prev, const IntVector& v, const IntVector& next)
{
    IntVector s{prev[0] + next[0], prev[1] + next[1]};
    std::optional<Integer> b;
    for (std::size_t i = 0; i < 2; ++i) {
        if (v[i] != 0) {
            if (s[i] % v[i] != 0) {
                throw invalid_input("chain is not a hull vertex chain");
            }
            b = s[i] / v[i];
            break;
        }
    }
    if (!b || s[0] != *b * v[0] || s[1] != *b * v[1] || !b->fits_slong_p()) {
        throw invalid_input("chain is not a hull vertex chain");
    }
    return b->get_si();
}

// ---------------------------------------------------------------------------
// Support of the fan: the cone spanned by the real eigenvectors of U.

/// Closed cone bounded by the eigenlines of a hyperbolic U, oriented to
/// contain `inside`.
inline Cone eigen_support(const IntMatrix& u, const IntVector& inside)
{
    Integer t = u(0, 0) + u(1, 1);
    Integer det = determinant(u);
    Integer disc = t * t - 4 * det;
    if (disc <= 0 || is_perfect_square(disc)) {
        throw invalid_input("unit action is not hyperbolic; support undetermined");
    }
    Integer f = 1, d = disc;
    for (Integer p = 2; p * p <= d; ++p) {
        while (d % (p * p) == 0) {
            d /= p * p;
            f *= p;
        }
    }
    if (!d.fits_slong_p()) {
        throw resource_error("discriminant too large");
    }
    std::int64_t dd = d.get_si();
    Scalar lambda(Rational(t, 2), Rational(f, 2), dd);
    Vector e1;
    if (u(0, 1) != 0) {
        e1 = {Scalar(u(0, 1)), lambda - Scalar(u(0, 0))};
    } else {
        e1 = {lambda - Scalar(u(1, 1)), Scalar(u(1, 0))};
    }
    Vector e2{e1[0].conjugate(), e1[1].conjugate()};
    ScalarMatrix basis = ScalarMatrix::from_columns({e1, e2});
    Vector c = inverse(basis) * to_vector(inside);
    if (c[0].is_zero() || c[1].is_zero()) {
        throw invalid_input("reference vertex lies on an eigenline");
    }
    return Cone(2, {scaled(e1, Scalar(c[0].sign())), scaled(e2, Scalar(c[1].sign()))});
}

// ---------------------------------------------------------------------------
// Hull of C ∩ Phi(a)

namespace detail {

using LatticePoint = std::pair<Integer, Integer>;

struct HullContext {
    const CuspData& data;
    QuadNum alpha, beta;
    double a1, a2, b1, b2, det;

    explicit HullContext(const CuspData& d)
        : data(d), alpha(d.ideal().alpha()), beta(d.ideal().beta()), a1(alpha.to_double()),
          a2(alpha.conjugate().to_double()), b1(beta.to_double()), b2(beta.conjugate().to_double()),
          det(a1 * b2 - a2 * b1)
    {
    }

    QuadNum element(const LatticePoint& z) const { return Scalar(z.first) * alpha + Scalar(z.second) * beta; }
};

// q with lo <= p*c1 + q*c2 <= hi
inline std::pair<double, double> q_interval(double p, double c1, double c2, double lo, double hi)
{
    double u = (lo - p * c1) / c2;
    double v = (hi - p * c1) / c2;
    return {std::min(u, v), std::max(u, v)};
}

/// Lattice points of C with norm <= bound and x/x' roughly in [rlo, rhi].
inline void enumerate_window(const HullContext& h, const Rational& bound, double rlo, double rhi,
                             std::set<LatticePoint>& out, std::size_t limit)
{
    double bd = bound.get_d();
    double X = std::sqrt(bd * rhi) * 1.0001 + 1e-9;
    double Xc = std::sqrt(bd / rlo) * 1.0001 + 1e-9;
    double pmin = 1e300, pmax = -1e300;
    for (double x : {0.0, X}) {
        for (double xc : {0.0, Xc}) {
            double p = (h.b2 * x - h.b1 * xc) / h.det;
            pmin = std::min(pmin, p);
            pmax = std::max(pmax, p);
        }
    }
    for (double pd = std::floor(pmin) - 1; pd <= std::ceil(pmax) + 1; pd += 1) {
        auto [l1, u1] = q_interval(pd, h.a1, h.b1, 0.0, X);
        auto [l2, u2] = q_interval(pd, h.a2, h.b2, 0.0, Xc);
        double lo = std::max(l1, l2), hi = std::min(u1, u2);
        if (lo > hi + 2) {
            continue;
        }
        Integer p(pd);
        for (double qd = std::floor(lo) - 1; qd <= std::ceil(hi) + 1; qd += 1) {
            LatticePoint z{p, Integer(qd)};
            QuadNum x = h.element(z);
            if (!x.totally_positive() || x.norm() > bound) {
                continue;
            }
            out.insert(z);
            if (out.size() > limit) {
                throw resource_error("hull enumeration exceeded " + std::to_string(limit) + " lattice points");
            }
        }
    }
}

/// x_a/x_a' < x_b/x_b'
inline bool ratio_less(const QuadNum& xa, const QuadNum& xb)
{
    return xa * xb.conjugate() < xb * xa.conjugate();
}

inline Integer cross(const LatticePoint& o, const LatticePoint& a, const LatticePoint& b)
{
    return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
}

/// Boundary of conv(points) facing the origin, sorted by increasing x/x',
/// including lattice points interior to edges.
inline std::vector<LatticePoint> visible_chain(const HullContext& h, const std::set<LatticePoint>& pts)
{
    struct Item {
        LatticePoint z;
        QuadNum x;
        Rational norm;
    };
    std::vector<Item> items;
    items.reserve(pts.size());
    for (const auto& z : pts) {
        QuadNum x = h.element(z);
        items.push_back({z, x, x.norm()});
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (ratio_less(a.x, b.x)) {
            return true;
        }
        if (ratio_less(b.x, a.x)) {
            return false;
        }
        return a.norm < b.norm;
    });
    std::vector<LatticePoint> stack;
    const LatticePoint origin{0, 0};
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0 && !ratio_less(items[i - 1].x, items[i].x)) {
            continue; // same ray, farther out
        }
        const LatticePoint& c = items[i].z;
        while (stack.size() >= 2) {
            const LatticePoint& a = stack[stack.size() - 2];
            const LatticePoint& b = stack.back();
            int sb = sgn(cross(a, c, b));
            int so = sgn(cross(a, c, origin));
            if (sb * so < 0) {
                stack.pop_back();
            } else {
                break;
            }
        }
        stack.push_back(c);
    }
    std::vector<LatticePoint> filled;
    for (std::size_t i = 0; i < stack.size(); ++i) {
        filled.push_back(stack[i]);
        if (i + 1 == stack.size()) {
            break;
        }
        Integer dp = stack[i + 1].first - stack[i].first;
        Integer dq = stack[i + 1].second - stack[i].second;
        Integer g = gcd(dp, dq);
        for (Integer k = 1; k < g; ++k) {
            filled.push_back({stack[i].first + k * (dp / g), stack[i].second + k * (dq / g)});
        }
    }
    return filled;
}

inline IntVector to_int_vector(const LatticePoint& z) { return {z.first, z.second}; }

/// One certified period starting at the minimal-norm vertex of the
/// fundamental domain 1 <= x/x' < eps^2, or nothing.
inline std::optional<VertexChain> certified_period(const HullContext& h, const std::vector<LatticePoint>& chain)
{
    const QuadNum eps2 = h.data.unit() * h.data.unit();
    std::optional<std::size_t> start;
    Rational best_norm;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        QuadNum x = h.element(chain[i]);
        QuadNum xc = x.conjugate();
        if (x < xc || !(x < eps2 * xc)) {
            continue;
        }
        Rational n = x.norm();
        if (!start || n < best_norm || (n == best_norm && chain[i] < chain[*start])) {
            start = i;
            best_norm = n;
        }
    }
    if (!start || *start == 0) {
        return std::nullopt;
    }
    const IntMatrix u = h.data.unit_action();
    IntVector target = u * to_int_vector(chain[*start]);
    std::optional<std::size_t> end;
    for (std::size_t i = *start + 1; i < chain.size(); ++i) {
        if (to_int_vector(chain[i]) == target) {
            end = i;
            break;
        }
    }
    if (!end || *end + 1 >= chain.size()) {
        return std::nullopt;
    }
    VertexChain vc;
    vc.period = *end - *start;
    vc.unit_action = u;
    for (std::size_t i = *start; i <= *end; ++i) {
        vc.vertices.push_back(to_int_vector(chain[i]));
    }
    // Certificate: consistent unimodular orientation and local convexity.
    long m = static_cast<long>(vc.period);
    Integer orient = det2(vc.vertex(0), vc.vertex(1));
    if (orient != 1 && orient != -1) {
        return std::nullopt;
    }
    for (long j = 0; j < m; ++j) {
        if (det2(vc.vertex(j), vc.vertex(j + 1)) != orient) {
            return std::nullopt;
        }
        try {
            if (relation_coefficient(vc.vertex(j - 1), vc.vertex(j), vc.vertex(j + 1)) < 2) {
                return std::nullopt;
            }
        } catch (const invalid_input&) {
            return std::nullopt;
        }
    }
    return vc;
}

} // namespace detail

/// Vertices of the hull of C ∩ Phi(a) in lattice coordinates, starting at the
/// minimal-norm vertex of the fundamental domain, for `periods` periods.
///
/// The norm bound doubles until the certified period is identical over two
/// iterations. A period is certified when consecutive vertices have the same
/// determinant +-1 and every b_j >= 2; such a chain bounds the hull exactly.
inline VertexChain hull_vertices(const CuspData& data, std::size_t periods = 1, std::size_t max_points = 2000000)
{
    if (periods == 0) {
        throw invalid_input("periods must be positive");
    }
    detail::HullContext h(data);
    const QuadIdeal& ideal = data.ideal();
    Rational bound = 1;
    for (const auto& z : {ideal.alpha(), ideal.beta(), ideal.alpha() + ideal.beta(), ideal.alpha() - ideal.beta()}) {
        bound = std::max(bound, abs(z.norm()));
    }
    const double e = data.unit().to_double();
    const double rlo = 1.0 / (e * e);
    const double rhi = std::pow(e, 6.0);
    std::optional<VertexChain> previous;
    for (int iter = 0; iter < 48; ++iter) {
        std::set<detail::LatticePoint> pts;
        for (double r = rlo; r < rhi; r *= 4.0) {
            detail::enumerate_window(h, bound, r, r * 4.0, pts, max_points);
        }
        auto chain = detail::visible_chain(h, pts);
        auto current = detail::certified_period(h, chain);
        if (current && previous && current->vertices == previous->vertices) {
            VertexChain out = *current;
            out.vertices.clear();
            for (long j = 0; j <= static_cast<long>(periods * out.period); ++j) {
                out.vertices.push_back(current->vertex(j));
            }
            return out;
        }
        previous = current;
        bound *= 2;
    }
    throw resource_error("hull did not stabilize within the enumeration bound");
}

/// Violations of the chain invariants over the stored vertices (empty when valid).
inline std::vector<std::string> chain_violations(const VertexChain& c)
{
    std::vector<std::string> out;
    if (c.period == 0 || c.vertices.size() < c.period + 1) {
        out.push_back("chain shorter than one period");
        return out;
    }
    long n = static_cast<long>(c.vertices.size()) - 1;
    long m = static_cast<long>(c.period);
    for (long j = 0; j + m <= n; ++j) {
        if (c.unit_action * c.vertices[static_cast<std::size_t>(j)] != c.vertices[static_cast<std::size_t>(j + m)]) {
            out.push_back("periodicity fails at j=" + std::to_string(j));
        }
    }
    long max_b = 0;
    for (long j = 0; j <= n; ++j) {
        Integer d = det2(c.vertex(j), c.vertex(j + 1));
        if (d != 1 && d != -1) {
            out.push_back("|det(v_" + std::to_string(j) + ", v_" + std::to_string(j + 1) + ")| = " + abs(d).get_str());
        }
        try {
            long b = relation_coefficient(c.vertex(j - 1), c.vertex(j), c.vertex(j + 1));
            max_b = std::max(max_b, b);
            if (b < 2) {
                out.push_back("b_" + std::to_string(j) + " = " + std::to_string(b) + " < 2");
            }
        } catch (const invalid_input&) {
            out.push_back("relation not exact at j=" + std::to_string(j));
        }
    }
    if (max_b < 3) {
        out.push_back("no b_j >= 3");
    }
    return out;
}

/// The standard smooth-toric relation v_{j-1} + v_{j+1} = b_j v_j around one
/// period; the fan is attached when the unit action is hyperbolic.
inline Decomposition build_fan(const VertexChain& chain);

inline CycleResolution self_intersections(const VertexChain& chain)
{
    if (chain.period == 0 || chain.vertices.empty()) {
        throw invalid_input("empty vertex chain");
    }
    CycleResolution res;
    res.m = chain.period;
    for (long j = 1; j <= static_cast<long>(chain.period); ++j) {
        res.b_by_vertex.push_back(relation_coefficient(chain.vertex(j - 1), chain.vertex(j), chain.vertex(j + 1)));
    }
    res.b = smallest_rotation(res.b_by_vertex);
    try {
        res.fan = build_fan(chain);
    } catch (const invalid_input&) {
        res.fan.reset();
    }
    return res;
}

/// sigma_j = relint <v_j, v_{j+1}> and tau_j = relint <v_j> for 0 <= j < m,
/// with the unit action as group generator and the eigen-cone as support.
inline Decomposition build_fan(const VertexChain& chain)
{
    if (chain.period == 0 || chain.vertices.empty()) {
        throw invalid_input("empty vertex chain");
    }
    Decomposition d;
    d.rank = 2;
    d.support = eigen_support(chain.unit_action, chain.vertex(0));
    d.support_has_origin = false;
    d.group.push_back({chain.unit_action, IntVector{0, 0}});
    for (long j = 0; j < static_cast<long>(chain.period); ++j) {
        d.members.emplace_back(2, std::vector<Vector>{to_vector(chain.vertex(j))}, ConeKind::relative_interior);
    }
    for (long j = 0; j < static_cast<long>(chain.period); ++j) {
        d.members.emplace_back(2, std::vector<Vector>{to_vector(chain.vertex(j)), to_vector(chain.vertex(j + 1))},
                               ConeKind::relative_interior);
    }
    return d;
}

// ---------------------------------------------------------------------------
// Figures

enum class FigureStyle { hull, cycle };

namespace detail {

inline std::string fmt(double v)
{
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    std::string s = os.str();
    return s == "-0.00" ? "0.00" : s;
}

} // namespace detail

/// Deterministic SVG. Hull style: cone boundary, lattice points (small
/// windows only), the boundary polyline, fan rays and one marker per vertex
/// v_0..v_{km-1}. Cycle style: the dual graph with labels -b_j.
inline std::string emit_figure(const VertexChain& chain, FigureStyle style)
{
    if (chain.period == 0 || chain.vertices.empty()) {
        throw invalid_input("cannot draw an empty vertex chain");
    }
    std::ostringstream svg;
    const double size = 400.0;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << size << "\" height=\"" << size
        << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
    if (style == FigureStyle::cycle) {
        auto res = self_intersections(chain);
        const double cx = size / 2, cy = size / 2, rad = size / 3;
        const std::size_t m = res.m;
        const double pi = std::acos(-1.0);
        auto node = [&](std::size_t j) {
            double a = 2 * pi * static_cast<double>(j) / static_cast<double>(m) - pi / 2;
            return std::pair{cx + rad * std::cos(a), cy + rad * std::sin(a)};
        };
        svg << "<g class=\"edges\" stroke=\"black\" fill=\"none\">\n";
        for (std::size_t j = 0; j < m; ++j) {
            auto [x1, y1] = node(j);
            auto [x2, y2] = node((j + 1) % m);
            if (m == 1) {
                svg << "<circle class=\"edge\" cx=\"" << detail::fmt(x1) << "\" cy=\"" << detail::fmt(y1 - 30)
                    << "\" r=\"30\"/>\n";
            } else if (m == 2) {
                double bend = j == 0 ? 40 : -40;
                svg << "<path class=\"edge\" d=\"M " << detail::fmt(x1) << " " << detail::fmt(y1) << " Q "
                    << detail::fmt((x1 + x2) / 2 + bend) << " " << detail::fmt((y1 + y2) / 2) << " "
                    << detail::fmt(x2) << " " << detail::fmt(y2) << "\"/>\n";
            } else {
                svg << "<line class=\"edge\" x1=\"" << detail::fmt(x1) << "\" y1=\"" << detail::fmt(y1) << "\" x2=\""
                    << detail::fmt(x2) << "\" y2=\"" << detail::fmt(y2) << "\"/>\n";
            }
        }
        svg << "</g>\n<g class=\"curves\">\n";
        for (std::size_t j = 0; j < m; ++j) {
            auto [x, y] = node(j);
            svg << "<circle class=\"node\" cx=\"" << detail::fmt(x) << "\" cy=\"" << detail::fmt(y)
                << "\" r=\"8\" fill=\"white\" stroke=\"black\"/>\n"
                << "<text class=\"label\" x=\"" << detail::fmt(x + 12) << "\" y=\"" << detail::fmt(y + 4)
                << "\" font-size=\"14\">B" << j + 1 << ": " << -res.b_by_vertex[j] << "</text>\n";
        }
        svg << "</g>\n</svg>\n";
        return svg.str();
    }

    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    for (const auto& v : chain.vertices) {
        xmin = std::min(xmin, v[0].get_d());
        xmax = std::max(xmax, v[0].get_d());
        ymin = std::min(ymin, v[1].get_d());
        ymax = std::max(ymax, v[1].get_d());
    }
    double span = std::max({xmax - xmin, ymax - ymin, 1.0}) * 1.1;
    const double margin = 20;
    double scale = (size - 2 * margin) / span;
    auto px = [&](double x) { return margin + (x - xmin) * scale; };
    auto py = [&](double y) { return size - margin - (y - ymin) * scale; };

    std::optional<Cone> support;
    try {
        support = eigen_support(chain.unit_action, chain.vertex(0));
    } catch (const invalid_input&) {
    }
    if (support) {
        svg << "<g class=\"cone\" stroke=\"gray\" stroke-dasharray=\"4 2\">\n";
        for (const auto& g : support->generators()) {
            double gx = g[0].to_double(), gy = g[1].to_double();
            double len = span / std::max(std::hypot(gx, gy), 1e-12);
            svg << "<line class=\"boundary\" x1=\"" << detail::fmt(px(0)) << "\" y1=\"" << detail::fmt(py(0))
                << "\" x2=\"" << detail::fmt(px(gx * len)) << "\" y2=\"" << detail::fmt(py(gy * len)) << "\"/>\n";
        }
        svg << "</g>\n";
        if (span * span <= 4000) {
            svg << "<g class=\"lattice\" fill=\"gray\">\n";
            for (long x = static_cast<long>(std::floor(xmin)); x <= static_cast<long>(std::ceil(xmin + span)); ++x) {
                for (long y = static_cast<long>(std::floor(ymin)); y <= static_cast<long>(std::ceil(ymin + span));
                     ++y) {
                    if ((x != 0 || y != 0) && support->contains_relint(Vector{Scalar(x), Scalar(y)})) {
                        svg << "<circle class=\"point\" cx=\"" << detail::fmt(px(x)) << "\" cy=\""
                            << detail::fmt(py(y)) << "\" r=\"1.5\"/>\n";
                    }
                }
            }
            svg << "</g>\n";
        }
    }
    svg << "<g class=\"rays\" stroke=\"steelblue\">\n";
    for (const auto& v : chain.vertices) {
        svg << "<line class=\"ray\" x1=\"" << detail::fmt(px(0)) << "\" y1=\"" << detail::fmt(py(0)) << "\" x2=\""
            << detail::fmt(px(v[0].get_d())) << "\" y2=\"" << detail::fmt(py(v[1].get_d())) << "\"/>\n";
    }
    svg << "</g>\n<polyline class=\"hull\" fill=\"none\" stroke=\"black\" points=\"";
    for (std::size_t i = 0; i < chain.vertices.size(); ++i) {
        svg << (i ? " " : "") << detail::fmt(px(chain.vertices[i][0].get_d())) << ","
            << detail::fmt(py(chain.vertices[i][1].get_d()));
    }
    svg << "\"/>\n<g class=\"vertices\" fill=\"crimson\">\n";
    for (std::size_t i = 0; i + 1 < chain.vertices.size() || chain.vertices.size() == 1; ++i) {
        const auto& v = chain.vertices[i];
        svg << "<circle class=\"vertex\" cx=\"" << detail::fmt(px(v[0].get_d())) << "\" cy=\""
            << detail::fmt(py(v[1].get_d())) << "\" r=\"4\"><title>v_" << i << " = (" << v[0].get_str() << ","
            << v[1].get_str() << ")</title></circle>\n";
        if (chain.vertices.size() == 1) {
            break;
        }
    }
    svg << "</g>\n</svg>\n";
    return svg.str();
}

} // namespace semitoric
