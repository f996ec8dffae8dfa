#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "decomposition.hpp"
#include "matrix.hpp"

namespace semitoric {

class not_unipotent : public error {
public:
    using error::error;
};

// ---------------------------------------------------------------------------
// Univariate polynomials (coefficients low to high), for obstructions.

using UPoly = std::vector<Rational>;

inline std::string to_string(const UPoly& p, const std::string& var = "t")
{
    std::string s;
    for (std::size_t i = p.size(); i-- > 0;) {
        const Rational& c = p[i];
        if (c == 0) {
            continue;
        }
        Rational a = abs(c);
        std::string mono = i == 0 ? "" : (i == 1 ? var : var + "^" + std::to_string(i));
        std::string coef = (a == 1 && i > 0) ? "" : to_display(a) + (i > 0 ? "*" : "");
        if (s.empty()) {
            s = (c < 0 ? "-" : "") + coef + mono;
        } else {
            s += (c < 0 ? " - " : " + ") + coef + mono;
        }
    }
    return s.empty() ? "0" : s;
}

/// Minimal polynomial of a square matrix via the first linear dependency
/// among I, T, T^2, ... (monic).
inline UPoly minimal_polynomial(const QMatrix& t)
{
    const std::size_t n = t.rows();
    std::vector<QVector> powers;
    QMatrix p = QMatrix::identity(n);
    for (std::size_t k = 0; k <= n; ++k) {
        QVector flat;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                flat.push_back(p(i, j));
            }
        }
        powers.push_back(flat);
        if (rank_of(powers, n * n) < powers.size()) {
            // The dependency is unique up to scale since I..T^{k-1} are independent.
            auto ns = nullspace(QMatrix::from_columns(powers));
            QVector v = ns.front();
            Rational lead = v[k];
            UPoly out;
            for (const auto& x : v) {
                out.push_back(x / lead);
            }
            return out;
        }
        p = p * t;
    }
    throw error("minimal polynomial search failed");
}

/// Divides out all factors (t - 1).
inline UPoly strip_unipotent_factor(UPoly p)
{
    while (p.size() > 1) {
        // synthetic division by (t - 1)
        UPoly q(p.size() - 1);
        Rational carry = 0;
        for (std::size_t i = p.size(); i-- > 1;) {
            carry = p[i] + carry;
            q[i - 1] = carry;
        }
        if (p[0] + carry != 0) {
            break;
        }
        p = std::move(q);
    }
    return p;
}

inline bool is_nilpotent(const QMatrix& a)
{
    return power(a, static_cast<long>(std::max<std::size_t>(a.rows(), 1))).is_zero();
}

/// N = log T by the terminating series sum (-1)^{k+1} (T - I)^k / k.
inline QMatrix unipotent_log(const QMatrix& t)
{
    if (!t.is_square()) {
        throw invalid_input("monodromy operator is not square");
    }
    const std::size_t n = t.rows();
    QMatrix a = t - QMatrix::identity(n);
    if (!is_nilpotent(a)) {
        UPoly rest = strip_unipotent_factor(minimal_polynomial(t));
        throw not_unipotent("not unipotent: minimal polynomial has factor " + to_string(rest));
    }
    QMatrix out(n, n);
    QMatrix p = a;
    for (std::size_t k = 1; k <= n && !p.is_zero(); ++k) {
        Rational c(k % 2 == 1 ? 1 : -1, static_cast<long>(k));
        c.canonicalize();
        out = out + c * p;
        p = p * a;
    }
    return out;
}

/// exp of a nilpotent matrix, exactly.
inline QMatrix nilpotent_exp(const QMatrix& n)
{
    const std::size_t d = n.rows();
    QMatrix out = QMatrix::identity(d);
    QMatrix p = QMatrix::identity(d);
    Rational fact = 1;
    for (std::size_t k = 1; k <= d; ++k) {
        p = p * n;
        if (p.is_zero()) {
            break;
        }
        fact *= static_cast<long>(k);
        out = out + Rational(1) / fact * p;
    }
    return out;
}

/// Smallest k <= bound with T^k unipotent.
inline std::optional<std::size_t> quasi_unipotent_order(const QMatrix& t, std::size_t bound = 120)
{
    QMatrix p = t;
    for (std::size_t k = 1; k <= bound; ++k) {
        if (is_nilpotent(p - QMatrix::identity(t.rows()))) {
            return k;
        }
        p = p * t;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Weight spaces

struct WeightData {
    std::vector<QVector> w0, w1, w2;
    QVector a;
};

inline void check_commuting(const std::vector<QMatrix>& ns)
{
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (!ns[i].is_square() || ns[i].rows() != ns.front().rows()) {
            throw invalid_input("operators must be square of equal size");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (ns[i] * ns[j] != ns[j] * ns[i]) {
                throw invalid_input("operators " + std::to_string(j + 1) + " and " + std::to_string(i + 1) +
                                    " do not commute");
            }
        }
    }
}

/// N^k with N^k = I for k <= 0.
inline QMatrix npow(const QMatrix& n, long k)
{
    return k <= 0 ? QMatrix::identity(n.rows()) : power(n, k);
}

/// W_0 = Im N^n, W_1 = Im N^{n-1} ∩ Ker N, W_2 = Im N^{n-2} ∩ Ker N^2 for
/// N = sum a_j N^(j).
inline WeightData weight_spaces(const std::vector<QMatrix>& ns, std::size_t n, const QVector& a)
{
    if (ns.empty()) {
        throw invalid_input("no operators");
    }
    if (a.size() != ns.size()) {
        throw invalid_input("coefficient vector has wrong length");
    }
    check_commuting(ns);
    for (const auto& x : a) {
        if (x <= 0) {
            throw invalid_input("coefficients a_j must be positive");
        }
    }
    const std::size_t d = ns.front().rows();
    QMatrix nsum(d, d);
    for (std::size_t j = 0; j < ns.size(); ++j) {
        if (!is_nilpotent(ns[j])) {
            throw invalid_input("operator " + std::to_string(j + 1) + " is not nilpotent");
        }
        nsum = nsum + a[j] * ns[j];
    }
    long nn = static_cast<long>(n);
    WeightData w;
    w.a = a;
    w.w0 = span_basis(column_space(npow(nsum, nn)), d);
    w.w1 = intersect_spans(column_space(npow(nsum, nn - 1)), nullspace(nsum), d);
    w.w2 = intersect_spans(column_space(npow(nsum, nn - 2)), nullspace(npow(nsum, 2)), d);
    return w;
}

inline bool same_subspace(const std::vector<QVector>& a, const std::vector<QVector>& b, std::size_t d)
{
    return span_basis(a, d) == span_basis(b, d);
}

// ---------------------------------------------------------------------------
// The matrix m

struct MMatrix {
    QMatrix m;                     // m(j-1, k-1) = m^{jk}
    std::vector<QVector> basis;    // g^0, ..., g^s
    Rational det = 0;
    bool invertible = false;
};

/// N^(j) g^k = m^{jk} g^0 for 1 <= j <= r, 1 <= k <= s.
inline MMatrix m_matrix(const std::vector<QMatrix>& ns, const std::vector<QVector>& g)
{
    if (g.empty()) {
        throw invalid_input("empty basis");
    }
    const QVector& g0 = g.front();
    std::size_t pivot = 0;
    while (pivot < g0.size() && g0[pivot] == 0) {
        ++pivot;
    }
    if (pivot == g0.size()) {
        throw invalid_input("g^0 is zero");
    }
    MMatrix out;
    out.basis = g;
    out.m = QMatrix(ns.size(), g.size() - 1);
    for (std::size_t j = 0; j < ns.size(); ++j) {
        for (std::size_t k = 1; k < g.size(); ++k) {
            QVector y = ns[j] * g[k];
            Rational c = y[pivot] / g0[pivot];
            for (std::size_t i = 0; i < y.size(); ++i) {
                if (y[i] != c * g0[i]) {
                    throw invalid_input("weight structure violated: N^(" + std::to_string(j + 1) + ") g^" +
                                        std::to_string(k) + " is not a multiple of g^0");
                }
            }
            out.m(j, k - 1) = c;
        }
    }
    if (out.m.is_square() && out.m.rows() > 0) {
        out.det = determinant(out.m);
        out.invertible = out.det != 0;
    }
    return out;
}

/// g^0 spanning W_0 followed by a completion to a basis of W_2.
inline std::vector<QVector> adapted_basis(const WeightData& w, std::size_t d)
{
    std::vector<QVector> g;
    if (w.w0.empty()) {
        return g;
    }
    g.push_back(w.w0.front());
    for (const auto& v : w.w2) {
        auto ext = g;
        ext.push_back(v);
        if (rank_of(ext, d) == ext.size()) {
            g = std::move(ext);
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Maximal unipotency

struct QuasiCanonicalOrbit {
    QVector omega0;
    QMatrix pairing;
};

struct MonodromySet {
    std::vector<QMatrix> operators;
    std::size_t n = 0;
    std::size_t dim_moduli = 0;
    std::optional<QMatrix> lattice; // columns span the integral lattice
    std::optional<QuasiCanonicalOrbit> orbit;
};

struct UnipotencyReport {
    bool maximally_unipotent = false;
    bool unipotent = false;
    std::string obstruction;
    std::size_t dim_w0 = 0, dim_w1 = 0, dim_w2 = 0;
    bool dims_ok = false;
    std::optional<Rational> det_m;
    bool m_invertible = false;
    std::string reason; // first failed condition
    std::size_t random_draws = 0;
    std::vector<std::string> anomalies;
    std::vector<QMatrix> logs;
};

inline std::vector<QMatrix> logs_of(const MonodromySet& ms)
{
    std::vector<QMatrix> out;
    for (const auto& t : ms.operators) {
        out.push_back(unipotent_log(t));
    }
    return out;
}

inline void check_shape(const MonodromySet& ms)
{
    if (ms.operators.empty()) {
        throw invalid_input("no monodromy operators");
    }
    if (ms.n == 0 || ms.dim_moduli == 0) {
        throw invalid_input("n and dimM must be positive");
    }
    std::size_t d = ms.operators.front().rows();
    for (const auto& t : ms.operators) {
        if (!t.is_square() || t.rows() != d) {
            throw invalid_input("operators must be square of equal size");
        }
    }
}

/// Conditions 1-3 at a = (1, ..., 1); `random_draws` further positive a are
/// compared against it and disagreements recorded as anomalies.
inline UnipotencyReport is_maximally_unipotent(const MonodromySet& ms, std::size_t random_draws = 20,
                                               std::uint64_t seed = 20240531)
{
    check_shape(ms);
    UnipotencyReport rep;
    try {
        rep.logs = logs_of(ms);
        rep.unipotent = true;
    } catch (const not_unipotent& e) {
        rep.obstruction = e.what();
        rep.reason = "condition 1: " + rep.obstruction;
        return rep;
    }
    check_commuting(rep.logs);
    const std::size_t d = ms.operators.front().rows();
    const std::size_t r = ms.operators.size();
    WeightData w = weight_spaces(rep.logs, ms.n, QVector(r, Rational(1)));
    rep.dim_w0 = w.w0.size();
    rep.dim_w1 = w.w1.size();
    rep.dim_w2 = w.w2.size();
    rep.dims_ok = rep.dim_w0 == 1 && rep.dim_w1 == 1 && rep.dim_w2 == 1 + ms.dim_moduli;

    std::mt19937_64 rng(seed);
    for (std::size_t t = 0; t < random_draws; ++t) {
        QVector a;
        for (std::size_t j = 0; j < r; ++j) {
            Rational x(1 + static_cast<long>(rng() % 9), 1 + static_cast<long>(rng() % 4));
            x.canonicalize();
            a.push_back(x);
        }
        WeightData wa = weight_spaces(rep.logs, ms.n, a);
        if (!same_subspace(wa.w0, w.w0, d) || !same_subspace(wa.w2, w.w2, d)) {
            rep.anomalies.push_back("W_0 or W_2 changes at a = " + to_string(to_vector(a)));
        }
    }
    rep.random_draws = random_draws;

    if (!rep.dims_ok) {
        if (rep.dim_w0 != 1) {
            rep.reason = "dim W_0 = " + std::to_string(rep.dim_w0);
        } else if (rep.dim_w1 != 1) {
            rep.reason = "dim W_1 = " + std::to_string(rep.dim_w1);
        } else {
            rep.reason = "dim W_2 = " + std::to_string(rep.dim_w2) + " != 1 + dimM = " +
                         std::to_string(1 + ms.dim_moduli);
        }
        return rep;
    }
    try {
        MMatrix m = m_matrix(rep.logs, adapted_basis(w, d));
        if (m.m.is_square()) {
            rep.det_m = m.det;
        }
        rep.m_invertible = m.invertible;
        if (!m.invertible) {
            rep.reason = m.m.is_square() ? "m is singular" : "m is not square (r != dimM)";
            return rep;
        }
    } catch (const invalid_input& e) {
        rep.reason = e.what();
        return rep;
    }
    rep.maximally_unipotent = true;
    return rep;
}

// ---------------------------------------------------------------------------
// Integral normalization

namespace detail {

inline Integer common_denominator(const QVector& v)
{
    Integer den = 1;
    for (const auto& x : v) {
        den = lcm(den, x.get_den());
    }
    return den;
}

} // namespace detail

/// g^0 primitive in W_0 ∩ Λ (first nonzero lattice coordinate positive) and
/// g^1..g^s completing it to a basis of W_2 ∩ Λ, where each g^k is the
/// minimal lift of the Hermite basis of the projection of W_2 ∩ Λ along g^0.
/// Λ is spanned by the columns of `lattice` (identity when absent).
inline std::vector<QVector> integral_normalization(const WeightData& w, const std::optional<QMatrix>& lattice = {})
{
    if (w.w0.empty()) {
        throw invalid_input("W_0 ∩ lattice is zero");
    }
    const std::size_t d = w.w0.front().size();
    QMatrix b = lattice ? *lattice : QMatrix::identity(d);
    if (!b.is_square() || b.rows() != d) {
        throw invalid_input("lattice basis has wrong shape");
    }
    QMatrix binv = inverse(b);
    auto to_lattice = [&](const std::vector<QVector>& vs) {
        std::vector<QVector> out;
        for (const auto& v : vs) {
            out.push_back(binv * v);
        }
        return out;
    };
    auto w0 = to_lattice(w.w0);
    auto w2 = to_lattice(w.w2);
    if (!in_span(w2, w0.front(), d)) {
        throw invalid_input("W_0 is not contained in W_2");
    }
    IntVector g0 = primitive(w0.front());
    for (const auto& x : g0) {
        if (x != 0) {
            if (x < 0) {
                for (auto& y : g0) {
                    y = -y;
                }
            }
            break;
        }
    }
    std::size_t p = 0;
    while (g0[p] == 0) {
        ++p;
    }
    // W_2 ∩ Z^d as the integer kernel of the annihilator of W_2.
    std::vector<IntVector> annihilator;
    for (const auto& row : orthogonal_complement(w2, d)) {
        annihilator.push_back(primitive(row));
    }
    std::vector<IntVector> lam = annihilator.empty() ? IntMatrix::identity(d).row_list()
                                                     : integer_kernel(IntMatrix::from_rows(annihilator, d));
    // Projection along g^0 onto {y_p = 0}.
    std::vector<QVector> projected;
    for (const auto& y : lam) {
        QVector q(d);
        Rational t = Rational(y[p]) / Rational(g0[p]);
        for (std::size_t i = 0; i < d; ++i) {
            q[i] = Rational(y[i]) - t * Rational(g0[i]);
        }
        projected.push_back(q);
    }
    // Hermite basis of the projected lattice (rational, canonical).
    Integer den = 1;
    for (const auto& q : projected) {
        den = lcm(den, detail::common_denominator(q));
    }
    IntMatrix scaled_rows(projected.size(), d);
    for (std::size_t i = 0; i < projected.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            scaled_rows(i, j) = Rational(projected[i][j] * Rational(den)).get_num();
        }
    }
    std::vector<QVector> out;
    QVector g0q(g0.begin(), g0.end());
    out.push_back(b * g0q);
    if (!scaled_rows.is_zero()) {
        IntMatrix h = lattice_basis(scaled_rows);
        const Integer step = abs(g0[p]);
        for (std::size_t i = 0; i < h.rows(); ++i) {
            QVector base(d);
            for (std::size_t j = 0; j < d; ++j) {
                base[j] = Rational(h(i, j)) / Rational(den);
            }
            std::optional<QVector> lift;
            for (Integer k = 0; k < step && !lift; ++k) {
                Rational t = Rational(k) / Rational(step);
                QVector y(d);
                bool integral = true;
                for (std::size_t j = 0; j < d; ++j) {
                    y[j] = base[j] + t * Rational(g0[j]);
                    y[j].canonicalize();
                    integral = integral && is_integer(y[j]);
                }
                if (integral) {
                    lift = y;
                }
            }
            if (!lift) {
                throw error("integral lift failed");
            }
            out.push_back(b * *lift);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Quasi-canonical coordinates

/// Multivariate polynomial with rational coefficients.
struct Poly {
    std::size_t vars = 0;
    std::map<std::vector<long>, Rational> terms;

    static Poly constant(std::size_t vars, const Rational& c)
    {
        Poly p{vars, {}};
        if (c != 0) {
            p.terms[std::vector<long>(vars, 0)] = c;
        }
        return p;
    }

    static Poly variable(std::size_t vars, std::size_t i)
    {
        Poly p{vars, {}};
        std::vector<long> e(vars, 0);
        e[i] = 1;
        p.terms[e] = 1;
        return p;
    }

    bool is_zero() const { return terms.empty(); }

    Rational coefficient(const std::vector<long>& e) const
    {
        auto it = terms.find(e);
        return it == terms.end() ? Rational(0) : it->second;
    }

    Rational constant_term() const { return coefficient(std::vector<long>(vars, 0)); }

    long degree() const
    {
        long d = -1;
        for (const auto& [e, c] : terms) {
            long s = 0;
            for (long x : e) {
                s += x;
            }
            d = std::max(d, s);
        }
        return d;
    }

    Poly& operator+=(const Poly& o)
    {
        for (const auto& [e, c] : o.terms) {
            Rational& x = terms[e];
            x += c;
            if (x == 0) {
                terms.erase(e);
            }
        }
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a += b * Rational(-1); }

    friend Poly operator*(const Poly& a, const Rational& s)
    {
        Poly out{a.vars, {}};
        if (s == 0) {
            return out;
        }
        for (const auto& [e, c] : a.terms) {
            out.terms[e] = c * s;
        }
        return out;
    }

    friend Poly operator*(const Poly& a, const Poly& b)
    {
        Poly out{a.vars, {}};
        for (const auto& [ea, ca] : a.terms) {
            for (const auto& [eb, cb] : b.terms) {
                std::vector<long> e(a.vars);
                for (std::size_t i = 0; i < a.vars; ++i) {
                    e[i] = ea[i] + eb[i];
                }
                out += Poly{a.vars, {{e, ca * cb}}};
            }
        }
        return out;
    }

    Rational evaluate(const QVector& z) const
    {
        Rational s = 0;
        for (const auto& [e, c] : terms) {
            Rational t = c;
            for (std::size_t i = 0; i < vars; ++i) {
                for (long k = 0; k < e[i]; ++k) {
                    t *= z[i];
                }
            }
            s += t;
        }
        return s;
    }

    std::string str(const std::string& var = "z") const
    {
        if (terms.empty()) {
            return "0";
        }
        std::string s;
        for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
            const auto& [e, c] = *it;
            std::string mono;
            for (std::size_t i = 0; i < vars; ++i) {
                if (e[i] == 0) {
                    continue;
                }
                mono += (mono.empty() ? "" : "*") + var + "_" + std::to_string(i + 1) +
                        (e[i] > 1 ? "^" + std::to_string(e[i]) : "");
            }
            Rational a = abs(c);
            std::string coef = (a == 1 && !mono.empty()) ? "" : to_display(a) + (mono.empty() ? "" : "*");
            s += s.empty() ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + ");
            s += coef + mono;
        }
        return s;
    }
};

struct CoordinateForm {
    Poly numerator;   // sum_k <g^k|omega> m_kj
    QVector linear;   // coefficients of z_1..z_r in the affine part
    std::optional<Rational> constant;
    bool pure = false; // rho_j = 0
};

struct QuasiCanonicalResult {
    Poly denominator; // <g^0|omega>
    std::vector<CoordinateForm> forms;
    QMatrix linear_part;
    bool linear_is_identity = false;
    bool pure = false;

    std::string describe(std::size_t j) const
    {
        const auto& f = forms[j];
        std::string idx = std::to_string(j + 1);
        std::ostringstream os;
        os << "f_" << idx << " = ";
        std::string lin;
        for (std::size_t i = 0; i < f.linear.size(); ++i) {
            const Rational& c = f.linear[i];
            if (c == 0) {
                continue;
            }
            std::string mono = "z_" + std::to_string(i + 1);
            std::string coef = abs(c) == 1 ? "" : to_display(abs(c)) + "*";
            lin += lin.empty() ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + ");
            lin += coef + mono;
        }
        os << (lin.empty() ? "0" : lin) << " + c_" << idx;
        if (f.constant) {
            os << ", c_" << idx << " = " << to_display(*f.constant);
        }
        os << (f.pure ? ", rho_" + idx + " = 0" : ", rho_" + idx + " != 0");
        os << ", q_" << idx << " = exp(2*pi*i*f_" << idx << ")";
        return os.str();
    }
};

/// omega(z) = exp(sum z_j N_j) omega_0 as a vector of polynomials.
inline std::vector<Poly> orbit_polynomials(const std::vector<QMatrix>& ns, const QVector& omega0)
{
    const std::size_t r = ns.size();
    const std::size_t d = omega0.size();
    std::vector<Poly> term(d), total(d);
    for (std::size_t i = 0; i < d; ++i) {
        term[i] = Poly::constant(r, omega0[i]);
        total[i] = term[i];
    }
    for (std::size_t k = 1; k <= d; ++k) {
        std::vector<Poly> next(d, Poly{r, {}});
        for (std::size_t j = 0; j < r; ++j) {
            Poly zj = Poly::variable(r, j);
            for (std::size_t a = 0; a < d; ++a) {
                for (std::size_t b = 0; b < d; ++b) {
                    if (ns[j](a, b) != 0 && !term[b].is_zero()) {
                        next[a] += term[b] * zj * ns[j](a, b);
                    }
                }
            }
        }
        bool zero = true;
        for (auto& p : next) {
            p = p * (Rational(1) / Rational(static_cast<long>(k)));
            zero = zero && p.is_zero();
        }
        if (zero) {
            break;
        }
        term = next;
        for (std::size_t i = 0; i < d; ++i) {
            total[i] += term[i];
        }
    }
    return total;
}

inline Poly pairing(const QVector& u, const QMatrix& q, const std::vector<Poly>& v)
{
    const std::size_t d = u.size();
    Poly s{v.empty() ? 0 : v.front().vars, {}};
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) {
            Rational c = u[a] * q(a, b);
            if (c != 0) {
                s += v[b] * c;
            }
        }
    }
    return s;
}

/// f_j(z) = sum_k <g^k|omega> m_kj / <g^0|omega> with <u|v> = u^T Q v, split
/// into z-linear part, constant c_j and remainder rho_j (exactly).
inline QuasiCanonicalResult quasi_canonical_coordinates(const std::vector<QMatrix>& ns, const QVector& omega0,
                                                        const QMatrix& q, const std::vector<QVector>& g)
{
    check_commuting(ns);
    const std::size_t r = ns.size();
    const std::size_t d = omega0.size();
    if (q.rows() != d || q.cols() != d) {
        throw invalid_input("pairing matrix has wrong shape");
    }
    MMatrix m = m_matrix(ns, g);
    if (!m.invertible) {
        throw invalid_input("m is not invertible");
    }
    QMatrix minv = inverse(m.m);
    auto omega = orbit_polynomials(ns, omega0);
    QuasiCanonicalResult res;
    res.denominator = pairing(g.front(), q, omega);
    if (res.denominator.is_zero()) {
        throw invalid_input("degenerate orbit: <g^0|omega> vanishes identically");
    }
    std::vector<Poly> pk;
    for (std::size_t k = 1; k < g.size(); ++k) {
        pk.push_back(pairing(g[k], q, omega));
    }
    const Poly& p0 = res.denominator;
    const Rational p00 = p0.constant_term();
    res.linear_part = QMatrix(r, r);
    res.pure = true;
    for (std::size_t j = 0; j < r; ++j) {
        CoordinateForm f;
        f.numerator = Poly{r, {}};
        for (std::size_t k = 0; k < pk.size(); ++k) {
            f.numerator += pk[k] * minv(k, j);
        }
        f.linear = QVector(r, Rational(0));
        if (p00 != 0) {
            // Taylor expansion at z = 0 of F/P_0 to first order.
            Rational f0 = f.numerator.constant_term();
            f.constant = f0 / p00;
            Poly affine = Poly::constant(r, *f.constant);
            for (std::size_t i = 0; i < r; ++i) {
                std::vector<long> e(r, 0);
                e[i] = 1;
                Rational di = (f.numerator.coefficient(e) * p00 - f0 * p0.coefficient(e)) / (p00 * p00);
                f.linear[i] = di;
                affine += Poly::variable(r, i) * di;
            }
            f.pure = (f.numerator - affine * p0).is_zero();
        }
        for (std::size_t i = 0; i < r; ++i) {
            res.linear_part(j, i) = f.linear[i];
        }
        res.pure = res.pure && f.pure;
        res.forms.push_back(std::move(f));
    }
    res.linear_is_identity = res.linear_part == QMatrix::identity(r);
    return res;
}

} // namespace semitoric
