#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "cone.hpp"
#include "matrix.hpp"

namespace semitoric {

/// A lattice basis l^1..l^r (columns) fixing the exponent coordinates.
class Framing {
public:
    explicit Framing(IntMatrix basis) : basis_(std::move(basis))
    {
        if (!basis_.is_square() || basis_.rows() == 0) {
            throw invalid_input("framing basis must be a nonempty square matrix");
        }
        Integer det = determinant(basis_);
        if (det != 1 && det != -1) {
            throw invalid_input("framing basis is not unimodular (det = " + det.get_str() + ")");
        }
    }

    static Framing standard(std::size_t r) { return Framing(IntMatrix::identity(r)); }

    const IntMatrix& basis() const { return basis_; }
    std::size_t rank() const { return basis_.rows(); }

    /// relint cone<l^1..l^r>
    Cone cone() const
    {
        std::vector<Vector> gens;
        for (std::size_t i = 0; i < rank(); ++i) {
            gens.push_back(to_vector(basis_.col(i)));
        }
        return Cone(rank(), gens, ConeKind::relative_interior);
    }

    /// Every l^i in the closure of `support`.
    bool inside(const Cone& support) const
    {
        for (std::size_t i = 0; i < rank(); ++i) {
            if (!support.closure().contains(to_vector(basis_.col(i)))) {
                return false;
            }
        }
        return true;
    }

    bool operator==(const Framing& o) const { return basis_ == o.basis_; }

private:
    IntMatrix basis_;
};

inline Integer exponent_degree(const IntVector& eta)
{
    Integer s = 0;
    for (const auto& x : eta) {
        s += abs(x);
    }
    return s;
}

/// Series sum c_eta w^eta, complete for |eta|_1 <= truncation.
class FormalSeries {
public:
    using Terms = std::map<IntVector, Rational>;

    FormalSeries(Framing framing, std::size_t truncation, Terms terms = {})
        : framing_(std::move(framing)), truncation_(truncation)
    {
        for (auto& [eta, c] : terms) {
            add_term(eta, c);
        }
    }

    const Framing& framing() const { return framing_; }
    std::size_t rank() const { return framing_.rank(); }
    std::size_t truncation() const { return truncation_; }
    const Terms& terms() const { return terms_; }

    Rational coefficient(const IntVector& eta) const
    {
        auto it = terms_.find(eta);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    /// Adds c to the coefficient of w^eta; terms beyond the truncation are rejected.
    void add_term(const IntVector& eta, const Rational& c)
    {
        if (eta.size() != rank()) {
            throw invalid_input("exponent " + to_string(to_vector(eta)) + " has wrong length");
        }
        if (exponent_degree(eta) > truncation_) {
            throw invalid_input("exponent " + to_string(to_vector(eta)) + " exceeds truncation " +
                                std::to_string(truncation_));
        }
        Rational& x = terms_[eta];
        x += c;
        x.canonicalize();
        if (x == 0) {
            terms_.erase(eta);
        }
    }

    bool operator==(const FormalSeries& o) const
    {
        return framing_ == o.framing_ && truncation_ == o.truncation_ && terms_ == o.terms_;
    }

private:
    Framing framing_;
    std::size_t truncation_;
    Terms terms_;
};

struct EffectivityVerdict {
    bool effective = true;
    std::optional<IntVector> witness;
};

/// Effective when every stored exponent is componentwise nonnegative.
inline EffectivityVerdict effectivity_check(const FormalSeries& s)
{
    for (const auto& [eta, c] : s.terms()) {
        for (const auto& x : eta) {
            if (x < 0) {
                return {false, eta};
            }
        }
    }
    return {};
}

inline EffectivityVerdict effectivity_check(const FormalSeries& s, const Framing& f)
{
    if (!(s.framing() == f)) {
        throw invalid_input("series is not expressed in the given framing");
    }
    return effectivity_check(s);
}

/// max_j sum_i |a_ij|
inline Integer column_norm(const IntMatrix& a)
{
    Integer best = 0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        Integer s = 0;
        for (std::size_t i = 0; i < a.rows(); ++i) {
            s += abs(a(i, j));
        }
        best = std::max(best, s);
    }
    return best;
}

inline void check_unimodular(const IntMatrix& m, std::size_t r)
{
    if (!m.is_square() || m.rows() != r) {
        throw invalid_input("change of basis must be " + std::to_string(r) + "x" + std::to_string(r));
    }
    Integer det = determinant(m);
    if (det != 1 && det != -1) {
        throw invalid_input("change of basis is not unimodular (det = " + det.get_str() + ")");
    }
}

/// Largest t' such that every exponent of degree <= t' in the new framing
/// comes from one of degree <= t in the old: t' = ceil((t+1)/|M^-T|_1) - 1.
inline std::size_t complete_order(std::size_t t, const IntMatrix& m)
{
    Integer norm = column_norm(unimodular_inverse(m).transpose());
    Integer tp = (Integer(static_cast<unsigned long>(t)) + 1 + norm - 1) / norm - 1;
    return static_cast<std::size_t>(tp.get_ui());
}

/// Change of framing l -> l' with l'^i = sum_k M_ki l^k. Exponents pair
/// with the basis, so eta' = M^T eta; coefficients are untouched. The result
/// keeps the terms of degree <= complete_order(t, M).
inline FormalSeries reframe(const FormalSeries& s, const IntMatrix& m)
{
    check_unimodular(m, s.rank());
    const std::size_t t = complete_order(s.truncation(), m);
    FormalSeries out(Framing(s.framing().basis() * m), t);
    IntMatrix mt = m.transpose();
    for (const auto& [eta, c] : s.terms()) {
        IntVector image = mt * eta;
        if (exponent_degree(image) <= t) {
            out.add_term(image, c);
        }
    }
    return out;
}

/// True when l' lies in the closure of the old cone (M >= 0), which is
/// exactly when effective series stay effective; otherwise the witness is an
/// old exponent e_k whose image has a negative entry.
inline EffectivityVerdict reframe_preserves_effectivity(const IntMatrix& m)
{
    for (std::size_t k = 0; k < m.rows(); ++k) {
        for (std::size_t i = 0; i < m.cols(); ++i) {
            if (m(k, i) < 0) {
                IntVector e(m.rows(), Integer(0));
                e[k] = 1;
                return {false, e};
            }
        }
    }
    return {};
}

inline FormalSeries truncate(const FormalSeries& s, std::size_t order)
{
    FormalSeries out(s.framing(), std::min(order, s.truncation()));
    for (const auto& [eta, c] : s.terms()) {
        if (exponent_degree(eta) <= out.truncation()) {
            out.add_term(eta, c);
        }
    }
    return out;
}

namespace detail {

inline void require_same_framing(const FormalSeries& a, const FormalSeries& b)
{
    if (!(a.framing() == b.framing())) {
        throw invalid_input("framing mismatch");
    }
}

} // namespace detail

inline FormalSeries add(const FormalSeries& a, const FormalSeries& b)
{
    detail::require_same_framing(a, b);
    FormalSeries out = truncate(a, b.truncation());
    for (const auto& [eta, c] : b.terms()) {
        if (exponent_degree(eta) <= out.truncation()) {
            out.add_term(eta, c);
        }
    }
    return out;
}

/// Cauchy product truncated to the common order; exact for effective inputs.
inline FormalSeries multiply(const FormalSeries& a, const FormalSeries& b)
{
    detail::require_same_framing(a, b);
    FormalSeries out(a.framing(), std::min(a.truncation(), b.truncation()));
    for (const auto& [ea, ca] : a.terms()) {
        for (const auto& [eb, cb] : b.terms()) {
            IntVector e = ea;
            for (std::size_t i = 0; i < e.size(); ++i) {
                e[i] += eb[i];
            }
            if (exponent_degree(e) <= out.truncation()) {
                out.add_term(e, ca * cb);
            }
        }
    }
    return out;
}

inline FormalSeries operator+(const FormalSeries& a, const FormalSeries& b) { return add(a, b); }
inline FormalSeries operator*(const FormalSeries& a, const FormalSeries& b) { return multiply(a, b); }

} // namespace semitoric
