#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "cone.hpp"

namespace semitoric {

using QuadNum = Scalar;

/// omega with O_K = Z + Z*omega.
inline QuadNum omega(std::int64_t d)
{
    Scalar::check_discriminant(d);
    if (d % 4 == 1) {
        return QuadNum(Rational(1, 2), Rational(1, 2), d);
    }
    return QuadNum::sqrt_of(d);
}

/// Phi = (identity embedding, conjugate embedding), as exact values.
inline std::pair<QuadNum, QuadNum> embed(const QuadNum& x) { return {x, x.conjugate()}; }

inline QuadNum in_field(const Rational& x, std::int64_t d) { return QuadNum(x, Rational(0), d); }

/// An ideal given by an explicit Z-basis (alpha, beta).
class QuadIdeal {
public:
    QuadIdeal(QuadNum alpha, QuadNum beta, std::int64_t d) : alpha_(std::move(alpha)), beta_(std::move(beta)), d_(d)
    {
        Scalar::check_discriminant(d);
        alpha_ += in_field(0, d);
        beta_ += in_field(0, d);
        if (basis_determinant().is_zero()) {
            throw invalid_input("degenerate ideal basis: alpha*beta' - alpha'*beta = 0");
        }
    }

    static QuadIdeal ring_of_integers(std::int64_t d) { return QuadIdeal(in_field(1, d), omega(d), d); }

    const QuadNum& alpha() const { return alpha_; }
    const QuadNum& beta() const { return beta_; }
    std::int64_t discriminant() const { return d_; }

    /// alpha*beta' - alpha'*beta
    QuadNum basis_determinant() const { return alpha_ * beta_.conjugate() - alpha_.conjugate() * beta_; }

    QuadNum element(const Integer& p, const Integer& q) const { return Scalar(p) * alpha_ + Scalar(q) * beta_; }

    /// Coordinates (p, q) of x = p*alpha + q*beta, over Q.
    QVector coordinates(const QuadNum& x) const
    {
        const Rational& a1 = alpha_.rational_part();
        const Rational& a2 = alpha_.surd_part();
        const Rational& b1 = beta_.rational_part();
        const Rational& b2 = beta_.surd_part();
        Rational det = a1 * b2 - a2 * b1;
        Rational p = (x.rational_part() * b2 - x.surd_part() * b1) / det;
        Rational q = (a1 * x.surd_part() - a2 * x.rational_part()) / det;
        return {p, q};
    }

    bool contains(const QuadNum& x) const
    {
        auto c = coordinates(x);
        return is_integer(c[0]) && is_integer(c[1]);
    }

private:
    QuadNum alpha_;
    QuadNum beta_;
    std::int64_t d_;
};

/// The smallest unit eps > 1 of O_K with both embeddings positive.
///
/// Units appear among p - q*omega' for convergents p/q of omega; the first
/// one of norm +-1 is the fundamental unit, squared when its norm is -1.
inline QuadNum fundamental_totally_positive_unit(std::int64_t d, const Integer& bound = Integer(100000000))
{
    Scalar::check_discriminant(d);
    const QuadNum w = omega(d);
    const QuadNum wc = w.conjugate();
    QuadNum x = w;
    Integer p_prev = 1, p_prev2 = 0;
    Integer q_prev = 0, q_prev2 = 1;
    while (true) {
        Integer a = x.floor();
        Integer p = a * p_prev + p_prev2;
        Integer q = a * q_prev + q_prev2;
        if (q > bound) {
            throw resource_error("Pell search exceeded b <= " + bound.get_str() + " for D=" + std::to_string(d));
        }
        QuadNum eta = Scalar(p) - Scalar(q) * wc;
        Rational n = eta.norm();
        if ((n == 1 || n == -1) && eta > Scalar(1)) {
            return n == 1 ? eta : eta * eta;
        }
        p_prev2 = p_prev;
        p_prev = p;
        q_prev2 = q_prev;
        q_prev = q;
        x = (x - Scalar(a)).inverse();
    }
}

/// Exact 2x2 matrix over Q(sqrt D) of (w1, w2) -> (beta' w1 - beta w2, -alpha' w1 + alpha w2)
/// scaled by 1/(alpha beta' - alpha' beta). It sends Phi(alpha), Phi(beta) to e_1, e_2.
inline ScalarMatrix tube_coordinates(const QuadIdeal& ideal)
{
    QuadNum det = ideal.basis_determinant();
    const QuadNum& a = ideal.alpha();
    const QuadNum& b = ideal.beta();
    ScalarMatrix m(2, 2);
    m(0, 0) = b.conjugate() / det;
    m(0, 1) = -b / det;
    m(1, 0) = -a.conjugate() / det;
    m(1, 1) = a / det;
    return m;
}

/// Open cone {y : alpha y1 + beta y2 > 0, alpha' y1 + beta' y2 > 0}.
inline Cone cusp_cone(const QuadIdeal& ideal)
{
    Vector n1{ideal.alpha(), ideal.beta()};
    Vector n2{ideal.alpha().conjugate(), ideal.beta().conjugate()};
    return Cone::from_inequalities(2, {}, {n1, n2}, ConeKind::relative_interior);
}

/// Ideal plus a totally positive unit stabilizing it.
class CuspData {
public:
    CuspData(QuadIdeal ideal, QuadNum unit) : ideal_(std::move(ideal)), unit_(std::move(unit))
    {
        std::int64_t d = ideal_.discriminant();
        unit_ += in_field(0, d);
        if (unit_.norm() != 1) {
            throw invalid_input("unit " + unit_.str() + " must have norm +1");
        }
        if (!unit_.totally_positive()) {
            throw invalid_input("unit " + unit_.str() + " is not totally positive");
        }
        if (unit_ == Scalar(1)) {
            throw invalid_input("unit must differ from 1");
        }
        const QuadNum w = omega(d);
        auto c = QuadIdeal(in_field(1, d), w, d).coordinates(unit_);
        if (!is_integer(c[0]) || !is_integer(c[1])) {
            throw invalid_input("unit " + unit_.str() + " is not an algebraic integer");
        }
        // The chain runs towards increasing x/x'; eps and eps^-1 generate the same group.
        if (unit_ < Scalar(1)) {
            unit_ = unit_.inverse();
        }
        for (const auto& z : {ideal_.alpha(), ideal_.beta()}) {
            if (!ideal_.contains(unit_ * z)) {
                throw invalid_input("eps*a != a: eps*" + z.str() + " is not in the ideal");
            }
        }
    }

    static CuspData standard(std::int64_t d)
    {
        return CuspData(QuadIdeal::ring_of_integers(d), fundamental_totally_positive_unit(d));
    }

    const QuadIdeal& ideal() const { return ideal_; }
    const QuadNum& unit() const { return unit_; }
    std::int64_t discriminant() const { return ideal_.discriminant(); }

    /// Multiplication by eps in the lattice coordinates (p, q); columns are
    /// the coordinates of eps*alpha and eps*beta.
    IntMatrix unit_action() const
    {
        auto ca = ideal_.coordinates(unit_ * ideal_.alpha());
        auto cb = ideal_.coordinates(unit_ * ideal_.beta());
        IntMatrix u(2, 2);
        u(0, 0) = ca[0].get_num();
        u(1, 0) = ca[1].get_num();
        u(0, 1) = cb[0].get_num();
        u(1, 1) = cb[1].get_num();
        return u;
    }

    Cone cone() const { return cusp_cone(ideal_); }

private:
    QuadIdeal ideal_;
    QuadNum unit_;
};

} // namespace semitoric
