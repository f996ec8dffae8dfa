#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>

#include "rational.hpp"

namespace semitoric {

class mixed_discriminant : public invalid_input {
public:
    using invalid_input::invalid_input;
};

/// An element a + b*sqrt(D) of Q or of a real quadratic field Q(sqrt(D)).
///
/// The rational variant carries D == 0. A quadratic value whose surd part
/// happens to vanish keeps its discriminant so that the field context
/// survives arithmetic; equality and ordering are by value.
class Scalar {
public:
    Scalar() = default;
    Scalar(int v) : a_(v) {}
    Scalar(long v) : a_(v) {}
    Scalar(const Integer& v) : a_(v) {}
    Scalar(Rational v) : a_(std::move(v)) { a_.canonicalize(); }
    Scalar(Rational a, Rational b, std::int64_t d) : a_(std::move(a)), b_(std::move(b)), d_(d)
    {
        a_.canonicalize();
        b_.canonicalize();
        if (d_ == 0) {
            if (b_ != 0) {
                throw invalid_input("surd part requires a discriminant");
            }
            return;
        }
        check_discriminant(d_);
    }

    static Scalar sqrt_of(std::int64_t d) { return Scalar(Rational(0), Rational(1), d); }

    static void check_discriminant(std::int64_t d)
    {
        if (d < 2 || !is_squarefree(Integer(static_cast<long>(d)))) {
            throw invalid_input("discriminant " + std::to_string(d) + " is not squarefree >= 2");
        }
    }

    const Rational& rational_part() const { return a_; }
    const Rational& surd_part() const { return b_; }
    std::int64_t discriminant() const { return d_; }
    bool is_rational() const { return b_ == 0; }
    bool is_zero() const { return a_ == 0 && b_ == 0; }

    Scalar conjugate() const
    {
        Scalar r = *this;
        r.b_ = -r.b_;
        return r;
    }

    /// a^2 - b^2 D
    Rational norm() const { return a_ * a_ - b_ * b_ * Rational(static_cast<long>(d_)); }
    Rational trace() const { return 2 * a_; }

    int sign() const
    {
        int sa = sgn(a_);
        int sb = sgn(b_);
        if (sb == 0) {
            return sa;
        }
        if (sa == 0 || sa == sb) {
            return sb;
        }
        Rational lhs = a_ * a_;
        Rational rhs = b_ * b_ * Rational(static_cast<long>(d_));
        return lhs > rhs ? sa : sb;
    }

    bool totally_positive() const { return sign() > 0 && conjugate().sign() > 0; }

    double to_double() const
    {
        return a_.get_d() + b_.get_d() * std::sqrt(static_cast<double>(d_));
    }

    Integer floor() const
    {
        if (is_rational()) {
            return floor_of(a_);
        }
        Integer k(std::floor(to_double()));
        while (Scalar(k) > *this) {
            --k;
        }
        while (Scalar(Integer(k + 1)) <= *this) {
            ++k;
        }
        return k;
    }

    Scalar inverse() const
    {
        if (is_zero()) {
            throw invalid_input("division by zero");
        }
        Rational n = norm();
        return Scalar(a_ / n, -b_ / n, d_, raw_tag{});
    }

    Scalar operator-() const { return Scalar(-a_, -b_, d_, raw_tag{}); }

    Scalar& operator+=(const Scalar& o)
    {
        d_ = merge(d_, o);
        a_ += o.a_;
        b_ += o.b_;
        return *this;
    }
    Scalar& operator-=(const Scalar& o)
    {
        d_ = merge(d_, o);
        a_ -= o.a_;
        b_ -= o.b_;
        return *this;
    }
    Scalar& operator*=(const Scalar& o)
    {
        std::int64_t d = merge(d_, o);
        Rational na = a_ * o.a_ + b_ * o.b_ * Rational(static_cast<long>(d));
        Rational nb = a_ * o.b_ + b_ * o.a_;
        a_ = std::move(na);
        b_ = std::move(nb);
        d_ = d;
        return *this;
    }
    Scalar& operator/=(const Scalar& o) { return *this *= o.inverse(); }

    friend Scalar operator+(Scalar x, const Scalar& y) { return x += y; }
    friend Scalar operator-(Scalar x, const Scalar& y) { return x -= y; }
    friend Scalar operator*(Scalar x, const Scalar& y) { return x *= y; }
    friend Scalar operator/(Scalar x, const Scalar& y) { return x /= y; }

    friend bool operator==(const Scalar& x, const Scalar& y)
    {
        if (x.a_ != y.a_ || x.b_ != y.b_) {
            return false;
        }
        if (x.b_ != 0 && x.d_ != y.d_) {
            throw mixed_discriminant("comparison across different quadratic fields");
        }
        return true;
    }
    friend bool operator!=(const Scalar& x, const Scalar& y) { return !(x == y); }
    friend bool operator<(const Scalar& x, const Scalar& y) { return (x - y).sign() < 0; }
    friend bool operator>(const Scalar& x, const Scalar& y) { return (x - y).sign() > 0; }
    friend bool operator<=(const Scalar& x, const Scalar& y) { return (x - y).sign() <= 0; }
    friend bool operator>=(const Scalar& x, const Scalar& y) { return (x - y).sign() >= 0; }

    std::string str() const
    {
        if (is_rational()) {
            return to_display(a_);
        }
        std::string s;
        if (a_ != 0) {
            s = to_display(a_) + (b_ > 0 ? "+" : "-");
        } else if (b_ < 0) {
            s = "-";
        }
        Rational mb = abs(b_);
        if (mb != 1) {
            s += to_display(mb) + "*";
        }
        return s + "sqrt(" + std::to_string(d_) + ")";
    }

    friend std::ostream& operator<<(std::ostream& os, const Scalar& x) { return os << x.str(); }

private:
    struct raw_tag {};
    Scalar(Rational a, Rational b, std::int64_t d, raw_tag) : a_(std::move(a)), b_(std::move(b)), d_(d) {}

    static std::int64_t merge(std::int64_t d, const Scalar& o)
    {
        if (o.d_ == 0) {
            return d;
        }
        if (d == 0 || d == o.d_) {
            return o.d_;
        }
        throw mixed_discriminant("mixing Q(sqrt(" + std::to_string(d) + ")) and Q(sqrt(" +
                                 std::to_string(o.d_) + "))");
    }

    Rational a_{0};
    Rational b_{0};
    std::int64_t d_ = 0;
};

inline bool is_zero(const Scalar& x) { return x.is_zero(); }
inline bool is_zero(const Rational& x) { return x == 0; }
inline bool is_zero(const Integer& x) { return x == 0; }
inline int sign(const Scalar& x) { return x.sign(); }

} // namespace semitoric
