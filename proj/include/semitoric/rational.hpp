#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace semitoric {

using Integer = mpz_class;
using Rational = mpq_class;

// Error hierarchy. The CLI maps these onto its exit-code contract.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or out-of-contract input (CLI exit code 2).
class invalid_input : public error {
public:
    using error::error;
};

// A search or enumeration bound was exhausted (CLI exit code 3).
class resource_error : public error {
public:
    using error::error;
};

// Ambient rank beyond what the fixed-rank routines handle.
class unsupported_rank : public invalid_input {
public:
    using invalid_input::invalid_input;
};

inline Rational make_rational(const Integer& num, const Integer& den)
{
    if (den == 0) {
        throw invalid_input("zero denominator");
    }
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

inline Integer floor_of(const Rational& q)
{
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline Integer ceil_of(const Rational& q)
{
    Integer r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline Integer gcd(const Integer& a, const Integer& b)
{
    Integer g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

inline Integer lcm(const Integer& a, const Integer& b)
{
    Integer l;
    mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return l;
}

inline Integer abs(const Integer& a) { return a < 0 ? Integer(-a) : a; }
inline Rational abs(const Rational& a) { return a < 0 ? Rational(-a) : a; }

inline int sign(const Integer& a) { return sgn(a); }
inline int sign(const Rational& a) { return sgn(a); }

/// Canonical wire form of a rational: always "p/q" with q > 0.
inline std::string to_string(const Rational& q)
{
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline std::string to_string(const Integer& z) { return z.get_str(); }

/// Human-readable form: "p" for integers, "p/q" otherwise.
inline std::string to_display(const Rational& q)
{
    return is_integer(q) ? q.get_num().get_str() : to_string(q);
}

inline Integer parse_integer(std::string_view text)
{
    std::string s(text);
    if (s.empty()) {
        throw invalid_input("empty integer literal");
    }
    std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (start == s.size()) {
        throw invalid_input("malformed integer literal '" + s + "'");
    }
    for (std::size_t i = start; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') {
            throw invalid_input("malformed integer literal '" + s + "'");
        }
    }
    if (s[0] == '+') {
        s.erase(0, 1);
    }
    return Integer(s, 10);
}

/// Accepts "p" or "p/q" with an optional sign on p.
inline Rational parse_rational(std::string_view text)
{
    auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        return Rational(parse_integer(text));
    }
    Integer num = parse_integer(text.substr(0, slash));
    Integer den = parse_integer(text.substr(slash + 1));
    if (den <= 0) {
        throw invalid_input("denominator must be positive in '" + std::string(text) + "'");
    }
    return make_rational(num, den);
}

inline bool is_squarefree(const Integer& n)
{
    if (n < 1) {
        return false;
    }
    Integer m = n;
    for (Integer p = 2; p * p <= m; ++p) {
        if (m % p == 0) {
            m /= p;
            if (m % p == 0) {
                return false;
            }
        }
    }
    return true;
}

inline bool is_perfect_square(const Integer& n, Integer* root = nullptr)
{
    if (n < 0) {
        return false;
    }
    if (mpz_perfect_square_p(n.get_mpz_t()) == 0) {
        return false;
    }
    if (root != nullptr) {
        mpz_sqrt(root->get_mpz_t(), n.get_mpz_t());
    }
    return true;
}

inline Integer isqrt(const Integer& n)
{
    Integer r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

} // namespace semitoric
