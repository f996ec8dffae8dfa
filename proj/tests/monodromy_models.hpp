#pragma once

// Model monodromy data shared by unit tests and the acceptance binary.

#include <random>
#include <string>
#include <vector>

#include "semitoric/monodromy.hpp"

namespace models {

using namespace semitoric;

struct Fixture {
    std::string name;
    MonodromySet set;
    bool expected;
};

/// kappa[j][k][l], fully symmetric.
using Cubic = std::vector<std::vector<std::vector<Rational>>>;

inline Cubic diagonal_cubic(const std::vector<long>& diag)
{
    std::size_t r = diag.size();
    Cubic k(r, std::vector<std::vector<Rational>>(r, std::vector<Rational>(r, Rational(0))));
    for (std::size_t i = 0; i < r; ++i) {
        k[i][i][i] = diag[i];
    }
    return k;
}

/// Basis f_0, f_1..f_r, e_1..e_r, e_0 with N_j f_0 = f_j,
/// N_j f_k = sum_l kappa_jkl e_l, N_j e_k = delta_jk e_0.
inline std::vector<QMatrix> cubic_logs(const Cubic& kappa)
{
    const std::size_t r = kappa.size();
    const std::size_t d = 2 * r + 2;
    std::vector<QMatrix> out;
    for (std::size_t j = 0; j < r; ++j) {
        QMatrix n(d, d);
        n(1 + j, 0) = 1;
        for (std::size_t k = 0; k < r; ++k) {
            for (std::size_t l = 0; l < r; ++l) {
                n(1 + r + l, 1 + k) = kappa[j][k][l];
            }
        }
        n(d - 1, 1 + r + j) = 1;
        out.push_back(n);
    }
    return out;
}

/// Pairing with <f_0|e_0> = <f_k|e_k> = 1 (symmetric).
inline QMatrix cubic_pairing(std::size_t r)
{
    const std::size_t d = 2 * r + 2;
    QMatrix q(d, d);
    q(0, d - 1) = q(d - 1, 0) = 1;
    for (std::size_t k = 0; k < r; ++k) {
        q(1 + k, 1 + r + k) = q(1 + r + k, 1 + k) = 1;
    }
    return q;
}

/// Single nilpotent Jordan block, N e_i = e_{i-1}.
inline QMatrix jordan_log(std::size_t d)
{
    QMatrix n(d, d);
    for (std::size_t i = 1; i < d; ++i) {
        n(i - 1, i) = 1;
    }
    return n;
}

inline std::vector<QMatrix> exps(const std::vector<QMatrix>& ns)
{
    std::vector<QMatrix> out;
    for (const auto& n : ns) {
        out.push_back(nilpotent_exp(n));
    }
    return out;
}

inline MonodromySet make_set(std::vector<QMatrix> ops, std::size_t n, std::size_t dim_moduli)
{
    MonodromySet s;
    s.operators = std::move(ops);
    s.n = n;
    s.dim_moduli = dim_moduli;
    return s;
}

inline QMatrix conjugate(const QMatrix& t, const QMatrix& s) { return s * t * inverse(s); }

inline MonodromySet conjugated(MonodromySet s, const IntMatrix& u)
{
    QMatrix q = to_rational(u);
    for (auto& t : s.operators) {
        t = conjugate(t, q);
    }
    return s;
}

/// x_1^3 + ... + x_r^3 + (x_1 + ... + x_r)^3; positive definite Hessian on a > 0.
inline Cubic sum_of_cubes_plus_mixed(std::size_t r)
{
    Cubic k = diagonal_cubic(std::vector<long>(r, 1));
    for (auto& a : k) {
        for (auto& b : a) {
            for (auto& c : b) {
                c += 1;
            }
        }
    }
    return k;
}

/// Ten maximally unipotent and ten failing configurations.
inline std::vector<Fixture> fixtures()
{
    std::vector<Fixture> f;
    auto diag = [](std::vector<long> v) {
        QMatrix m(v.size(), v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            m(i, i) = v[i];
        }
        return m;
    };
    std::mt19937_64 rng(7);
    auto unimodular = [&](std::size_t n) {
        IntMatrix m = IntMatrix::identity(n);
        for (int s = 0; s < 8; ++s) {
            std::size_t i = rng() % n, j = rng() % n;
            if (i != j) {
                long k = static_cast<long>(rng() % 5) - 2;
                for (std::size_t c = 0; c < n; ++c) {
                    m(i, c) += k * m(j, c);
                }
            }
        }
        return m;
    };

    f.push_back({"elliptic", make_set(exps({jordan_log(2)}), 1, 1), true});
    f.push_back({"quintic-like", make_set(exps({jordan_log(4)}), 3, 1), true});
    f.push_back({"cubic r=1", make_set(exps(cubic_logs(diagonal_cubic({5}))), 3, 1), true});
    f.push_back({"cubic r=2", make_set(exps(cubic_logs(diagonal_cubic({1, 1}))), 3, 2), true});
    f.push_back({"cubic r=2 mixed", make_set(exps(cubic_logs(sum_of_cubes_plus_mixed(2))), 3, 2), true});
    f.push_back({"cubic r=3", make_set(exps(cubic_logs(sum_of_cubes_plus_mixed(3))), 3, 3), true});
    f.push_back({"elliptic conjugated", conjugated(f[0].set, unimodular(2)), true});
    f.push_back({"quintic-like conjugated", conjugated(f[1].set, unimodular(4)), true});
    f.push_back({"cubic r=2 conjugated", conjugated(f[3].set, unimodular(6)), true});
    f.push_back({"cubic r=3 conjugated", conjugated(f[5].set, unimodular(8)), true});

    f.push_back({"identity", make_set({QMatrix::identity(3)}, 1, 1), false});
    f.push_back({"not unipotent", make_set({diag({1, 2})}, 1, 1), false});
    f.push_back({"jordan 4 with n=2", make_set(exps({jordan_log(4)}), 2, 1), false});
    f.push_back({"jordan 4 with dimM=2", make_set(exps({jordan_log(4)}), 3, 2), false});
    f.push_back({"jordan 3 with n=3", make_set(exps({jordan_log(3)}), 3, 1), false});
    f.push_back({"singular hessian", make_set(exps(cubic_logs(diagonal_cubic({1, 0}))), 3, 2), false});
    {
        auto ns = cubic_logs(diagonal_cubic({1, 1}));
        f.push_back({"repeated operator", make_set(exps({ns[0], ns[0]}), 3, 2), false});
    }
    {
        auto ns = cubic_logs(diagonal_cubic({5}));
        f.push_back({"zero second operator", make_set(exps({ns[0], QMatrix(4, 4)}), 3, 1), false});
    }
    f.push_back({"elliptic repeated", make_set(exps({jordan_log(2), jordan_log(2)}), 1, 1), false});
    {
        QMatrix n(4, 4);
        n(0, 1) = 1;
        n(2, 3) = 1;
        f.push_back({"two jordan blocks", make_set(exps({n}), 1, 1), false});
    }
    return f;
}

} // namespace models
