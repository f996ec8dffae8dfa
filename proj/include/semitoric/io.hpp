#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "connection.hpp"
#include "cusp.hpp"
#include "decomposition.hpp"
#include "monodromy.hpp"
#include "series.hpp"

namespace semitoric::io {

using json = nlohmann::ordered_json;

constexpr int format_version = 1;

// ---------------------------------------------------------------------------
// Text and parse errors

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw invalid_input("cannot read " + path);
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw invalid_input("cannot write " + path);
    }
    out << text;
}

/// Parses JSON text; syntax errors report the 1-based line.
inline json parse_text(const std::string& text, const std::string& source)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i) {
            line += text[i] == '\n';
        }
        throw invalid_input(source + ":" + std::to_string(line) + ": malformed JSON (" + e.what() + ")");
    }
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline const json& field(const json& obj, const std::string& key, const std::string& path)
{
    if (!obj.is_object()) {
        throw invalid_input(path + ": expected an object");
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw invalid_input(path + ": missing field '" + key + "'");
    }
    return *it;
}

inline const json* optional_field(const json& obj, const std::string& key)
{
    auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
}

inline std::string at(const std::string& path, const std::string& key) { return path + "." + key; }
inline std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

inline const json& array_field(const json& obj, const std::string& key, const std::string& path)
{
    const json& a = field(obj, key, path);
    if (!a.is_array()) {
        throw invalid_input(at(path, key) + ": expected an array");
    }
    return a;
}

// ---------------------------------------------------------------------------
// Scalars

inline Integer read_integer(const json& j, const std::string& path)
{
    if (j.is_number_integer()) {
        return j.is_number_unsigned() ? Integer(j.get<unsigned long>()) : Integer(j.get<long>());
    }
    if (j.is_string()) {
        try {
            return parse_integer(j.get<std::string>());
        } catch (const invalid_input& e) {
            throw invalid_input(path + ": " + e.what());
        }
    }
    throw invalid_input(path + ": expected an integer");
}

inline std::size_t read_size(const json& j, const std::string& path)
{
    Integer z = read_integer(j, path);
    if (z < 0 || !z.fits_ulong_p()) {
        throw invalid_input(path + ": expected a nonnegative integer");
    }
    return z.get_ui();
}

inline Rational read_rational(const json& j, const std::string& path)
{
    if (j.is_number_integer()) {
        return Rational(read_integer(j, path));
    }
    if (j.is_string()) {
        try {
            return parse_rational(j.get<std::string>());
        } catch (const invalid_input& e) {
            throw invalid_input(path + ": " + e.what());
        }
    }
    throw invalid_input(path + ": expected a rational \"p/q\"");
}

inline Scalar read_scalar(const json& j, const std::string& path)
{
    if (j.is_object()) {
        Rational a = read_rational(field(j, "a", path), at(path, "a"));
        Rational b = read_rational(field(j, "b", path), at(path, "b"));
        Integer d = read_integer(field(j, "D", path), at(path, "D"));
        if (!d.fits_slong_p()) {
            throw invalid_input(at(path, "D") + ": out of range");
        }
        try {
            return Scalar(a, b, d.get_si());
        } catch (const invalid_input& e) {
            throw invalid_input(path + ": " + e.what());
        }
    }
    return Scalar(read_rational(j, path));
}

inline json write_integer(const Integer& z)
{
    if (z.fits_slong_p()) {
        return json(z.get_si());
    }
    return json(z.get_str());
}

inline json write_rational(const Rational& q) { return json(to_string(q)); }

inline json write_scalar(const Scalar& x)
{
    if (x.is_rational()) {
        return write_rational(x.rational_part());
    }
    json j = json::object();
    j["a"] = write_rational(x.rational_part());
    j["b"] = write_rational(x.surd_part());
    j["D"] = x.discriminant();
    return j;
}

// ---------------------------------------------------------------------------
// Vectors and matrices

template <typename T, typename Read>
std::vector<T> read_list(const json& j, const std::string& path, Read read, std::optional<std::size_t> size = {})
{
    if (!j.is_array()) {
        throw invalid_input(path + ": expected an array");
    }
    if (size && j.size() != *size) {
        throw invalid_input(path + ": expected " + std::to_string(*size) + " entries, got " + std::to_string(j.size()));
    }
    std::vector<T> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(read(j[i], at(path, i)));
    }
    return out;
}

inline IntVector read_int_vector(const json& j, const std::string& path, std::optional<std::size_t> size = {})
{
    return read_list<Integer>(j, path, read_integer, size);
}

inline QVector read_q_vector(const json& j, const std::string& path, std::optional<std::size_t> size = {})
{
    return read_list<Rational>(j, path, read_rational, size);
}

inline Vector read_vector(const json& j, const std::string& path, std::optional<std::size_t> size = {})
{
    return read_list<Scalar>(j, path, read_scalar, size);
}

template <typename T, typename Read>
Matrix<T> read_matrix(const json& j, const std::string& path, Read read, std::optional<std::size_t> rows,
                      std::optional<std::size_t> cols)
{
    auto list = read_list<std::vector<T>>(
        j, path, [&](const json& row, const std::string& p) { return read_list<T>(row, p, read, cols); }, rows);
    if (list.empty()) {
        throw invalid_input(path + ": empty matrix");
    }
    for (std::size_t i = 1; i < list.size(); ++i) {
        if (list[i].size() != list[0].size()) {
            throw invalid_input(at(path, i) + ": ragged matrix row");
        }
    }
    return Matrix<T>::from_rows(list, list[0].size());
}

inline IntMatrix read_int_matrix(const json& j, const std::string& path, std::optional<std::size_t> rows = {},
                                 std::optional<std::size_t> cols = {})
{
    return read_matrix<Integer>(j, path, read_integer, rows, cols);
}

inline QMatrix read_q_matrix(const json& j, const std::string& path, std::optional<std::size_t> rows = {},
                             std::optional<std::size_t> cols = {})
{
    return read_matrix<Rational>(j, path, read_rational, rows, cols);
}

inline json write_int_vector(const IntVector& v)
{
    json j = json::array();
    for (const auto& x : v) {
        j.push_back(write_integer(x));
    }
    return j;
}

inline json write_q_vector(const QVector& v)
{
    json j = json::array();
    for (const auto& x : v) {
        j.push_back(write_rational(x));
    }
    return j;
}

inline json write_vector(const Vector& v)
{
    json j = json::array();
    for (const auto& x : v) {
        j.push_back(write_scalar(x));
    }
    return j;
}

inline json write_int_matrix(const IntMatrix& m)
{
    json j = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        j.push_back(write_int_vector(m.row(i)));
    }
    return j;
}

inline json write_q_matrix(const QMatrix& m)
{
    json j = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        j.push_back(write_q_vector(m.row(i)));
    }
    return j;
}

inline void check_version(const json& j, const std::string& path)
{
    Integer v = read_integer(field(j, "version", path), at(path, "version"));
    if (v != format_version) {
        throw invalid_input(at(path, "version") + ": unsupported version " + v.get_str());
    }
}

// ---------------------------------------------------------------------------
// Cones and fans

inline Cone read_cone(const json& j, const std::string& path, std::size_t rank)
{
    auto gens = read_list<Vector>(array_field(j, "generators", path), at(path, "generators"),
                                  [&](const json& g, const std::string& p) { return read_vector(g, p, rank); });
    bool relint = true;
    if (const json* r = optional_field(j, "relint")) {
        if (!r->is_boolean()) {
            throw invalid_input(at(path, "relint") + ": expected a boolean");
        }
        relint = r->get<bool>();
    }
    try {
        return Cone(rank, gens, relint ? ConeKind::relative_interior : ConeKind::closed);
    } catch (const invalid_input& e) {
        throw invalid_input(path + ": " + e.what());
    }
}

inline json write_cone(const Cone& c)
{
    json j = json::object();
    json gens = json::array();
    for (const auto& g : c.generators()) {
        gens.push_back(write_vector(g));
    }
    j["generators"] = gens;
    j["relint"] = c.is_relint();
    return j;
}

inline GroupElement read_group_element(const json& j, const std::string& path, std::size_t rank)
{
    GroupElement g{read_int_matrix(field(j, "linear", path), at(path, "linear"), rank, rank),
                   IntVector(rank, Integer(0))};
    if (const json* t = optional_field(j, "translation")) {
        g.translation = read_int_vector(*t, at(path, "translation"), rank);
    }
    try {
        g.check(rank);
    } catch (const invalid_input& e) {
        throw invalid_input(path + ": " + e.what());
    }
    return g;
}

inline json write_group_element(const GroupElement& g)
{
    json j = json::object();
    j["linear"] = write_int_matrix(g.linear);
    j["translation"] = write_int_vector(g.translation);
    return j;
}

inline std::size_t read_rank(const json& j, const std::string& path)
{
    std::size_t r = read_size(field(j, "rank", path), at(path, "rank"));
    if (r == 0) {
        throw invalid_input(at(path, "rank") + ": must be positive");
    }
    if (r > max_cone_rank) {
        throw unsupported_rank(at(path, "rank") + ": rank " + std::to_string(r) + " exceeds supported bound " +
                               std::to_string(max_cone_rank));
    }
    return r;
}

inline Decomposition read_fan(const json& j, const std::string& path = "fan")
{
    check_version(j, path);
    Decomposition d;
    d.rank = read_rank(j, path);
    const std::string sp = at(path, "support");
    const json& support = field(j, "support", path);
    auto gens = read_list<Vector>(array_field(support, "generators", sp), at(sp, "generators"),
                                  [&](const json& g, const std::string& p) { return read_vector(g, p, d.rank); });
    if (const json* disc = optional_field(support, "discriminant")) {
        Integer dd = read_integer(*disc, at(sp, "discriminant"));
        try {
            Scalar::check_discriminant(dd.get_si());
        } catch (const invalid_input& e) {
            throw invalid_input(at(sp, "discriminant") + ": " + e.what());
        }
        for (auto& g : gens) {
            for (auto& x : g) {
                x += Scalar(Rational(0), Rational(0), dd.get_si());
            }
        }
    }
    if (const json* o = optional_field(support, "origin")) {
        if (!o->is_boolean()) {
            throw invalid_input(at(sp, "origin") + ": expected a boolean");
        }
        d.support_has_origin = o->get<bool>();
    }
    try {
        d.support = Cone(d.rank, gens, ConeKind::closed);
    } catch (const invalid_input& e) {
        throw invalid_input(sp + ": " + e.what());
    }
    if (const json* cones = optional_field(j, "cones")) {
        d.members = read_list<Cone>(*cones, at(path, "cones"),
                                    [&](const json& c, const std::string& p) { return read_cone(c, p, d.rank); });
    }
    if (const json* group = optional_field(j, "group")) {
        d.group = read_list<GroupElement>(*group, at(path, "group"), [&](const json& g, const std::string& p) {
            return read_group_element(g, p, d.rank);
        });
    }
    return d;
}

inline json write_fan(const Decomposition& d)
{
    json j = json::object();
    j["version"] = format_version;
    j["rank"] = d.rank;
    json support = json::object();
    json gens = json::array();
    std::optional<std::int64_t> disc;
    for (const auto& g : d.support.generators()) {
        gens.push_back(write_vector(g));
        for (const auto& x : g) {
            if (!x.is_rational()) {
                disc = x.discriminant();
            }
        }
    }
    support["generators"] = gens;
    support["origin"] = d.support_has_origin;
    if (disc) {
        support["discriminant"] = *disc;
    }
    j["support"] = support;
    json cones = json::array();
    for (const auto& c : d.members) {
        cones.push_back(write_cone(c));
    }
    j["cones"] = cones;
    json group = json::array();
    for (const auto& g : d.group) {
        group.push_back(write_group_element(g));
    }
    j["group"] = group;
    return j;
}

/// {"version": 1, "rank": r, "probes": [cone, ...]}
inline std::vector<Cone> read_probes(const json& j, std::size_t rank, const std::string& path = "probes")
{
    check_version(j, path);
    if (read_rank(j, path) != rank) {
        throw invalid_input(at(path, "rank") + ": does not match the fan");
    }
    return read_list<Cone>(array_field(j, "probes", path), at(path, "probes"),
                           [&](const json& c, const std::string& p) { return read_cone(c, p, rank); });
}

// ---------------------------------------------------------------------------
// Monodromy

inline MonodromySet read_monodromy(const json& j, const std::string& path = "monodromy")
{
    check_version(j, path);
    MonodromySet ms;
    ms.n = read_size(field(j, "n", path), at(path, "n"));
    ms.dim_moduli = read_size(field(j, "dimM", path), at(path, "dimM"));
    if (ms.n == 0 || ms.dim_moduli == 0) {
        throw invalid_input(path + ": n and dimM must be positive");
    }
    const json& ops = array_field(j, "operators", path);
    if (ops.empty()) {
        throw invalid_input(at(path, "operators") + ": no operators");
    }
    std::optional<std::size_t> d;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        QMatrix t = read_q_matrix(ops[i], at(at(path, "operators"), i), d, d);
        if (!t.is_square()) {
            throw invalid_input(at(at(path, "operators"), i) + ": operator is not square");
        }
        d = t.rows();
        ms.operators.push_back(t);
    }
    if (const json* l = optional_field(j, "lattice")) {
        ms.lattice = read_q_matrix(*l, at(path, "lattice"), d, d);
        if (determinant(*ms.lattice) == 0) {
            throw invalid_input(at(path, "lattice") + ": lattice basis is singular");
        }
    }
    if (const json* o = optional_field(j, "orbit")) {
        const std::string op = at(path, "orbit");
        QuasiCanonicalOrbit orbit;
        orbit.omega0 = read_q_vector(field(*o, "omega0", op), at(op, "omega0"), d);
        orbit.pairing = read_q_matrix(field(*o, "Q", op), at(op, "Q"), d, d);
        ms.orbit = orbit;
    }
    return ms;
}

inline json write_monodromy(const MonodromySet& ms)
{
    json j = json::object();
    j["version"] = format_version;
    j["n"] = ms.n;
    j["dimM"] = ms.dim_moduli;
    json ops = json::array();
    for (const auto& t : ms.operators) {
        ops.push_back(write_q_matrix(t));
    }
    j["operators"] = ops;
    if (ms.lattice) {
        j["lattice"] = write_q_matrix(*ms.lattice);
    }
    if (ms.orbit) {
        json o = json::object();
        o["omega0"] = write_q_vector(ms.orbit->omega0);
        o["Q"] = write_q_matrix(ms.orbit->pairing);
        j["orbit"] = o;
    }
    return j;
}

// ---------------------------------------------------------------------------
// Series

inline FormalSeries read_series(const json& j, const std::string& path = "series")
{
    check_version(j, path);
    IntMatrix basis = read_int_matrix(field(j, "framing", path), at(path, "framing"));
    if (basis.rows() > max_cone_rank || !basis.is_square()) {
        throw invalid_input(at(path, "framing") + ": expected a square matrix of size <= " +
                            std::to_string(max_cone_rank));
    }
    std::optional<Framing> framing;
    try {
        framing.emplace(basis);
    } catch (const invalid_input& e) {
        throw invalid_input(at(path, "framing") + ": " + e.what());
    }
    std::size_t t = read_size(field(j, "truncation", path), at(path, "truncation"));
    FormalSeries s(*framing, t);
    const json& terms = array_field(j, "terms", path);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::string tp = at(at(path, "terms"), i);
        if (!terms[i].is_array() || terms[i].size() != 2) {
            throw invalid_input(tp + ": expected [exponent, coefficient]");
        }
        IntVector eta = read_int_vector(terms[i][0], tp + "[0]", basis.rows());
        Rational c = read_rational(terms[i][1], tp + "[1]");
        if (s.coefficient(eta) != 0) {
            throw invalid_input(tp + ": duplicate exponent");
        }
        try {
            s.add_term(eta, c);
        } catch (const invalid_input& e) {
            throw invalid_input(tp + ": " + e.what());
        }
    }
    return s;
}

inline json write_series(const FormalSeries& s)
{
    json j = json::object();
    j["version"] = format_version;
    j["framing"] = write_int_matrix(s.framing().basis());
    j["truncation"] = s.truncation();
    json terms = json::array();
    for (const auto& [eta, c] : s.terms()) {
        terms.push_back(json::array({write_int_vector(eta), write_rational(c)}));
    }
    j["terms"] = terms;
    return j;
}

// ---------------------------------------------------------------------------
// Boundary atlas

inline BoundaryAtlas read_atlas(const json& j, const std::string& path = "atlas")
{
    check_version(j, path);
    BoundaryAtlas a;
    a.rank = read_rank(j, path);
    if (const json* c = optional_field(j, "coverage")) {
        if (!c->is_boolean()) {
            throw invalid_input(at(path, "coverage") + ": expected a boolean");
        }
        a.coverage = c->get<bool>();
    }
    const json& points = array_field(j, "points", path);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::string pp = at(at(path, "points"), i);
        const json& id = field(points[i], "id", pp);
        if (!id.is_string()) {
            throw invalid_input(at(pp, "id") + ": expected a string");
        }
        a.points.push_back({id.get<std::string>(), read_q_matrix(field(points[i], "frame", pp), at(pp, "frame"),
                                                                 a.rank, a.rank)});
    }
    if (const json* m = optional_field(j, "monodromy")) {
        a.monodromy = read_list<GroupElement>(*m, at(path, "monodromy"), [&](const json& g, const std::string& p) {
            return read_group_element(g, p, a.rank);
        });
    }
    return a;
}

inline json write_atlas(const BoundaryAtlas& a)
{
    json j = json::object();
    j["version"] = format_version;
    j["rank"] = a.rank;
    j["coverage"] = a.coverage;
    json points = json::array();
    for (const auto& p : a.points) {
        json pj = json::object();
        pj["id"] = p.id;
        pj["frame"] = write_q_matrix(p.frame);
        points.push_back(pj);
    }
    j["points"] = points;
    json mono = json::array();
    for (const auto& g : a.monodromy) {
        mono.push_back(write_group_element(g));
    }
    j["monodromy"] = mono;
    return j;
}

// ---------------------------------------------------------------------------
// Cusp results

struct CuspReport {
    std::int64_t discriminant = 0;
    Scalar alpha, beta, unit;
    std::size_t m = 0;
    std::vector<long> b, b_by_vertex;
    std::vector<IntVector> vertices;
    IntMatrix unit_action = IntMatrix::identity(2);

    bool operator==(const CuspReport& o) const
    {
        return discriminant == o.discriminant && alpha == o.alpha && beta == o.beta && unit == o.unit && m == o.m &&
               b == o.b && b_by_vertex == o.b_by_vertex && vertices == o.vertices && unit_action == o.unit_action;
    }
};

inline CuspReport make_cusp_report(const CuspData& data, const VertexChain& chain, const CycleResolution& res)
{
    return {data.discriminant(), data.ideal().alpha(), data.ideal().beta(), data.unit(), res.m,
            res.b,               res.b_by_vertex,      chain.vertices,      chain.unit_action};
}

inline json write_cusp(const CuspReport& c)
{
    json j = json::object();
    j["version"] = format_version;
    j["D"] = c.discriminant;
    j["ideal"] = json::array({write_scalar(c.alpha), write_scalar(c.beta)});
    j["unit"] = write_scalar(c.unit);
    j["m"] = c.m;
    j["b"] = c.b;
    j["b_by_vertex"] = c.b_by_vertex;
    json v = json::array();
    for (const auto& x : c.vertices) {
        v.push_back(write_int_vector(x));
    }
    j["vertices"] = v;
    j["unit_action"] = write_int_matrix(c.unit_action);
    return j;
}

inline CuspReport read_cusp(const json& j, const std::string& path = "cusp")
{
    check_version(j, path);
    CuspReport c;
    c.discriminant = read_integer(field(j, "D", path), at(path, "D")).get_si();
    auto ideal = read_list<Scalar>(field(j, "ideal", path), at(path, "ideal"), read_scalar, 2);
    c.alpha = ideal[0];
    c.beta = ideal[1];
    c.unit = read_scalar(field(j, "unit", path), at(path, "unit"));
    c.m = read_size(field(j, "m", path), at(path, "m"));
    auto longs = [&](const std::string& key) {
        return read_list<long>(field(j, key, path), at(path, key),
                               [](const json& x, const std::string& p) { return read_integer(x, p).get_si(); });
    };
    c.b = longs("b");
    c.b_by_vertex = longs("b_by_vertex");
    c.vertices = read_list<IntVector>(field(j, "vertices", path), at(path, "vertices"),
                                      [](const json& x, const std::string& p) { return read_int_vector(x, p, 2); });
    c.unit_action = read_int_matrix(field(j, "unit_action", path), at(path, "unit_action"), 2, 2);
    return c;
}

} // namespace semitoric::io
