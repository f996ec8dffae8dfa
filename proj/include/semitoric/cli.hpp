#pragma once

#include <functional>
#include <ostream>
#include <regex>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "io.hpp"

namespace semitoric::cli {

enum exit_code : int { success = 0, verdict_failure = 1, input_error = 2, resource_bound = 3 };

/// "x", "a+b*sqrt(D)", "-sqrt(D)", "b*sqrt(D)" with rational a, b.
inline Scalar parse_quadratic(const std::string& text, std::int64_t d)
{
    static const std::regex surd(R"(([+-]?)(?:(\d+(?:/\d+)?)\*)?sqrt\((\d+)\)$)");
    std::string s;
    for (char c : text) {
        if (c != ' ') {
            s += c;
        }
    }
    std::smatch m;
    if (!std::regex_search(s, m, surd)) {
        return Scalar(parse_rational(s), Rational(0), d);
    }
    if (std::stoll(m[3].str()) != d) {
        throw invalid_input("'" + text + "' uses sqrt(" + m[3].str() + ") but D = " + std::to_string(d));
    }
    Rational b = m[2].matched ? parse_rational(m[2].str()) : Rational(1);
    if (m[1].str() == "-") {
        b = -b;
    }
    std::string prefix = s.substr(0, static_cast<std::size_t>(m.position(0)));
    if (!prefix.empty() && m[1].str().empty()) {
        throw invalid_input("cannot parse quadratic number '" + text + "'");
    }
    Rational a = prefix.empty() ? Rational(0) : parse_rational(prefix);
    return Scalar(a, b, d);
}

/// "1,1;0,1" -> [[1,1],[0,1]]
inline IntMatrix parse_int_matrix(const std::string& text)
{
    std::vector<IntVector> rows;
    std::stringstream ss(text);
    std::string row;
    while (std::getline(ss, row, ';')) {
        IntVector r;
        std::stringstream rs(row);
        std::string cell;
        while (std::getline(rs, cell, ',')) {
            std::string t;
            for (char c : cell) {
                if (c != ' ') {
                    t += c;
                }
            }
            r.push_back(parse_integer(t));
        }
        rows.push_back(r);
    }
    if (rows.empty() || rows[0].empty()) {
        throw invalid_input("empty matrix '" + text + "'");
    }
    for (const auto& r : rows) {
        if (r.size() != rows[0].size()) {
            throw invalid_input("ragged matrix '" + text + "'");
        }
    }
    return IntMatrix::from_rows(rows, rows[0].size());
}

inline std::string tuple(const IntVector& v)
{
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? "," : "") + v[i].get_str();
    }
    return s + ")";
}

inline std::string list(const std::vector<long>& v)
{
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? "," : "") + std::to_string(v[i]);
    }
    return s + "]";
}

inline const char* yes_no(bool b) { return b ? "yes" : "no"; }

inline void print_verdict(std::ostream& out, const std::string& name, const ConditionVerdict& v)
{
    out << name << ": " << (v.pass ? "pass" : "fail");
    if (!v.detail.empty()) {
        out << " (" << v.detail << ")";
    }
    out << "\n";
    for (const auto& w : v.witnesses) {
        out << "  witness: " << w << "\n";
    }
}

inline Decomposition load_fan(const std::string& path) { return io::read_fan(io::parse_text(io::read_file(path), path)); }

// ---------------------------------------------------------------------------
// Commands

struct CuspOptions {
    std::int64_t disc = 0;
    std::string ideal, unit, json_path, svg_path, fan_path, figure = "hull";
    std::size_t periods = 1;
    std::size_t max_points = 2000000;
};

inline int cmd_cusp(const CuspOptions& o, std::ostream& out)
{
    Scalar::check_discriminant(o.disc);
    if (o.figure != "hull" && o.figure != "cycle") {
        throw invalid_input("--figure must be hull or cycle");
    }
    if (o.periods == 0) {
        throw invalid_input("--periods must be positive");
    }
    QuadIdeal ideal = QuadIdeal::ring_of_integers(o.disc);
    if (!o.ideal.empty()) {
        auto comma = o.ideal.find(',');
        if (comma == std::string::npos) {
            throw invalid_input("--ideal expects 'alpha,beta'");
        }
        ideal = QuadIdeal(parse_quadratic(o.ideal.substr(0, comma), o.disc),
                          parse_quadratic(o.ideal.substr(comma + 1), o.disc), o.disc);
    }
    QuadNum unit = o.unit.empty() ? fundamental_totally_positive_unit(o.disc) : parse_quadratic(o.unit, o.disc);
    CuspData data(ideal, unit);
    VertexChain chain = hull_vertices(data, o.periods, o.max_points);
    CycleResolution res = self_intersections(chain);
    out << "m=" << res.m << " b=" << list(res.b) << "\n";
    out << "unit: " << data.unit().str() << "\n";
    out << "b at v_1..v_m: " << list(res.b_by_vertex) << "\n";
    if (!o.json_path.empty()) {
        io::write_file(o.json_path, io::dump(io::write_cusp(io::make_cusp_report(data, chain, res))));
    }
    if (!o.svg_path.empty()) {
        io::write_file(o.svg_path, emit_figure(chain, o.figure == "cycle" ? FigureStyle::cycle : FigureStyle::hull));
    }
    if (!o.fan_path.empty()) {
        io::write_file(o.fan_path, io::dump(io::write_fan(res.fan ? *res.fan : build_fan(chain))));
    }
    return success;
}

inline int cmd_fan_validate(const std::string& file, const std::string& probe_file, const std::string& json_path,
                            std::ostream& out)
{
    Decomposition d = load_fan(file);
    std::vector<Cone> probes;
    if (!probe_file.empty()) {
        probes = io::read_probes(io::parse_text(io::read_file(probe_file), probe_file), d.rank);
    }
    ValidationReport rep = validate_decomposition(d, probes);
    print_verdict(out, "disjoint cover", rep.disjoint_cover);
    print_verdict(out, "rational spans", rep.rational_spans);
    print_verdict(out, "face closure", rep.face_closure);
    print_verdict(out, "local finiteness", rep.local_finiteness);
    out << "valid: " << yes_no(rep.ok()) << "\n";
    if (!json_path.empty()) {
        io::json j = io::json::object();
        auto verdict = [](const ConditionVerdict& v) {
            io::json x = io::json::object();
            x["pass"] = v.pass;
            x["detail"] = v.detail;
            x["witnesses"] = v.witnesses;
            return x;
        };
        j["version"] = io::format_version;
        j["valid"] = rep.ok();
        j["disjoint_cover"] = verdict(rep.disjoint_cover);
        j["rational_spans"] = verdict(rep.rational_spans);
        j["face_closure"] = verdict(rep.face_closure);
        j["local_finiteness"] = verdict(rep.local_finiteness);
        io::write_file(json_path, io::dump(j));
    }
    return rep.ok() ? success : verdict_failure;
}

inline void print_members(std::ostream& out, const Decomposition& d)
{
    for (const auto& c : d.members) {
        out << "  " << c.str() << "\n";
    }
}

inline int cmd_fan_sbb(const std::string& file, const std::string& out_path, std::ostream& out)
{
    Decomposition d = load_fan(file);
    Decomposition s = sbb_decomposition(d.support, d.support_has_origin);
    s.group = d.group;
    out << "sbb: " << s.members.size() << " cones\n";
    print_members(out, s);
    if (!out_path.empty()) {
        io::write_file(out_path, io::dump(io::write_fan(s)));
    }
    return success;
}

inline int cmd_fan_mumford(const std::string& file, std::ostream& out)
{
    Decomposition d = load_fan(file);
    bool yes = is_mumford_type(d);
    out << "mumford type: " << yes_no(yes) << "\n";
    return yes ? success : verdict_failure;
}

inline int cmd_fan_strata(const std::string& file, std::ostream& out)
{
    Decomposition d = load_fan(file);
    for (const auto& s : strata(d)) {
        out << s.cone.str() << ": complex dim " << s.complex_dim << ", limit-point torus dim " << s.dlp_dim << "\n";
        try {
            Chart ch = chart_for(s.cone);
            out << "  chart " << ch.open_set() << "\n";
            out << "  closure " << ch.closure_set() << "\n";
            out << "  limit points " << ch.distinguished_limit_points() << "\n";
        } catch (const invalid_input&) {
            out << "  no unimodular chart\n";
        }
    }
    return success;
}

inline int cmd_fan_refine(const std::string& fine, const std::string& coarse, std::ostream& out)
{
    RefinementVerdict v = refinement_check(load_fan(fine), load_fan(coarse));
    if (v.refines) {
        out << "refinement: yes\n";
        return success;
    }
    out << "refinement: no, witness " << v.witness->str() << "\n";
    return verdict_failure;
}

inline int cmd_fan_common(const std::string& a, const std::string& b, const std::string& out_path, std::ostream& out)
{
    Decomposition c = common_refinement(load_fan(a), load_fan(b));
    out << "common refinement: " << c.members.size() << " cones\n";
    print_members(out, c);
    if (!out_path.empty()) {
        io::write_file(out_path, io::dump(io::write_fan(c)));
    }
    return success;
}

inline MonodromySet load_monodromy(const std::string& path)
{
    return io::read_monodromy(io::parse_text(io::read_file(path), path));
}

inline int cmd_monodromy_check(const std::string& file, std::size_t draws, std::ostream& out)
{
    MonodromySet ms = load_monodromy(file);
    UnipotencyReport rep = is_maximally_unipotent(ms, draws);
    if (!rep.unipotent) {
        out << "unipotent: no (" << rep.obstruction << ")\n";
        out << "maximally unipotent: no (" << rep.reason << ")\n";
        return verdict_failure;
    }
    out << "unipotent: yes\n";
    out << "dim W_0 = " << rep.dim_w0 << ", dim W_1 = " << rep.dim_w1 << ", dim W_2 = " << rep.dim_w2
        << " (need 1, 1, " << 1 + ms.dim_moduli << ")\n";
    if (rep.det_m) {
        out << "det m = " << to_display(*rep.det_m) << "\n";
    }
    out << "random a draws: " << rep.random_draws << ", anomalies: " << rep.anomalies.size() << "\n";
    for (const auto& a : rep.anomalies) {
        out << "  anomaly: " << a << "\n";
    }
    if (rep.maximally_unipotent) {
        out << "maximally unipotent: yes\n";
        return success;
    }
    out << "maximally unipotent: no (" << rep.reason << ")\n";
    return verdict_failure;
}

inline int cmd_monodromy_coords(const std::string& file, std::ostream& out)
{
    MonodromySet ms = load_monodromy(file);
    if (!ms.orbit) {
        throw invalid_input(file + ": coords needs orbit data (omega0, Q)");
    }
    UnipotencyReport rep = is_maximally_unipotent(ms, 0);
    if (!rep.maximally_unipotent) {
        out << "maximally unipotent: no (" << rep.reason << ")\n";
        return verdict_failure;
    }
    WeightData w = weight_spaces(rep.logs, ms.n, QVector(rep.logs.size(), Rational(1)));
    auto g = integral_normalization(w, ms.lattice);
    for (std::size_t k = 0; k < g.size(); ++k) {
        out << "g^" << k << " = " << to_string(to_vector(g[k])) << "\n";
    }
    auto res = quasi_canonical_coordinates(rep.logs, ms.orbit->omega0, ms.orbit->pairing, g);
    out << "<g^0|omega> = " << res.denominator.str() << "\n";
    for (std::size_t j = 0; j < res.forms.size(); ++j) {
        out << res.describe(j) << "\n";
    }
    out << "linear part is identity: " << yes_no(res.linear_is_identity) << "\n";
    return success;
}

inline FormalSeries load_series(const std::string& path)
{
    return io::read_series(io::parse_text(io::read_file(path), path));
}

inline int cmd_series_reframe(const std::string& file, const std::string& matrix, const std::string& out_path,
                              std::ostream& out, std::ostream& err)
{
    FormalSeries s = load_series(file);
    FormalSeries r = reframe(s, parse_int_matrix(matrix));
    std::string text = io::dump(io::write_series(r));
    if (out_path.empty()) {
        out << text;
    } else {
        io::write_file(out_path, text);
    }
    err << "truncation: " << s.truncation() << " -> " << r.truncation() << "\n";
    return success;
}

inline int cmd_series_check(const std::string& file, std::ostream& out)
{
    EffectivityVerdict v = effectivity_check(load_series(file));
    if (v.effective) {
        out << "effective: yes\n";
        return success;
    }
    out << "effective: no, witness " << tuple(*v.witness) << "\n";
    return verdict_failure;
}

inline BoundaryAtlas load_atlas(const std::string& path)
{
    return io::read_atlas(io::parse_text(io::read_file(path), path));
}

inline void print_compatibility(std::ostream& out, const CompatibilityReport& rep)
{
    print_verdict(out, "coverage", rep.coverage);
    print_verdict(out, "common lattice", rep.common_lattice);
    print_verdict(out, "fundamental group", rep.fundamental_group);
    print_verdict(out, "decomposition", rep.decomposition);
    if (rep.index_witness) {
        out << "index witness: " << rep.index_witness->get_str() << "\n";
    }
    out << "compatible: " << yes_no(rep.ok()) << "\n";
}

inline int cmd_atlas_check(const std::string& file, std::ostream& out)
{
    CompatibilityReport rep = compatibility_check(load_atlas(file));
    print_compatibility(out, rep);
    return rep.ok() ? success : verdict_failure;
}

inline int cmd_atlas_reconstruct(const std::string& file, const std::string& out_path, std::ostream& out)
{
    Reconstruction rec = reconstruct(load_atlas(file));
    out << "lattice basis (rows): " << to_string(to_vector(rec.lattice.row(0)));
    for (std::size_t i = 1; i < rec.lattice.rows(); ++i) {
        out << " " << to_string(to_vector(rec.lattice.row(i)));
    }
    out << "\n";
    out << "support: " << rec.support.str() << (rec.support_has_origin ? "" : " without origin") << "\n";
    out << "members: " << rec.fan.members.size() << "\n";
    print_members(out, rec.fan);
    out << "gamma generators: " << rec.gamma.size() << ", nontrivial linear part: " << yes_no(rec.gamma0_nontrivial)
        << "\n";
    if (!out_path.empty()) {
        io::write_file(out_path, io::dump(io::write_fan(rec.fan)));
    }
    return success;
}

// ---------------------------------------------------------------------------
// Entry point

/// Runs one command; never throws. args excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Semi-toric compactification data: fans, cusps, monodromy, series."};
    app.name("semitoric");
    app.require_subcommand(1);
    std::function<int()> action;

    CuspOptions co;
    auto* cusp = app.add_subcommand("cusp", "Hilbert modular cusp resolution");
    cusp->add_option("--disc", co.disc, "squarefree D >= 2")->required();
    cusp->add_option("--ideal", co.ideal, "Z-basis 'alpha,beta' of the ideal (default O_K)");
    cusp->add_option("--unit", co.unit, "totally positive unit (default fundamental)");
    cusp->add_option("--periods", co.periods, "number of periods of the chain");
    cusp->add_option("--json", co.json_path, "write the result as JSON");
    cusp->add_option("--svg", co.svg_path, "write a figure");
    cusp->add_option("--figure", co.figure, "hull or cycle");
    cusp->add_option("--fan", co.fan_path, "write the resolution fan");
    cusp->add_option("--max-points", co.max_points, "enumeration budget");
    cusp->callback([&] { action = [&] { return cmd_cusp(co, out); }; });

    std::string file, file2, probe, json_path, out_path, matrix;
    std::size_t draws = 20;

    auto* fan = app.add_subcommand("fan", "cone decompositions");
    fan->require_subcommand(1);
    auto* validate = fan->add_subcommand("validate", "check the decomposition axioms");
    validate->add_option("file", file)->required();
    validate->add_option("--probe", probe, "probe cones for local finiteness");
    validate->add_option("--json", json_path, "write the report as JSON");
    validate->callback([&] { action = [&] { return cmd_fan_validate(file, probe, json_path, out); }; });
    auto* sbb = fan->add_subcommand("sbb", "SBB decomposition of the support");
    sbb->add_option("file", file)->required();
    sbb->add_option("--out", out_path, "write the decomposition");
    sbb->callback([&] { action = [&] { return cmd_fan_sbb(file, out_path, out); }; });
    auto* mumford = fan->add_subcommand("mumford", "Mumford type test");
    mumford->add_option("file", file)->required();
    mumford->callback([&] { action = [&] { return cmd_fan_mumford(file, out); }; });
    auto* strat = fan->add_subcommand("strata", "strata and charts");
    strat->add_option("file", file)->required();
    strat->callback([&] { action = [&] { return cmd_fan_strata(file, out); }; });
    auto* refine = fan->add_subcommand("refine", "is FILE1 a refinement of FILE2");
    refine->add_option("file1", file)->required();
    refine->add_option("file2", file2)->required();
    refine->callback([&] { action = [&] { return cmd_fan_refine(file, file2, out); }; });
    auto* common = fan->add_subcommand("common", "common refinement");
    common->add_option("file1", file)->required();
    common->add_option("file2", file2)->required();
    common->add_option("--out", out_path, "write the decomposition");
    common->callback([&] { action = [&] { return cmd_fan_common(file, file2, out_path, out); }; });

    auto* mono = app.add_subcommand("monodromy", "maximally unipotent monodromy");
    mono->require_subcommand(1);
    auto* check = mono->add_subcommand("check", "conditions 1-3");
    check->add_option("file", file)->required();
    check->add_option("--random-a", draws, "random positive coefficient draws");
    check->callback([&] { action = [&] { return cmd_monodromy_check(file, draws, out); }; });
    auto* coords = mono->add_subcommand("coords", "quasi-canonical coordinates");
    coords->add_option("file", file)->required();
    coords->callback([&] { action = [&] { return cmd_monodromy_coords(file, out); }; });

    auto* series = app.add_subcommand("series", "instanton-type series");
    series->require_subcommand(1);
    auto* reframe_cmd = series->add_subcommand("reframe", "change of framing");
    reframe_cmd->add_option("file", file)->required();
    reframe_cmd->add_option("--matrix", matrix, "rows separated by ';', e.g. 1,1;0,1")->required();
    reframe_cmd->add_option("--out", out_path, "write the series to a file");
    reframe_cmd->callback([&] { action = [&] { return cmd_series_reframe(file, matrix, out_path, out, err); }; });
    auto* scheck = series->add_subcommand("check", "effectivity");
    scheck->add_option("file", file)->required();
    scheck->callback([&] { action = [&] { return cmd_series_check(file, out); }; });

    auto* atlas = app.add_subcommand("atlas", "boundary atlases of the toric connection");
    atlas->require_subcommand(1);
    auto* acheck = atlas->add_subcommand("check", "compatibility");
    acheck->add_option("file", file)->required();
    acheck->callback([&] { action = [&] { return cmd_atlas_check(file, out); }; });
    auto* arec = atlas->add_subcommand("reconstruct", "recover the decomposition");
    arec->add_option("file", file)->required();
    arec->add_option("--out", out_path, "write the decomposition");
    arec->callback([&] { action = [&] { return cmd_atlas_reconstruct(file, out_path, out); }; });

    std::vector<std::string> storage{"semitoric"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) {
        argv.push_back(s.data());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? success : input_error;
    }
    try {
        return action ? action() : input_error;
    } catch (const incompatible_atlas& e) {
        print_compatibility(out, e.report);
        err << "error: " << e.what() << "\n";
        return verdict_failure;
    } catch (const not_unipotent& e) {
        err << "error: " << e.what() << "\n";
        return verdict_failure;
    } catch (const resource_error& e) {
        err << "error: " << e.what() << "\n";
        return resource_bound;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return input_error;
    }
}

} // namespace semitoric::cli
