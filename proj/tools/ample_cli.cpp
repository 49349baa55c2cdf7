// ample: exact computations on ample groupoids from the command line.
//
// Exit codes: 0 = pass/found, 1 = verification failure, 2 = unknown within
// the given budget, 3 = input or parameter error.

#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "ample/coarse.hpp"
#include "ample/io.hpp"
#include "ample/orderzero.hpp"

using namespace ample;

namespace {

// Fixed-order report: INPUT, RESULT, CERTIFICATE, DIAGNOSTICS. Byte-identical
// output for identical inputs: no timestamps, no environment data.
struct Report {
    std::vector<std::string> input, result, certificate, diagnostics;

    void print() const {
        auto sec = [](const char* name, const std::vector<std::string>& lines) {
            std::cout << name << "\n";
            for (const auto& l : lines) std::cout << "  " << l << "\n";
        };
        sec("INPUT", input);
        sec("RESULT", result);
        sec("CERTIFICATE", certificate);
        sec("DIAGNOSTICS", diagnostics);
    }
};

const TransformationGroupoid& need_transformation(const ParsedGroupoid& pg) {
    if (pg.kind != GroupoidKind::Transformation)
        throw std::invalid_argument("this subcommand needs a transformation groupoid");
    return *pg.transformation;
}

Point default_base(const TransformationGroupoid& g, const std::string& flag) {
    if (!flag.empty()) return Point::parse(flag, g.alphabet());
    return Point("", std::string(1, g.alphabet().symbols[0]));
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ','))
        if (!tok.empty()) out.push_back(std::stoi(tok));
    return out;
}

int cmd_check(const std::string& path) {
    auto pg = load_groupoid(path);
    Report rep;
    rep.input.push_back("groupoid " + path);
    if (pg.kind == GroupoidKind::Transformation) {
        const auto& g = *pg.transformation;
        rep.result.push_back("kind transformation");
        rep.result.push_back("alphabet " + g.alphabet().symbols);
        rep.result.push_back("generators " + std::to_string(g.num_generators()));
        rep.result.push_back("max-rule-depth " + std::to_string(g.max_rule_depth()));
        for (const auto& ga : g.generators())
            rep.diagnostics.push_back("generator " + ga.name + " rules " +
                                      std::to_string(ga.rules.size()) + " exceptions " +
                                      std::to_string(ga.exceptions.size()));
        rep.print();
        return 0;
    }
    if (pg.kind == GroupoidKind::Finite) {
        auto chk = pg.finite->check();
        rep.result.push_back("kind finite");
        rep.result.push_back("units " + std::to_string(pg.finite->n_units));
        rep.result.push_back("arrows " + std::to_string(pg.finite->num_arrows()));
        rep.result.push_back(std::string("valid ") + (chk.valid ? "yes" : "no"));
        rep.result.push_back(std::string("principal ") + (chk.principal ? "yes" : "no"));
        rep.result.push_back(std::string("effective ") + (chk.effective ? "yes" : "no"));
        if (!chk.valid) rep.diagnostics.push_back("violation: " + chk.violation);
        rep.print();
        return chk.valid ? 0 : 1;
    }
    rep.result.push_back("kind coarse");
    rep.result.push_back("points " + std::to_string(pg.space->size()));
    rep.print();
    return 0;
}

int cmd_fiber(const std::string& path, const std::string& base_flag, long long max_len,
              int unit, const std::string& radius) {
    auto pg = load_groupoid(path);
    Report rep;
    rep.input.push_back("groupoid " + path);
    if (pg.kind == GroupoidKind::Transformation) {
        const auto& g = *pg.transformation;
        Point u = default_base(g, base_flag);
        rep.input.push_back("base " + u.str());
        rep.input.push_back("max-len " + std::to_string(max_len));
        auto arrows = fiber(g, u, max_len);
        std::sort(arrows.begin(), arrows.end());
        rep.result.push_back("arrows " + std::to_string(arrows.size()));
        auto names = g.generator_names();
        for (const auto& a : arrows)
            rep.certificate.push_back("arrow " + a.w.str(names) + " range " +
                                      a.range(g).str());
        rep.print();
        return 0;
    }
    if (pg.kind == GroupoidKind::Finite) {
        rep.input.push_back("unit " + std::to_string(unit));
        auto f = pg.finite->fiber_at(unit);
        rep.result.push_back("arrows " + std::to_string(f.size()));
        for (int a : f)
            rep.certificate.push_back("arrow " + std::to_string(a) + " range " +
                                      std::to_string(pg.finite->dst[(size_t)a]));
        rep.print();
        return 0;
    }
    if (radius.empty()) throw std::invalid_argument("coarse fibers need --radius");
    CoarseTruncation E(*pg.space, parse_rat(radius));
    rep.input.push_back("point " + std::to_string(unit));
    rep.input.push_back("radius " + radius);
    auto pts = E.fiber_points(unit);
    rep.result.push_back("points " + std::to_string(pts.size()));
    for (int y : pts) rep.certificate.push_back("point " + E.space.names[(size_t)y]);
    rep.print();
    return 0;
}

int cmd_folner(const std::string& path, const std::string& kflag, const std::string& eps,
               long long budget, const std::string& base_flag, int unit) {
    auto pg = load_groupoid(path);
    Report rep;
    rep.input.push_back("groupoid " + path);
    rep.input.push_back("K " + kflag);
    rep.input.push_back("eps " + eps);
    rep.input.push_back("budget " + std::to_string(budget));
    Rat e = parse_rat(eps);
    if (pg.kind == GroupoidKind::Finite) {
        auto found = folner_search(*pg.finite, unit, parse_int_list(kflag), e);
        if (!found) {
            rep.result.push_back("verdict not-found");
            rep.print();
            return 2;
        }
        rep.result.push_back("verdict found");
        rep.result.push_back("size " + std::to_string(found->F.size()));
        rep.result.push_back("boundary " + std::to_string(found->btotal));
        for (int a : found->F) rep.certificate.push_back("arrow " + std::to_string(a));
        rep.print();
        return 0;
    }
    const auto& g = need_transformation(pg);
    KSpec K = parse_kspec(g, kflag);
    Point u = default_base(g, base_flag);
    rep.input.push_back("base " + u.str());
    auto cert = folner_search(g, u, K, e, budget);
    if (!cert) {
        rep.result.push_back("verdict not-found-within-budget");
        rep.print();
        return 2;
    }
    rep.result.push_back("verdict found");
    rep.result.push_back("size " + std::to_string(cert->F.size()));
    rep.result.push_back("boundary " + std::to_string(cert->btotal));
    auto names = g.generator_names();
    for (const auto& w : cert->F) rep.certificate.push_back("word " + w.str(names));
    rep.diagnostics.push_back(std::string("revalidates ") +
                              (revalidate(g, *cert, K) ? "yes" : "no"));
    rep.print();
    return 0;
}

int cmd_measure(const std::string& path, int depth, const std::string& emit) {
    auto pg = load_groupoid(path);
    Report rep;
    rep.input.push_back("groupoid " + path);
    if (pg.kind == GroupoidKind::Finite) {
        auto fs = invariant_measure_feasibility(*pg.finite);
        if (fs.kind == FeasKind::Infeasible) {
            rep.result.push_back("verdict infeasible");
            rep.print();
            return 1;
        }
        rep.result.push_back(fs.kind == FeasKind::Unique ? "verdict unique"
                                                         : "verdict feasible-region");
        rep.result.push_back("classes " + std::to_string(fs.num_classes));
        rep.result.push_back("affine-dim " + std::to_string(fs.affine_dim));
        if (fs.unique)
            for (size_t i = 0; i < fs.unique->size(); ++i)
                rep.certificate.push_back("unit " + std::to_string(i) + " " +
                                          rat_str((*fs.unique)[i]));
        rep.print();
        return 0;
    }
    const auto& g = need_transformation(pg);
    rep.input.push_back("depth " + std::to_string(depth));
    auto fs = invariant_measure_feasibility(g, depth);
    if (fs.kind == FeasKind::Infeasible) {
        rep.result.push_back("verdict infeasible");
        rep.print();
        return 1;
    }
    rep.result.push_back(fs.kind == FeasKind::Unique ? "verdict unique"
                                                     : "verdict feasible-region");
    rep.result.push_back("classes " + std::to_string(fs.num_classes));
    rep.result.push_back("affine-dim " + std::to_string(fs.affine_dim));
    if (fs.unique) {
        std::istringstream lines(measure_text(*fs.unique));
        std::string l;
        while (std::getline(lines, l)) rep.certificate.push_back(l);
        if (!emit.empty()) {
            write_file(emit, measure_text(*fs.unique));
            rep.diagnostics.push_back("emitted " + emit);
        }
    }
    rep.print();
    return 0;
}

int cmd_matui(const std::string& path, const std::string& castle_path,
              const std::string& kflag, const std::string& eps) {
    auto pg = load_groupoid(path);
    const auto& g = need_transformation(pg);
    auto cf = parse_castle_text(g, read_file(castle_path));
    auto repm = verify_matui(g, cf.castle, parse_kspec(g, kflag), parse_rat(eps));
    Report rep;
    rep.input.push_back("groupoid " + path);
    rep.input.push_back("castle " + castle_path);
    rep.input.push_back("K " + kflag);
    rep.input.push_back("eps " + eps);
    rep.result.push_back(std::string("covering ") + (repm.covering ? "yes" : "no"));
    rep.result.push_back("max-ratio " + rat_str(repm.max_ratio));
    rep.result.push_back(std::string("verdict ") + (repm.pass ? "pass" : "fail"));
    rep.diagnostics.push_back("classes " + std::to_string(repm.classes));
    if (!repm.violation.empty()) rep.diagnostics.push_back("violation: " + repm.violation);
    rep.print();
    return repm.pass ? 0 : 1;
}

int cmd_convert(const std::string& path, const std::string& castle_path,
                const std::string& kflag, const std::string& eps, int depth,
                const std::string& emit) {
    auto pg = load_groupoid(path);
    const auto& g = need_transformation(pg);
    auto cf = parse_castle_text(g, read_file(castle_path));
    KSpec K = parse_kspec(g, kflag);
    Report rep;
    rep.input.push_back("groupoid " + path);
    rep.input.push_back("castle " + castle_path);
    rep.input.push_back("K " + kflag);
    rep.input.push_back("eps " + eps);
    std::optional<CylinderMeasure> mu;
    if (depth > 0) {
        rep.input.push_back("depth " + std::to_string(depth));
        auto fs = invariant_measure_feasibility(g, depth);
        if (fs.unique) mu = fs.unique;
    }
    ConversionResult conv;
    try {
        conv = convert_af_to_almost_elementary(g, cf.castle, K, parse_rat(eps),
                                               mu ? &*mu : nullptr);
    } catch (const std::exception& e) {
        rep.result.push_back("verdict fail");
        rep.diagnostics.push_back(std::string("violation: ") + e.what());
        rep.print();
        return 1;
    }
    rep.result.push_back("verdict pass");
    rep.result.push_back("matui-ratio " + rat_str(conv.matui_ratio));
    if (conv.w_measure) rep.result.push_back("w-measure " + rat_str(*conv.w_measure));
    rep.result.push_back("remainder " + clopen_spec(conv.remainder));
    std::string text = castle_text(g, conv.W, castle_path, kspec_spec(g, K));
    std::istringstream lines(text);
    std::string l;
    while (std::getline(lines, l)) rep.certificate.push_back(l);
    if (!emit.empty()) {
        write_file(emit, text);
        rep.diagnostics.push_back("emitted " + emit);
    }
    rep.print();
    return 0;
}

int cmd_castle_verify(const std::string& castle_path, const std::string& gpath) {
    auto pg = load_groupoid(gpath);
    const auto& g = need_transformation(pg);
    auto cf = parse_castle_text(g, read_file(castle_path));
    Report rep;
    rep.input.push_back("groupoid " + gpath);
    rep.input.push_back("castle " + castle_path);
    auto vr = verify_castle(g, cf.castle);
    rep.result.push_back(std::string("castle ") + (vr.valid ? "valid" : "invalid"));
    if (!vr.valid) rep.diagnostics.push_back("violation: " + vr.violation);
    bool ok = vr.valid;
    if (ok && cf.extendable_to) {
        auto host = parse_castle_text(g, read_file(*cf.extendable_to));
        auto er = verify_extendable(g, cf.castle, host.castle,
                                    parse_kspec(g, cf.kspec.value_or("id")));
        rep.result.push_back(std::string("extendable ") + (er.valid ? "valid" : "invalid"));
        if (!er.valid) rep.diagnostics.push_back("violation: " + er.violation);
        ok = er.valid;
    }
    rep.print();
    return ok ? 0 : 1;
}

int cmd_nest_check(const std::string& gpath, const std::string& inner_path,
                   const std::string& outer_path) {
    auto pg = load_groupoid(gpath);
    const auto& g = need_transformation(pg);
    auto inner = parse_castle_text(g, read_file(inner_path));
    auto outer = parse_castle_text(g, read_file(outer_path));
    auto nr = check_nesting(g, inner.castle, outer.castle);
    Report rep;
    rep.input.push_back("groupoid " + gpath);
    rep.input.push_back("inner " + inner_path);
    rep.input.push_back("outer " + outer_path);
    rep.result.push_back(std::string("nested ") + (nr.ok ? "yes" : "no"));
    if (nr.ok) {
        rep.result.push_back("multiplicity " + std::to_string(nr.multiplicity));
        for (size_t l = 0; l < nr.assignment.size(); ++l)
            rep.certificate.push_back("assign " + std::to_string(l) + " " +
                                      std::to_string(nr.assignment[l]));
    } else {
        rep.diagnostics.push_back("violation: " + nr.failure);
    }
    rep.print();
    return nr.ok ? 0 : 1;
}

int cmd_compare(const std::string& gpath, const std::string& uspec,
                const std::string& vspec, int word_len, int depth,
                const std::string& emit, const std::string& verify_path) {
    auto pg = load_groupoid(gpath);
    const auto& g = need_transformation(pg);
    Report rep;
    rep.input.push_back("groupoid " + gpath);
    if (!verify_path.empty()) {
        rep.input.push_back("witness " + verify_path);
        auto w = parse_witness_text(g, read_file(verify_path));
        auto vr = verify_comparison_witness(g, w);
        rep.result.push_back(std::string("witness ") + (vr.valid ? "valid" : "invalid"));
        if (!vr.valid) rep.diagnostics.push_back("violation: " + vr.violation);
        rep.print();
        return vr.valid ? 0 : 1;
    }
    rep.input.push_back("U " + uspec);
    rep.input.push_back("V " + vspec);
    rep.input.push_back("word-len " + std::to_string(word_len));
    rep.input.push_back("depth " + std::to_string(depth));
    ClopenSet U = parse_clopen(g.alphabet(), uspec);
    ClopenSet V = parse_clopen(g.alphabet(), vspec);
    auto w = comparison_search(g, U, V, word_len, depth);
    if (!w) {
        rep.result.push_back("verdict not-found-within-budget");
        rep.print();
        return 2;
    }
    rep.result.push_back("verdict found");
    rep.result.push_back("routes " + std::to_string(w->routes.size()));
    std::string text = witness_text(g, *w);
    std::istringstream lines(text);
    std::string l;
    while (std::getline(lines, l)) rep.certificate.push_back(l);
    if (!emit.empty()) {
        write_file(emit, text);
        rep.diagnostics.push_back("emitted " + emit);
    }
    rep.print();
    return 0;
}

int cmd_orderzero(int n, int m, int matrix_n, long long N, const std::string& eps,
                  int trials, unsigned seed, const std::string& emit) {
    auto rep0 = pipeline_odometer_demo(n, m, matrix_n, N, trials, seed);
    Rat e = eps.empty() ? Rat(1) / N : parse_rat(eps);
    bool pass = rep0.pass && rep0.commutator_max <= e;
    Report rep;
    rep.input.push_back("n " + std::to_string(n));
    rep.input.push_back("m " + std::to_string(m));
    rep.input.push_back("matrix-n " + std::to_string(matrix_n));
    rep.input.push_back("N " + std::to_string(N));
    rep.input.push_back("eps " + rat_str(e));
    rep.result.push_back("map-size " + std::to_string(matrix_n) + "x" +
                         std::to_string(matrix_n));
    rep.result.push_back("selected-levels " + std::to_string(1LL << n));
    rep.result.push_back("conversion-ratio " + rat_str(rep0.conversion_ratio));
    rep.result.push_back("w-measure " + rat_str(rep0.w_measure));
    rep.result.push_back("remainder-measure " + rat_str(rep0.remainder_measure));
    rep.result.push_back("nest-multiplicity " + std::to_string(rep0.nest_multiplicity));
    rep.result.push_back("defect-measure " + rat_str(rep0.defect.measure));
    rep.result.push_back("defect-bound " + rat_str(rep0.defect.bound));
    rep.result.push_back("commutator T " + rat_str(rep0.commutator_max));
    rep.result.push_back("kappa-jump " + rat_str(rep0.max_kappa_jump));
    rep.result.push_back(std::string("verdict ") + (pass ? "pass" : "fail"));
    rep.diagnostics.push_back("family-checks " + std::to_string(rep0.family.checks));
    rep.diagnostics.push_back("unit-checks " + std::to_string(rep0.oz.unit_checks));
    rep.diagnostics.push_back("orthogonal-trials " + std::to_string(rep0.oz.orth_trials));
    if (!rep0.oz.violation.empty())
        rep.diagnostics.push_back("violation: " + rep0.oz.violation);
    std::ostringstream text;
    for (const auto& l : rep.result) text << l << "\n";
    if (!emit.empty()) {
        write_file(emit, text.str());
        rep.diagnostics.push_back("emitted " + emit);
    }
    rep.print();
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact computations on ample groupoids"};
    app.require_subcommand(1);

    std::string gpath, castle_path, inner_path, outer_path, verify_path;
    std::string kflag, eps, base_flag, radius, emit, uspec, vspec;
    long long budget = 0, max_len = 0, bigN = 8;
    int depth = 0, unit = 0, word_len = 0, n = 3, m = 4, matrix_n = 2, trials = 50;
    unsigned seed = 7;

    auto* c_check = app.add_subcommand("check", "parse and structurally check a groupoid");
    c_check->add_option("file", gpath)->required();

    auto* c_fiber = app.add_subcommand("fiber", "enumerate a source fiber");
    c_fiber->add_option("file", gpath)->required();
    c_fiber->add_option("--base", base_flag, "base point PRE/PERIOD");
    c_fiber->add_option("--max-len", max_len, "word-length budget (transformation)");
    c_fiber->add_option("--unit", unit, "unit index (finite/coarse)");
    c_fiber->add_option("--radius", radius, "truncation radius (coarse)");

    auto* c_folner = app.add_subcommand("folner", "search for a Folner set");
    c_folner->add_option("file", gpath)->required();
    c_folner->add_option("--K", kflag, "compact set spec")->required();
    c_folner->add_option("--eps", eps)->required();
    c_folner->add_option("--budget", budget, "candidate budget")->required();
    c_folner->add_option("--base", base_flag);
    c_folner->add_option("--unit", unit);

    auto* c_measure = app.add_subcommand("measure", "invariant measure feasibility");
    c_measure->add_option("file", gpath)->required();
    c_measure->add_option("--depth", depth);
    c_measure->add_option("--emit", emit);

    auto* c_matui = app.add_subcommand("matui", "fiberwise defect of a castle");
    c_matui->add_option("file", gpath)->required();
    c_matui->add_option("--castle", castle_path)->required();
    c_matui->add_option("--K", kflag)->required();
    c_matui->add_option("--eps", eps)->required();

    auto* c_convert = app.add_subcommand("convert-af", "extract an extendable sub-castle");
    c_convert->add_option("file", gpath)->required();
    c_convert->add_option("--castle", castle_path)->required();
    c_convert->add_option("--K", kflag)->required();
    c_convert->add_option("--eps", eps)->required();
    c_convert->add_option("--depth", depth, "measure resolution (0 = no measure)");
    c_convert->add_option("--emit", emit);

    auto* c_cverify = app.add_subcommand("castle-verify", "verify a castle certificate");
    c_cverify->add_option("file", castle_path)->required();
    c_cverify->add_option("--groupoid", gpath)->required();

    auto* c_nest = app.add_subcommand("nest-check", "check castle nesting");
    c_nest->add_option("file", gpath)->required();
    c_nest->add_option("--inner", inner_path)->required();
    c_nest->add_option("--outer", outer_path)->required();

    auto* c_compare = app.add_subcommand("compare", "clopen comparison witness");
    c_compare->add_option("file", gpath)->required();
    c_compare->add_option("--U", uspec);
    c_compare->add_option("--V", vspec);
    c_compare->add_option("--word-len", word_len, "route word-length budget");
    c_compare->add_option("--depth", depth, "refinement depth budget");
    c_compare->add_option("--emit", emit);
    c_compare->add_option("--verify", verify_path, "verify an existing witness file");

    auto* c_oz = app.add_subcommand("orderzero", "odometer order-zero pipeline");
    c_oz->add_option("--n", n)->required();
    c_oz->add_option("--m", m)->required();
    c_oz->add_option("--matrix-n", matrix_n)->required();
    c_oz->add_option("--N", bigN)->required();
    c_oz->add_option("--eps", eps, "commutator tolerance (default 1/N)");
    c_oz->add_option("--trials", trials);
    c_oz->add_option("--seed", seed);
    c_oz->add_option("--emit", emit);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 3;
    }

    try {
        if (c_check->parsed()) return cmd_check(gpath);
        if (c_fiber->parsed()) return cmd_fiber(gpath, base_flag, max_len, unit, radius);
        if (c_folner->parsed())
            return cmd_folner(gpath, kflag, eps, budget, base_flag, unit);
        if (c_measure->parsed()) return cmd_measure(gpath, depth, emit);
        if (c_matui->parsed()) return cmd_matui(gpath, castle_path, kflag, eps);
        if (c_convert->parsed())
            return cmd_convert(gpath, castle_path, kflag, eps, depth, emit);
        if (c_cverify->parsed()) return cmd_castle_verify(castle_path, gpath);
        if (c_nest->parsed()) return cmd_nest_check(gpath, inner_path, outer_path);
        if (c_compare->parsed()) {
            if (verify_path.empty() && (uspec.empty() || vspec.empty() || word_len <= 0 ||
                                        depth <= 0))
                throw std::invalid_argument(
                    "compare needs --U, --V, --word-len, --depth (or --verify FILE)");
            return cmd_compare(gpath, uspec, vspec, word_len, depth, emit, verify_path);
        }
        if (c_oz->parsed())
            return cmd_orderzero(n, m, matrix_n, bigN, eps, trials, seed, emit);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 3;
}
