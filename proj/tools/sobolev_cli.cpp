// sobolev: command-line front end.
// Exit status: 0 ok, 1 verification failure, 2 spec/argument error, 3 math error.

#include "spec_io.hpp"
#include "suites.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <iostream>

namespace {

using namespace sob;
using io::json;

constexpr int kOk = 0, kVerifyFailed = 1, kParse = 2, kMath = 3;

struct Flags {
    unsigned bits = 0;
    int order = 6;
    std::string spec, out, suite;
    bool plot = false, as_json = false;
    // subcommand parameters, all decimal strings
    std::string xs, ys, kind = "cd", add, lambda = "1", r = "auto", nodes, xi, roots, points, masses, side = "left",
                                      orientation = "rl", l1, l2 = "1", t1, t2;
};

struct Output {
    json result = json::object();
    std::vector<std::vector<std::string>> rows;  // CSV rows
    std::vector<Polynomial> plot;                 // families offered to --plot-data
    std::pair<Real, Real> window{-1, 1};
    bool failed = false;                          // verification outcome
    std::string text;                             // replaces CSV when set
};

// ---- small parsers for the subcommand parameters ----

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    if (!cur.empty() || !out.empty()) out.push_back(cur);
    return out;
}

std::vector<Real> reals(const std::string& s) {
    std::vector<Real> v;
    for (auto& t : split(s, ',')) v.push_back(parse_real(t));
    return v;
}

int integer(const std::string& s) {
    try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("not an integer: '" + s + "'");
    }
}

// "x:m,x:m"
GermSet germs(const std::string& s) {
    GermSet g;
    if (s.empty()) return g;
    for (auto& item : split(s, ',')) {
        auto p = split(item, ':');
        if (p.empty() || p.size() > 2) throw ParseError("germ point must be x or x:multiplicity, got '" + item + "'");
        g.points.push_back({parse_real(p[0]), p.size() == 2 ? integer(p[1]) : 1});
    }
    return g;
}

// "a,b;c,d|e": blocks separated by '|', rows by ';'
std::vector<Matrix> blocks(const std::string& s) {
    std::vector<Matrix> out;
    if (s.empty()) return out;
    for (auto& b : split(s, '|')) {
        auto rows = split(b, ';');
        std::vector<std::vector<Real>> v;
        for (auto& row : rows) v.push_back(reals(row));
        Matrix m(static_cast<int>(v.size()), v.empty() ? 0 : static_cast<int>(v[0].size()));
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i].size() != v[0].size()) throw ParseError("ragged mass block '" + b + "'");
            for (std::size_t j = 0; j < v[i].size(); ++j) m(i, j) = v[i][j];
        }
        out.push_back(m);
    }
    return out;
}

// "p0|p1|p2", each comma-separated ascending coefficients
DiffOperator diff_operator(const std::string& s) {
    DiffOperator op;
    for (auto& p : split(s, '|')) op.coef.push_back(Polynomial(reals(p)));
    if (op.coef.empty()) throw ParseError("empty differential operator");
    return op;
}

// "j:v,j:v"
std::map<int, Real> flows(const std::string& s) {
    std::map<int, Real> m;
    if (s.empty()) return m;
    for (auto& item : split(s, ',')) {
        auto p = split(item, ':');
        if (p.size() != 2) throw ParseError("flow entry must be j:value, got '" + item + "'");
        m[integer(p[0])] = parse_real(p[1]);
    }
    return m;
}

Side side_of(const std::string& s) {
    if (s == "left") return Side::Left;
    if (s == "right") return Side::Right;
    throw ParseError("side must be left or right");
}

// ---- serialization ----

json coeffs(const Polynomial& p) {
    json a = json::array();
    for (auto& c : p.coeffs()) a.push_back(to_string(c));
    if (p.coeffs().empty()) a.push_back("0");
    return a;
}

json reals_json(const Vector& v) {
    json a = json::array();
    for (auto& x : v) a.push_back(to_string(x));
    return a;
}

json matrix_json(const Matrix& m) {
    json a = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(to_string(m(i, j)));
        a.push_back(row);
    }
    return a;
}

void emit_polys(Output& o, const std::string& tag, const std::vector<Polynomial>& ps) {
    json a = json::array();
    for (std::size_t k = 0; k < ps.size(); ++k) {
        std::vector<std::string> row{tag, std::to_string(k)};
        for (auto& c : ps[k].coeffs()) row.push_back(to_string(c));
        o.rows.push_back(row);
        a.push_back(coeffs(ps[k]));
    }
    o.result["polynomials"][tag] = a;
}

void emit_sbps(Output& o, const SBPS& s, const std::string& prefix = "") {
    emit_polys(o, prefix + "p1", s.p1);
    emit_polys(o, prefix + "p2", s.p2);
    for (int k = 0; k < s.size(); ++k) o.rows.push_back({prefix + "h", std::to_string(k), to_string(s.h[k])});
    o.result["norms"][prefix.empty() ? "h" : prefix + "h"] = reals_json(s.h);
    if (o.plot.empty()) o.plot = s.p1;
}

void emit_matrix(Output& o, const std::string& tag, const Matrix& m) {
    for (int i = 0; i < m.rows(); ++i) {
        std::vector<std::string> row{tag, std::to_string(i)};
        for (int j = 0; j < m.cols(); ++j) row.push_back(to_string(m(i, j)));
        o.rows.push_back(row);
    }
    o.result["matrices"][tag] = matrix_json(m);
}

void residual(Output& o, const std::string& name, const Real& v) {
    o.result["residuals"][name] = to_string(v);
    o.rows.push_back({"residual", name, to_string(v)});
}

std::pair<Real, Real> plot_window(const MeasureMatrix& w) {
    auto [lo, hi] = w.hull();
    bool flo = boost::multiprecision::isfinite(lo), fhi = boost::multiprecision::isfinite(hi);
    if (!flo && !fhi) return {Real(-4), Real(4)};
    if (!flo) return {hi - 8, hi};
    if (!fhi) return {lo, lo + 8};
    if (lo == hi) return {lo - 1, hi + 1};
    return {lo, hi};
}

std::string csv(const std::vector<std::vector<std::string>>& rows) {
    std::string s;
    for (auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
        s += "\n";
    }
    return s;
}

std::string plot_table(const Output& o, int samples = 41) {
    std::string s = "x";
    for (std::size_t k = 0; k < o.plot.size(); ++k) s += ",P" + std::to_string(k);
    s += "\n";
    auto [lo, hi] = o.window;
    for (int i = 0; i < samples; ++i) {
        Real x = lo + (hi - lo) * i / (samples - 1);
        s += x.str(17, std::ios::scientific);
        for (auto& p : o.plot) s += "," + p(x).str(17, std::ios::scientific);
        s += "\n";
    }
    return s;
}

// ---- subcommands ----

MeasureMatrix require_spec(const MeasureMatrix* w) {
    if (!w) throw ParseError("this subcommand needs --spec");
    return *w;
}

Output run(const std::string& cmd, const Flags& f, const MeasureMatrix* wp) {
    Output o;
    int k = f.order;
    if (k < 1) throw ParseError("--order must be >= 1");
    if (cmd == "verify") {
        if (f.suite.empty()) throw ParseError("verify needs --suite");
        bool all = f.suite == "all", found = false;
        std::string text;
        for (auto& [name, fn] : suites::registry()) {
            if (!all && name != f.suite) continue;
            found = true;
            suites::Report r = (name == "biorthogonality" && wp)
                                   ? suites::biorthogonality({{"spec", *wp}})
                                   : fn();
            text += r.text();
            o.result["suites"][name] = r.passed() ? "PASS" : "FAIL";
            if (!r.passed()) o.failed = true;
        }
        if (!found) throw ParseError("unknown suite '" + f.suite + "'");
        text += std::string("verify ") + f.suite + ": " + (o.failed ? "FAIL" : "PASS") + "\n";
        o.text = text;
        return o;
    }
    MeasureMatrix w = require_spec(wp);
    o.window = plot_window(w);
    if (cmd == "moments") {
        emit_matrix(o, "g", assemble_moment_matrix(w, k));
    } else if (cmd == "sbps") {
        SBPS s = sbps(w, k);
        emit_sbps(o, s);
        residual(o, "crosscheck", s.crosscheck);
    } else if (cmd == "kernel") {
        SBPS s = sbps(w, k);
        std::map<std::string, KernelKind> kinds{{"cd", KernelKind::CD}, {"cauchy", KernelKind::Cauchy},
                                                {"mixed1", KernelKind::Mixed1}, {"mixed2", KernelKind::Mixed2}};
        if (!kinds.count(f.kind)) throw ParseError("--kind must be cd, cauchy, mixed1 or mixed2");
        json a = json::array();
        for (auto& x : reals(f.xs))
            for (auto& y : reals(f.ys)) {
                Real v = kernel(w, s, kinds[f.kind], k, x, y);
                o.rows.push_back({"kernel", to_string(x), to_string(y), to_string(v)});
                a.push_back({{"x", to_string(x)}, {"y", to_string(y)}, {"value", to_string(v)}});
            }
        o.result["kernels"] = {{"kind", f.kind}, {"samples", a}};
    } else if (cmd == "secondkind") {
        SBPS s = sbps(w, k);
        json a = json::array();
        for (auto& y : reals(f.ys))
            for (int l = 0; l < k; ++l) {
                SecondKindValue v = second_kind(w, s, l, y);
                o.rows.push_back({"c", std::to_string(l), to_string(y), to_string(v.c1), to_string(v.c2)});
                a.push_back({{"l", l}, {"y", to_string(y)}, {"c1", to_string(v.c1)}, {"c2", to_string(v.c2)}, {"tail", to_string(v.tail)}});
            }
        o.result["secondKind"] = a;
    } else if (cmd == "perturb") {
        if (f.add.empty()) throw ParseError("perturb needs --add <spec>");
        MeasureMatrix extra = io::measure_matrix(io::load(f.add));
        AdditiveResult r = additive_perturb(assemble_moment_matrix(w, k), assemble_moment_matrix(extra, k));
        emit_sbps(o, r.formula);
        emit_matrix(o, "A", r.data.A);
        residual(o, "agreement", r.agreement);
    } else if (cmd == "coherent") {
        if (w.order() != 1) throw ParseError("coherent needs an order-1 spec holding mu1 at (0,0) and mu2 at (1,1)");
        Measure mu1 = w(0, 0), mu2 = w(1, 1);
        std::vector<Real> rs;
        if (f.r == "auto") {
            // r_n from the x^{n-1} coefficients of Q_n = P'_{n+1}/(n+1) - (r_n/n) P'_n
            SBPS p = sbps(MeasureMatrix::scalar(mu1), k + 1), qq = sbps(MeasureMatrix::scalar(mu2), k);
            for (int n = 1; n < k; ++n) rs.push_back(p.p1[n + 1][n] * n / (n + 1) - qq.p1[n][n - 1]);
        } else {
            rs = reals(f.r);
        }
        CoherentResult r = coherent_pair_sbps(CoherencePair::standard(mu1, mu2, rs), parse_real(f.lambda), k);
        emit_sbps(o, r.formula);
        o.result["coherence"] = reals_json(rs);
        residual(o, "agreement", r.agreement);
        residual(o, "coherence", r.coherence);
    } else if (cmd == "discrete") {
        DiscreteSpec d;
        for (auto& item : split(f.nodes, ',')) {
            auto p = split(item, ':');
            if (p.size() != 3) throw ParseError("node must be x:n:m, got '" + item + "'");
            d.nodes.push_back({parse_real(p[0]), integer(p[1]), integer(p[2])});
        }
        d.xi = blocks(f.xi);
        DiscreteResult r = discrete_sobolev(w, d, k);
        emit_sbps(o, r.direct);
        residual(o, "agreement", r.agreement);
    } else if (cmd == "reduce") {
        DiagonalReduction r = reduce_to_diagonal(w);
        MeasureMatrix reduced = (r.diagonal + r.discrete).trimmed();
        json spec = io::to_json(io::spec_of(reduced));
        o.result["reduced"] = spec;
        residual(o, "moments", moment_mismatch(w, reduced, k));
        o.text = spec.dump(2) + "\n";
    } else if (cmd == "christoffel" || cmd == "geronimus" || cmd == "spectral") {
        Transformed t;
        GeronimusSpec g{germs(f.points), blocks(f.masses)};
        if (cmd == "christoffel") t = christoffel(w, germs(f.roots), side_of(f.side), k);
        if (cmd == "geronimus") t = geronimus(w, g, side_of(f.side), k);
        if (cmd == "spectral") {
            if (f.orientation != "rl" && f.orientation != "lr") throw ParseError("--orientation must be rl or lr");
            t = spectral(w, germs(f.roots), g, f.orientation == "rl" ? Orientation::RL : Orientation::LR, k);
        }
        emit_sbps(o, t.formula);
        emit_matrix(o, "omega", t.resolvent.data);
        residual(o, "agreement", t.agreement);
        residual(o, "corner", t.resolvent.corner_defect);
        residual(o, "duality", t.duality);
        residual(o, "momentIdentity", t.moment_identity);
        o.result["band"] = {{"lower", t.resolvent.profile.lower}, {"upper", t.resolvent.profile.upper}, {"ok", t.resolvent.band_ok}};
    } else if (cmd == "opdeform") {
        if (f.l1.empty()) throw ParseError("opdeform needs --l1");
        DiffOperator a = diff_operator(f.l1), b = diff_operator(f.l2);
        MeasureMatrix dw = deform_measure(a, w, b);
        Matrix side = deform_moments(a, w, b, k);
        SBPS s = sbps(assemble_moment_matrix(dw, k));
        emit_sbps(o, s);
        residual(o, "faces", rel_diff(side, assemble_moment_matrix(dw, k)));
    } else if (cmd == "toda") {
        TimePoint t{flows(f.t1), flows(f.t2)};
        TodaState s = evolve(w, t, k);
        emit_sbps(o, truncated(sbps_from(assemble_moment_matrix(deformed_measure(w, t), k + 2), s.factorization), k));
        emit_matrix(o, "L1", s.lax1);
        emit_matrix(o, "L2", s.lax2);
        residual(o, "momentSide", deformed_moment_matrix(w, t, k).agreement);
    } else {
        throw ParseError("unknown subcommand '" + cmd + "'");
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sobolev bi-orthogonal polynomials from measure matrices"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags f;
    app.add_option("--bits", f.bits, "working precision in bits (default: spec value or 256)")->check(CLI::Range(64u, 1u << 16));
    app.add_option("--order", f.order, "truncation k");
    app.add_option("--spec", f.spec, "measure-matrix spec file (JSON)");
    app.add_option("--out", f.out, "write the JSON result set here (timings go to <out>.timings.json)");
    app.add_flag("--plot-data", f.plot, "print (x, P_k(x)) samples instead of CSV");
    app.add_option("--suite", f.suite, "suite name for verify (or 'all')");
    app.add_flag("--json", f.as_json, "print the JSON result set instead of CSV");

    std::vector<std::pair<std::string, std::string>> names{
        {"moments", "moment matrix G^[k]"},
        {"sbps", "bi-orthogonal families and norms"},
        {"kernel", "Christoffel-Darboux and Cauchy-type kernels"},
        {"secondkind", "second-kind functions"},
        {"perturb", "additive perturbation of the spec by another spec"},
        {"coherent", "diagonal Sobolev pair built from a coherent pair"},
        {"discrete", "discrete Sobolev masses at nodes"},
        {"reduce", "equivalent diagonal measure matrix (spec JSON)"},
        {"christoffel", "polynomial multiplication"},
        {"geronimus", "polynomial division plus masses"},
        {"spectral", "Christoffel and Geronimus combined"},
        {"opdeform", "deformation by differential operators"},
        {"toda", "flowed Lax matrices and residuals"},
        {"verify", "run the check suites"}};
    std::map<std::string, CLI::App*> subs;
    for (auto& [n, d] : names) subs[n] = app.add_subcommand(n, d);
    subs["kernel"]->add_option("--x", f.xs, "comma-separated x values")->required();
    subs["kernel"]->add_option("--y", f.ys, "comma-separated y values")->required();
    subs["kernel"]->add_option("--kind", f.kind, "cd | cauchy | mixed1 | mixed2");
    subs["secondkind"]->add_option("--y", f.ys, "comma-separated evaluation points outside the support")->required();
    subs["perturb"]->add_option("--add", f.add, "spec of the measure matrix added to --spec")->required();
    subs["coherent"]->add_option("--lambda", f.lambda, "weight of the second measure");
    subs["coherent"]->add_option("--r", f.r, "coherence parameters r_1,r_2,... or 'auto'");
    subs["discrete"]->add_option("--nodes", f.nodes, "x:n:m,...")->required();
    subs["discrete"]->add_option("--xi", f.xi, "mass blocks: rows ';', blocks '|'")->required();
    subs["christoffel"]->add_option("--roots", f.roots, "x:multiplicity,...")->required();
    subs["christoffel"]->add_option("--side", f.side, "left | right");
    subs["geronimus"]->add_option("--points", f.points, "x:multiplicity,...")->required();
    subs["geronimus"]->add_option("--masses", f.masses, "mass blocks: rows ';', blocks '|'");
    subs["geronimus"]->add_option("--side", f.side, "left | right");
    subs["spectral"]->add_option("--roots", f.roots, "x:multiplicity,...")->required();
    subs["spectral"]->add_option("--points", f.points, "x:multiplicity,...")->required();
    subs["spectral"]->add_option("--masses", f.masses, "mass blocks: rows ';', blocks '|'");
    subs["spectral"]->add_option("--orientation", f.orientation, "rl | lr");
    subs["opdeform"]->add_option("--l1", f.l1, "left operator: coefficient polynomials of d^0|d^1|...")->required();
    subs["opdeform"]->add_option("--l2", f.l2, "right operator, same format (default identity)");
    subs["toda"]->add_option("--t1", f.t1, "j:t1_j,...");
    subs["toda"]->add_option("--t2", f.t2, "j:t2_j,...");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kParse;
    }
    std::string cmd = app.get_subcommands().front()->get_name();

    auto t0 = std::chrono::steady_clock::now();
    Output o;
    io::SpecFile spec;
    std::optional<MeasureMatrix> w;
    try {
        if (!f.spec.empty()) spec = io::load(f.spec);
        unsigned bits = f.bits ? f.bits : spec.precisionBits.value_or(256);
        Precision::set_bits(bits);
        if (!f.spec.empty()) w = io::measure_matrix(spec);
    } catch (const Error& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return kParse;
    }
    try {
        o = run(cmd, f, w ? &*w : nullptr);
    } catch (const ParseError& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return kParse;
    } catch (const NotFactorizable& e) {
        std::cerr << "not factorizable: leading minor " << e.minor << " vanishes\n";
        return kMath;
    } catch (const Error& e) {
        std::cerr << "math error: " << e.what() << "\n";
        return kMath;
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    o.result["metadata"] = {{"command", cmd}, {"precisionBits", Precision::bits()}, {"truncation", f.order}};
    if (f.plot && !o.plot.empty())
        std::cout << plot_table(o);
    else if (f.as_json)
        std::cout << o.result.dump(2) << "\n";
    else
        std::cout << (o.text.empty() ? csv(o.rows) : o.text);
    if (!f.out.empty()) {
        std::ofstream out(f.out);
        out << o.result.dump(2) << "\n";
        std::ofstream side(f.out + ".timings.json");
        side << json{{"command", cmd}, {"seconds", seconds}}.dump(2) << "\n";
        if (!out || !side) {
            std::cerr << "cannot write " << f.out << "\n";
            return kParse;
        }
    }
    return o.failed ? kVerifyFailed : kOk;
}
