#pragma once

// Spec files: a measure matrix as JSON, every number a decimal string.

#include "sobolev/sobolev.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace sob::io {

using json = nlohmann::ordered_json;

struct AtomSpec {
    std::string point, mass;
    bool operator==(const AtomSpec&) const = default;
};

struct ContinuousSpec {
    std::string family;               // hermite | laguerre | jacobi | uniform
    std::vector<std::string> params;  // laguerre: α; jacobi: α, β; uniform: a, b
    std::vector<std::string> polyFactor{"1"};
    bool operator==(const ContinuousSpec&) const = default;
};

struct EntrySpec {
    int row = 0, col = 0;
    std::optional<ContinuousSpec> continuous;
    std::vector<AtomSpec> atoms;
    bool operator==(const EntrySpec&) const = default;
};

// Strings are kept verbatim so parse(serialize(s)) == s holds exactly and
// conversion to Real happens only after the working precision is fixed.
struct SpecFile {
    int order = 0;
    std::optional<unsigned> precisionBits;
    std::vector<EntrySpec> entries;
    bool operator==(const SpecFile&) const = default;
};

namespace detail {

inline void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ParseError(where + ": expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto& [k, v] : j.items())
        if (!ok.count(k)) throw ParseError(where + ": unknown field '" + k + "'");
}

inline std::string decimal(const json& j, const std::string& where) {
    if (!j.is_string()) throw ParseError(where + ": numbers must be decimal strings");
    std::string s = j.get<std::string>();
    parse_real(s);  // syntax check only; value is re-parsed at the target precision
    return s;
}

inline int integer(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw ParseError(where + ": expected an integer");
    return j.get<int>();
}

inline std::vector<std::string> decimals(const json& j, const std::string& where) {
    if (!j.is_array()) throw ParseError(where + ": expected an array");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(decimal(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline std::size_t param_count(const std::string& family) {
    if (family == "hermite") return 0;
    if (family == "laguerre") return 1;
    if (family == "jacobi" || family == "uniform") return 2;
    throw ParseError("unknown family '" + family + "'");
}

}  // namespace detail

inline SpecFile from_json(const json& j) {
    using namespace detail;
    only_keys(j, {"order", "precisionBits", "entries"}, "spec");
    if (!j.contains("order")) throw ParseError("spec: missing 'order'");
    SpecFile s;
    s.order = integer(j["order"], "order");
    if (s.order < 0) throw ParseError("order must be >= 0");
    if (j.contains("precisionBits")) {
        int b = integer(j["precisionBits"], "precisionBits");
        if (b < 64) throw ParseError("precisionBits must be >= 64");
        s.precisionBits = static_cast<unsigned>(b);
    }
    if (!j.contains("entries") || !j["entries"].is_array()) throw ParseError("spec: 'entries' must be an array");
    for (std::size_t i = 0; i < j["entries"].size(); ++i) {
        const json& e = j["entries"][i];
        std::string where = "entries[" + std::to_string(i) + "]";
        only_keys(e, {"row", "col", "continuous", "atoms"}, where);
        if (!e.contains("row") || !e.contains("col")) throw ParseError(where + ": row and col are required");
        EntrySpec es;
        es.row = integer(e["row"], where + ".row");
        es.col = integer(e["col"], where + ".col");
        if (es.row < 0 || es.col < 0 || es.row > s.order || es.col > s.order)
            throw ParseError(where + ": row/col outside 0.." + std::to_string(s.order));
        if (e.contains("continuous")) {
            const json& c = e["continuous"];
            only_keys(c, {"family", "params", "polyFactor"}, where + ".continuous");
            if (!c.contains("family") || !c["family"].is_string()) throw ParseError(where + ".continuous: family required");
            ContinuousSpec cs;
            cs.family = c["family"].get<std::string>();
            if (c.contains("params")) cs.params = decimals(c["params"], where + ".continuous.params");
            if (cs.params.size() != param_count(cs.family))
                throw ParseError(where + ".continuous: wrong number of params for " + cs.family);
            if (c.contains("polyFactor")) cs.polyFactor = decimals(c["polyFactor"], where + ".continuous.polyFactor");
            es.continuous = cs;
        }
        if (e.contains("atoms")) {
            if (!e["atoms"].is_array()) throw ParseError(where + ".atoms: expected an array");
            for (std::size_t a = 0; a < e["atoms"].size(); ++a) {
                const json& at = e["atoms"][a];
                std::string aw = where + ".atoms[" + std::to_string(a) + "]";
                only_keys(at, {"point", "mass"}, aw);
                if (!at.contains("point") || !at.contains("mass")) throw ParseError(aw + ": point and mass required");
                es.atoms.push_back({decimal(at["point"], aw + ".point"), decimal(at["mass"], aw + ".mass")});
            }
        }
        s.entries.push_back(std::move(es));
    }
    return s;
}

inline json to_json(const SpecFile& s) {
    json j;
    j["order"] = s.order;
    if (s.precisionBits) j["precisionBits"] = *s.precisionBits;
    j["entries"] = json::array();
    for (auto& e : s.entries) {
        json je;
        je["row"] = e.row;
        je["col"] = e.col;
        if (e.continuous) {
            json c;
            c["family"] = e.continuous->family;
            c["params"] = e.continuous->params;
            c["polyFactor"] = e.continuous->polyFactor;
            je["continuous"] = c;
        }
        if (!e.atoms.empty()) {
            je["atoms"] = json::array();
            for (auto& a : e.atoms) je["atoms"].push_back({{"point", a.point}, {"mass", a.mass}});
        }
        j["entries"].push_back(je);
    }
    return j;
}

inline SpecFile parse(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    return from_json(j);
}

inline std::string serialize(const SpecFile& s) { return to_json(s).dump(2) + "\n"; }

inline SpecFile load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open spec file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

inline PearsonFamily family_of(const ContinuousSpec& c) {
    std::vector<Real> p;
    for (auto& s : c.params) p.push_back(parse_real(s));
    if (c.family == "hermite") return PearsonFamily::hermite();
    if (c.family == "laguerre") return PearsonFamily::laguerre(p[0]);
    if (c.family == "jacobi") return PearsonFamily::jacobi(p[0], p[1]);
    return PearsonFamily::uniform(p[0], p[1]);
}

inline Polynomial polynomial_of(const std::vector<std::string>& coeffs) {
    std::vector<Real> c;
    for (auto& s : coeffs) c.push_back(parse_real(s));
    return Polynomial(std::move(c));
}

// Entries sharing (row, col) add up.
inline MeasureMatrix measure_matrix(const SpecFile& s) {
    MeasureMatrix w(s.order);
    for (auto& e : s.entries) {
        Measure m;
        if (e.continuous) m += Measure::continuous(family_of(*e.continuous), polynomial_of(e.continuous->polyFactor));
        for (auto& a : e.atoms) m += Measure::point(parse_real(a.point), parse_real(a.mass));
        w(e.row, e.col) += m;
    }
    return w;
}

inline ContinuousSpec continuous_spec(const Term& t) {
    if (!t.tilt.is_zero()) throw DomainError("exponential tilts have no spec-file form");
    ContinuousSpec c;
    using K = PearsonFamily::Kind;
    switch (t.base.kind) {
        case K::Hermite: c.family = "hermite"; break;
        case K::Laguerre: c.family = "laguerre"; c.params = {to_string(t.base.alpha)}; break;
        case K::Jacobi: c.family = "jacobi"; c.params = {to_string(t.base.alpha), to_string(t.base.beta)}; break;
        case K::Uniform: c.family = "uniform"; c.params = {to_string(t.base.alpha), to_string(t.base.beta)}; break;
    }
    c.polyFactor.clear();
    for (auto& x : t.factor.coeffs()) c.polyFactor.push_back(to_string(x));
    if (c.polyFactor.empty()) c.polyFactor.push_back("0");
    return c;
}

// Inverse of measure_matrix (one entry per continuous term, atoms on the first entry of each cell).
inline SpecFile spec_of(const MeasureMatrix& w) {
    SpecFile s;
    s.order = w.order();
    for (int i = 0; i < w.dim(); ++i)
        for (int j = 0; j < w.dim(); ++j) {
            const Measure& m = w(i, j);
            if (m.is_zero()) continue;
            EntrySpec e{i, j, std::nullopt, {}};
            for (auto& a : m.atoms) e.atoms.push_back({to_string(a.point), to_string(a.mass)});
            if (m.terms.empty()) s.entries.push_back(e);
            for (std::size_t t = 0; t < m.terms.size(); ++t) {
                EntrySpec et{i, j, continuous_spec(m.terms[t]), t == 0 ? e.atoms : std::vector<AtomSpec>{}};
                s.entries.push_back(et);
            }
        }
    return s;
}

}  // namespace sob::io
