#include "tmp3/io.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tmp3/errors.hpp"

namespace tmp3::io {

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double read_number(const json& j, const std::string& what) {
    if (!j.is_number()) throw MalformedInput(what + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw MalformedInput(what + " is not finite");
    return v;
}

int read_int(const json& j, const std::string& what) {
    if (!j.is_number_integer()) throw MalformedInput(what + " must be an integer");
    return j.get<int>();
}

const json& field(const json& j, const char* name) {
    if (!j.is_object() || !j.contains(name)) throw MalformedInput(std::string("missing field '") + name + "'");
    return j.at(name);
}

SymmetricForm form_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) throw MalformedInput(what + " must be a list of rows");
    const auto n = static_cast<Eigen::Index>(j.size());
    SymmetricForm F;
    F.entries.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const json& row = j[r];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
            throw MalformedInput(what + " must be square");
        for (Eigen::Index c = 0; c < n; ++c) F.entries(r, c) = read_number(row[c], what + " entry");
    }
    return F;
}

}  // namespace

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MalformedInput("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw MalformedInput(path + ": " + e.what());
    }
}

void write_json(const std::string& path, const json& j) {
    const std::string text = j.dump(2) + "\n";
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw MalformedInput("cannot write " + path);
    out << text;
}

std::map<std::string, double> parse_params(const std::string& text) {
    std::map<std::string, double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw MalformedInput("parameter '" + item + "' is not name=value");
        const std::string name = item.substr(0, eq), value = item.substr(eq + 1);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != value.size() || value.empty() || !std::isfinite(v))
            throw MalformedInput("parameter '" + name + "' has non-numeric value '" + value + "'");
        out[name] = v;
    }
    return out;
}

CurveCase case_from_json(const json& j) {
    const json& id = field(j, "case");
    if (!id.is_string()) throw MalformedInput("'case' must be a string");
    std::map<std::string, double> params;
    if (j.contains("params")) {
        const json& p = j.at("params");
        if (!p.is_object()) throw MalformedInput("'params' must be an object");
        for (auto it = p.begin(); it != p.end(); ++it) params[it.key()] = read_number(it.value(), "param " + it.key());
    }
    return make_case(case_id_from_string(id.get<std::string>()), params);
}

MomentSequence problem_from_json(const json& j) {
    const CurveCase c = case_from_json(j);
    const int k = read_int(field(j, "k"), "'k'");
    const json& m = field(j, "moments");
    if (!m.is_array()) throw MalformedInput("'moments' must be a list");
    std::map<Exponent, double> beta;
    for (const json& e : m) {
        const Exponent ex{read_int(field(e, "i"), "moment index i"), read_int(field(e, "j"), "moment index j")};
        if (beta.count(ex)) throw MalformedInput("moment (" + std::to_string(ex.i) + "," + std::to_string(ex.j) +
                                                 ") given twice");
        beta[ex] = read_number(field(e, "v"), "moment value");
    }
    return MomentSequence::from_map(c, k, std::move(beta));
}

json problem_to_json(const MomentSequence& L) {
    json params = json::object();
    for (const auto& [name, v] : L.curve.params) params[name] = v;
    json moments = json::array();
    for (const auto& [e, v] : L.beta) moments.push_back({{"i", e.i}, {"j", e.j}, {"v", number(v)}});
    return {{"case", to_string(L.curve.id)}, {"params", params}, {"k", L.k}, {"moments", moments}};
}

json to_json(const Tolerances& t) { return {{"psd", t.psd}, {"pd", t.pd}, {"rank", t.rank}}; }

json to_json(const Interval& I) {
    if (I.empty) return {{"empty", true}};
    return {{"empty", false}, {"lo", number(I.lo)}, {"hi", number(I.hi)}, {"open", I.open}};
}

std::string to_string(FailedForm f) {
    switch (f) {
        case FailedForm::None: return "none";
        case FailedForm::Moment: return "moment";
        case FailedForm::Local: return "localizing";
        case FailedForm::Local1: return "line-factor";
        case FailedForm::Local2: return "conic-factor";
        case FailedForm::Joint: return "joint";
    }
    return "none";
}

json to_json(const Decision& d) {
    json checks = json::array();
    for (const auto& c : d.checks)
        checks.push_back({{"name", c.name}, {"kind", c.kind}, {"pass", c.pass}, {"margin", number(c.margin)}});
    json out = {{"verdict", tmp3::to_string(d.verdict)},
                {"branch", d.branch},
                {"checks", checks},
                {"failed_form", to_string(d.failed)},
                {"witness_available", d.witness_available}};
    out["completion_interval"] = d.completion_interval ? to_json(*d.completion_interval) : json(nullptr);
    out["pd_interval"] = d.pd_interval ? to_json(*d.pd_interval) : json(nullptr);
    if (!d.note.empty()) out["note"] = d.note;
    if (d.lambda != 0.0) out["lambda"] = number(d.lambda);
    return out;
}

json to_json(const AtomicMeasure& mu) {
    json atoms = json::array();
    for (const auto& a : mu.atoms)
        atoms.push_back({{"x", number(a.x)}, {"y", number(a.y)}, {"w", number(a.w)}, {"component", a.component}});
    return {{"atoms", atoms}};
}

AtomicMeasure measure_from_json(const json& j) {
    AtomicMeasure mu;
    const json& atoms = field(j, "atoms");
    if (!atoms.is_array()) throw MalformedInput("'atoms' must be a list");
    for (const json& a : atoms) {
        Atom at{read_number(field(a, "x"), "atom x"), read_number(field(a, "y"), "atom y"),
                read_number(field(a, "w"), "atom weight"), 0};
        if (a.contains("component")) at.component = read_int(a.at("component"), "atom component");
        if (at.w <= 0.0) throw MalformedInput("atom weights must be positive");
        mu.atoms.push_back(at);
    }
    return mu;
}

json to_json(const BivarPoly& p) {
    json terms = json::array();
    for (const auto& [e, c] : p.terms()) terms.push_back({{"i", e.i}, {"j", e.j}, {"c", number(c)}});
    return terms;
}

BivarPoly poly_from_json(const json& j) {
    const json& terms = j.is_object() ? field(j, "terms") : j;
    if (!terms.is_array()) throw MalformedInput("polynomial must be a list of {i, j, c} terms");
    BivarPoly p;
    for (const json& t : terms) {
        const int i = read_int(field(t, "i"), "term exponent i"), jj = read_int(field(t, "j"), "term exponent j");
        if (i < 0 || jj < 0) throw MalformedInput("negative exponent in polynomial term");
        p.add_term(i, jj, read_number(field(t, "c"), "term coefficient"));
    }
    return p;
}

json to_json(const Witness& w) {
    return {{"p", to_json(w.p)},
            {"value", number(w.value)},
            {"min_sampled", number(w.min_sampled)},
            {"source", to_string(w.source)}};
}

json to_json(const Multiplier& m) {
    json out = {{"f", m.f.to_string()}};
    out["alpha"] = m.alpha ? number(*m.alpha) : json(nullptr);
    if (m.source_cubic) {
        json coeffs = json::array();
        for (double c : m.source_cubic->coeffs()) coeffs.push_back(number(c));
        out["cubic"] = coeffs;
        out["cubic_text"] = m.source_cubic->to_string();
    }
    json roots = json::array();
    for (double r : m.roots) roots.push_back(number(r));
    out["roots"] = roots;
    out["rule"] = m.rule == Multiplier::Rule::Smallest ? "smallest" : m.rule == Multiplier::Rule::Largest ? "largest"
                                                                                                        : "none";
    return out;
}

json to_json(const Basis& b) {
    json out = {{"k", b.k}, {"size", b.size()}, {"labels", b.labels()}};
    if (b.partial) out["partial"] = true;
    return out;
}

Certificate certificate_from_json(const json& j) {
    Certificate cert;
    const json& form = field(j, "form");
    if (form == "v1")
        cert.form = Certificate::Form::V1;
    else if (form == "v2")
        cert.form = Certificate::Form::V2;
    else
        throw MalformedInput("certificate form must be \"v1\" or \"v2\"");
    cert.k = read_int(field(j, "k"), "'k'");
    cert.gram0 = form_from_json(field(j, "gram0"), "gram0");
    if (j.contains("gram1") && !j.at("gram1").is_null()) cert.gram1 = form_from_json(j.at("gram1"), "gram1");
    if (j.contains("gram2") && !j.at("gram2").is_null()) cert.gram2 = form_from_json(j.at("gram2"), "gram2");
    return cert;
}

json to_json(const CertificateResidual& r) {
    json out = {{"sampled", number(r.sampled)}, {"samples", r.samples}};
    out["symbolic"] = r.symbolic ? number(*r.symbolic) : json(nullptr);
    return out;
}

}  // namespace tmp3::io
