#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "tmp3/bases.hpp"
#include "tmp3/certify.hpp"
#include "tmp3/curves.hpp"
#include "tmp3/errors.hpp"
#include "tmp3/io.hpp"
#include "tmp3/measure.hpp"
#include "tmp3/moment.hpp"

using tmp3::io::json;

namespace {

// Exit codes of solve; the other commands use 0 for success and 3 for bad input.
constexpr int kMomentFunctional = 0;
constexpr int kNotMomentFunctional = 1;
constexpr int kInconclusive = 2;
constexpr int kInputError = 3;

int fail(const std::string& type, const std::string& message) {
    const json err = {{"error", {{"type", type}, {"message", message}}}};
    std::cout << err.dump(2) << "\n";
    return kInputError;
}

// "KTooSmall: k=1 below minimum 2" -> "KTooSmall"
std::string error_type(const std::exception& e) {
    const std::string what = e.what();
    const auto colon = what.find(':');
    return colon == std::string::npos ? "Error" : what.substr(0, colon);
}

json read_input(const std::string& path) {
    if (path != "-") return tmp3::io::read_json(path);
    try {
        return json::parse(std::cin);
    } catch (const json::parse_error& e) {
        throw tmp3::MalformedInput(std::string("stdin: ") + e.what());
    }
}

class Stopwatch {
public:
    void lap(const std::string& stage) {
        const auto now = std::chrono::steady_clock::now();
        laps_[stage] = std::chrono::duration<double, std::milli>(now - last_).count();
        last_ = now;
    }
    json report() const { return laps_; }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
    json laps_ = json::object();
};

tmp3::CurveCase parse_case(const std::string& id, const std::string& params) {
    return tmp3::make_case(tmp3::case_id_from_string(id), tmp3::io::parse_params(params));
}

struct SolveArgs {
    std::string input = "-", out = "-", completion = "midpoint";
    bool extract = false, timings = false, avoid_isolated = false;
    std::optional<double> tol_psd, tol_rank;
};

tmp3::ExtractOptions completion_options(const std::string& text) {
    tmp3::ExtractOptions o;
    if (text == "midpoint")
        o.choice = tmp3::CompletionChoice::Midpoint;
    else if (text == "left")
        o.choice = tmp3::CompletionChoice::Left;
    else if (text == "right")
        o.choice = tmp3::CompletionChoice::Right;
    else if (text.rfind("value=", 0) == 0) {
        o.choice = tmp3::CompletionChoice::Value;
        const auto p = tmp3::io::parse_params(text);
        o.value = p.at("value");
    } else {
        throw tmp3::MalformedInput("completion must be midpoint, left, right or value=V");
    }
    return o;
}

int run_solve(const SolveArgs& a) {
    Stopwatch clock;
    tmp3::Tolerances tol;
    if (const char* env = std::getenv("TMP3_TOL_PSD")) {
        const auto p = tmp3::io::parse_params(std::string("psd=") + env);
        tol.psd = p.at("psd");
    }
    if (a.tol_psd) tol.psd = *a.tol_psd;
    if (a.tol_rank) tol.rank = *a.tol_rank;
    tmp3::ExtractOptions eopt = completion_options(a.completion);

    const tmp3::MomentSequence L = tmp3::io::problem_from_json(read_input(a.input));
    clock.lap("parse");
    tmp3::DecideOptions dopt;
    dopt.tol = tol;
    dopt.avoid_isolated_point = a.avoid_isolated;
    const tmp3::Decision d = tmp3::decide(L, dopt);
    clock.lap("decide");

    json report = {{"case", tmp3::to_string(L.curve.id)},
                   {"params", tmp3::io::problem_to_json(L)["params"]},
                   {"k", L.k},
                   {"tolerances", tmp3::io::to_json(tol)},
                   {"ideal_residual", tmp3::ideal_residual_relative(L)},
                   {"decision", tmp3::io::to_json(d)},
                   {"completion", a.completion}};
    report["verdict"] = tmp3::to_string(d.verdict);
    report["measure"] = nullptr;
    report["witness"] = nullptr;

    const bool mf = d.verdict == tmp3::Verdict::MomentFunctional ||
                    d.verdict == tmp3::Verdict::MomentFunctionalOnNonIsolated;
    if (a.extract && mf) {
        if (!tmp3::is_constructive(L.curve.id)) {
            report["extraction_error"] = "no measure extraction for " + tmp3::to_string(L.curve.id);
        } else {
            eopt.tol = tol;
            eopt.run_decide = false;
            eopt.lambda = d.lambda;
            try {
                const tmp3::Extraction ex = tmp3::extract(L, eopt);
                json m = tmp3::io::to_json(ex.measure);
                m["residual"] = ex.residual;
                m["completion_value"] = ex.completion_value;
                m["attempts"] = ex.attempts;
                report["measure"] = m;
                report["residual"] = ex.residual;
            } catch (const tmp3::ExtractionFailed& e) {
                report["extraction_error"] = e.what();
            }
        }
        clock.lap("extract");
    }
    if (d.verdict == tmp3::Verdict::NotMomentFunctional && d.witness_available) {
        try {
            report["witness"] = tmp3::io::to_json(tmp3::witness(L, dopt));
        } catch (const tmp3::NoWitness& e) {
            report["witness_error"] = e.what();
        }
        clock.lap("witness");
    }
    report["timings"] = a.timings ? clock.report() : json(nullptr);
    tmp3::io::write_json(a.out, report);

    switch (d.verdict) {
        case tmp3::Verdict::MomentFunctional:
        case tmp3::Verdict::MomentFunctionalOnNonIsolated: return kMomentFunctional;
        case tmp3::Verdict::NotMomentFunctional: return kNotMomentFunctional;
        case tmp3::Verdict::Inconclusive: return kInconclusive;
    }
    return kInconclusive;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Truncated moment problems on plane cubic curves"};
    app.require_subcommand(1);

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Decide whether moments come from a measure on the curve");
    s->add_option("--input", solve.input, "problem file, - for stdin");
    s->add_flag("--extract", solve.extract, "recover an atomic measure (constructive cases)");
    s->add_option("--completion", solve.completion, "midpoint | left | right | value=V");
    s->add_option("--tol-psd", solve.tol_psd, "psd tolerance");
    s->add_option("--tol-rank", solve.tol_rank, "rank tolerance");
    s->add_option("--out", solve.out, "report file, - for stdout");
    s->add_flag("--timings", solve.timings, "record stage timings in the report");
    s->add_flag("--avoid-isolated-point", solve.avoid_isolated, "P5: ask for a measure avoiding the isolated point");

    std::string g_case, g_params, g_out = "-";
    int g_atoms = 0, g_k = 1;
    std::uint64_t g_seed = 0;
    double g_general = tmp3::GenerateSpec{}.general_position;
    auto* g = app.add_subcommand("generate", "Moments of a random atomic measure on the curve");
    g->add_option("--case", g_case)->required();
    g->add_option("--params", g_params);
    g->add_option("--atoms", g_atoms)->required();
    g->add_option("--k", g_k)->required();
    g->add_option("--seed", g_seed);
    g->add_option("--general-position", g_general, "min pd margin with at least 3k atoms, 0 disables");
    g->add_option("--out", g_out);

    std::string a_case, a_params;
    auto* al = app.add_subcommand("alpha", "Print the positivity multiplier and its cubic");
    al->add_option("--case", a_case)->required();
    al->add_option("--params", a_params);

    std::string w_input = "-", w_out = "-";
    auto* w = app.add_subcommand("witness", "Separating polynomial for data that is not a moment functional");
    w->add_option("--input", w_input);
    w->add_option("--out", w_out);

    std::string c_poly, c_cert, c_case, c_params;
    double c_tol = 1e-8;
    auto* ce = app.add_subcommand("certify", "Check a Gram-matrix positivity certificate");
    ce->add_option("--poly", c_poly)->required();
    ce->add_option("--cert", c_cert)->required();
    ce->add_option("--case", c_case)->required();
    ce->add_option("--params", c_params);
    ce->add_option("--tol", c_tol, "residual tolerance relative to max(1, max |coefficient of p|)");

    std::string i_case, i_params;
    int i_k = 0;
    auto* in = app.add_subcommand("info", "Bases, parametrization and multiplier of a case");
    in->add_option("--case", i_case)->required();
    in->add_option("--params", i_params);
    in->add_option("--k", i_k, "degree bound, defaults to the smallest supported");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return fail("UsageError", e.what());
    }

    try {
        if (*s) return run_solve(solve);

        if (*g) {
            tmp3::GenerateSpec spec;
            spec.curve = parse_case(g_case, g_params);
            spec.n_atoms = g_atoms;
            spec.k = g_k;
            spec.seed = g_seed;
            spec.general_position = g_general;
            if (g_atoms < 1) throw tmp3::MalformedInput("--atoms must be positive");
            tmp3::basis_Bk(spec.curve, g_k);  // rejects k below the case minimum
            const tmp3::Generated gen = tmp3::generate(spec);
            json out = tmp3::io::problem_to_json(gen.moments);
            out["generating_measure"] = tmp3::io::to_json(gen.measure);
            out["seed"] = g_seed;
            tmp3::io::write_json(g_out, out);
            return 0;
        }

        if (*al) {
            const tmp3::CurveCase c = parse_case(a_case, a_params);
            json out = tmp3::io::to_json(tmp3::multiplier(c));
            out["case"] = tmp3::to_string(c.id);
            tmp3::io::write_json("-", out);
            return 0;
        }

        if (*w) {
            const tmp3::MomentSequence L = tmp3::io::problem_from_json(read_input(w_input));
            try {
                tmp3::io::write_json(w_out, tmp3::io::to_json(tmp3::witness(L)));
            } catch (const tmp3::NoWitness& e) {
                fail("NoWitness", e.what());
                return kInconclusive;
            }
            return 0;
        }

        if (*ce) {
            const tmp3::CurveCase c = parse_case(c_case, c_params);
            const tmp3::BivarPoly p = tmp3::io::poly_from_json(read_input(c_poly));
            const tmp3::Certificate cert = tmp3::io::certificate_from_json(read_input(c_cert));
            const tmp3::CertificateResidual r = tmp3::verify_certificate(p, cert, c);
            const double bound = c_tol * std::max(1.0, p.max_abs_coeff());
            const bool ok = r.sampled <= bound && (!r.symbolic || *r.symbolic <= bound);
            json out = tmp3::io::to_json(r);
            out["tolerance"] = bound;
            out["certified"] = ok;
            tmp3::io::write_json("-", out);
            return ok ? 0 : 1;
        }

        if (*in) {
            const tmp3::CurveCase c = parse_case(i_case, i_params);
            const int k = i_k > 0 ? i_k : tmp3::k_min(c.id);
            json out = {{"case", tmp3::to_string(c.id)},
                        {"curve", tmp3::defining_polynomial(c).to_string()},
                        {"k", k},
                        {"k_min", tmp3::k_min(c.id)},
                        {"Bk", tmp3::io::to_json(tmp3::basis_Bk(c, k))}};
            if (tmp3::uses_two_factor_form(c.id)) {
                const tmp3::ChiFlags chi = tmp3::chi_flags(c);
                const auto [line, conic] = tmp3::two_factor_split(c);
                out["Rk1"] = tmp3::io::to_json(tmp3::basis_Rk1(c, std::max(k, 2)));
                out["factors"] = {line.to_string(), conic.to_string()};
                out["chi"] = {chi.chi1, chi.chi2};
            } else {
                out["Vk"] = tmp3::io::to_json(tmp3::basis_Vk(c, k));
                out["multiplier"] = tmp3::io::to_json(tmp3::multiplier(c));
            }
            if (tmp3::has_parametrization(c.id)) {
                const tmp3::Parametrization par = tmp3::parametrization(c);
                json comps = json::array(), match = json::array();
                for (const auto& pc : par.components)
                    comps.push_back({{"name", pc.name}, {"x", pc.x_label}, {"y", pc.y_label}});
                for (const auto& m : par.matching) match.push_back(m.text);
                out["parametrization"] = comps;
                out["matching"] = match;
            }
            tmp3::io::write_json("-", out);
            return 0;
        }
    } catch (const tmp3::IdealViolation& e) {
        return fail("IdealViolation", e.what());
    } catch (const tmp3::Error& e) {
        return fail(error_type(e), e.what());
    } catch (const std::exception& e) {
        return fail("Error", e.what());
    }
    return kInputError;
}
