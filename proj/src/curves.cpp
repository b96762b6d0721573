#include "tmp3/curves.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "tmp3/errors.hpp"

namespace tmp3 {

namespace {

BivarPoly X(int i = 1) { return BivarPoly::monomial(i, 0); }
BivarPoly Y(int j = 1) { return BivarPoly::monomial(0, j); }
BivarPoly K(double c) { return BivarPoly::constant(c); }
UnivarPoly T() { return UnivarPoly::t(); }
UnivarPoly U(double c) { return UnivarPoly::constant(c); }

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidParams(what);
}

ParamComponent line_y0() {
    return {"line y=0", T(), U(1), UnivarPoly{}, U(1), {}, "s", "0"};
}

ParamComponent horizontal_line(double y0, const std::string& name) {
    std::ostringstream ys;
    ys << y0;
    return {name, T(), U(1), U(y0), U(1), {}, "t", ys.str()};
}

MatchingCondition text_only(MatchingCondition::Kind kind, std::string text) {
    MatchingCondition m;
    m.kind = kind;
    m.text = std::move(text);
    return m;
}

MatchingCondition eval_eq(std::string text, int lc, double lt, int rc, double rt, int order = 0,
                          double rhs_scale = 1.0) {
    MatchingCondition m;
    m.kind = order == 0 ? MatchingCondition::Kind::Value : MatchingCondition::Kind::Derivative;
    m.text = std::move(text);
    m.terms = {{lc, lt, order, 1.0}, {rc, rt, order, -rhs_scale}};
    return m;
}

// Parameter value of a component passing through (x0, y0); component y must be non-constant.
double param_at_point(const ParamComponent& pc, double x0, double y0) {
    const UnivarPoly eq = pc.yn - pc.yd * y0;
    for (double t : real_roots(eq, 1e-7)) {
        if (std::abs(pc.xd.eval(t)) < 1e-12) continue;
        if (std::abs(pc.x(t) - x0) < 1e-7 * (1.0 + std::abs(x0))) return t;
    }
    throw DegenerateInput("component does not pass through the requested point");
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(CaseId id) { return "P" + std::to_string(case_index(id)); }

CaseId case_id_from_string(const std::string& s) {
    if (s.size() >= 2 && (s[0] == 'P' || s[0] == 'p')) {
        try {
            std::size_t used = 0;
            const int n = std::stoi(s.substr(1), &used);
            if (used == s.size() - 1 && n >= 1 && n <= 29) return static_cast<CaseId>(n);
        } catch (const std::exception&) {
        }
    }
    throw InvalidParams("unknown case identifier '" + s + "'");
}

std::vector<CaseId> all_cases() {
    std::vector<CaseId> v;
    for (int i = 1; i <= 29; ++i) v.push_back(static_cast<CaseId>(i));
    return v;
}

double CurveCase::param(const std::string& name) const {
    auto it = params.find(name);
    if (it == params.end()) throw InvalidParams("missing parameter '" + name + "' for " + to_string(id));
    return it->second;
}

std::string CurveCase::describe() const {
    std::ostringstream os;
    os << to_string(id);
    bool first = true;
    for (const auto& [k, v] : params) {
        os << (first ? " (" : ", ") << k << "=" << v;
        first = false;
    }
    if (!first) os << ")";
    return os.str();
}

std::vector<std::string> param_names(CaseId id) {
    switch (id) {
        case CaseId::P1: return {"a", "b"};
        case CaseId::P2: return {"c"};
        case CaseId::P6:
        case CaseId::P7: return {"a", "d", "e"};
        case CaseId::P8:
        case CaseId::P9: return {"c", "d", "e"};
        case CaseId::P10:
        case CaseId::P11: return {"a", "c", "d", "e"};
        // c(x) = x^3 + c x^2 + d x + e with the cubic coefficient fixed to 1.
        case CaseId::P12: return {"c", "d", "e"};
        case CaseId::P14:
        case CaseId::P15:
        case CaseId::P16:
        case CaseId::P22:
        case CaseId::P23:
        case CaseId::P24:
        case CaseId::P25: return {"a"};
        case CaseId::P26: return {"a", "b"};
        default: return {};
    }
}

CurveCase make_case_unchecked(CaseId id, std::map<std::string, double> params) {
    CurveCase c{id, {}};
    for (const auto& name : param_names(id)) {
        auto it = params.find(name);
        if (it == params.end()) throw InvalidParams("missing parameter '" + name + "' for " + to_string(id));
        if (!std::isfinite(it->second)) throw InvalidParams("parameter '" + name + "' is not finite");
        c.params[name] = it->second;
    }
    for (const auto& [name, v] : params) {
        if (c.params.count(name)) continue;
        // The cubic coefficient of P12 is accepted only in its normalized form.
        if (id == CaseId::P12 && name == "c3" && v == 1.0) continue;
        throw InvalidParams("unexpected parameter '" + name + "' for " + to_string(id));
    }
    return c;
}

CurveCase make_case(CaseId id, std::map<std::string, double> params) {
    CurveCase c = make_case_unchecked(id, std::move(params));
    auto p = [&](const char* n) { return c.param(n); };
    switch (id) {
        case CaseId::P1:
            require(p("a") > 0.0, "a>0");
            require(p("a") < p("b"), "a<b");
            break;
        case CaseId::P2: require(p("c") != 0.0, "c!=0"); break;
        case CaseId::P6: {
            // Reducible exactly when a line x=0 or y=const lies on the curve.
            const double a = p("a"), d = p("d"), e = p("e");
            const double tol = 1e-8 * (1.0 + std::abs(a) + std::abs(d) + std::abs(e));
            bool reducible = std::abs(a) < tol && std::abs(e) < tol;
            if (d >= -tol) {
                for (double b : {std::sqrt(std::max(d, 0.0)), -std::sqrt(std::max(d, 0.0))})
                    if (std::abs(a * b - e) < tol) reducible = true;
            }
            require(!reducible, "no linear factor (xy^2+ay-dx-e must be irreducible)");
            break;
        }
        case CaseId::P8:
        case CaseId::P9: require(p("e") != 0.0, "e!=0"); break;
        case CaseId::P10:
        case CaseId::P11:
            require(p("a") != 0.0, "a!=0");
            require(p("e") != 0.0, "e!=0");
            break;
        case CaseId::P12: require(p("e") != 0.0, "c(0)!=0 (e!=0)"); break;
        case CaseId::P14:
        case CaseId::P22:
        case CaseId::P23: require(p("a") != 0.0, "a!=0"); break;
        case CaseId::P15: require(std::abs(p("a")) > 2.0, "|a|>2"); break;
        case CaseId::P24:
        case CaseId::P25: require(std::abs(p("a")) != 2.0, "|a|!=2"); break;
        case CaseId::P26:
            require(p("a") != 0.0, "a!=0");
            require(p("b") != 0.0, "b!=0");
            require(p("a") != p("b"), "a!=b");
            break;
        default: break;
    }
    return c;
}

BivarPoly defining_polynomial(const CurveCase& c) {
    auto p = [&](const char* n) { return c.param(n); };
    switch (c.id) {
        case CaseId::P1: {
            const double a = p("a"), b = p("b");
            return Y(2) - X(3) + (a + b) * X(2) - (a * b) * X();
        }
        case CaseId::P2: return Y(2) - X(3) - (p("c") * p("c")) * X();
        case CaseId::P3: return Y(2) - X(3);
        case CaseId::P4: return Y(2) - X(3) + 2.0 * X(2) - X();
        case CaseId::P5: return Y(2) - X(3) + X(2);
        case CaseId::P6: return X() * Y(2) + p("a") * Y() - p("d") * X() - K(p("e"));
        case CaseId::P7: return X() * Y(2) + p("a") * Y() - X(2) - p("d") * X() - K(p("e"));
        case CaseId::P8: return X() * Y(2) - X(3) - p("c") * X(2) - p("d") * X() - K(p("e"));
        case CaseId::P9: return X() * Y(2) + X(3) - p("c") * X(2) - p("d") * X() - K(p("e"));
        case CaseId::P10:
            return X() * Y(2) + p("a") * Y() - X(3) - p("c") * X(2) - p("d") * X() - K(p("e"));
        case CaseId::P11:
            return X() * Y(2) + p("a") * Y() + X(3) - p("c") * X(2) - p("d") * X() - K(p("e"));
        case CaseId::P12: return X() * Y() - X(3) - p("c") * X(2) - p("d") * X() - K(p("e"));
        case CaseId::P13: return Y() - X(3);
        case CaseId::P14: return Y() * (p("a") * Y() + X(2) + Y(2));
        case CaseId::P15: return Y() * (K(1) + p("a") * Y() + X(2) + Y(2));
        case CaseId::P16: return Y() * (K(1) + p("a") * Y() - X(2) - Y(2));
        case CaseId::P17: return Y() * (X(2) - Y());
        case CaseId::P18: return Y() * (X() - Y(2));
        case CaseId::P19: return Y() * (K(1) + Y() + X(2));
        case CaseId::P20: return Y() * (K(1) + Y() - X(2));
        case CaseId::P21: return Y() * (K(1) - X() * Y());
        case CaseId::P22: return Y() * (X() + Y() + p("a") * X() * Y());
        case CaseId::P23: return Y() * (p("a") * Y() + X(2) - Y(2));
        case CaseId::P24: return Y() * (K(1) + p("a") * Y() + X(2) - Y(2));
        case CaseId::P25: return Y() * (K(1) + p("a") * Y() - X(2) + Y(2));
        case CaseId::P26: return Y() * (K(p("a")) + Y()) * (K(p("b")) + Y());
        case CaseId::P27: return Y() * (X() - Y()) * (X() + Y());
        case CaseId::P28: return Y() * X() * (Y() + K(1));
        case CaseId::P29: return Y() * (K(1) + X() - Y()) * (K(1) - X() - Y());
    }
    throw UnsupportedCase("unknown case");
}

bool is_reducible(CaseId id) { return case_index(id) >= 14; }

bool has_parametrization(CaseId id) {
    switch (id) {
        case CaseId::P1:
        case CaseId::P2:
        case CaseId::P7:
        case CaseId::P8:
        case CaseId::P9:
        case CaseId::P10:
        case CaseId::P11: return false;
        default: return true;
    }
}

bool uses_two_factor_form(CaseId id) {
    return id == CaseId::P15 || id == CaseId::P19 || id == CaseId::P24;
}

bool is_constructive(CaseId id) {
    switch (id) {
        case CaseId::P3:
        case CaseId::P4:
        case CaseId::P5:
        case CaseId::P6:
        case CaseId::P12:
        case CaseId::P13: return true;
        default: return false;
    }
}

// ---------------------------------------------------------------------------

double ParamComponent::x(double t) const {
    const double d = xd.eval(t);
    if (std::abs(d) < 1e-12) throw PoleError(name + ": x(t) undefined at t=" + std::to_string(t));
    return xn.eval(t) / d;
}

double ParamComponent::y(double t) const {
    const double d = yd.eval(t);
    if (std::abs(d) < 1e-12) throw PoleError(name + ": y(t) undefined at t=" + std::to_string(t));
    return yn.eval(t) / d;
}

Parametrization parametrization(const CurveCase& c) {
    using Kind = MatchingCondition::Kind;
    auto p = [&](const char* n) { return c.param(n); };
    Parametrization out;
    auto& comps = out.components;
    auto& match = out.matching;
    const UnivarPoly t = T(), t2 = t * t, t3 = t2 * t;
    switch (c.id) {
        case CaseId::P3: comps.push_back({"cusp curve", t2, U(1), t3, U(1), {}, "t^2", "t^3"}); break;
        case CaseId::P4: comps.push_back({"nodal curve", t2, U(1), t3 - t, U(1), {}, "t^2", "t^3-t"}); break;
        case CaseId::P5:
            comps.push_back({"non-isolated branch", t2 + U(1), U(1), t3 + t, U(1), {}, "t^2+1", "t^3+t"});
            break;
        case CaseId::P6: {
            const double a = p("a"), d = p("d"), e = p("e");
            std::vector<double> ex;
            if (d > 0.0) ex = {-std::sqrt(d), std::sqrt(d)};
            if (d == 0.0) ex = {0.0};
            comps.push_back({"rational curve", U(e) - t * a, t2 - U(d), t, U(1), ex, "(e-a*t)/(t^2-d)", "t"});
            break;
        }
        case CaseId::P12: {
            const UnivarPoly cx = t3 + t2 * p("c") + t * p("d") + U(p("e"));
            comps.push_back({"rational curve", t, U(1), cx, t, {0.0}, "t", "c(t)/t"});
            break;
        }
        case CaseId::P13: comps.push_back({"cubic graph", t, U(1), t3, U(1), {}, "t", "t^3"}); break;
        case CaseId::P14: {
            const double h = p("a") / 2.0;
            comps.push_back(line_y0());
            comps.push_back({"circle", (t2 - U(1)) * (-h), t2 + U(1), (t + U(1)) * (t + U(1)) * (-h), t2 + U(1),
                             {}, "-(a/2)(t^2-1)/(t^2+1)", "-(a/2)(t+1)^2/(t^2+1)"});
            match.push_back(eval_eq("f(0)=g(-1)", 0, 0.0, 1, -1.0));
            match.push_back(eval_eq("f'(0)=2g'(-1)/a", 0, 0.0, 1, -1.0, 1, 2.0 / p("a")));
            break;
        }
        case CaseId::P15: {
            const double a = p("a"), r = std::sqrt(a * a / 4.0 - 1.0);
            comps.push_back(line_y0());
            comps.push_back({"circle", t * (2.0 * r), t2 + U(1), (t2 - U(1)) * r - (t2 + U(1)) * (a / 2.0),
                             t2 + U(1), {}, "2rt/(t^2+1)", "r(t^2-1)/(t^2+1)-a/2"});
            match.push_back(text_only(Kind::Complex, "f(i)=g(t0), t0=-(i/2)(a+sqrt(a^2-4))"));
            break;
        }
        case CaseId::P16: {
            const double a = p("a"), r = std::sqrt(1.0 + a * a / 4.0);
            comps.push_back(line_y0());
            comps.push_back({"circle", t * (2.0 * r), t2 + U(1), (t2 - U(1)) * r + (t2 + U(1)) * (a / 2.0),
                             t2 + U(1), {}, "2rt/(t^2+1)", "r(t^2-1)/(t^2+1)+a/2"});
            const double tm = param_at_point(comps[1], -1.0, 0.0);
            const double tp = param_at_point(comps[1], 1.0, 0.0);
            match.push_back(eval_eq("f(-1)=g(t-)", 0, -1.0, 1, tm));
            match.push_back(eval_eq("f(1)=g(t+)", 0, 1.0, 1, tp));
            break;
        }
        case CaseId::P17:
            comps.push_back(line_y0());
            comps.push_back({"parabola", t, U(1), t2, U(1), {}, "t", "t^2"});
            match.push_back(eval_eq("f(0)=g(0)", 0, 0.0, 1, 0.0));
            match.push_back(eval_eq("f'(0)=g'(0)", 0, 0.0, 1, 0.0, 1));
            break;
        case CaseId::P18:
            comps.push_back(line_y0());
            comps.push_back({"parabola", t2, U(1), t, U(1), {}, "t^2", "t"});
            match.push_back(eval_eq("f(0)=g(0)", 0, 0.0, 1, 0.0));
            match.push_back(text_only(Kind::Coefficient, "f_i=g_{2i}"));
            break;
        case CaseId::P19:
            comps.push_back(line_y0());
            comps.push_back({"parabola", t, U(1), -(t2 + U(1)), U(1), {}, "t", "-t^2-1"});
            match.push_back(text_only(Kind::Complex, "f(i)=g(i)"));
            break;
        case CaseId::P20:
            comps.push_back(line_y0());
            comps.push_back({"parabola", t, U(1), t2 - U(1), U(1), {}, "t", "t^2-1"});
            match.push_back(eval_eq("f(-1)=g(-1)", 0, -1.0, 1, -1.0));
            match.push_back(eval_eq("f(1)=g(1)", 0, 1.0, 1, 1.0));
            break;
        case CaseId::P21:
            comps.push_back(line_y0());
            comps.push_back({"hyperbola", t, U(1), U(1), t, {0.0}, "t", "1/t"});
            match.push_back(text_only(Kind::Coefficient, "f_{i-1}=g_{i-1}, f_i=g_i"));
            break;
        case CaseId::P22: {
            const double a = p("a");
            comps.push_back(line_y0());
            comps.push_back({"hyperbola", t, U(1), -t, U(1) + t * a, {-1.0 / a}, "t", "-t/(1+at)"});
            match.push_back(eval_eq("f(0)=g(0)", 0, 0.0, 1, 0.0));
            match.push_back(text_only(Kind::Coefficient, "f_i=g_{2i}/a^i"));
            break;
        }
        case CaseId::P23: {
            const double a = p("a");
            comps.push_back(line_y0());
            comps.push_back({"hyperbola", t * a, t2 - U(1), t2 * a, t2 - U(1), {-1.0, 1.0}, "at/(t^2-1)",
                             "at^2/(t^2-1)"});
            match.push_back(eval_eq("f(0)=g(0)", 0, 0.0, 1, 0.0));
            match.push_back(eval_eq("f'(0)=-g'(0)/a", 0, 0.0, 1, 0.0, 1, -1.0 / a));
            break;
        }
        case CaseId::P24: {
            const double a = p("a"), r = std::sqrt(1.0 + a * a / 4.0);
            comps.push_back(line_y0());
            comps.push_back({"hyperbola", t * (2.0 * r), t2 - U(1), (t2 + U(1)) * r + (t2 - U(1)) * (a / 2.0),
                             t2 - U(1), {-1.0, 1.0}, "2rt/(t^2-1)", "r(t^2+1)/(t^2-1)+a/2"});
            match.push_back(text_only(Kind::Complex, "f(i)=g(t0)"));
            break;
        }
        case CaseId::P25: {
            const double a = p("a");
            comps.push_back(line_y0());
            if (std::abs(a) > 2.0) {
                const double r = std::sqrt(a * a / 4.0 - 1.0);
                comps.push_back({"hyperbola", t * (2.0 * r), t2 - U(1), (t2 + U(1)) * r - (t2 - U(1)) * (a / 2.0),
                                 t2 - U(1), {-1.0, 1.0}, "2rt/(t^2-1)", "r(t^2+1)/(t^2-1)-a/2"});
            } else {
                const double r = std::sqrt(1.0 - a * a / 4.0);
                comps.push_back({"hyperbola", (t2 + U(1)) * r, t2 - U(1), t * (2.0 * r) - (t2 - U(1)) * (a / 2.0),
                                 t2 - U(1), {-1.0, 1.0}, "r(t^2+1)/(t^2-1)", "2rt/(t^2-1)-a/2"});
            }
            const double tm = param_at_point(comps[1], -1.0, 0.0);
            const double tp = param_at_point(comps[1], 1.0, 0.0);
            match.push_back(eval_eq("f(-1)=g(t-)", 0, -1.0, 1, tm));
            match.push_back(eval_eq("f(1)=g(t+)", 0, 1.0, 1, tp));
            break;
        }
        case CaseId::P26: {
            const double a = p("a"), b = p("b");
            comps.push_back(line_y0());
            comps.push_back(horizontal_line(-a, "line y=-a"));
            comps.push_back(horizontal_line(-b, "line y=-b"));
            match.push_back(text_only(Kind::Coefficient, "f_i=g_i=h_i"));
            match.push_back(text_only(Kind::Coefficient, "b(g_{i-1}-f_{i-1})=a(h_{i-1}-f_{i-1})"));
            break;
        }
        case CaseId::P27: {
            comps.push_back(line_y0());
            comps.push_back({"line y=x", t, U(1), t, U(1), {}, "t", "t"});
            comps.push_back({"line y=-x", t, U(1), -t, U(1), {}, "u", "-u"});
            match.push_back(eval_eq("f(0)=g(0)", 0, 0.0, 1, 0.0));
            match.push_back(eval_eq("f(0)=h(0)", 0, 0.0, 2, 0.0));
            MatchingCondition m;
            m.kind = Kind::Derivative;
            m.text = "g'(0)-f'(0)=f'(0)-h'(0)";
            m.terms = {{1, 0.0, 1, 1.0}, {0, 0.0, 1, -2.0}, {2, 0.0, 1, 1.0}};
            match.push_back(m);
            break;
        }
        case CaseId::P28:
            comps.push_back(line_y0());
            comps.push_back(horizontal_line(-1.0, "line y=-1"));
            comps.push_back({"line x=0", UnivarPoly{}, U(1), t, U(1), {}, "0", "u"});
            match.push_back(eval_eq("f(0)=h(0)", 0, 0.0, 2, 0.0));
            match.push_back(eval_eq("g(0)=h(-1)", 1, 0.0, 2, -1.0));
            match.push_back(text_only(Kind::Coefficient, "f_i=g_i"));
            break;
        case CaseId::P29:
            comps.push_back(line_y0());
            comps.push_back({"line y=1+x", t, U(1), t + U(1), U(1), {}, "t", "1+t"});
            comps.push_back({"line y=1-x", t, U(1), U(1) - t, U(1), {}, "u", "1-u"});
            match.push_back(eval_eq("f(-1)=g(-1)", 0, -1.0, 1, -1.0));
            match.push_back(eval_eq("f(1)=h(1)", 0, 1.0, 2, 1.0));
            match.push_back(eval_eq("g(0)=h(0)", 1, 0.0, 2, 0.0));
            break;
        default:
            throw UnsupportedCase(to_string(c.id) + " is a smooth curve without rational parametrization");
    }
    return out;
}

// ---------------------------------------------------------------------------

Multiplier multiplier(const CurveCase& c) {
    auto p = [&](const char* n) { return c.param(n); };
    Multiplier m;
    auto pick = [&](const UnivarPoly& q, Multiplier::Rule rule) {
        m.source_cubic = q;
        m.roots = cubic_real_roots(q);
        if (m.roots.empty()) throw DegenerateInput("multiplier cubic has no real root");
        m.rule = rule;
        m.alpha = rule == Multiplier::Rule::Largest ? m.roots.back() : m.roots.front();
        return *m.alpha;
    };
    switch (c.id) {
        case CaseId::P1:
        case CaseId::P2: m.f = RationalElem(X()); break;
        case CaseId::P7: {
            const double a = p("a");
            const double alpha = pick(UnivarPoly({a * a / 4.0, p("e"), p("d"), 1.0}), Multiplier::Rule::Smallest);
            m.f = RationalElem(X() - K(alpha));
            break;
        }
        case CaseId::P8:
        case CaseId::P9: {
            const double e = p("e");
            const double last = c.id == CaseId::P8 ? 1.0 : -1.0;
            const double alpha = pick(UnivarPoly({last, p("c"), p("d"), e}),
                                      e > 0 ? Multiplier::Rule::Smallest : Multiplier::Rule::Largest);
            const double s = e > 0 ? 1.0 : -1.0;
            m.f = RationalElem((K(1) - alpha * X()) * s, X());
            break;
        }
        case CaseId::P10:
        case CaseId::P11: {
            const double a = p("a"), cc = p("c"), d = p("d"), e = p("e");
            const double sa = c.id == CaseId::P10 ? -1.0 : 1.0;  // sign of a^2 in the linear term
            const double se = c.id == CaseId::P10 ? 1.0 : -1.0;  // sign of e^2 in the constant
            const UnivarPoly q({a * a * cc * cc / 4.0 - cc * d * e + se * e * e, d * d + sa * a * a + cc * e,
                                -2.0 * d, 1.0});
            const double alpha = pick(q, Multiplier::Rule::Smallest);
            const double sx = c.id == CaseId::P10 ? -1.0 : 1.0;
            m.f = RationalElem(Y(2) + sx * X(2) - cc * X() - K(alpha));
            break;
        }
        default: m.f = RationalElem(K(1)); break;
    }
    return m;
}

std::pair<BivarPoly, BivarPoly> two_factor_split(const CurveCase& c) {
    auto p = [&](const char* n) { return c.param(n); };
    switch (c.id) {
        case CaseId::P15: return {Y(), K(1) + p("a") * Y() + X(2) + Y(2)};
        case CaseId::P19: return {Y(), K(1) + Y() + X(2)};
        case CaseId::P24: return {Y(), K(1) + p("a") * Y() + X(2) - Y(2)};
        default: throw NotApplicable(to_string(c.id) + " has no two-factor certificate form");
    }
}

ChiFlags chi_flags(const CurveCase& c) {
    const auto [line, conic] = two_factor_split(c);
    const auto pts = sample_points(c, 800, 0x5eed, SampleOptions{50.0, 1e-3, 8.0});
    auto sign_of = [](const std::vector<double>& vals) {
        const double tol = 1e-8;
        bool pos = false, neg = false;
        for (double v : vals) {
            if (v > tol) pos = true;
            if (v < -tol) neg = true;
        }
        if (pos && neg) return 0;
        return neg ? -1 : 1;
    };
    std::vector<double> on_conic, on_line;
    for (const auto& q : pts) {
        if (q.component == 1 && on_conic.size() < 200) on_conic.push_back(line.eval(q.x, q.y));
        if (q.component == 0 && on_line.size() < 200) on_line.push_back(conic.eval(q.x, q.y));
    }
    ChiFlags f;
    f.chi1 = sign_of(on_conic);
    f.chi2 = sign_of(on_line);
    if (f.chi2 == 0) throw DegenerateInput("conic factor changes sign on the line");
    return f;
}

// ---------------------------------------------------------------------------

std::vector<CurvePoint> sample_points(const CurveCase& c, int n, std::uint64_t seed, const SampleOptions& opts) {
    std::mt19937_64 rng(seed);
    std::vector<CurvePoint> out;
    out.reserve(n);
    const double bound = opts.bound;
    auto ok = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && std::abs(x) <= bound && std::abs(y) <= bound;
    };
    const long max_tries = 200000L + 1000L * n;
    long tries = 0;
    if (has_parametrization(c.id)) {
        const Parametrization par = parametrization(c);
        std::uniform_real_distribution<double> ud(-opts.t_range, opts.t_range);
        int comp = 0;
        while (static_cast<int>(out.size()) < n) {
            if (++tries > max_tries) throw DegenerateInput("could not sample points on " + c.describe());
            const ParamComponent& pc = par.components[comp];
            const double t = ud(rng);
            bool near_excluded = false;
            for (double ex : pc.excluded)
                if (std::abs(t - ex) < std::max(opts.param_margin, 1e-6)) near_excluded = true;
            if (near_excluded || std::abs(pc.xd.eval(t)) < 1e-9 || std::abs(pc.yd.eval(t)) < 1e-9) continue;
            const double x = pc.x(t), y = pc.y(t);
            if (!ok(x, y)) continue;
            out.push_back({x, y, comp, t});
            comp = (comp + 1) % static_cast<int>(par.components.size());
        }
        return out;
    }
    // Smooth cases: the defining polynomial is quadratic in y, A(x) y^2 + B(x) y + C(x).
    const BivarPoly P = defining_polynomial(c);
    BivarPoly A, B, C;
    for (const auto& [e, v] : P.terms()) {
        if (e.j == 2) A.add_term(e.i, 0, v);
        if (e.j == 1) B.add_term(e.i, 0, v);
        if (e.j == 0) C.add_term(e.i, 0, v);
    }
    std::uniform_real_distribution<double> ux(-bound, bound);
    std::bernoulli_distribution coin(0.5);
    while (static_cast<int>(out.size()) < n) {
        if (++tries > max_tries) throw DegenerateInput("could not sample points on " + c.describe());
        const double x = ux(rng);
        const double a = A.eval(x, 0), b = B.eval(x, 0), cc = C.eval(x, 0);
        if (std::abs(a) < 1e-3) continue;
        const double disc = b * b - 4 * a * cc;
        if (disc < 0) continue;
        const double sq = std::sqrt(disc);
        // Numerically stable quadratic roots.
        const double qv = -0.5 * (b + (b >= 0 ? sq : -sq));
        const double r1 = qv / a;
        const double r2 = qv != 0.0 ? cc / qv : r1;
        const double y = coin(rng) ? r1 : r2;
        if (!ok(x, y)) continue;
        out.push_back({x, y, 0, 0.0});
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

bool support_within(const BivarPoly& p, const std::vector<Exponent>& allowed) {
    for (const auto& [e, v] : p.terms())
        if (std::find(allowed.begin(), allowed.end(), e) == allowed.end()) return false;
    return true;
}

std::optional<Normalized> normalize_weierstrass(const BivarPoly& in) {
    if (!support_within(in, {{0, 2}, {3, 0}, {2, 0}, {1, 0}})) return std::nullopt;
    if (in.coeff(0, 2) == 0.0 || in.coeff(3, 0) == 0.0) return std::nullopt;
    const double lead = in.coeff(0, 2);
    // y^2 = u3 x^3 + u2 x^2 + u1 x
    double u3 = -in.coeff(3, 0) / lead, u2 = -in.coeff(2, 0) / lead, u1 = -in.coeff(1, 0) / lead;
    double sx = 1.0;
    if (u3 < 0) {  // reflect x
        sx = -1.0;
        u3 = -u3;
        u1 = -u1;
    }
    // With Y = y/sqrt(u3): Y^2 = x (x^2 + p x + r)
    const double p = u2 / u3, r = u1 / u3;
    const double tol = 1e-12 * (1.0 + std::abs(p) + std::abs(r));
    AffineMap m;
    m.a11 = sx;
    m.a22 = 1.0 / std::sqrt(u3);
    auto scaled = [&](double s) {
        // X = x/s, Y' = Y/s^{3/2}
        AffineMap q = m;
        q.a11 /= s;
        q.a22 /= std::pow(s, 1.5);
        return q;
    };
    if (std::abs(p) < tol && std::abs(r) < tol) return Normalized{make_case(CaseId::P3, {}), m, ""};
    if (std::abs(p) < tol && r > 0)
        return Normalized{make_case(CaseId::P2, {{"c", std::sqrt(r)}}), m, ""};
    const double disc = p * p - 4 * r;
    if (std::abs(r) < tol && p < 0) return Normalized{make_case(CaseId::P5, {}), scaled(-p), ""};
    if (std::abs(disc) < tol * (1.0 + p * p) && p < 0) {
        const double r0 = -p / 2.0;
        return Normalized{make_case(CaseId::P4, {}), scaled(r0), ""};
    }
    if (disc > 0) {
        const double sq = std::sqrt(disc);
        const double a = (-p - sq) / 2.0, b = (-p + sq) / 2.0;
        if (a > 0) return Normalized{make_case(CaseId::P1, {{"a", a}, {"b", b}}), m, ""};
    }
    return std::nullopt;
}

std::optional<Normalized> normalize_newton(const BivarPoly& in) {
    if (!support_within(in, {{1, 2}, {0, 1}, {3, 0}, {2, 0}, {1, 0}, {0, 0}})) return std::nullopt;
    if (in.coeff(1, 2) == 0.0) return std::nullopt;
    const double lead = in.coeff(1, 2);
    // x y^2 + a y - b x^3 - c x^2 - d x - e
    double a = in.coeff(0, 1) / lead, b = -in.coeff(3, 0) / lead, c = -in.coeff(2, 0) / lead;
    double d = -in.coeff(1, 0) / lead, e = -in.coeff(0, 0) / lead;
    AffineMap m;
    std::string note;
    auto build = [&](CaseId id, std::map<std::string, double> params) -> std::optional<Normalized> {
        try {
            return Normalized{make_case(id, params), m, ""};
        } catch (const InvalidParams& err) {
            return Normalized{make_case_unchecked(id, params), m,
                              std::string("recognized family, outside canonical range: ") + err.what()};
        }
    };
    if (b == 0.0 && c == 0.0) return build(CaseId::P6, {{"a", a}, {"d", d}, {"e", e}});
    if (b == 0.0) {
        if (c < 0) {  // x -> -x, then multiply by -1
            m.a11 = -1.0;
            a = -a;
            c = -c;
            e = -e;
        }
        const double s = std::sqrt(c);
        m.a22 = 1.0 / s;
        return build(CaseId::P7, {{"a", a / s}, {"d", d / c}, {"e", e / c}});
    }
    const double beta = std::abs(b), s = std::sqrt(beta);
    m.a22 = 1.0 / s;
    const double a2 = a / s;
    std::map<std::string, double> prm{{"c", c / beta}, {"d", d / beta}, {"e", e / beta}};
    if (a2 != 0.0) prm["a"] = a2;
    if (b > 0) return build(a2 == 0.0 ? CaseId::P8 : CaseId::P10, prm);
    return build(a2 == 0.0 ? CaseId::P9 : CaseId::P11, prm);
}

std::optional<Normalized> normalize_rational(const BivarPoly& in) {
    if (support_within(in, {{1, 1}, {3, 0}, {2, 0}, {1, 0}, {0, 0}}) && in.coeff(1, 1) != 0.0 &&
        in.coeff(3, 0) != 0.0) {
        const double lead = in.coeff(1, 1);
        const double c3 = -in.coeff(3, 0) / lead;
        AffineMap m;
        m.a22 = 1.0 / c3;
        const std::map<std::string, double> prm{{"c", -in.coeff(2, 0) / lead / c3},
                                                {"d", -in.coeff(1, 0) / lead / c3},
                                                {"e", -in.coeff(0, 0) / lead / c3}};
        if (prm.at("e") == 0.0) return std::nullopt;  // reducible
        return Normalized{make_case(CaseId::P12, prm), m, ""};
    }
    if (support_within(in, {{0, 1}, {3, 0}}) && in.coeff(0, 1) != 0.0 && in.coeff(3, 0) != 0.0) {
        AffineMap m;
        m.a22 = -in.coeff(0, 1) / in.coeff(3, 0);
        return Normalized{make_case(CaseId::P13, {}), m, ""};
    }
    return std::nullopt;
}

struct ConicShape {
    CaseId id;
    std::map<Exponent, double> fixed;  // coefficients fixed by the shape
    std::vector<Exponent> free;        // the parameter slot, if any
};

std::optional<Normalized> normalize_reducible(const BivarPoly& in) {
    BivarPoly q;  // in = y * q
    for (const auto& [e, v] : in.terms()) {
        if (e.j < 1) return std::nullopt;
        q.add_term(e.i, e.j - 1, v);
    }
    if (q.degree() != 2) return std::nullopt;
    const std::vector<ConicShape> shapes = {
        {CaseId::P14, {{{2, 0}, 1}, {{0, 2}, 1}}, {{0, 1}}},
        {CaseId::P15, {{{0, 0}, 1}, {{2, 0}, 1}, {{0, 2}, 1}}, {{0, 1}}},
        {CaseId::P16, {{{0, 0}, 1}, {{2, 0}, -1}, {{0, 2}, -1}}, {{0, 1}}},
        {CaseId::P17, {{{2, 0}, 1}, {{0, 1}, -1}}, {}},
        {CaseId::P18, {{{1, 0}, 1}, {{0, 2}, -1}}, {}},
        {CaseId::P19, {{{0, 0}, 1}, {{0, 1}, 1}, {{2, 0}, 1}}, {}},
        {CaseId::P20, {{{0, 0}, 1}, {{0, 1}, 1}, {{2, 0}, -1}}, {}},
        {CaseId::P21, {{{0, 0}, 1}, {{1, 1}, -1}}, {}},
        {CaseId::P22, {{{1, 0}, 1}, {{0, 1}, 1}}, {{1, 1}}},
        {CaseId::P23, {{{2, 0}, 1}, {{0, 2}, -1}}, {{0, 1}}},
        {CaseId::P24, {{{0, 0}, 1}, {{2, 0}, 1}, {{0, 2}, -1}}, {{0, 1}}},
        {CaseId::P25, {{{0, 0}, 1}, {{2, 0}, -1}, {{0, 2}, 1}}, {{0, 1}}},
        {CaseId::P27, {{{2, 0}, 1}, {{0, 2}, -1}}, {}},
        {CaseId::P28, {{{1, 1}, 1}, {{1, 0}, 1}}, {}},
        {CaseId::P29, {{{0, 0}, 1}, {{0, 1}, -2}, {{0, 2}, 1}, {{2, 0}, -1}}, {}},
    };
    for (const auto& sh : shapes) {
        const auto& [ref_e, ref_v] = *sh.fixed.begin();
        const double lam = q.coeff(ref_e.i, ref_e.j) / ref_v;
        if (lam == 0.0) continue;
        bool match = true;
        for (const auto& [e, v] : q.terms()) {
            const double w = v / lam;
            auto it = sh.fixed.find(e);
            const bool is_free = std::find(sh.free.begin(), sh.free.end(), e) != sh.free.end();
            if (it != sh.fixed.end()) {
                if (std::abs(w - it->second) > 1e-12 * (1.0 + std::abs(w))) match = false;
            } else if (!is_free) {
                match = false;
            }
        }
        for (const auto& [e, v] : sh.fixed)
            if (q.coeff(e.i, e.j) == 0.0) match = false;
        if (!match) continue;
        std::map<std::string, double> prm;
        if (!sh.free.empty()) prm["a"] = q.coeff(sh.free[0].i, sh.free[0].j) / lam;
        try {
            return Normalized{make_case(sh.id, prm), AffineMap{}, ""};
        } catch (const InvalidParams&) {
            return std::nullopt;
        }
    }
    // Parallel lines y (y + a)(y + b).
    if (support_within(q, {{0, 2}, {0, 1}, {0, 0}}) && q.coeff(0, 2) != 0.0) {
        const double s = q.coeff(0, 1) / q.coeff(0, 2), pr = q.coeff(0, 0) / q.coeff(0, 2);
        const double disc = s * s - 4 * pr;
        if (disc <= 0) return std::nullopt;
        const double a = (s - std::sqrt(disc)) / 2.0, b = (s + std::sqrt(disc)) / 2.0;
        try {
            return Normalized{make_case(CaseId::P26, {{"a", a}, {"b", b}}), AffineMap{}, ""};
        } catch (const InvalidParams&) {
            return std::nullopt;
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<Normalized> normalize(const BivarPoly& cubic) {
    if (cubic.degree() != 3) return std::nullopt;
    for (auto fn : {normalize_weierstrass, normalize_newton, normalize_rational, normalize_reducible})
        if (auto r = fn(cubic)) return r;
    return std::nullopt;
}

}  // namespace tmp3
