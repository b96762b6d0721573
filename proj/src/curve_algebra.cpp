#include "tmp3/curve_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tmp3/errors.hpp"

namespace tmp3 {

bool mono_greater(const Exponent& a, const Exponent& b, MonoOrder order) {
    switch (order) {
        case MonoOrder::GrlexXY:
            if (a.degree() != b.degree()) return a.degree() > b.degree();
            return a.i > b.i;
        case MonoOrder::GrlexYX:
            if (a.degree() != b.degree()) return a.degree() > b.degree();
            return a.j > b.j;
        case MonoOrder::LexYX:
            if (a.j != b.j) return a.j > b.j;
            return a.i > b.i;
    }
    return false;
}

Rewrite make_rewrite(const BivarPoly& relation, MonoOrder order) {
    if (relation.is_zero()) throw DegenerateInput("rewrite relation is zero");
    Rewrite r{relation, order, relation.terms().begin()->first};
    for (const auto& [e, c] : relation.terms())
        if (mono_greater(e, r.head, order)) r.head = e;
    return r;
}

namespace {

MonoOrder graded_order(CaseId id) {
    switch (id) {
        case CaseId::P1:
        case CaseId::P2:
        case CaseId::P3:
        case CaseId::P4:
        case CaseId::P5:
        case CaseId::P12:
        case CaseId::P13:
        case CaseId::P17:
        case CaseId::P19:
        case CaseId::P20:
        case CaseId::P27: return MonoOrder::GrlexXY;
        default: return MonoOrder::GrlexYX;
    }
}

}  // namespace

Rewrite reduction_rewrite(const CurveCase& c) {
    const int n = case_index(c.id);
    const MonoOrder order = n <= 5 ? MonoOrder::LexYX : graded_order(c.id);
    return make_rewrite(defining_polynomial(c), order);
}

Rewrite graded_rewrite(const CurveCase& c) { return make_rewrite(defining_polynomial(c), graded_order(c.id)); }

BivarPoly normal_form(const BivarPoly& p, const Rewrite& r) {
    // Work list sorted largest first; eliminating the head of the largest term only
    // introduces smaller terms, so each monomial is settled once.
    auto cmp = [&r](const Exponent& a, const Exponent& b) { return mono_greater(a, b, r.order); };
    std::map<Exponent, double, decltype(cmp)> work(cmp);
    for (const auto& [e, c] : p.terms()) work[e] += c;
    const double lc = r.relation.coeff(r.head.i, r.head.j);
    BivarPoly out;
    while (!work.empty()) {
        auto it = work.begin();
        const Exponent e = it->first;
        const double c = it->second;
        work.erase(it);
        if (c == 0.0) continue;
        if (e.i >= r.head.i && e.j >= r.head.j) {
            const double s = c / lc;
            const int di = e.i - r.head.i, dj = e.j - r.head.j;
            for (const auto& [re, rc] : r.relation.terms()) {
                if (re == r.head) continue;
                work[{re.i + di, re.j + dj}] -= s * rc;
            }
        } else {
            out.add_term(e.i, e.j, c);
        }
    }
    return out;
}

BivarPoly reduce_on_curve(const BivarPoly& p, const CurveCase& c) { return normal_form(p, reduction_rewrite(c)); }

BivarPoly graded_normal_form(const BivarPoly& p, const CurveCase& c) { return normal_form(p, graded_rewrite(c)); }

std::vector<Exponent> normal_monomials(const Rewrite& r, int max_degree) {
    std::vector<Exponent> out;
    for (int d = 0; d <= max_degree; ++d)
        for (int i = d; i >= 0; --i) {
            const Exponent e{i, d - i};
            if (!(e.i >= r.head.i && e.j >= r.head.j)) out.push_back(e);
        }
    return out;
}

// ---------------------------------------------------------------------------

CurveDivider::CurveDivider(const CurveCase& c, const BivarPoly& den, int cap)
    : curve_(c), rw_(graded_rewrite(c)), cap_(cap) {
    unknowns_ = normal_monomials(rw_, cap);
    columns_.reserve(unknowns_.size());
    for (const auto& m : unknowns_) columns_.push_back(normal_form(BivarPoly::monomial(m.i, m.j) * den, rw_));
}

std::optional<BivarPoly> CurveDivider::divide(const BivarPoly& num) const {
    const BivarPoly target = normal_form(num, rw_);
    if (target.is_zero()) return BivarPoly{};
    std::map<Exponent, int> row_of;
    auto row = [&](const Exponent& e) {
        auto [it, ins] = row_of.try_emplace(e, static_cast<int>(row_of.size()));
        return it->second;
    };
    for (const auto& col : columns_)
        for (const auto& [e, v] : col.terms()) row(e);
    for (const auto& [e, v] : target.terms()) row(e);
    const int m = static_cast<int>(row_of.size()), n = static_cast<int>(unknowns_.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    for (int j = 0; j < n; ++j)
        for (const auto& [e, v] : columns_[j].terms()) A(row_of.at(e), j) = v;
    for (const auto& [e, v] : target.terms()) b(row_of.at(e)) = v;
    const Eigen::VectorXd q = A.completeOrthogonalDecomposition().solve(b);
    const double res = (A * q - b).norm();
    if (!(res <= 1e-8 * b.norm())) return std::nullopt;
    BivarPoly out;
    for (int j = 0; j < n; ++j) out.add_term(unknowns_[j].i, unknowns_[j].j, q(j));
    return out.pruned(1e-12);
}

std::optional<BivarPoly> product_on_curve(const RationalElem& u, const RationalElem& v, const RationalElem& f,
                                          const CurveCase& c, int max_degree) {
    const RationalElem prod = u * v * f;
    if (prod.den.degree() == 0) {
        BivarPoly r = graded_normal_form(prod.num, c) * (1.0 / prod.den.coeff(0, 0));
        r = r.pruned(1e-11);
        if (r.degree() > max_degree) return std::nullopt;
        return r;
    }
    return CurveDivider(c, prod.den, max_degree).divide(prod.num);
}

// ---------------------------------------------------------------------------

double eval_pullback(const RationalElem& e, const CurveCase& c, double t, int component) {
    const Parametrization par = parametrization(c);
    if (component < 0 || component >= static_cast<int>(par.components.size()))
        throw InvalidParams("component index out of range");
    const ParamComponent& pc = par.components[component];
    for (double ex : pc.excluded)
        if (std::abs(t - ex) < 1e-6) throw PoleError("excluded parameter value t=" + std::to_string(t));
    return e.eval(pc.x(t), pc.y(t), 1e-12);
}

namespace {

// p(x(t), y(t)) as num/den with exact polynomial arithmetic.
std::pair<UnivarPoly, UnivarPoly> pullback_fraction(const BivarPoly& p, const ParamComponent& pc) {
    int I = 0, J = 0;
    for (const auto& [e, c] : p.terms()) {
        I = std::max(I, e.i);
        J = std::max(J, e.j);
    }
    UnivarPoly num;
    for (const auto& [e, c] : p.terms())
        num += pc.xn.pow(e.i) * pc.xd.pow(I - e.i) * pc.yn.pow(e.j) * pc.yd.pow(J - e.j) * c;
    return {num, pc.xd.pow(I) * pc.yd.pow(J)};
}

}  // namespace

UnivarPoly weighted_pullback(const RationalElem& e, const ParamComponent& pc, const UnivarPoly& weight) {
    const auto [nn, nd] = pullback_fraction(e.num, pc);
    const auto [dn, dd] = pullback_fraction(e.den, pc);
    const UnivarPoly top = weight * nn * dd;
    const UnivarPoly bottom = nd * dn;
    auto [q, r] = top.divmod(bottom);
    if (r.norm_inf() > 1e-9 * std::max(1.0, top.norm_inf()))
        throw DegenerateInput("weighted pullback of " + e.to_string() + " is not a polynomial");
    // Clean coefficients that are pure rounding noise.
    std::vector<double> cs = q.coeffs();
    const double cut = 1e-13 * q.norm_inf();
    for (double& v : cs)
        if (std::abs(v) < cut) v = 0.0;
    return UnivarPoly(cs);
}

}  // namespace tmp3
