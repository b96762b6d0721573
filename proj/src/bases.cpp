#include "tmp3/bases.hpp"

#include <algorithm>

#include "tmp3/curve_algebra.hpp"
#include "tmp3/errors.hpp"

namespace tmp3 {

namespace {

BivarPoly X(int i = 1) { return BivarPoly::monomial(i, 0); }
BivarPoly Y(int j = 1) { return BivarPoly::monomial(0, j); }
BivarPoly K(double c) { return BivarPoly::constant(c); }

BasisElement mono(int i, int j) {
    BivarPoly m = BivarPoly::monomial(i, j);
    return {BasisElement::Kind::Monomial, m.to_string(), RationalElem(m)};
}

BasisElement poly_elem(const BivarPoly& p, std::string label = {}) {
    if (label.empty()) label = p.to_string();
    const bool monomial = p.size() == 1 && p.terms().begin()->second == 1.0;
    return {monomial ? BasisElement::Kind::Monomial : BasisElement::Kind::Composite, std::move(label),
            RationalElem(p)};
}

BasisElement rational(const BivarPoly& num, const BivarPoly& den, std::string label) {
    return {BasisElement::Kind::Rational, std::move(label), RationalElem(num, den)};
}

// {1, x, y, ..., x^2 y^{i-2}, x y^{i-1}, y^i, ...}
std::vector<BasisElement> weierstrass_pattern(int k) {
    std::vector<BasisElement> v{mono(0, 0), mono(1, 0), mono(0, 1)};
    for (int i = 2; i <= k; ++i) {
        v.push_back(mono(2, i - 2));
        v.push_back(mono(1, i - 1));
        v.push_back(mono(0, i));
    }
    return v;
}

// {1, x, y, ..., x^i, x^{i-1} y, y^i, ...}
std::vector<BasisElement> newton_pattern(int k) {
    std::vector<BasisElement> v{mono(0, 0), mono(1, 0), mono(0, 1)};
    for (int i = 2; i <= k; ++i) {
        v.push_back(mono(i, 0));
        v.push_back(mono(i - 1, 1));
        v.push_back(mono(0, i));
    }
    return v;
}

// {1, x, y, ..., x^j, x^{j-1} y, x^{j-2} y^2, ...}
std::vector<BasisElement> conic_pattern(int k) {
    std::vector<BasisElement> v{mono(0, 0), mono(1, 0), mono(0, 1)};
    for (int j = 2; j <= k; ++j) {
        v.push_back(mono(j, 0));
        v.push_back(mono(j - 1, 1));
        v.push_back(mono(j - 2, 2));
    }
    return v;
}

// {1, x, y, ..., x^j, x y^{j-1}, y^j, ...}
std::vector<BasisElement> parabola_pattern(int k) {
    std::vector<BasisElement> v{mono(0, 0), mono(1, 0), mono(0, 1)};
    for (int j = 2; j <= k; ++j) {
        v.push_back(mono(j, 0));
        v.push_back(mono(1, j - 1));
        v.push_back(mono(0, j));
    }
    return v;
}

// {x^k, x^{k-1}, x^{k-1} y, ..., x, xy, 1, y, ..., y^k}
std::vector<BasisElement> rational_type1_pattern(int k) {
    std::vector<BasisElement> v{mono(k, 0)};
    for (int j = k - 1; j >= 1; --j) {
        v.push_back(mono(j, 0));
        v.push_back(mono(j, 1));
    }
    for (int j = 0; j <= k; ++j) v.push_back(mono(0, j));
    return v;
}

// Preimages of {1, t^2 + sign, ..., t^{3k} + sign t^{3k-2}} along the parametrization
// (t^2, t^3 - t) for the nodal cubic (sign = -1) and (t^2 + 1, t^3 + t) for the isolated
// one (sign = +1), written in graded normal form.
std::vector<BasisElement> nodal_like_pattern(const CurveCase& c, int k, double sign) {
    std::vector<BasisElement> v{mono(0, 0)};
    const BivarPoly t2 = X() - K(sign > 0 ? 1.0 : 0.0);  // t^2 as a function on the curve
    const BivarPoly even = t2 + K(sign);                 // t^2 + sign
    for (int j = 2; j <= 3 * k; ++j) {
        BivarPoly p;
        if (j % 2 == 0)
            p = t2.pow((j - 2) / 2) * even;
        else
            p = t2.pow((j - 3) / 2) * Y();  // y = t (t^2 + sign)
        p = graded_normal_form(p, c).pruned(1e-14);
        v.push_back(poly_elem(p));
    }
    return v;
}

// {1, x+1, x^2-1, x(x^2-1), ..., x^{k-2}(x^2-1), ...}: the x-part shared by P16, P20, P25.
std::vector<BasisElement> shifted_x_part(int k) {
    std::vector<BasisElement> v{mono(0, 0), poly_elem(X() + K(1))};
    for (int j = 0; j <= k - 2; ++j) v.push_back(poly_elem(X(j) * (X(2) - K(1))));
    return v;
}

std::vector<BasisElement> bk_elements(const CurveCase& c, int k) {
    switch (c.id) {
        case CaseId::P1:
        case CaseId::P2:
        case CaseId::P3:
        case CaseId::P12:
        case CaseId::P13: return weierstrass_pattern(k);
        case CaseId::P4: return nodal_like_pattern(c, k, -1.0);
        case CaseId::P5: return nodal_like_pattern(c, k, 1.0);
        case CaseId::P6: return rational_type1_pattern(k);
        case CaseId::P7:
        case CaseId::P8:
        case CaseId::P9:
        case CaseId::P10:
        case CaseId::P11:
        case CaseId::P21:
        case CaseId::P22:
        case CaseId::P28: return newton_pattern(k);
        // x^2 y = y^3 on y(x-y)(x+y) = 0, so the newton pattern is dependent from k = 3 on.
        case CaseId::P27:
        case CaseId::P14:
        case CaseId::P15:
        case CaseId::P23:
        case CaseId::P24:
        case CaseId::P26:
        case CaseId::P29: return conic_pattern(k);
        case CaseId::P16:
        case CaseId::P25: {
            auto v = shifted_x_part(k);
            for (int j = 0; j <= k - 1; ++j) v.push_back(mono(j, 1));
            for (int j = 0; j <= k - 2; ++j) v.push_back(mono(j, 2));
            return v;
        }
        case CaseId::P17: {
            std::vector<BasisElement> v{mono(0, 0)};
            for (int j = 1; j <= k; ++j) v.push_back(mono(j, 0));
            for (int j = 1; j <= k; ++j) v.push_back(mono(0, j));
            for (int j = 1; j <= k - 1; ++j) v.push_back(mono(1, j));
            return v;
        }
        case CaseId::P18: {
            std::vector<BasisElement> v{mono(0, 0)};
            for (int j = 1; j <= k; ++j) v.push_back(mono(j, 0));
            for (int j = 0; j <= k - 2; ++j) {
                v.push_back(mono(j, 1));
                v.push_back(mono(j, 2));
            }
            v.push_back(mono(k - 1, 1));
            return v;
        }
        case CaseId::P19: return parabola_pattern(k);
        case CaseId::P20: {
            auto v = shifted_x_part(k);
            for (int j = 1; j <= k - 1; ++j) {
                v.push_back(mono(0, j));
                v.push_back(mono(1, j));
            }
            v.push_back(mono(0, k));
            return v;
        }
    }
    throw UnsupportedCase("no basis for " + to_string(c.id));
}

// Label prefix for x^m: empty, "x" or "x^m".
std::string x_power(int m) { return m == 0 ? "" : m == 1 ? "x" : "x^" + std::to_string(m); }

void check_k(CaseId id, int k) {
    if (k < k_min(id)) throw KTooSmall(k, k_min(id));
}

int find_label(const std::vector<BasisElement>& v, const std::string& label) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i].label == label) return static_cast<int>(i);
    throw DegenerateInput("basis element '" + label + "' not found");
}

}  // namespace

int Basis::index_of(const std::string& label) const {
    for (std::size_t i = 0; i < elements.size(); ++i)
        if (elements[i].label == label) return static_cast<int>(i);
    return -1;
}

std::vector<std::string> Basis::labels() const {
    std::vector<std::string> out;
    for (const auto& e : elements) out.push_back(e.label);
    return out;
}

int k_min(CaseId id) {
    switch (id) {
        case CaseId::P4:
        case CaseId::P5:
        case CaseId::P6:
        case CaseId::P7:
        case CaseId::P8:
        case CaseId::P9:
        case CaseId::P10:
        case CaseId::P11:
        case CaseId::P17:
        case CaseId::P21:
        case CaseId::P22:
        case CaseId::P27:
        case CaseId::P28: return 1;
        default: return 2;
    }
}

Basis basis_Bk(const CurveCase& c, int k) {
    check_k(c.id, k);
    return {c, k, BasisSpace::Bk, bk_elements(c, k), false};
}

VkDelta vk_delta(const CurveCase& c, int k) {
    check_k(c.id, k);
    if (uses_two_factor_form(c.id))
        throw NotApplicable(to_string(c.id) + " uses the two-factor certificate; V^(k) is not defined");
    const auto b = bk_elements(c, k);
    const std::string xk = BivarPoly::monomial(k, 0).to_string();
    const std::string yk = BivarPoly::monomial(0, k).to_string();
    const double a = c.params.count("a") ? c.param("a") : 0.0;
    VkDelta d;
    switch (c.id) {
        case CaseId::P1:
        case CaseId::P2:
            d.dropped = find_label(b, yk);
            d.added = rational(Y(), X(), "y/x");
            break;
        case CaseId::P3:
        case CaseId::P5:
            d.dropped = 0;
            d.added = rational(Y(), X(), "y/x");
            break;
        case CaseId::P4:
            d.dropped = 0;
            d.added = rational(Y(), X() - K(1), "y/(x-1)");
            break;
        case CaseId::P6:
            d.dropped = find_label(b, xk);
            d.added = mono(k, 1);
            break;
        case CaseId::P7: {
            // f * x^k * x^k has degree 2k+1 and no lower representative, so x^k is the
            // element that leaves V^(k).
            const double alpha = *multiplier(c).alpha;
            d.dropped = find_label(b, xk);
            d.added = rational(2.0 * X() * Y() + K(a), X() - K(alpha), "(2xy+a)/(x-alpha)");
            break;
        }
        case CaseId::P8:
        case CaseId::P9: {
            const double alpha = *multiplier(c).alpha;
            d.dropped = find_label(b, yk);
            d.added = rational(X() * Y(), K(1) - alpha * X(), "xy/(1-alpha*x)");
            break;
        }
        case CaseId::P10:
        case CaseId::P11: d.dropped = find_label(b, yk); break;
        case CaseId::P12: {
            const BivarPoly g = graded_normal_form(X(2 * k), c).pruned(1e-14);
            d.dropped = find_label(b, yk);
            d.added = poly_elem(Y(k) - 2.0 * g, "y^" + std::to_string(k) + "-2g");
            break;
        }
        case CaseId::P13:
            d.dropped = find_label(b, yk);
            d.added = mono(2, k - 1);
            break;
        case CaseId::P14:
            d.dropped = 0;
            d.added = rational(a * Y() + X(2) + Y(2), X(), "(ay+x^2+y^2)/x");
            break;
        case CaseId::P16:
            d.dropped = 0;
            d.added = rational(K(-1) - 2.0 * a * Y() + X(2) + 2.0 * Y(2), K(1) + X(), "(-1-2ay+x^2+2y^2)/(1+x)");
            break;
        case CaseId::P17:
            d.dropped = 0;
            d.added = rational(Y(), X(), "y/x");
            break;
        case CaseId::P18:
            d.dropped = find_label(b, xk);
            d.added = poly_elem(X(k - 1) * (X() - 2.0 * Y(2)), x_power(k - 1) + "(x-2y^2)");
            break;
        case CaseId::P20:
            d.dropped = 0;
            d.added = rational(K(-1) - 2.0 * Y() + X(2), K(1) + X(), "(-1-2y+x^2)/(1+x)");
            break;
        case CaseId::P21:
            d.dropped = find_label(b, xk);
            d.added = mono(k, 1);
            break;
        case CaseId::P22:
            d.dropped = find_label(b, xk);
            d.added = poly_elem(X(k - 1) * (X() + 2.0 * Y() * (K(1) + a * X())),
                                x_power(k - 1) + "(x+2y(1+ax))");
            break;
        case CaseId::P23:
            d.dropped = 0;
            d.added = rational(a * Y() + X(2) - Y(2), X(), "(ay+x^2-y^2)/x");
            break;
        case CaseId::P25:
            d.dropped = 0;
            d.added = rational(K(-1) - 2.0 * a * Y() + X(2) - 2.0 * Y(2), K(1) + X(), "(-1-2ay+x^2-2y^2)/(1+x)");
            break;
        case CaseId::P26:
            d.dropped = find_label(b, xk);
            d.added = poly_elem(Y() * (Y() + K(a)) * X(k - 1), "y(y+a)" + x_power(k - 1));
            break;
        case CaseId::P27:
            d.dropped = 0;
            d.added = rational(X(2) - Y(2), X(), "(x^2-y^2)/x");
            break;
        case CaseId::P28:
            d.dropped = find_label(b, xk);
            d.added = poly_elem(X(k) * (K(1) + 2.0 * Y()), x_power(k) + "(1+2y)");
            break;
        case CaseId::P29:
            d.dropped = 0;
            d.added = rational(-X() + X(3) + Y() + X() * Y() - Y(2), X(), "(-x+x^3+y+xy-y^2)/x");
            break;
        default: throw NotApplicable("no V^(k) for " + to_string(c.id));
    }
    return d;
}

Basis basis_Vk(const CurveCase& c, int k) {
    const VkDelta d = vk_delta(c, k);
    auto v = bk_elements(c, k);
    v.erase(v.begin() + d.dropped);
    const bool partial = c.id == CaseId::P10 || c.id == CaseId::P11;
    if (!partial) v.push_back(d.added);
    if (c.id == CaseId::P29) {
        // The added element takes the values -1 and +1 at (0, 1) along the two slanted
        // lines, so its products are functions on the curve only with elements vanishing
        // there. y and y^2 do not; y - 1 and y^2 - 1 span the same space modulo 1.
        for (auto& e : v) {
            if (e.label == "y") e = poly_elem(Y() - K(1), "y-1");
            else if (e.label == "y^2") e = poly_elem(Y(2) - K(1), "y^2-1");
        }
    }
    return {c, k, BasisSpace::Vk, std::move(v), partial};
}

Basis basis_Rk1(const CurveCase& c, int k) {
    if (!uses_two_factor_form(c.id)) throw NotApplicable("basis_Rk1 is defined for P15, P19, P24 only");
    if (k < 2) throw KTooSmall(k, 2);
    auto v = c.id == CaseId::P19 ? parabola_pattern(k - 1) : conic_pattern(k - 1);
    return {c, k, BasisSpace::Rk1, std::move(v), false};
}

}  // namespace tmp3
