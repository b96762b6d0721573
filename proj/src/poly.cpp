#include "tmp3/poly.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tmp3/errors.hpp"

namespace tmp3 {

namespace {

std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

}  // namespace

BivarPoly BivarPoly::constant(double c) { return monomial(0, 0, c); }

BivarPoly BivarPoly::monomial(int i, int j, double c) {
    BivarPoly p;
    p.add_term(i, j, c);
    return p;
}

double BivarPoly::coeff(int i, int j) const {
    auto it = terms_.find({i, j});
    return it == terms_.end() ? 0.0 : it->second;
}

void BivarPoly::add_term(int i, int j, double c) {
    if (c == 0.0) return;
    auto [it, inserted] = terms_.try_emplace({i, j}, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

void BivarPoly::set_term(int i, int j, double c) {
    if (c == 0.0)
        terms_.erase({i, j});
    else
        terms_[{i, j}] = c;
}

int BivarPoly::degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e.degree());
    return d;
}

double BivarPoly::eval(double x, double y) const {
    double s = 0.0;
    for (const auto& [e, c] : terms_) s += c * std::pow(x, e.i) * std::pow(y, e.j);
    return s;
}

double BivarPoly::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

double BivarPoly::l1_norm() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m += std::abs(c);
    return m;
}

BivarPoly BivarPoly::pruned(double rel) const {
    const double cut = rel * max_abs_coeff();
    BivarPoly r;
    for (const auto& [e, c] : terms_)
        if (std::abs(c) > cut) r.terms_.emplace(e, c);
    return r;
}

std::string BivarPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    // Highest total degree first reads naturally.
    std::vector<std::pair<Exponent, double>> v(terms_.begin(), terms_.end());
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        if (a.first.degree() != b.first.degree()) return a.first.degree() > b.first.degree();
        return a.first.i > b.first.i;
    });
    for (const auto& [e, c] : v) {
        double a = c;
        if (!first) {
            os << (a < 0 ? " - " : " + ");
            a = std::abs(a);
        } else if (a < 0) {
            os << "-";
            a = -a;
        }
        first = false;
        const bool unit = e.degree() > 0 && a == 1.0;
        if (!unit) os << fmt_num(a);
        if (e.i > 0) os << (unit ? "" : "*") << "x" << (e.i > 1 ? "^" + std::to_string(e.i) : "");
        if (e.j > 0)
            os << ((unit && e.i == 0) ? "" : "*") << "y" << (e.j > 1 ? "^" + std::to_string(e.j) : "");
    }
    return os.str();
}

BivarPoly& BivarPoly::operator+=(const BivarPoly& o) {
    for (const auto& [e, c] : o.terms_) add_term(e.i, e.j, c);
    return *this;
}

BivarPoly& BivarPoly::operator-=(const BivarPoly& o) {
    for (const auto& [e, c] : o.terms_) add_term(e.i, e.j, -c);
    return *this;
}

BivarPoly& BivarPoly::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
}

BivarPoly operator*(const BivarPoly& a, const BivarPoly& b) {
    BivarPoly r;
    for (const auto& [ea, ca] : a.terms_)
        for (const auto& [eb, cb] : b.terms_) r.add_term(ea.i + eb.i, ea.j + eb.j, ca * cb);
    return r;
}

BivarPoly BivarPoly::pow(int n) const {
    BivarPoly r = constant(1.0);
    for (int i = 0; i < n; ++i) r = r * *this;
    return r;
}

// ---------------------------------------------------------------------------

UnivarPoly::UnivarPoly(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

UnivarPoly UnivarPoly::from_roots(const std::vector<double>& roots) {
    UnivarPoly p = constant(1.0);
    for (double r : roots) p = p * UnivarPoly({-r, 1.0});
    return p;
}

void UnivarPoly::trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

double UnivarPoly::eval(double t) const {
    double s = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) s = s * t + *it;
    return s;
}

double UnivarPoly::norm_inf() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
}

UnivarPoly UnivarPoly::derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<double> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = static_cast<double>(i) * c_[i];
    return UnivarPoly(std::move(d));
}

std::string UnivarPoly::to_string(const std::string& var) const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int n = degree(); n >= 0; --n) {
        double a = c_[n];
        if (a == 0.0) continue;
        if (!first) {
            os << (a < 0 ? " - " : " + ");
            a = std::abs(a);
        } else if (a < 0) {
            os << "-";
            a = -a;
        }
        first = false;
        const bool unit = n > 0 && a == 1.0;
        if (!unit) os << fmt_num(a) << (n > 0 ? "*" : "");
        if (n > 0) os << var << (n > 1 ? "^" + std::to_string(n) : "");
    }
    return os.str();
}

UnivarPoly& UnivarPoly::operator+=(const UnivarPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
}

UnivarPoly& UnivarPoly::operator-=(const UnivarPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
}

UnivarPoly& UnivarPoly::operator*=(double s) {
    for (double& v : c_) v *= s;
    trim();
    return *this;
}

UnivarPoly operator*(const UnivarPoly& a, const UnivarPoly& b) {
    if (a.c_.empty() || b.c_.empty()) return {};
    std::vector<double> r(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return UnivarPoly(std::move(r));
}

UnivarPoly UnivarPoly::pow(int n) const {
    UnivarPoly r = constant(1.0);
    for (int i = 0; i < n; ++i) r = r * *this;
    return r;
}

std::pair<UnivarPoly, UnivarPoly> UnivarPoly::divmod(const UnivarPoly& divisor) const {
    if (divisor.is_zero()) throw DegenerateInput("division by the zero polynomial");
    std::vector<double> rem = c_;
    const int dd = divisor.degree();
    const int nd = degree();
    if (nd < dd) return {UnivarPoly{}, *this};
    std::vector<double> q(nd - dd + 1, 0.0);
    for (int n = nd; n >= dd; --n) {
        const double f = rem[n] / divisor.leading();
        q[n - dd] = f;
        for (int i = 0; i <= dd; ++i) rem[n - dd + i] -= f * divisor.coeff(i);
        rem[n] = 0.0;
    }
    rem.resize(dd);
    return {UnivarPoly(std::move(q)), UnivarPoly(std::move(rem))};
}

// ---------------------------------------------------------------------------

RationalElem::RationalElem(BivarPoly n, BivarPoly d) : num(std::move(n)), den(std::move(d)) {
    if (den.is_zero()) throw DegenerateInput("rational element with zero denominator");
}

double RationalElem::eval(double x, double y, double pole_tol) const {
    const double d = den.eval(x, y);
    if (std::abs(d) < pole_tol)
        throw PoleError("denominator " + den.to_string() + " vanishes at (" + fmt_num(x) + ", " +
                        fmt_num(y) + ")");
    return num.eval(x, y) / d;
}

std::string RationalElem::to_string() const {
    if (is_polynomial()) {
        const double c = den.coeff(0, 0);
        return (c == 1.0 ? num : num * (1.0 / c)).to_string();
    }
    return "(" + num.to_string() + ")/(" + den.to_string() + ")";
}

// ---------------------------------------------------------------------------

std::vector<double> real_roots(const UnivarPoly& q, double imag_tol) {
    if (q.is_zero()) throw DegenerateInput("root finding on the zero polynomial");
    const int n = q.degree();
    if (n == 0) return {};
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -q.coeff(i) / q.leading();
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    const UnivarPoly dq = q.derivative();
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
        const auto z = es.eigenvalues()(i);
        if (std::abs(z.imag()) > imag_tol * (1.0 + std::abs(z.real()))) continue;
        double r = z.real();
        // Newton polish, kept only while it improves the residual.
        for (int it = 0; it < 3; ++it) {
            const double d = dq.eval(r);
            if (d == 0.0) break;
            const double cand = r - q.eval(r) / d;
            if (!std::isfinite(cand) || std::abs(q.eval(cand)) >= std::abs(q.eval(r))) break;
            r = cand;
        }
        out.push_back(r);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> cubic_real_roots(const UnivarPoly& q) {
    if (q.is_zero()) throw DegenerateInput("cubic_real_roots on the zero polynomial");
    if (q.degree() < 1 || q.degree() > 3)
        throw DegenerateInput("cubic_real_roots needs degree 1..3, got " + std::to_string(q.degree()));
    return real_roots(q, 1e-8);
}

UnivarPoly compose(const BivarPoly& p, const UnivarPoly& xt, const UnivarPoly& yt) {
    UnivarPoly r;
    for (const auto& [e, c] : p.terms()) r += xt.pow(e.i) * yt.pow(e.j) * c;
    return r;
}

}  // namespace tmp3
