#include "tmp3/certify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tmp3/curve_algebra.hpp"
#include "tmp3/errors.hpp"

namespace tmp3 {

namespace {

// One Gram term of a certificate: multiplier times w'Gw over the given basis.
struct Term {
    const SymmetricForm* gram;
    std::vector<BasisElement> basis;
    RationalElem multiplier;
};

void require_shape(const SymmetricForm& G, std::size_t n, const std::string& what) {
    if (G.entries.rows() != static_cast<Eigen::Index>(n) || G.entries.cols() != static_cast<Eigen::Index>(n))
        throw ShapeMismatch(what + " is " + std::to_string(G.entries.rows()) + "x" +
                            std::to_string(G.entries.cols()) + ", basis has " + std::to_string(n) + " elements");
    if (G.unknown) throw ShapeMismatch(what + " has an unknown entry pair");
}

void require_psd(const SymmetricForm& G, double tol, const std::string& what) {
    const double m = psd_margin(G.entries);
    if (m < -tol) throw NotPsd(what + " has relative min eigenvalue " + std::to_string(m));
}

std::vector<Term> terms_of(const Certificate& cert, const CurveCase& c) {
    std::vector<Term> out;
    out.push_back({&cert.gram0, basis_Bk(c, cert.k).elements, RationalElem()});
    if (cert.form == Certificate::Form::V1) {
        if (uses_two_factor_form(c.id)) throw ShapeMismatch(to_string(c.id) + " needs the two-factor certificate");
        if (cert.gram2) throw ShapeMismatch("one-multiplier certificate carries a second localizing Gram matrix");
        if (cert.gram1) out.push_back({&*cert.gram1, basis_Vk(c, cert.k).elements, multiplier(c).f});
        return out;
    }
    if (!uses_two_factor_form(c.id)) throw ShapeMismatch(to_string(c.id) + " has no two-factor certificate");
    const ChiFlags chi = chi_flags(c);
    const auto [line, conic] = two_factor_split(c);
    const auto r = basis_Rk1(c, cert.k).elements;
    if (cert.gram1) {
        if (chi.chi1 == 0) throw ShapeMismatch("line-factor Gram matrix given although chi1 = 0");
        out.push_back({&*cert.gram1, r, RationalElem(line * double(chi.chi1))});
    }
    if (cert.gram2) out.push_back({&*cert.gram2, r, RationalElem(conic * double(chi.chi2))});
    return out;
}

bool near_pole(const RationalElem& e, double x, double y) {
    return !e.is_polynomial() && std::abs(e.den.eval(x, y)) < 1e-6;
}

}  // namespace

CertificateResidual verify_certificate(const BivarPoly& p, const Certificate& cert, const CurveCase& c,
                                       const Tolerances& tol) {
    if (p.degree() > 2 * cert.k)
        throw ShapeMismatch("deg p = " + std::to_string(p.degree()) + " exceeds 2k = " + std::to_string(2 * cert.k));
    const std::vector<Term> terms = terms_of(cert, c);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::string what = "Gram matrix " + std::to_string(i);
        require_shape(*terms[i].gram, terms[i].basis.size(), what);
        require_psd(*terms[i].gram, tol.psd, what);
    }

    CertificateResidual res;
    const auto pts = sample_points(c, 800, 0xce27);
    for (const auto& pt : pts) {
        if (res.samples >= 200) break;
        bool skip = false;
        for (const auto& t : terms) {
            skip = skip || near_pole(t.multiplier, pt.x, pt.y);
            for (const auto& e : t.basis) skip = skip || near_pole(e.value, pt.x, pt.y);
        }
        if (skip) continue;
        double value = -p.eval(pt.x, pt.y);
        for (const auto& t : terms) {
            Eigen::VectorXd w(t.basis.size());
            for (std::size_t i = 0; i < t.basis.size(); ++i) w(i) = t.basis[i].value.eval(pt.x, pt.y);
            value += t.multiplier.eval(pt.x, pt.y) * w.dot(t.gram->entries * w);
        }
        res.sampled = std::max(res.sampled, std::abs(value));
        ++res.samples;
    }

    // Symbolic comparison when every product is a polynomial on the curve.
    BivarPoly sum = -p;
    for (const auto& t : terms) {
        const int n = static_cast<int>(t.basis.size());
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const double g = t.gram->entries(a, b);
                if (g == 0.0) continue;
                const auto prod = product_on_curve(t.basis[a].value, t.basis[b].value, t.multiplier, c, 2 * cert.k);
                if (!prod) return res;
                sum += g * *prod;
            }
    }
    const BivarPoly diff = reduce_on_curve(sum, c);
    res.symbolic = diff.is_zero() ? 0.0 : diff.max_abs_coeff();
    return res;
}

std::vector<Square> sos_from_gram(const SymmetricForm& Q, const Basis& basis, double tol) {
    if (Q.entries.rows() != static_cast<Eigen::Index>(basis.size()) || Q.entries.cols() != Q.entries.rows())
        throw ShapeMismatch("Gram matrix size does not match the basis");
    if (Q.unknown) throw ShapeMismatch("Gram matrix has an unknown entry pair");
    std::vector<Square> out;
    if (Q.entries.size() == 0) return out;
    const Eigen::MatrixXd S = 0.5 * (Q.entries + Q.entries.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    const Eigen::VectorXd& lam = es.eigenvalues();
    const double top = std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
    if (lam(0) < -1e-10 * top) throw NotPsd("Gram matrix has min eigenvalue " + std::to_string(lam(0)));
    bool polynomial = true;
    for (const auto& e : basis.elements) polynomial = polynomial && e.value.is_polynomial();
    for (Eigen::Index i = lam.size() - 1; i >= 0; --i) {
        if (lam(i) <= tol * top) continue;
        Square sq;
        sq.coefficients = std::sqrt(lam(i)) * es.eigenvectors().col(i);
        if (polynomial) {
            BivarPoly g;
            for (std::size_t j = 0; j < basis.size(); ++j) {
                const RationalElem& e = basis.elements[j].value;
                g += (sq.coefficients(j) / e.den.coeff(0, 0)) * e.num;
            }
            sq.g = g;
        }
        out.push_back(std::move(sq));
    }
    return out;
}

}  // namespace tmp3
