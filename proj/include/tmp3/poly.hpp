#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tmp3 {

struct Exponent {
    int i = 0;  // power of x
    int j = 0;  // power of y
    auto operator<=>(const Exponent&) const = default;
    int degree() const { return i + j; }
};

// Sparse bivariate polynomial. Exactly-zero coefficients are never stored.
class BivarPoly {
public:
    BivarPoly() = default;
    static BivarPoly constant(double c);
    static BivarPoly monomial(int i, int j, double c = 1.0);
    static BivarPoly x() { return monomial(1, 0); }
    static BivarPoly y() { return monomial(0, 1); }

    double coeff(int i, int j) const;
    void add_term(int i, int j, double c);
    void set_term(int i, int j, double c);

    // -1 stands for the degree of the zero polynomial.
    int degree() const;
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    const std::map<Exponent, double>& terms() const { return terms_; }

    double eval(double x, double y) const;
    double max_abs_coeff() const;
    double l1_norm() const;

    // Drop coefficients whose magnitude is below rel * max_abs_coeff().
    BivarPoly pruned(double rel) const;
    std::string to_string() const;

    BivarPoly& operator+=(const BivarPoly& o);
    BivarPoly& operator-=(const BivarPoly& o);
    BivarPoly& operator*=(double s);
    friend BivarPoly operator+(BivarPoly a, const BivarPoly& b) { return a += b; }
    friend BivarPoly operator-(BivarPoly a, const BivarPoly& b) { return a -= b; }
    friend BivarPoly operator*(BivarPoly a, double s) { return a *= s; }
    friend BivarPoly operator*(double s, BivarPoly a) { return a *= s; }
    friend BivarPoly operator-(BivarPoly a) { return a *= -1.0; }
    friend BivarPoly operator*(const BivarPoly& a, const BivarPoly& b);
    BivarPoly pow(int n) const;
    bool operator==(const BivarPoly&) const = default;

private:
    std::map<Exponent, double> terms_;
};

// Dense univariate polynomial, index = exponent, no trailing zeros.
class UnivarPoly {
public:
    UnivarPoly() = default;
    explicit UnivarPoly(std::vector<double> coeffs);
    static UnivarPoly constant(double c) { return UnivarPoly({c}); }
    static UnivarPoly t() { return UnivarPoly({0.0, 1.0}); }
    static UnivarPoly from_roots(const std::vector<double>& roots);

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    double coeff(int n) const { return n >= 0 && n < static_cast<int>(c_.size()) ? c_[n] : 0.0; }
    const std::vector<double>& coeffs() const { return c_; }
    double leading() const { return c_.empty() ? 0.0 : c_.back(); }
    double eval(double t) const;
    double norm_inf() const;
    UnivarPoly derivative() const;
    std::string to_string(const std::string& var = "t") const;

    UnivarPoly& operator+=(const UnivarPoly& o);
    UnivarPoly& operator-=(const UnivarPoly& o);
    UnivarPoly& operator*=(double s);
    friend UnivarPoly operator+(UnivarPoly a, const UnivarPoly& b) { return a += b; }
    friend UnivarPoly operator-(UnivarPoly a, const UnivarPoly& b) { return a -= b; }
    friend UnivarPoly operator-(UnivarPoly a) { return a *= -1.0; }
    friend UnivarPoly operator*(UnivarPoly a, double s) { return a *= s; }
    friend UnivarPoly operator*(double s, UnivarPoly a) { return a *= s; }
    friend UnivarPoly operator*(const UnivarPoly& a, const UnivarPoly& b);
    UnivarPoly pow(int n) const;

    // Long division; remainder has degree < divisor degree.
    std::pair<UnivarPoly, UnivarPoly> divmod(const UnivarPoly& divisor) const;

private:
    void trim();
    std::vector<double> c_;
};

// Quotient of two bivariate polynomials; a polynomial has denominator 1.
struct RationalElem {
    BivarPoly num = BivarPoly::constant(1.0);
    BivarPoly den = BivarPoly::constant(1.0);

    RationalElem() = default;
    RationalElem(BivarPoly n) : num(std::move(n)) {}  // NOLINT: implicit on purpose
    RationalElem(BivarPoly n, BivarPoly d);

    bool is_polynomial() const { return den.degree() == 0; }
    // Throws PoleError when |den| < pole_tol at the point.
    double eval(double x, double y, double pole_tol = 1e-12) const;
    std::string to_string() const;

    friend RationalElem operator*(const RationalElem& a, const RationalElem& b) {
        return {a.num * b.num, a.den * b.den};
    }
};

// Real roots of a polynomial of degree >= 1 via companion-matrix eigenvalues,
// ascending and Newton-polished. Imaginary parts above imag_tol*(1+|root|) are discarded.
std::vector<double> real_roots(const UnivarPoly& q, double imag_tol = 1e-8);

// Same, restricted to degree 1..3; throws DegenerateInput on the zero polynomial.
std::vector<double> cubic_real_roots(const UnivarPoly& q);

// Substitute x = xt(t), y = yt(t) into p.
UnivarPoly compose(const BivarPoly& p, const UnivarPoly& xt, const UnivarPoly& yt);

}  // namespace tmp3
