#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "tmp3/curves.hpp"
#include "tmp3/poly.hpp"

namespace tmp3 {

enum class MonoOrder {
    GrlexXY,  // total degree, ties broken by higher x power
    GrlexYX,  // total degree, ties broken by higher y power
    LexYX,    // pure lexicographic with y > x
};

// A principal ideal (P) together with the monomial order used to rewrite modulo it.
struct Rewrite {
    BivarPoly relation;
    MonoOrder order = MonoOrder::GrlexXY;
    Exponent head;  // leading monomial of relation under order
};

bool mono_greater(const Exponent& a, const Exponent& b, MonoOrder order);
Rewrite make_rewrite(const BivarPoly& relation, MonoOrder order);

// Rewrite used by reduce_on_curve: head y^2 for P1-P5, xy^2 for P6-P11, x^3 for
// P12/P13, and the graded leading product for the reducible cases.
Rewrite reduction_rewrite(const CurveCase& c);
// Graded rewrite: normal forms have minimal total degree, so membership in
// R[C]_{<=d} is a degree test on the normal form.
Rewrite graded_rewrite(const CurveCase& c);

BivarPoly normal_form(const BivarPoly& p, const Rewrite& r);
BivarPoly reduce_on_curve(const BivarPoly& p, const CurveCase& c);
BivarPoly graded_normal_form(const BivarPoly& p, const CurveCase& c);

// Monomials not divisible by the rewrite head, by degree up to max_degree.
std::vector<Exponent> normal_monomials(const Rewrite& r, int max_degree);

// Solves q * den == num on the curve for q of degree <= cap.
class CurveDivider {
public:
    CurveDivider(const CurveCase& c, const BivarPoly& den, int cap);
    std::optional<BivarPoly> divide(const BivarPoly& num) const;

private:
    CurveCase curve_;
    Rewrite rw_;
    std::vector<Exponent> unknowns_;
    std::vector<BivarPoly> columns_;
    int cap_;
};

// f*u*v as an element of R[C]_{<=max_degree}, or nullopt when it is not one.
std::optional<BivarPoly> product_on_curve(const RationalElem& u, const RationalElem& v, const RationalElem& f,
                                          const CurveCase& c, int max_degree);

// Value of e at the curve point with parameter t on the given component.
double eval_pullback(const RationalElem& e, const CurveCase& c, double t, int component = 0);

// weight(t) * e(x(t), y(t)) as an exact polynomial in t; throws DegenerateInput when
// the quotient leaves a remainder.
UnivarPoly weighted_pullback(const RationalElem& e, const ParamComponent& pc, const UnivarPoly& weight);

}  // namespace tmp3
