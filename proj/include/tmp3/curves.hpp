#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tmp3/poly.hpp"

namespace tmp3 {

enum class CaseId : int {
    P1 = 1, P2, P3, P4, P5, P6, P7, P8, P9, P10, P11, P12, P13, P14, P15,
    P16, P17, P18, P19, P20, P21, P22, P23, P24, P25, P26, P27, P28, P29
};

inline int case_index(CaseId id) { return static_cast<int>(id); }
std::string to_string(CaseId id);
CaseId case_id_from_string(const std::string& s);  // throws InvalidParams
std::vector<CaseId> all_cases();

struct CurveCase {
    CaseId id = CaseId::P1;
    std::map<std::string, double> params;

    double param(const std::string& name) const;
    std::string describe() const;
};

// Parameter names each case requires, in canonical order.
std::vector<std::string> param_names(CaseId id);

// Validated construction; throws InvalidParams naming the violated constraint.
CurveCase make_case(CaseId id, std::map<std::string, double> params);
// No validation beyond completeness. Used where a family is recognized but its
// canonical parameter range is not met (reported by normalize).
CurveCase make_case_unchecked(CaseId id, std::map<std::string, double> params);

BivarPoly defining_polynomial(const CurveCase& c);

bool is_reducible(CaseId id);
bool has_parametrization(CaseId id);
// Cases solved through the two-factor certificate (line plus conic meeting in non-real points).
bool uses_two_factor_form(CaseId id);
// Cases with a constructive extraction path.
bool is_constructive(CaseId id);

// ---------------------------------------------------------------------------
// Parametrizations

struct ParamComponent {
    std::string name;
    // x(t) = xn/xd, y(t) = yn/yd.
    UnivarPoly xn, xd, yn, yd;
    std::vector<double> excluded;  // parameter values that do not map to affine points
    std::string x_label, y_label;
    double x(double t) const;  // throws PoleError near excluded values
    double y(double t) const;
};

struct MatchingCondition {
    enum class Kind { Value, Derivative, Coefficient, Complex };
    struct Term {
        int component = 0;
        double t = 0.0;
        int order = 0;  // derivative order of the pullback
        double coef = 1.0;
    };
    Kind kind = Kind::Value;
    std::string text;
    // Value/Derivative: sum of coef * D^order f_component(t) vanishes, where f_c is
    // the pullback of a polynomial along component c. Empty for text-only kinds.
    std::vector<Term> terms;
};

struct Parametrization {
    std::vector<ParamComponent> components;
    std::vector<MatchingCondition> matching;
};

// Throws UnsupportedCase for P1, P2, P7-P11.
Parametrization parametrization(const CurveCase& c);

// ---------------------------------------------------------------------------
// Multipliers and sign flags

struct Multiplier {
    enum class Rule { Smallest, Largest, None };
    RationalElem f;
    std::optional<double> alpha;
    std::optional<UnivarPoly> source_cubic;
    std::vector<double> roots;
    Rule rule = Rule::None;
};

Multiplier multiplier(const CurveCase& c);

struct ChiFlags {
    int chi1 = 0;  // sign of the line factor y on the conic, 0 if it changes sign
    int chi2 = 1;  // sign of the conic factor on the line y = 0
};

// Factors of the two-factor cases: first = y, second = the conic.
std::pair<BivarPoly, BivarPoly> two_factor_split(const CurveCase& c);
ChiFlags chi_flags(const CurveCase& c);  // NotApplicable outside P15, P19, P24

// ---------------------------------------------------------------------------
// Sampling

struct CurvePoint {
    double x = 0.0, y = 0.0;
    int component = 0;
    double t = 0.0;  // parameter, when the case is parametrized
};

struct SampleOptions {
    double bound = 6.0;          // reject points with |x| or |y| above this
    double param_margin = 1e-3;  // distance kept from excluded parameters
    double t_range = 2.0;        // parameter drawn from [-t_range, t_range]
};

std::vector<CurvePoint> sample_points(const CurveCase& c, int n, std::uint64_t seed,
                                      const SampleOptions& opts = {});

// ---------------------------------------------------------------------------
// Normalization of recognized cubic shapes

struct AffineMap {
    // (x, y) -> (a11 x + a12 y + b1, a21 x + a22 y + b2)
    double a11 = 1, a12 = 0, a21 = 0, a22 = 1, b1 = 0, b2 = 0;
    std::pair<double, double> apply(double x, double y) const {
        return {a11 * x + a12 * y + b1, a21 * x + a22 * y + b2};
    }
    double det() const { return a11 * a22 - a12 * a21; }
};

struct Normalized {
    CurveCase curve;
    AffineMap map;
    std::string note;  // non-empty when the recognized parameters miss the canonical range
};

// Returns nullopt for shapes outside the recognized families.
std::optional<Normalized> normalize(const BivarPoly& cubic);

}  // namespace tmp3
