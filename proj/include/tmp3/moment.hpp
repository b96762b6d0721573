#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tmp3/bases.hpp"
#include "tmp3/curves.hpp"
#include "tmp3/linalg.hpp"
#include "tmp3/poly.hpp"

namespace tmp3 {

// beta(i, j) = L(x^i y^j) for all i + j <= 2k.
struct MomentSequence {
    CurveCase curve;
    int k = 1;
    std::map<Exponent, double> beta;

    // Throws MalformedInput when the index set is incomplete or a value is not finite.
    static MomentSequence from_map(const CurveCase& c, int k, std::map<Exponent, double> beta);

    double at(int i, int j) const;
    // L(p); throws DegenerateInput when deg p > 2k.
    double apply(const BivarPoly& p) const;
    double scale() const;  // max |beta|, at least 1e-300
};

// Max over x^a y^b with a + b <= 2k - 3 of |L(x^a y^b P)|.
double check_ideal_vanishing(const MomentSequence& L);
// Same, relative to max|beta| * ||P||_1; decide rejects data above ideal_tolerance().
double ideal_residual_relative(const MomentSequence& L);
constexpr double ideal_tolerance() { return 1e-9; }

// Entry (u, v) holds the curve polynomial of f*u*v, or nothing when that product is
// not in R[C]_{<=2k}.
struct FormTemplate {
    std::vector<BasisElement> elements;
    std::vector<std::optional<BivarPoly>> cells;  // row-major n x n

    int size() const { return static_cast<int>(elements.size()); }
    const std::optional<BivarPoly>& cell(int r, int c) const { return cells[r * size() + c]; }
    std::vector<std::string> labels() const;
};

FormTemplate build_template(const std::vector<BasisElement>& elements, const RationalElem& f, const CurveCase& c,
                            int max_degree);
// NaN marks unknown cells; a single unknown symmetric pair is recorded in the result.
// Throws MultipleUnknowns for more than one unknown pair.
SymmetricForm instantiate(const FormTemplate& t, const MomentSequence& L);

// How the local positivity condition is realized for a case.
enum class LocalKind {
    Full,          // V^(k) matrix with multiplier f, all entries determined
    Joint,         // B_k plus the added V^(k) element, one unknown pair (P3-P6, P12, P13)
    PartialBasis,  // P10/P11: 3k-1 explicit elements of V^(k)
    TwoFactor,     // P15, P19, P24: chi1*y and chi2*conic over R[C]_{<=k-1}
};

LocalKind local_kind(CaseId id);

// Everything decide needs, built once per (case, k).
struct Assembly {
    CurveCase curve;
    int k = 1;
    LocalKind kind = LocalKind::Full;
    Basis bk;
    FormTemplate moment;
    FormTemplate local;                      // Full, Joint, PartialBasis
    std::optional<FormTemplate> local1;      // TwoFactor, chi1 != 0
    std::optional<FormTemplate> local2;      // TwoFactor
    std::vector<int> v_indices;              // Joint: indices of V^(k) inside the joint form
    // TwoFactor: basis_Rk1 positions spanning R[C]_{<=k-1} modulo the other factor. The
    // factor form vanishes on the rest, so strict positivity is tested on these only.
    std::vector<int> quotient1, quotient2;
    Multiplier mult;
    ChiFlags chi;
};

Assembly assemble(const CurveCase& c, int k);

SymmetricForm moment_matrix(const MomentSequence& L);
// Joint form for the constructive cases, V^(k) form otherwise.
SymmetricForm localizing_matrix(const MomentSequence& L);

struct TwoFactorForms {
    std::optional<SymmetricForm> m1;  // omitted when chi1 = 0
    SymmetricForm m2;
};
TwoFactorForms localizing_matrices_v2(const MomentSequence& L);

// ---------------------------------------------------------------------------
// Univariate lift for the constructive cases

// Weighted pullbacks of the joint basis; H = P^{-T} U P^{-1} is the Hankel matrix of the
// univariate functional whose atoms t_i carry weights w_i / weight(t_i)^2.
struct UnivariateLift {
    int n = 0;  // top degree 3k
    Eigen::MatrixXd P;
    UnivarPoly weight;
    ParamComponent component;
    std::vector<std::string> labels;
};

UnivariateLift make_lift(const CurveCase& c, int k);
Eigen::MatrixXd lift_hankel(const UnivariateLift& lift, const Eigen::MatrixXd& joint);
// m_j read from the first entry (i, j - i) of the anti-diagonal.
std::vector<double> hankel_moments(const Eigen::MatrixXd& H);
// Index of the moment m_j carried by the unknown pair, or -1.
int lift_unknown_moment(const UnivariateLift& lift, const std::pair<int, int>& unknown);

// Coefficient vectors (in the lift basis) spanning the elements whose weighted pullback
// has zero coefficient at t^degree.
Eigen::MatrixXd coefficient_free_subspace(const Eigen::MatrixXd& P, const std::vector<int>& indices, int degree);

// Monic lowest-degree polynomial with coefficient vector in ker H.
UnivarPoly generating_polynomial(const Eigen::MatrixXd& H, double tol = Tolerances{}.rank);

// ---------------------------------------------------------------------------
// Decision engine

enum class Verdict { MomentFunctional, MomentFunctionalOnNonIsolated, NotMomentFunctional, Inconclusive };
std::string to_string(Verdict v);

struct Check {
    std::string name;
    std::string kind;  // psd | pd | rank-eq | interval | range | root-avoidance | consistency | extraction
    bool pass = false;
    double margin = 0.0;
};

// Which matrix failed, for witness construction.
enum class FailedForm { None, Moment, Local, Local1, Local2, Joint };

struct Decision {
    Verdict verdict = Verdict::Inconclusive;
    std::vector<Check> checks;
    std::optional<Interval> completion_interval;  // psd interval of the unknown pair
    std::optional<Interval> pd_interval;
    bool witness_available = false;
    FailedForm failed = FailedForm::None;
    std::string branch;  // which theorem branch settled the verdict
    std::string note;
    double lambda = 0.0;  // P5: mass placed at the isolated point
};

struct DecideOptions {
    Tolerances tol;
    // P5 only: report MomentFunctionalOnNonIsolated when a measure avoiding the isolated point exists.
    bool avoid_isolated_point = false;
};

Decision decide(const MomentSequence& L, const DecideOptions& opts = {});

// P1/P2 singular branch: the unique candidate extension to degree 2k+2, or nullopt when
// the defining linear system is inconsistent.
std::optional<MomentSequence> elliptic_extension(const MomentSequence& L, const Eigen::MatrixXd& kernel_form,
                                                 bool local, const Tolerances& tol = {});

}  // namespace tmp3
