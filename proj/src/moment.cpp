#include "tmp3/moment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tmp3/curve_algebra.hpp"
#include "tmp3/errors.hpp"
#include "tmp3/measure.hpp"

namespace tmp3 {

// ---------------------------------------------------------------------------
// MomentSequence

MomentSequence MomentSequence::from_map(const CurveCase& c, int k, std::map<Exponent, double> beta) {
    if (k < 1) throw MalformedInput("k must be positive");
    for (const auto& [e, v] : beta) {
        if (e.i < 0 || e.j < 0 || e.degree() > 2 * k)
            throw MalformedInput("moment index (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                                 ") outside i+j <= 2k");
        if (!std::isfinite(v))
            throw MalformedInput("moment (" + std::to_string(e.i) + "," + std::to_string(e.j) + ") is not finite");
    }
    for (int d = 0; d <= 2 * k; ++d)
        for (int i = 0; i <= d; ++i)
            if (!beta.count({i, d - i}))
                throw MalformedInput("missing moment (" + std::to_string(i) + "," + std::to_string(d - i) + ")");
    MomentSequence L;
    L.curve = c;
    L.k = k;
    L.beta = std::move(beta);
    return L;
}

double MomentSequence::at(int i, int j) const {
    const auto it = beta.find({i, j});
    if (it == beta.end())
        throw DegenerateInput("moment (" + std::to_string(i) + "," + std::to_string(j) + ") not available");
    return it->second;
}

double MomentSequence::apply(const BivarPoly& p) const {
    if (p.degree() > 2 * k)
        throw DegenerateInput("L applied to degree " + std::to_string(p.degree()) + " > 2k");
    double s = 0.0;
    for (const auto& [e, c] : p.terms()) s += c * at(e.i, e.j);
    return s;
}

double MomentSequence::scale() const {
    double s = 1e-300;
    for (const auto& [e, v] : beta) s = std::max(s, std::abs(v));
    return s;
}

double check_ideal_vanishing(const MomentSequence& L) {
    const BivarPoly P = defining_polynomial(L.curve);
    double worst = 0.0;
    for (int d = 0; d <= 2 * L.k - 3; ++d)
        for (int a = 0; a <= d; ++a)
            worst = std::max(worst, std::abs(L.apply(BivarPoly::monomial(a, d - a) * P)));
    return worst;
}

double ideal_residual_relative(const MomentSequence& L) {
    const double denom = L.scale() * defining_polynomial(L.curve).l1_norm();
    return check_ideal_vanishing(L) / std::max(denom, 1e-300);
}

// ---------------------------------------------------------------------------
// Templates and assembly

std::vector<std::string> FormTemplate::labels() const {
    std::vector<std::string> out;
    for (const auto& e : elements) out.push_back(e.label);
    return out;
}

FormTemplate build_template(const std::vector<BasisElement>& elements, const RationalElem& f, const CurveCase& c,
                            int max_degree) {
    FormTemplate t;
    t.elements = elements;
    const int n = t.size();
    t.cells.assign(n * n, std::nullopt);
    for (int r = 0; r < n; ++r)
        for (int s = r; s < n; ++s) {
            auto p = product_on_curve(elements[r].value, elements[s].value, f, c, max_degree);
            t.cells[r * n + s] = p;
            t.cells[s * n + r] = std::move(p);
        }
    return t;
}

SymmetricForm instantiate(const FormTemplate& t, const MomentSequence& L) {
    SymmetricForm F;
    F.labels = t.labels();
    const int n = t.size();
    F.entries = Eigen::MatrixXd::Zero(n, n);
    for (int r = 0; r < n; ++r)
        for (int s = r; s < n; ++s) {
            const auto& cell = t.cell(r, s);
            if (!cell) {
                if (r == s) throw MultipleUnknowns("diagonal entry " + F.labels[r] + " is undetermined");
                if (F.unknown) throw MultipleUnknowns("more than one undetermined entry pair");
                F.unknown = std::make_pair(r, s);
                F.entries(r, s) = F.entries(s, r) = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            F.entries(r, s) = F.entries(s, r) = L.apply(*cell);
        }
    return F;
}

LocalKind local_kind(CaseId id) {
    switch (id) {
        case CaseId::P3:
        case CaseId::P4:
        case CaseId::P5:
        case CaseId::P6:
        case CaseId::P12:
        case CaseId::P13: return LocalKind::Joint;
        case CaseId::P10:
        case CaseId::P11: return LocalKind::PartialBasis;
        case CaseId::P15:
        case CaseId::P19:
        case CaseId::P24: return LocalKind::TwoFactor;
        default: return LocalKind::Full;
    }
}

Assembly assemble(const CurveCase& c, int k) {
    Assembly as;
    as.curve = c;
    as.k = k;
    as.kind = local_kind(c.id);
    as.bk = basis_Bk(c, k);
    as.moment = build_template(as.bk.elements, RationalElem(), c, 2 * k);
    switch (as.kind) {
        case LocalKind::Full:
        case LocalKind::PartialBasis: {
            as.mult = multiplier(c);
            as.local = build_template(basis_Vk(c, k).elements, as.mult.f, c, 2 * k);
            break;
        }
        case LocalKind::Joint: {
            const VkDelta d = vk_delta(c, k);
            auto elems = as.bk.elements;
            elems.push_back(d.added);
            for (int i = 0; i < static_cast<int>(elems.size()); ++i)
                if (i != d.dropped) as.v_indices.push_back(i);
            as.local = build_template(elems, RationalElem(), c, 2 * k);
            break;
        }
        case LocalKind::TwoFactor: {
            as.chi = chi_flags(c);
            const auto [line, conic] = two_factor_split(c);
            const auto r = basis_Rk1(c, k).elements;
            if (as.chi.chi1 != 0) as.local1 = build_template(r, RationalElem(line * double(as.chi.chi1)), c, 2 * k);
            as.local2 = build_template(r, RationalElem(conic * double(as.chi.chi2)), c, 2 * k);
            // Rk1 elements are monomials. Modulo the conic, drop multiples of its leading
            // square (x^2 for the parabola, y^2 otherwise); modulo the line y = 0, drop every
            // multiple of y.
            const Exponent lead = c.id == CaseId::P19 ? Exponent{2, 0} : Exponent{0, 2};
            for (int i = 0; i < static_cast<int>(r.size()); ++i) {
                const Exponent e = r[i].value.num.terms().begin()->first;
                if (e.i < lead.i || e.j < lead.j) as.quotient1.push_back(i);
                if (e.j == 0) as.quotient2.push_back(i);
            }
            break;
        }
    }
    return as;
}

SymmetricForm moment_matrix(const MomentSequence& L) {
    const Basis b = basis_Bk(L.curve, L.k);
    return instantiate(build_template(b.elements, RationalElem(), L.curve, 2 * L.k), L);
}

SymmetricForm localizing_matrix(const MomentSequence& L) {
    if (uses_two_factor_form(L.curve.id))
        throw NotApplicable(to_string(L.curve.id) + " uses localizing_matrices_v2");
    return instantiate(assemble(L.curve, L.k).local, L);
}

TwoFactorForms localizing_matrices_v2(const MomentSequence& L) {
    if (!uses_two_factor_form(L.curve.id)) throw NotApplicable("two-factor forms exist for P15, P19, P24 only");
    const Assembly as = assemble(L.curve, L.k);
    TwoFactorForms out{std::nullopt, instantiate(*as.local2, L)};
    if (as.local1) out.m1 = instantiate(*as.local1, L);
    return out;
}

// ---------------------------------------------------------------------------
// Univariate lift

namespace {

UnivarPoly lift_weight(const CurveCase& c, int k) {
    switch (c.id) {
        case CaseId::P6: return (UnivarPoly({-c.param("d"), 0.0, 1.0})).pow(k);
        case CaseId::P12: return UnivarPoly::t().pow(k);
        default: return UnivarPoly::constant(1.0);
    }
}

}  // namespace

UnivariateLift make_lift(const CurveCase& c, int k) {
    if (local_kind(c.id) != LocalKind::Joint) throw UnsupportedCase("no univariate lift for " + to_string(c.id));
    UnivariateLift lift;
    lift.n = 3 * k;
    lift.weight = lift_weight(c, k);
    lift.component = parametrization(c).components.at(0);
    const VkDelta d = vk_delta(c, k);
    auto elems = basis_Bk(c, k).elements;
    elems.push_back(d.added);
    const int m = static_cast<int>(elems.size());
    lift.P = Eigen::MatrixXd::Zero(lift.n + 1, m);
    for (int u = 0; u < m; ++u) {
        lift.labels.push_back(elems[u].label);
        const UnivarPoly q = weighted_pullback(elems[u].value, lift.component, lift.weight);
        if (q.degree() > lift.n) throw DegenerateInput("pullback of " + elems[u].label + " exceeds degree 3k");
        for (int j = 0; j <= q.degree(); ++j) lift.P(j, u) = q.coeff(j);
    }
    return lift;
}

Eigen::MatrixXd lift_hankel(const UnivariateLift& lift, const Eigen::MatrixXd& joint) {
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(lift.P);
    if (!lu.isInvertible()) throw DegenerateInput("lift matrix is singular");
    const Eigen::MatrixXd Pinv = lu.inverse();
    Eigen::MatrixXd H = Pinv.transpose() * joint * Pinv;
    return 0.5 * (H + H.transpose());
}

std::vector<double> hankel_moments(const Eigen::MatrixXd& H) {
    const int n = static_cast<int>(H.rows()) - 1;
    std::vector<double> m(2 * n + 1);
    for (int j = 0; j <= 2 * n; ++j) {
        const int i = std::max(0, j - n);
        m[j] = H(i, j - i);
    }
    return m;
}

int lift_unknown_moment(const UnivariateLift& lift, const std::pair<int, int>& unknown) {
    auto top = [&](int col) {
        for (int j = lift.n; j >= 0; --j)
            if (std::abs(lift.P(j, col)) > 1e-12) return j;
        return -1;
    };
    const int a = top(unknown.first), b = top(unknown.second);
    return a < 0 || b < 0 ? -1 : a + b;
}

Eigen::MatrixXd coefficient_free_subspace(const Eigen::MatrixXd& P, const std::vector<int>& indices, int degree) {
    const int m = static_cast<int>(indices.size());
    Eigen::RowVectorXd row(m);
    for (int i = 0; i < m; ++i) row(i) = P(degree, indices[i]);
    if (row.norm() == 0.0) return Eigen::MatrixXd::Identity(m, m);
    // Orthonormal complement of the row via a Householder QR of its transpose.
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(row.transpose());
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
    return Q.rightCols(m - 1);
}

UnivarPoly generating_polynomial(const Eigen::MatrixXd& H, double tol) {
    const int n = static_cast<int>(H.rows());
    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i) s(i) = H(i, i) > 0.0 ? 1.0 / std::sqrt(H(i, i)) : 1.0;
    const Eigen::MatrixXd He = s.asDiagonal() * H * s.asDiagonal();
    for (int r = 1; r < n; ++r) {
        const Eigen::MatrixXd cols = He.leftCols(r + 1);
        if (numeric_rank(cols, tol) > r) continue;
        // Dependent column r: solve He[:, 0..r-1] c = -He[:, r] and undo the scaling.
        const Eigen::VectorXd c = He.leftCols(r).completeOrthogonalDecomposition().solve(-He.col(r));
        std::vector<double> coeffs(r + 1);
        for (int i = 0; i < r; ++i) coeffs[i] = c(i) * s(i) / s(r);
        coeffs[r] = 1.0;
        return UnivarPoly(coeffs);
    }
    if (numeric_rank(He.leftCols(1), tol) == 0) return UnivarPoly::constant(1.0);
    throw DegenerateInput("Hankel matrix is nonsingular; no generating polynomial");
}

// ---------------------------------------------------------------------------
// Decision engine

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::MomentFunctional: return "MomentFunctional";
        case Verdict::MomentFunctionalOnNonIsolated: return "MomentFunctionalOnNonIsolated";
        case Verdict::NotMomentFunctional: return "NotMomentFunctional";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

namespace {

Check psd_check(const std::string& name, const Eigen::MatrixXd& M, const Tolerances& tol) {
    const double m = psd_margin(equilibrate(M));
    return {name, "psd", m >= -tol.psd, m};
}

Check pd_check(const std::string& name, const Eigen::MatrixXd& M, const Tolerances& tol) {
    const double m = pd_margin(equilibrate(M));
    return {name, "pd", m >= tol.pd, m};
}

Check rank_check(const std::string& name, const Eigen::MatrixXd& M, const Eigen::MatrixXd& Z, const Tolerances& tol) {
    const int full = numeric_rank(equilibrate(M), tol.rank);
    const int restricted = numeric_rank(equilibrate(Z.transpose() * M * Z), tol.rank);
    return {name, "rank-eq", full == restricted, double(full - restricted)};
}

std::vector<int> iota(int n) {
    std::vector<int> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

class Engine {
public:
    Engine(const MomentSequence& L, const DecideOptions& opts) : L_(L), opts_(opts), tol_(opts.tol) {}

    Decision run();

private:
    void refute(FailedForm form, const std::string& branch) {
        d_.verdict = Verdict::NotMomentFunctional;
        d_.witness_available = true;
        d_.failed = form;
        d_.branch = branch;
    }
    void settle(Verdict v, const std::string& branch, const std::string& note = {}) {
        d_.verdict = v;
        d_.branch = branch;
        if (!note.empty()) d_.note = note;
    }
    bool push(Check c) {
        d_.checks.push_back(c);
        return c.pass;
    }

    void full_local();
    void partial_basis();
    void two_factor();
    void joint();
    void isolated(const SymmetricForm& U);
    bool rank_conditions(const Eigen::MatrixXd& Mb, const Eigen::MatrixXd& Mv, const std::string& tag);
    void elliptic_singular(bool local);
    void constructive_singular();

    const MomentSequence& L_;
    DecideOptions opts_;
    Tolerances tol_;
    Assembly as_;
    Eigen::MatrixXd M_;
    bool m_pd_ = false;
    std::optional<UnivariateLift> lift_;
    Decision d_;
};

Decision Engine::run() {
    const double rel = ideal_residual_relative(L_);
    if (rel > ideal_tolerance())
        throw IdealViolation("moments do not vanish on the curve ideal (relative residual " + std::to_string(rel) +
                             ")");
    as_ = assemble(L_.curve, L_.k);
    M_ = instantiate(as_.moment, L_).known();
    const bool m_psd = push(psd_check("moment psd", M_, tol_));
    m_pd_ = push(pd_check("moment pd", M_, tol_));
    if (!m_psd) {
        refute(FailedForm::Moment, "moment matrix not psd");
        return d_;
    }
    switch (as_.kind) {
        case LocalKind::Full: full_local(); break;
        case LocalKind::PartialBasis: partial_basis(); break;
        case LocalKind::TwoFactor: two_factor(); break;
        case LocalKind::Joint: joint(); break;
    }
    return d_;
}

void Engine::full_local() {
    const Eigen::MatrixXd Lv = instantiate(as_.local, L_).known();
    if (!push(psd_check("localizing psd", Lv, tol_))) return refute(FailedForm::Local, "localizing matrix not psd");
    const bool l_pd = push(pd_check("localizing pd", Lv, tol_));
    if (m_pd_ && l_pd) return settle(Verdict::MomentFunctional, "nonsingular");
    const CaseId id = L_.curve.id;
    if (id == CaseId::P1 || id == CaseId::P2) return elliptic_singular(m_pd_);
    settle(Verdict::Inconclusive, "singular", "no singular theory is available for " + to_string(id));
}

void Engine::partial_basis() {
    const Eigen::MatrixXd Lv = instantiate(as_.local, L_).known();
    if (!push(psd_check("localizing psd (3k-1 elements)", Lv, tol_)))
        return refute(FailedForm::Local, "partial localizing matrix not psd");
    push(pd_check("localizing pd (3k-1 elements)", Lv, tol_));
    settle(Verdict::Inconclusive, "necessary conditions only",
           "the Riemann-Roch element of V^(k) is not constructed; passing checks are necessary, not sufficient");
}

void Engine::two_factor() {
    bool all_pd = m_pd_;
    if (as_.local1) {
        const Eigen::MatrixXd M1 = instantiate(*as_.local1, L_).known();
        if (!push(psd_check("line-factor localizing psd", M1, tol_)))
            return refute(FailedForm::Local1, "line-factor localizing matrix not psd");
        const Eigen::MatrixXd Q1 = submatrix(M1, as_.quotient1, as_.quotient1);
        all_pd = push(pd_check("line-factor localizing pd modulo the conic", Q1, tol_)) && all_pd;
    }
    const Eigen::MatrixXd M2 = instantiate(*as_.local2, L_).known();
    if (!push(psd_check("conic-factor localizing psd", M2, tol_)))
        return refute(FailedForm::Local2, "conic-factor localizing matrix not psd");
    const Eigen::MatrixXd Q2 = submatrix(M2, as_.quotient2, as_.quotient2);
    all_pd = push(pd_check("conic-factor localizing pd modulo the line", Q2, tol_)) && all_pd;
    if (all_pd) return settle(Verdict::MomentFunctional, "nonsingular (two-factor)");
    settle(Verdict::Inconclusive, "singular", "no singular theory is available for " + to_string(L_.curve.id));
}

void Engine::joint() {
    const SymmetricForm U = instantiate(as_.local, L_);
    if (!U.unknown) throw DegenerateInput("joint form has no unknown pair");
    lift_ = make_lift(L_.curve, L_.k);
    if (L_.curve.id == CaseId::P5) {
        isolated(U);
        if (d_.verdict == Verdict::MomentFunctional || d_.verdict == Verdict::MomentFunctionalOnNonIsolated) {
            // Intervals of the joint form after moving the mass lambda to O, as used by extract.
            SymmetricForm shifted = U;
            const int n = as_.bk.size();
            shifted.entries(0, 0) -= d_.lambda;
            shifted.entries(n, n) += d_.lambda;
            d_.completion_interval = completion_interval(shifted, CompletionMode::Psd, tol_);
            d_.pd_interval = completion_interval(shifted, CompletionMode::Pd, tol_);
        }
        return;
    }

    const Eigen::MatrixXd Lv = restrict_form(U, as_.v_indices).known();
    if (!push(psd_check("localizing psd", Lv, tol_))) return refute(FailedForm::Local, "localizing matrix not psd");
    const bool l_pd = push(pd_check("localizing pd", Lv, tol_));

    const Interval I = completion_interval(U, CompletionMode::Psd, tol_);
    d_.completion_interval = I;
    if (!push({"psd completion interval", "interval", !I.empty, I.width()})) {
        d_.verdict = Verdict::NotMomentFunctional;
        d_.branch = "no psd completion of the joint form";
        d_.failed = FailedForm::Joint;
        return;
    }
    const Interval Ipd = completion_interval(U, CompletionMode::Pd, tol_);
    d_.pd_interval = Ipd;
    push({"pd completion interval", "interval", !Ipd.empty, Ipd.width()});
    if (m_pd_ && l_pd && !Ipd.empty) return settle(Verdict::MomentFunctional, "nonsingular");

    const CaseId id = L_.curve.id;
    if (id == CaseId::P3 || id == CaseId::P13) return constructive_singular();

    const std::vector<int> bk_idx = iota(as_.bk.size());
    bool ok = rank_conditions(M_, Lv, "");
    if (id == CaseId::P6) {
        const double dd = L_.curve.param("d");
        if (dd == 0.0) {
            const Eigen::MatrixXd Z0 = coefficient_free_subspace(lift_->P, bk_idx, 0);
            ok = push(rank_check("rank moment = rank on zero constant pullback", M_, Z0, tol_)) && ok;
        } else if (dd > 0.0 && ok) {
            const Eigen::MatrixXd H = lift_hankel(*lift_, U.with_value(I.midpoint()).entries);
            const UnivarPoly g = generating_polynomial(H, tol_.rank);
            const double r = std::sqrt(dd);
            const double norm = std::max(g.norm_inf(), 1e-300) * std::pow(1.0 + r, std::max(g.degree(), 0));
            const double margin = std::min(std::abs(g.eval(r)), std::abs(g.eval(-r))) / norm;
            ok = push({"generating polynomial avoids +-sqrt(d)", "root-avoidance", margin > 1e-6, margin});
        }
    }
    if (ok) return settle(Verdict::MomentFunctional, "singular (rank equalities)");
    d_.verdict = Verdict::NotMomentFunctional;
    d_.branch = "singular (rank equalities fail)";
}

// True when either rank equality holds: on B_k (dropping the top pullback degree) or
// on V^(k) (same restriction in the tilde basis).
bool Engine::rank_conditions(const Eigen::MatrixXd& Mb, const Eigen::MatrixXd& Mv, const std::string& tag) {
    const int top = lift_->n;
    const Eigen::MatrixXd Zb = coefficient_free_subspace(lift_->P, iota(as_.bk.size()), top);
    const Eigen::MatrixXd Zv = coefficient_free_subspace(lift_->P, as_.v_indices, top);
    const bool a = push(rank_check("rank moment = rank restricted" + tag, Mb, Zb, tol_));
    const bool b = push(rank_check("rank localizing = rank restricted" + tag, Mv, Zv, tol_));
    return a || b;
}

// P5: L_hat1 is the B_k form, L_hat2 the V^(k) form; both share the block A over B_k minus {1}.
void Engine::isolated(const SymmetricForm& U) {
    const int n = as_.bk.size();
    Eigen::MatrixXd L2 = restrict_form(U, as_.v_indices).known();
    const int T = n - 1;  // position of y/x inside the V^(k) form
    std::vector<int> common(n - 1);
    std::iota(common.begin(), common.end(), 1);
    const Eigen::MatrixXd A = submatrix(M_, common, common);
    const Eigen::VectorXd a = submatrix(M_, common, {0});
    const Eigen::VectorXd b = submatrix(L2, iota(n - 1), {T});
    const Eigen::MatrixXd Ap = pseudo_inverse(A);
    const double scale = std::max({1e-300, matrix_scale(M_), matrix_scale(L2)});
    const double range_res =
        std::max((A * Ap * a - a).cwiseAbs().maxCoeff(), (A * Ap * b - b).cwiseAbs().maxCoeff()) / scale;
    if (!push({"common block psd", "psd", is_psd(equilibrate(A), tol_.psd), psd_margin(equilibrate(A))}))
        return refute(FailedForm::Moment, "common block not psd");
    if (!push({"columns in range of common block", "range", range_res <= 1e-7, range_res})) {
        d_.verdict = Verdict::NotMomentFunctional;
        d_.branch = "range condition fails";
        d_.failed = FailedForm::Joint;
        return;
    }
    const double s1 = M_(0, 0) - a.dot(Ap * a);
    const double s2 = L2(T, T) - b.dot(Ap * b);
    const double stol = tol_.pd * std::max({1e-300, std::abs(M_(0, 0)), std::abs(L2(T, T))});
    d_.checks.push_back({"Schur complement of moment form", "pd", s1 > stol, s1});
    d_.checks.push_back({"Schur complement of localizing form", "pd", s2 > stol, s2});

    auto no_origin = [&](const Eigen::MatrixXd& Mb, const Eigen::MatrixXd& Mv, const std::string& tag) {
        if (!push(psd_check("localizing psd" + tag, Mv, tol_))) return false;
        if (is_pd(equilibrate(Mb), tol_.pd) && is_pd(equilibrate(Mv), tol_.pd)) return true;
        return rank_conditions(Mb, Mv, tag);
    };

    if (opts_.avoid_isolated_point && no_origin(M_, L2, " (no mass at O)")) {
        d_.lambda = 0.0;
        return settle(Verdict::MomentFunctionalOnNonIsolated, "no mass at the isolated point");
    }
    if (m_pd_ && s2 > stol) {
        d_.lambda = 0.0;
        return settle(Verdict::MomentFunctional, "nonsingular, no mass at O");
    }
    if (m_pd_ && s2 <= stol && s1 + s2 > stol) {
        d_.lambda = 0.5 * (s1 - s2);
        return settle(Verdict::MomentFunctional, "nonsingular, mass at O");
    }
    const double lambda0 = s1;
    if (lambda0 < -stol || s1 + s2 < -stol) {
        push({"lambda0 admissible", "interval", false, std::min(lambda0, s1 + s2)});
        d_.verdict = Verdict::NotMomentFunctional;
        d_.branch = "no admissible mass at O";
        d_.failed = FailedForm::Joint;
        return;
    }
    d_.lambda = std::max(lambda0, 0.0);
    Eigen::MatrixXd M0 = M_, L0 = L2;
    M0(0, 0) -= d_.lambda;
    L0(T, T) += d_.lambda;
    push({"lambda0 admissible", "interval", true, d_.lambda});
    if (!push(psd_check("moment psd (lambda0)", M0, tol_))) {
        d_.verdict = Verdict::NotMomentFunctional;
        d_.branch = "lambda0 form not psd";
        return;
    }
    if (no_origin(M0, L0, " (lambda0)")) return settle(Verdict::MomentFunctional, "singular, lambda0");
    d_.verdict = Verdict::NotMomentFunctional;
    d_.branch = "singular, lambda0 rank equalities fail";
}

void Engine::elliptic_singular(bool local) {
    const Eigen::MatrixXd K = local ? instantiate(as_.local, L_).known() : M_;
    const auto ext = elliptic_extension(L_, K, local, tol_);
    if (!push({"extension system consistent", "consistency", ext.has_value(), 0.0})) {
        d_.verdict = Verdict::NotMomentFunctional;
        d_.branch = "elliptic extension inconsistent";
        return;
    }
    const Assembly up = assemble(L_.curve, L_.k + 1);
    const Eigen::MatrixXd M1 = instantiate(up.moment, *ext).known();
    const Eigen::MatrixXd L1 = instantiate(up.local, *ext).known();
    const bool a = push(psd_check("extension moment psd", M1, tol_));
    const bool b = push(psd_check("extension localizing psd", L1, tol_));
    if (a && b) return settle(Verdict::MomentFunctional, local ? "unique extension (locally singular)" : "unique extension");
    d_.verdict = Verdict::NotMomentFunctional;
    d_.branch = "unique extension not square positive";
}

void Engine::constructive_singular() {
    ExtractOptions eo;
    eo.tol = tol_;
    eo.run_decide = false;
    try {
        const Extraction ex = extract(L_, eo);
        push({"singular extraction verified", "extraction", true, ex.residual});
        settle(Verdict::MomentFunctional, "singular (measure constructed and verified)");
    } catch (const Error& e) {
        push({"singular extraction verified", "extraction", false, 0.0});
        settle(Verdict::Inconclusive, "singular", e.what());
    }
}

int deg_c(const BasisElement& e) {
    if (e.kind == BasisElement::Kind::Rational) return 1;  // y/x
    const Exponent ex = e.value.num.terms().rbegin()->first;
    return 2 * ex.i + 3 * ex.j;
}

}  // namespace

Decision decide(const MomentSequence& L, const DecideOptions& opts) { return Engine(L, opts).run(); }

std::optional<MomentSequence> elliptic_extension(const MomentSequence& L, const Eigen::MatrixXd& kernel_form,
                                                 bool local, const Tolerances& tol) {
    const CaseId id = L.curve.id;
    if (id != CaseId::P1 && id != CaseId::P2) throw UnsupportedCase("elliptic extension is defined for P1, P2");
    const int k = L.k;
    const std::vector<BasisElement> elems = local ? basis_Vk(L.curve, k).elements : basis_Bk(L.curve, k).elements;
    std::vector<int> order = iota(static_cast<int>(elems.size()));
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return deg_c(elems[a]) < deg_c(elems[b]); });

    // Minimal deg_C prefix with a kernel vector.
    Eigen::VectorXd gen;
    std::vector<int> prefix;
    for (int idx : order) {
        prefix.push_back(idx);
        const Eigen::MatrixXd S = submatrix(kernel_form, prefix, prefix);
        Eigen::VectorXd s(S.rows());
        for (int i = 0; i < S.rows(); ++i) s(i) = S(i, i) > 0.0 ? 1.0 / std::sqrt(S(i, i)) : 1.0;
        const Eigen::MatrixXd Se = s.asDiagonal() * S * s.asDiagonal();
        if (numeric_rank(Se, tol.rank) == static_cast<int>(prefix.size())) continue;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Se);
        gen = s.asDiagonal() * es.eigenvectors().col(0);
        break;
    }
    if (gen.size() == 0) throw DegenerateInput("form is nonsingular; no generating element");
    const int gen_deg = deg_c(elems[prefix.back()]);

    const Rewrite rw = graded_rewrite(L.curve);
    const int top = 2 * k + 2;
    std::vector<Exponent> unknowns;
    for (const Exponent& e : normal_monomials(rw, top))
        if (e.degree() > 2 * k) unknowns.push_back(e);
    auto unknown_index = [&](const Exponent& e) {
        for (std::size_t i = 0; i < unknowns.size(); ++i)
            if (unknowns[i] == e) return static_cast<int>(i);
        return -1;
    };

    // One row per product; the polynomial is already in normal form.
    std::vector<BivarPoly> rows;
    const RationalElem f = local ? RationalElem(BivarPoly::x()) : RationalElem();
    auto add_row = [&](const RationalElem& u) {
        BivarPoly acc;
        for (std::size_t i = 0; i < prefix.size(); ++i) {
            auto p = product_on_curve(u, elems[prefix[i]].value, f, L.curve, top);
            if (!p) throw DegenerateInput("extension product leaves R[C]_{<=2k+2}");
            acc += normal_form(*p, rw) * gen(static_cast<int>(i));
        }
        rows.push_back(acc);
    };
    const int window = (local ? 6 * k + 4 : 6 * k + 6) - gen_deg;
    if (local) add_row(RationalElem(BivarPoly::y(), BivarPoly::x()));
    for (int a = 0; a <= 2; ++a)
        for (int b = 0; 2 * a + 3 * b <= window; ++b) add_row(RationalElem(BivarPoly::monomial(a, b)));

    const int m = static_cast<int>(rows.size()), u = static_cast<int>(unknowns.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, u);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd row_scale = Eigen::VectorXd::Zero(m);
    const double scale = L.scale();
    for (int r = 0; r < m; ++r) {
        for (const auto& [e, c] : rows[r].terms()) {
            const int ui = unknown_index(e);
            if (ui >= 0) {
                A(r, ui) += c;
                row_scale(r) += std::abs(c) * scale;
            } else {
                rhs(r) -= c * L.at(e.i, e.j);
                row_scale(r) += std::abs(c * L.at(e.i, e.j));
            }
        }
    }
    const Eigen::VectorXd sol = A.completeOrthogonalDecomposition().solve(rhs);
    const Eigen::VectorXd res = A * sol - rhs;
    for (int r = 0; r < m; ++r)
        if (std::abs(res(r)) > 1e-7 * std::max(row_scale(r), scale * 1e-12)) return std::nullopt;
    if (numeric_rank(A, 1e-10) < u) return std::nullopt;  // extension not determined

    std::map<Exponent, double> beta;
    for (int d = 0; d <= top; ++d)
        for (int i = 0; i <= d; ++i) {
            const BivarPoly p = normal_form(BivarPoly::monomial(i, d - i), rw);
            double v = 0.0;
            for (const auto& [e, c] : p.terms()) {
                const int ui = unknown_index(e);
                v += c * (ui >= 0 ? sol(ui) : L.at(e.i, e.j));
            }
            beta[{i, d - i}] = v;
        }
    return MomentSequence::from_map(L.curve, k + 1, std::move(beta));
}

}  // namespace tmp3
