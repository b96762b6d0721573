#include "tmp3/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tmp3/errors.hpp"

namespace tmp3 {

SymmetricForm SymmetricForm::with_value(double v) const {
    SymmetricForm out = *this;
    if (unknown) {
        out.entries(unknown->first, unknown->second) = v;
        out.entries(unknown->second, unknown->first) = v;
        out.unknown.reset();
    }
    return out;
}

const Eigen::MatrixXd& SymmetricForm::known() const {
    if (unknown) throw DegenerateInput("form still has an unknown entry pair");
    return entries;
}

bool Interval::contains(double v) const {
    if (empty) return false;
    return open ? (v > lo && v < hi) : (v >= lo && v <= hi);
}

double matrix_scale(const Eigen::MatrixXd& M) { return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff(); }

double min_eigenvalue(const Eigen::MatrixXd& M) {
    if (M.size() == 0) return std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double psd_margin(const Eigen::MatrixXd& M) {
    if (M.size() == 0) return 0.0;
    return min_eigenvalue(M) / std::max(1.0, matrix_scale(M));
}

double pd_margin(const Eigen::MatrixXd& M) {
    if (M.size() == 0) return 0.0;
    const double s = matrix_scale(M);
    if (s == 0.0) return 0.0;
    return min_eigenvalue(M) / s;
}

bool is_psd(const Eigen::MatrixXd& M, double tol) { return M.size() == 0 || psd_margin(M) >= -tol; }

bool is_pd(const Eigen::MatrixXd& M, double tol_pd) { return M.size() == 0 || pd_margin(M) >= tol_pd; }

int numeric_rank(const Eigen::MatrixXd& M, double tol) {
    if (M.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& s = svd.singularValues();
    if (s(0) == 0.0) return 0;
    int r = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > tol * s(0)) ++r;
    return r;
}

std::vector<Eigen::VectorXd> kernel_basis(const Eigen::MatrixXd& M, double tol) {
    std::vector<Eigen::VectorXd> out;
    if (M.size() == 0) return out;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    const auto& ev = es.eigenvalues();
    const double top = ev.cwiseAbs().maxCoeff();
    for (int i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i)) <= tol * top || top == 0.0) out.push_back(es.eigenvectors().col(i));
    return out;
}

Eigen::MatrixXd equilibrate(const Eigen::MatrixXd& M) {
    Eigen::VectorXd s(M.rows());
    for (int i = 0; i < M.rows(); ++i) s(i) = M(i, i) > 0.0 ? 1.0 / std::sqrt(M(i, i)) : 1.0;
    return s.asDiagonal() * M * s.asDiagonal();
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& M, double rel_cutoff) {
    if (M.size() == 0) return M;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > rel_cutoff * s(0)) inv(i) = 1.0 / s(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& M, const std::vector<int>& rows, const std::vector<int>& cols) {
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = M(rows[i], cols[j]);
    return out;
}

Eigen::MatrixXd schur(const Eigen::MatrixXd& M, const Partition& part) {
    const Eigen::MatrixXd A = submatrix(M, part.top, part.top);
    if (part.bottom.empty()) return A;
    const Eigen::MatrixXd B = submatrix(M, part.top, part.bottom);
    const Eigen::MatrixXd D = submatrix(M, part.bottom, part.bottom);
    return A - B * pseudo_inverse(D) * B.transpose();
}

bool albert_psd(const Eigen::MatrixXd& M, const Partition& part, double tol) {
    const Eigen::MatrixXd D = submatrix(M, part.bottom, part.bottom);
    if (!is_psd(D, tol)) return false;
    const Eigen::MatrixXd B = submatrix(M, part.top, part.bottom);
    // Range condition: B (I - D D^+) = 0.
    if (!part.bottom.empty()) {
        const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(D.rows(), D.cols()) - D * pseudo_inverse(D);
        const double scale = std::max(1.0, matrix_scale(M));
        if ((B * P).cwiseAbs().maxCoeff() > 1e-7 * scale) return false;
    }
    return is_psd(schur(M, part), tol);
}

SymmetricForm restrict_form(const SymmetricForm& F, const std::vector<int>& indices) {
    SymmetricForm out;
    for (int i : indices) out.labels.push_back(F.labels.at(i));
    out.entries = submatrix(F.entries, indices, indices);
    if (F.unknown) {
        const auto r = std::find(indices.begin(), indices.end(), F.unknown->first);
        const auto c = std::find(indices.begin(), indices.end(), F.unknown->second);
        if (r != indices.end() && c != indices.end())
            out.unknown = std::make_pair(static_cast<int>(r - indices.begin()), static_cast<int>(c - indices.begin()));
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

// Min eigenvalue of the equilibrated completion; concave in v.
struct CompletionProbe {
    Eigen::MatrixXd base;
    int r, c;
    Eigen::VectorXd s;  // equilibration scaling, from the known diagonal

    double operator()(double v) const {
        Eigen::MatrixXd M = base;
        M(r, c) = M(c, r) = v;
        return min_eigenvalue(s.asDiagonal() * M * s.asDiagonal());
    }
};

// Largest/smallest v on the side of v_in where probe(v) >= level, assuming probe(v_in) >= level
// and probe(v_out) < level.
double bisect_edge(const CompletionProbe& probe, double v_in, double v_out, double level) {
    for (int it = 0; it < 200 && std::abs(v_out - v_in) > 1e-15 * (1.0 + std::abs(v_in)); ++it) {
        const double mid = 0.5 * (v_in + v_out);
        if (probe(mid) >= level)
            v_in = mid;
        else
            v_out = mid;
    }
    return v_in;
}

}  // namespace

Interval completion_interval(const SymmetricForm& F, CompletionMode mode, const Tolerances& tol) {
    if (!F.unknown) throw MultipleUnknowns("form has no unknown entry pair");
    const int n = F.size();
    const int r = F.unknown->first, c = F.unknown->second;
    if (r == c || r < 0 || c < 0 || r >= n || c >= n) throw MultipleUnknowns("unknown pair must be off-diagonal");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (std::isnan(F.entries(i, j)) && !((i == r && j == c) || (i == c && j == r)))
                throw MultipleUnknowns("more than one unknown entry pair");

    CompletionProbe probe{F.entries, r, c, Eigen::VectorXd(n)};
    probe.base(r, c) = probe.base(c, r) = 0.0;
    for (int i = 0; i < n; ++i) probe.s(i) = probe.base(i, i) > 0.0 ? 1.0 / std::sqrt(probe.base(i, i)) : 1.0;

    std::vector<int> rest;
    for (int i = 0; i < n; ++i)
        if (i != r && i != c) rest.push_back(i);
    auto with = [&](int extra) {
        std::vector<int> idx = rest;
        idx.push_back(extra);
        return submatrix(probe.base, idx, idx);
    };
    Interval out;
    // Fully specified principal blocks must already be psd.
    if (!is_psd(equilibrate(with(r)), tol.psd) || !is_psd(equilibrate(with(c)), tol.psd)) return out;

    const double drr = probe.base(r, r), dcc = probe.base(c, c);
    const double radius = std::sqrt(std::max(drr, 0.0) * std::max(dcc, 0.0));
    const double psd_level = -tol.psd;

    // Closed form from the Schur reduction on the remaining indices.
    const Eigen::MatrixXd S = submatrix(probe.base, rest, rest);
    const Eigen::MatrixXd Se = equilibrate(S);
    const bool well_conditioned = rest.empty() || min_eigenvalue(Se) > 1e-8;
    double lo = 0.0, hi = 0.0;
    bool have = false;
    if (well_conditioned) {
        Eigen::VectorXd br(rest.size()), bc(rest.size());
        for (std::size_t i = 0; i < rest.size(); ++i) {
            br(i) = probe.base(r, rest[i]);
            bc(i) = probe.base(c, rest[i]);
        }
        double p = drr, q = dcc, w = 0.0;
        if (!rest.empty()) {
            const Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
            const Eigen::VectorXd Sbr = ldlt.solve(br), Sbc = ldlt.solve(bc);
            p -= br.dot(Sbr);
            q -= bc.dot(Sbc);
            w = br.dot(Sbc);
        }
        const double half = std::sqrt(std::max(p, 0.0) * std::max(q, 0.0));
        lo = w - half;
        hi = w + half;
        have = true;
    }
    if (!have) {
        // Bisection fallback on the concave min-eigenvalue function.
        double a = -radius - 1.0, b = radius + 1.0;
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - g * (b - a), x2 = a + g * (b - a);
        double f1 = probe(x1), f2 = probe(x2);
        for (int it = 0; it < 200 && b - a > 1e-14 * (1.0 + radius); ++it) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = probe(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = probe(x1);
            }
        }
        const double peak = 0.5 * (a + b);
        if (probe(peak) < psd_level) return out;
        lo = bisect_edge(probe, peak, -radius - 1.0, psd_level);
        hi = bisect_edge(probe, peak, radius + 1.0, psd_level);
    }
    if (mode == CompletionMode::Psd) {
        out = {lo, hi, false, false};
        return out;
    }
    const double mid = 0.5 * (lo + hi);
    if (probe(mid) < tol.pd) return out;
    // pd set is open; report the analytic endpoints when the reduction was exact.
    if (well_conditioned)
        out = {lo, hi, false, true};
    else
        out = {bisect_edge(probe, mid, lo - 1.0, tol.pd), bisect_edge(probe, mid, hi + 1.0, tol.pd), false, true};
    return out;
}

}  // namespace tmp3
