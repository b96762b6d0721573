#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace tmp3 {

struct Tolerances {
    double psd = 1e-10;   // min eigenvalue >= -psd * max(1, |M|)
    double pd = 1e-8;     // min eigenvalue >= pd * |M|
    double rank = 1e-9;   // singular values above rank * sigma_max count
};

// Labeled symmetric matrix, optionally with one unknown symmetric pair (r, c), r != c.
// Entries at the unknown pair are NaN until instantiated with with_value().
struct SymmetricForm {
    std::vector<std::string> labels;
    Eigen::MatrixXd entries;
    std::optional<std::pair<int, int>> unknown;

    int size() const { return static_cast<int>(entries.rows()); }
    bool is_partial() const { return unknown.has_value(); }
    SymmetricForm with_value(double v) const;
    // Throws DegenerateInput when the unknown pair is still open.
    const Eigen::MatrixXd& known() const;
};

struct Partition {
    std::vector<int> top;
    std::vector<int> bottom;
};

struct Interval {
    double lo = 0.0, hi = 0.0;
    bool empty = true;
    bool open = false;

    bool contains(double v) const;
    double midpoint() const { return 0.5 * (lo + hi); }
    double width() const { return empty ? 0.0 : hi - lo; }
    // Point at fraction s in [0,1] of the interval.
    double at(double s) const { return lo + s * (hi - lo); }
};

enum class CompletionMode { Psd, Pd };

double matrix_scale(const Eigen::MatrixXd& M);  // max |entry|
double min_eigenvalue(const Eigen::MatrixXd& M);
bool is_psd(const Eigen::MatrixXd& M, double tol = Tolerances{}.psd);
bool is_pd(const Eigen::MatrixXd& M, double tol_pd = Tolerances{}.pd);
// Normalized margins used by the checks: min eigenvalue over max(1,|M|) and over |M|.
double psd_margin(const Eigen::MatrixXd& M);
double pd_margin(const Eigen::MatrixXd& M);

int numeric_rank(const Eigen::MatrixXd& M, double tol = Tolerances{}.rank);
std::vector<Eigen::VectorXd> kernel_basis(const Eigen::MatrixXd& M, double tol = Tolerances{}.rank);

// Congruence D^{-1/2} M D^{-1/2} with D the positive part of the diagonal. Preserves
// inertia and rank while evening out the scale of the rows.
Eigen::MatrixXd equilibrate(const Eigen::MatrixXd& M);

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& M, double rel_cutoff = 1e-10);
Eigen::MatrixXd submatrix(const Eigen::MatrixXd& M, const std::vector<int>& rows, const std::vector<int>& cols);
// A - B D^+ B^T for the partition top (A) / bottom (D).
Eigen::MatrixXd schur(const Eigen::MatrixXd& M, const Partition& part);
// Albert's criterion: D psd, range(B^T) in range(D), M/D psd.
bool albert_psd(const Eigen::MatrixXd& M, const Partition& part, double tol = Tolerances{}.psd);

SymmetricForm restrict_form(const SymmetricForm& F, const std::vector<int>& indices);

// Values v of the unknown pair for which F(v) is psd (closed) or pd (open).
// Throws MultipleUnknowns if F has no single unknown pair.
Interval completion_interval(const SymmetricForm& F, CompletionMode mode, const Tolerances& tol = {});

}  // namespace tmp3
