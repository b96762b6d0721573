#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "tmp3/bases.hpp"
#include "tmp3/curves.hpp"
#include "tmp3/linalg.hpp"
#include "tmp3/poly.hpp"

namespace tmp3 {

// p = v'G0v + f w'G1w for the one-multiplier certificate; p = v'G0v + chi1*y w'G1w +
// chi2*conic w'G2w for P15, P19, P24 (w over basis_Rk1, G1 absent when chi1 = 0).
struct Certificate {
    enum class Form { V1, V2 };
    Form form = Form::V1;
    int k = 1;
    SymmetricForm gram0;
    std::optional<SymmetricForm> gram1;
    std::optional<SymmetricForm> gram2;
};

struct CertificateResidual {
    double sampled = 0.0;               // max |certificate - p| over sampled curve points
    std::optional<double> symbolic;     // max coefficient of the reduced difference
    int samples = 0;
};

// Throws ShapeMismatch on sizes that do not fit the bases and NotPsd when a Gram matrix
// has an eigenvalue below -tol.psd relative to its scale.
CertificateResidual verify_certificate(const BivarPoly& p, const Certificate& cert, const CurveCase& c,
                                       const Tolerances& tol = {});

struct Square {
    Eigen::VectorXd coefficients;  // in the given basis
    std::optional<BivarPoly> g;    // when every basis element is a polynomial
};

// Q = sum of c c^T over the returned squares, one per eigenvalue above tol * max eigenvalue.
std::vector<Square> sos_from_gram(const SymmetricForm& Q, const Basis& basis, double tol = 1e-12);

}  // namespace tmp3
