#pragma once

#include <Eigen/Dense>

#include "pdikit/errors.hpp"

namespace pdikit {

// Numerical certification of PD / CND / product-constrained (PDI) Gram
// matrices by eigenvalue analysis on an orthonormal constraint basis,
// with the explicit quadratic form as the independent oracle.

// n x m coefficient grid whose row sums and column sums are all zero.
struct CoefficientGrid {
    Eigen::MatrixXd values;

    Eigen::Index n() const { return values.rows(); }
    Eigen::Index m() const { return values.cols(); }
    Eigen::VectorXd flattened() const;  // row-major, index(i,k) = i*m + k

    void validate(double tol = 1e-12) const;
    static CoefficientGrid from_flat(const Eigen::VectorXd& flat, Eigen::Index n,
                                     Eigen::Index m);
};

// Orthonormal basis of the sum-zero subspace of R^n, as an n x (n-1) matrix.
Eigen::MatrixXd sum_zero_basis(Eigen::Index n);

// Orthonormal basis of the flattened coefficient-grid subspace, as an
// (n*m) x ((n-1)(m-1)) matrix: Kronecker combinations of the per-factor
// sum-zero bases. Empty when n == 1 or m == 1.
Eigen::MatrixXd constraint_basis(Eigen::Index n, Eigen::Index m);

// sum_{i,k,j,l} c[i][k] c[j][l] G[(i,k)][(j,l)], the exact double sum.
// Rejects grids violating the sum-zero constraints.
double quadratic_form(const Eigen::MatrixXd& G, const CoefficientGrid& c);

enum class CertifyMode { PD, CND, PDI };
enum class Verdict { Certified, Rejected, StrictlyCertified };

const char* to_string(CertifyMode mode);
const char* to_string(Verdict verdict);

struct CertificationReport {
    CertifyMode mode = CertifyMode::PD;
    // Minimum eigenvalue of the constrained matrix: B^T G B for PD/PDI
    // (B = identity for PD), B^T (-G) B for CND.
    double min_constrained_eigenvalue = 0.0;
    double tolerance = 0.0;  // resolved absolute tolerance
    Verdict verdict = Verdict::Certified;
    Eigen::Index constraint_dimension = 0;
    // Flattened coefficient vector attaining the extremal eigenvalue
    // (empty when the constraint space is trivial).
    Eigen::VectorXd witness;
};

struct CertifyOptions {
    double tol = 1e-8;   // relative to the largest |eigenvalue| of the constrained matrix
    double abs_floor = 1e-10;
    bool strict = false; // report StrictlyCertified when the form is strictly positive
};

// For PDI, G is (n*m) x (n*m) in the grid layout; for PD/CND, n is the
// matrix size and m is ignored.
CertificationReport certify(const Eigen::MatrixXd& G, CertifyMode mode, Eigen::Index n,
                            Eigen::Index m, const CertifyOptions& options = {});

}  // namespace pdikit
