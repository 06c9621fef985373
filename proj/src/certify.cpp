#include "pdikit/certify.hpp"

#include <cmath>

namespace pdikit {

Eigen::VectorXd CoefficientGrid::flattened() const {
    Eigen::VectorXd flat(n() * m());
    for (Eigen::Index i = 0; i < n(); ++i) {
        for (Eigen::Index k = 0; k < m(); ++k) flat[i * m() + k] = values(i, k);
    }
    return flat;
}

void CoefficientGrid::validate(double tol) const {
    require(values.rows() >= 1 && values.cols() >= 1, ErrorCode::ShapeMismatch,
            "coefficient grid must be nonempty");
    double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < m(); ++k) {
        require(std::abs(values.col(k).sum()) <= tol * scale, ErrorCode::ConstraintViolation,
                "coefficient grid column " + std::to_string(k) + " does not sum to zero");
    }
    for (Eigen::Index i = 0; i < n(); ++i) {
        require(std::abs(values.row(i).sum()) <= tol * scale, ErrorCode::ConstraintViolation,
                "coefficient grid row " + std::to_string(i) + " does not sum to zero");
    }
}

CoefficientGrid CoefficientGrid::from_flat(const Eigen::VectorXd& flat, Eigen::Index n,
                                           Eigen::Index m) {
    require(flat.size() == n * m, ErrorCode::ShapeMismatch,
            "flattened grid length does not match n*m");
    CoefficientGrid c;
    c.values.resize(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < m; ++k) c.values(i, k) = flat[i * m + k];
    }
    return c;
}

Eigen::MatrixXd sum_zero_basis(Eigen::Index n) {
    require(n >= 1, ErrorCode::ShapeMismatch, "basis size must be >= 1");
    // Helmert columns: u_j = (1,...,1,-j,0,...,0)/sqrt(j(j+1))
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n - 1);
    for (Eigen::Index j = 1; j < n; ++j) {
        double scale = 1.0 / std::sqrt(static_cast<double>(j) * (j + 1));
        for (Eigen::Index i = 0; i < j; ++i) B(i, j - 1) = scale;
        B(j, j - 1) = -static_cast<double>(j) * scale;
    }
    return B;
}

Eigen::MatrixXd constraint_basis(Eigen::Index n, Eigen::Index m) {
    require(n >= 1 && m >= 1, ErrorCode::ShapeMismatch, "grid dimensions must be >= 1");
    Eigen::MatrixXd U = sum_zero_basis(n);
    Eigen::MatrixXd V = sum_zero_basis(m);
    Eigen::MatrixXd B(n * m, (n - 1) * (m - 1));
    for (Eigen::Index p = 0; p < n - 1; ++p) {
        for (Eigen::Index q = 0; q < m - 1; ++q) {
            Eigen::Index col = p * (m - 1) + q;
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index k = 0; k < m; ++k) B(i * m + k, col) = U(i, p) * V(k, q);
            }
        }
    }
    return B;
}

double quadratic_form(const Eigen::MatrixXd& G, const CoefficientGrid& c) {
    c.validate();
    Eigen::Index n = c.n(), m = c.m();
    require(G.rows() == n * m && G.cols() == n * m, ErrorCode::ShapeMismatch,
            "gram size does not match the coefficient grid");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < m; ++k) {
            double cik = c.values(i, k);
            if (cik == 0.0) continue;
            for (Eigen::Index j = 0; j < n; ++j) {
                for (Eigen::Index l = 0; l < m; ++l) {
                    acc += cik * c.values(j, l) * G(i * m + k, j * m + l);
                }
            }
        }
    }
    return acc;
}

const char* to_string(CertifyMode mode) {
    switch (mode) {
        case CertifyMode::PD: return "pd";
        case CertifyMode::CND: return "cnd";
        case CertifyMode::PDI: return "pdi";
    }
    return "?";
}

const char* to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::Certified: return "certified";
        case Verdict::Rejected: return "rejected";
        case Verdict::StrictlyCertified: return "strictly_certified";
    }
    return "?";
}

CertificationReport certify(const Eigen::MatrixXd& G, CertifyMode mode, Eigen::Index n,
                            Eigen::Index m, const CertifyOptions& options) {
    require(G.rows() == G.cols() && G.rows() >= 1, ErrorCode::ShapeMismatch,
            "gram matrix must be square and nonempty");
    double scale = std::max(1.0, G.cwiseAbs().maxCoeff());
    require((G - G.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale, ErrorCode::InvalidSpec,
            "gram matrix must be symmetric");

    CertificationReport report;
    report.mode = mode;

    Eigen::MatrixXd constrained;
    Eigen::MatrixXd basis;  // empty means identity
    switch (mode) {
        case CertifyMode::PD:
            require(G.rows() == n * std::max<Eigen::Index>(m, 1) || G.rows() == n,
                    ErrorCode::ShapeMismatch, "matrix size does not match n");
            constrained = G;
            report.constraint_dimension = G.rows();
            break;
        case CertifyMode::CND:
            require(G.rows() == n, ErrorCode::ShapeMismatch, "matrix size does not match n");
            basis = sum_zero_basis(n);
            constrained = basis.transpose() * (-G) * basis;
            report.constraint_dimension = n - 1;
            break;
        case CertifyMode::PDI:
            require(n >= 1 && m >= 1 && G.rows() == n * m, ErrorCode::ShapeMismatch,
                    "matrix size does not match n*m");
            basis = constraint_basis(n, m);
            report.constraint_dimension = (n - 1) * (m - 1);
            if (report.constraint_dimension > 0) {
                constrained = basis.transpose() * G * basis;
            }
            break;
    }

    if (report.constraint_dimension == 0) {
        // Only the zero coefficient grid satisfies the constraints.
        report.min_constrained_eigenvalue = 0.0;
        report.tolerance = options.abs_floor;
        report.verdict = Verdict::Certified;
        return report;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(constrained);
    require(solver.info() == Eigen::Success, ErrorCode::InvalidSpec,
            "eigenvalue iteration did not converge");
    const Eigen::VectorXd& eigs = solver.eigenvalues();
    double min_eig = eigs.minCoeff();
    double max_abs = eigs.cwiseAbs().maxCoeff();
    double tol = std::max(options.tol * max_abs, options.abs_floor);

    report.min_constrained_eigenvalue = min_eig;
    report.tolerance = tol;
    Eigen::VectorXd v = solver.eigenvectors().col(0);  // eigenvalues sorted ascending
    report.witness = basis.size() > 0 ? Eigen::VectorXd(basis * v) : v;

    if (min_eig < -tol) {
        report.verdict = Verdict::Rejected;
    } else if (options.strict && mode == CertifyMode::PDI && min_eig > tol) {
        report.verdict = Verdict::StrictlyCertified;
    } else {
        report.verdict = Verdict::Certified;
    }
    return report;
}

}  // namespace pdikit
