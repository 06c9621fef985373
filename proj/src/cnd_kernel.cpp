#include "pdikit/cnd_kernel.hpp"

#include <cmath>
#include <sstream>

namespace pdikit {

namespace {

constexpr double kUnitNormTol = 1e-9;
constexpr double kSymmetryTol = 1e-12;
constexpr double kRadicandTol = 1e-12;

Eigen::Index precomputed_index(const CndKernel& spec, const Eigen::VectorXd& x) {
    require(x.size() == 1, ErrorCode::DimensionMismatch,
            "precomputed kernels take a single index coordinate");
    double v = x[0];
    double rounded = std::round(v);
    require(std::abs(v - rounded) <= 1e-9, ErrorCode::IndexOutOfRange,
            "precomputed kernel index is not integral");
    auto idx = static_cast<Eigen::Index>(rounded);
    require(idx >= 0 && idx < spec.matrix.rows(), ErrorCode::IndexOutOfRange,
            "precomputed kernel index out of range");
    return idx;
}

void check_unit_norm(const Eigen::VectorXd& x) {
    require(std::abs(x.norm() - 1.0) <= kUnitNormTol, ErrorCode::NotUnitNorm,
            "sphere point is not unit-norm");
}

}  // namespace

void PointSet::validate() const {
    require(points.rows() >= 1 && points.cols() >= 1, ErrorCode::ShapeMismatch,
            "point set needs n >= 1 and d >= 1");
    require(points.allFinite(), ErrorCode::InvalidSpec, "point set has non-finite entries");
    if (geometry == Geometry::UnitSphere) {
        for (Eigen::Index i = 0; i < points.rows(); ++i) {
            require(std::abs(points.row(i).norm() - 1.0) <= kUnitNormTol, ErrorCode::NotUnitNorm,
                    "sphere point set row " + std::to_string(i) + " is not unit-norm");
        }
    }
}

CndKernel CndKernel::squared_euclidean(double offset) {
    CndKernel k;
    k.kind = CndKind::SquaredEuclidean;
    k.diagonal_offset = offset;
    k.validate();
    return k;
}

CndKernel CndKernel::euclidean(double offset) {
    CndKernel k;
    k.kind = CndKind::Euclidean;
    k.diagonal_offset = offset;
    k.validate();
    return k;
}

CndKernel CndKernel::power_distance(double a, double offset) {
    CndKernel k;
    k.kind = CndKind::PowerDistance;
    k.exponent = a;
    k.diagonal_offset = offset;
    k.validate();
    return k;
}

CndKernel CndKernel::sphere_geodesic(double offset) {
    CndKernel k;
    k.kind = CndKind::SphereGeodesic;
    k.diagonal_offset = offset;
    k.validate();
    return k;
}

CndKernel CndKernel::precomputed(Eigen::MatrixXd m, double offset) {
    CndKernel k;
    k.kind = CndKind::Precomputed;
    k.matrix = std::move(m);
    k.diagonal_offset = offset;
    k.validate();
    return k;
}

void CndKernel::validate() const {
    require(diagonal_offset >= 0.0, ErrorCode::InvalidSpec, "diagonal offset must be nonnegative");
    if (kind == CndKind::PowerDistance) {
        require(exponent > 0.0 && exponent <= 2.0, ErrorCode::InvalidSpec,
                "power distance exponent must lie in (0, 2]");
    }
    if (kind == CndKind::Precomputed) {
        require(matrix.rows() >= 1 && matrix.rows() == matrix.cols(), ErrorCode::ShapeMismatch,
                "precomputed kernel matrix must be square");
        double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
        require((matrix - matrix.transpose()).cwiseAbs().maxCoeff() <= kSymmetryTol * scale,
                ErrorCode::InvalidSpec, "precomputed kernel matrix must be symmetric");
    }
}

std::string CndKernel::describe() const {
    std::ostringstream out;
    switch (kind) {
        case CndKind::SquaredEuclidean: out << "sqeuclidean"; break;
        case CndKind::Euclidean: out << "euclidean"; break;
        case CndKind::PowerDistance: out << "power(" << exponent << ")"; break;
        case CndKind::SphereGeodesic: out << "sphere"; break;
        case CndKind::Precomputed: out << "precomputed(" << matrix.rows() << ")"; break;
    }
    if (diagonal_offset != 0.0) out << "+offset(" << diagonal_offset << ")";
    return out.str();
}

double eval_cnd(const CndKernel& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& xp) {
    double base = 0.0;
    switch (spec.kind) {
        case CndKind::SquaredEuclidean: {
            require(x.size() == xp.size(), ErrorCode::DimensionMismatch,
                    "point dimensions differ");
            base = (x - xp).squaredNorm();
            break;
        }
        case CndKind::Euclidean: {
            require(x.size() == xp.size(), ErrorCode::DimensionMismatch,
                    "point dimensions differ");
            base = (x - xp).norm();
            break;
        }
        case CndKind::PowerDistance: {
            require(x.size() == xp.size(), ErrorCode::DimensionMismatch,
                    "point dimensions differ");
            base = std::pow((x - xp).norm(), spec.exponent);
            break;
        }
        case CndKind::SphereGeodesic: {
            require(x.size() == xp.size(), ErrorCode::DimensionMismatch,
                    "point dimensions differ");
            check_unit_norm(x);
            check_unit_norm(xp);
            double dot = std::clamp(x.dot(xp), -1.0, 1.0);
            base = std::acos(dot);
            break;
        }
        case CndKind::Precomputed: {
            Eigen::Index i = precomputed_index(spec, x);
            Eigen::Index j = precomputed_index(spec, xp);
            base = spec.matrix(i, j);
            break;
        }
    }
    return base + 2.0 * spec.diagonal_offset;
}

Eigen::MatrixXd gram_cnd(const CndKernel& spec, const PointSet& pts) {
    spec.validate();
    pts.validate();
    if (spec.kind == CndKind::SphereGeodesic) {
        require(pts.geometry == Geometry::UnitSphere, ErrorCode::DimensionMismatch,
                "sphere geodesic kernel needs unit-sphere points");
    }
    Eigen::Index n = pts.size();
    Eigen::MatrixXd G(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            double v = eval_cnd(spec, pts.points.row(i).transpose(),
                                pts.points.row(j).transpose());
            G(i, j) = v;
            G(j, i) = v;
        }
    }
    return G;
}

double metrized_distance(const CndKernel& spec, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& xp) {
    double radicand =
        2.0 * eval_cnd(spec, x, xp) - eval_cnd(spec, x, x) - eval_cnd(spec, xp, xp);
    if (radicand < -kRadicandTol) {
        fail(ErrorCode::NotCnd, "metrized distance radicand is negative; kernel is not CND");
    }
    return std::sqrt(std::max(radicand, 0.0));
}

Eigen::MatrixXd induced_pd_gram(const Eigen::MatrixXd& G, Eigen::Index w) {
    require(G.rows() == G.cols(), ErrorCode::ShapeMismatch, "gram matrix must be square");
    require(w >= 0 && w < G.rows(), ErrorCode::IndexOutOfRange, "base index out of range");
    Eigen::Index n = G.rows();
    Eigen::MatrixXd K(n, n);
    double gww = G(w, w);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            double v = G(i, w) + G(w, j) - G(i, j) - gww;
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

Eigen::MatrixXd schoenberg_gram(const Eigen::MatrixXd& G, double r) {
    require(G.rows() == G.cols(), ErrorCode::ShapeMismatch, "gram matrix must be square");
    require(r > 0.0, ErrorCode::InvalidSpec, "schoenberg scale must be positive");
    return (-r * G.array()).exp().matrix();
}

}  // namespace pdikit
