#pragma once

#include <Eigen/Dense>

#include "pdikit/errors.hpp"

namespace pdikit {

// Conditionally negative definite kernels: symmetric kernels whose Gram
// quadratic form is nonpositive on coefficient vectors summing to zero.

enum class CndKind {
    SquaredEuclidean,  // ||x - x'||^2
    Euclidean,         // ||x - x'||
    PowerDistance,     // ||x - x'||^a, 0 < a <= 2
    SphereGeodesic,    // arccos(<x, x'>) on the unit sphere
    Precomputed,       // symmetric matrix, points are indices
};

enum class Geometry { Euclidean, UnitSphere };

struct PointSet {
    Eigen::MatrixXd points;  // rows are points
    Geometry geometry = Geometry::Euclidean;

    Eigen::Index size() const { return points.rows(); }
    Eigen::Index dim() const { return points.cols(); }

    // n >= 1, d >= 1, finite entries; unit-norm rows (1e-9) on the sphere.
    void validate() const;
};

struct CndKernel {
    CndKind kind = CndKind::SquaredEuclidean;
    double exponent = 1.0;         // PowerDistance only
    double diagonal_offset = 0.0;  // added once per argument, so 2*offset on every value
    Eigen::MatrixXd matrix;        // Precomputed only

    static CndKernel squared_euclidean(double offset = 0.0);
    static CndKernel euclidean(double offset = 0.0);
    static CndKernel power_distance(double a, double offset = 0.0);
    static CndKernel sphere_geodesic(double offset = 0.0);
    static CndKernel precomputed(Eigen::MatrixXd m, double offset = 0.0);

    void validate() const;
    std::string describe() const;
};

// Single evaluation. For Precomputed, x and x' are 1-d points holding
// integer indices into the matrix.
double eval_cnd(const CndKernel& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& xp);

// G[i][j] = eval_cnd(spec, p_i, p_j), computed once per unordered pair.
Eigen::MatrixXd gram_cnd(const CndKernel& spec, const PointSet& pts);

// D(x,x') = sqrt(2 g(x,x') - g(x,x) - g(x',x')). Radicands below -1e-12
// signal a non-CND kernel and raise NotCnd; tiny negatives clamp to zero.
double metrized_distance(const CndKernel& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& xp);

// K[i][j] = G[i][w] + G[w][j] - G[i][j] - G[w][w]. Row and column w are
// zero; positive semidefinite exactly when G is CND.
Eigen::MatrixXd induced_pd_gram(const Eigen::MatrixXd& G, Eigen::Index w);

// Entrywise exp(-r G); positive semidefinite for every r > 0 exactly when
// G is CND.
Eigen::MatrixXd schoenberg_gram(const Eigen::MatrixXd& G, double r);

}  // namespace pdikit
