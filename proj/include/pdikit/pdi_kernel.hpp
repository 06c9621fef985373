#pragma once

#include <functional>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "pdikit/cnd_kernel.hpp"
#include "pdikit/special_functions.hpp"

namespace pdikit {

// Kernels on a product space whose Gram quadratic form is nonnegative on
// coefficient grids with zero row and column sums. Three constructive
// families plus raw user matrices.

struct PdiKernel {
    enum class Kind {
        Kronecker,         // gamma(x,x') * varsigma(y,y')
        BernsteinCompose,  // g(gamma(x,x'), varsigma(y,y')), g zero at the boundary
        Cm2Compose,        // psi(gamma(x,x') + varsigma(y,y'))
        RawGrid,           // user matrix over a fixed n x m index grid
    };

    Kind kind = Kind::Kronecker;
    CndKernel x_kernel;  // gamma
    CndKernel y_kernel;  // varsigma
    Bernstein2 g;        // BernsteinCompose
    Cm2Function psi;     // Cm2Compose
    Eigen::MatrixXd grid_matrix;  // RawGrid, (n*m) x (n*m)
    Eigen::Index grid_n = 0, grid_m = 0;
    // When set, evaluation applies the nine-term projection centering on
    // the fly, so both projection slices vanish identically.
    bool centered = false;

    static PdiKernel kronecker(CndKernel gamma, CndKernel varsigma, bool centered = false);
    static PdiKernel bernstein_compose(Bernstein2 g, CndKernel gamma, CndKernel varsigma,
                                       bool centered = false);
    static PdiKernel cm2_compose(Cm2Function psi, CndKernel gamma, CndKernel varsigma,
                                 bool centered = false);
    static PdiKernel raw_grid(Eigen::MatrixXd matrix, Eigen::Index n, Eigen::Index m,
                              bool centered = false);

    void validate() const;
    std::string describe() const;
};

// Finite model of the product space: n points on the X side, m on the Y
// side, flattened as index(i,k) = i*m + k.
struct ProductGrid {
    PointSet xs;
    PointSet ys;

    Eigen::Index n() const { return xs.size(); }
    Eigen::Index m() const { return ys.size(); }
    Eigen::Index size() const { return n() * m(); }
    Eigen::Index index(Eigen::Index i, Eigen::Index k) const { return i * m() + k; }

    void validate() const;
};

double eval_pdi(const PdiKernel& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                const Eigen::VectorXd& xp, const Eigen::VectorXd& yp);

// M[index(i,k)][index(j,l)] = kernel((x_i, y_k), (x_j, y_l)); exactly symmetric.
Eigen::MatrixXd gram_pdi(const PdiKernel& spec, const ProductGrid& grid);

// Nine-term two-sided projection centering on a grid Gram. The output has
// vanishing projection slices and the same quadratic form on every valid
// coefficient grid.
Eigen::MatrixXd center_projections(const Eigen::MatrixXd& G, Eigen::Index n, Eigen::Index m);

// Sixteen-term lift anchored at grid point (i0, k0). The result is
// positive semidefinite exactly when G passes the product-constrained
// certification; rows with i == i0 or k == k0 are zero.
Eigen::MatrixXd lift_base_point(const Eigen::MatrixXd& G, Eigen::Index n, Eigen::Index m,
                                Eigen::Index i0, Eigen::Index k0);

// Sixteen-term alternating lift between two index quadruples
// a = (x_i, y_k, x_j, y_l) on the doubled space; PD exactly when G passes
// the product-constrained certification.
struct QuadIndex {
    Eigen::Index i, k, j, l;
};
double lift_square_entry(const Eigen::MatrixXd& G, Eigen::Index n, Eigen::Index m,
                         const QuadIndex& a, const QuadIndex& b);

// Quadrangle identity on the lifted reproducing-kernel geometry:
//   2 I((x,y),(x',y')) + 2 I((x,y'),(x',y)) = ||K_{x,y} + K_{x',y'} - K_{x,y'} - K_{x',y}||^2,
// with the squared norm expanded through the base-point lift. For
// 2-symmetric kernels the left side equals 4 I((x,y),(x',y')). Returns the
// maximum residual over the supplied grid pairs; both forms are checked.
struct GridPair {
    Eigen::Index i, k, j, l;
};
double rkhs_identity_residual(const PdiKernel& spec, const ProductGrid& grid,
                              std::span<const GridPair> pairs);

// sqrt I((x,y),(x',y')) <= sum of the four sqrt I(.,(z,w)) terms anchored
// at (z,w). Values in [-1e-12, 0) clamp to zero; anything lower raises NotPdi.
struct QuadrangleSample {
    Eigen::VectorXd x, xp, z;  // X side
    Eigen::VectorXd y, yp, w;  // Y side
};
struct QuadrangleReport {
    double max_violation = 0.0;
    int n_checked = 0;
    bool ok(double slack = 1e-9) const { return max_violation <= slack; }
};
QuadrangleReport sqrt_quadrangle_check(const PdiKernel& spec,
                                       std::span<const QuadrangleSample> samples);

// Scalar transforms of a centered 2-symmetric kernel cannot be PD unless
// constant: the 4x4 interpolation matrix at (x,y), (x,y'), (x',y), (x',y')
// yields quadratic forms 4(f(0)-f(c)) and 4(f(c)-f(0)).
enum class TransformVerdict { NotPd, Inconclusive };
struct TransformWitnessReport {
    double form_alternating = 0.0;  // <A v1, v1>, v1 = (-1, 1, -1, 1)
    double form_paired = 0.0;       // <A v2, v2>, v2 = (-1, 1, 1, -1)
    double kernel_value = 0.0;      // c
    TransformVerdict verdict = TransformVerdict::Inconclusive;
};
TransformWitnessReport nonconstant_transform_not_pd(const std::function<double(double)>& f,
                                                    const PdiKernel& spec,
                                                    const Eigen::VectorXd& x,
                                                    const Eigen::VectorXd& xp,
                                                    const Eigen::VectorXd& y,
                                                    const Eigen::VectorXd& yp);

}  // namespace pdikit
