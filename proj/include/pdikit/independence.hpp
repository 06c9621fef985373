#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pdikit/pdi_kernel.hpp"

namespace pdikit {

// Empirical independence statistics: the double sum of a product-space
// kernel against the difference between the paired empirical measure and
// the product of its marginals, with fast factorized paths and a
// permutation calibration. All estimators use the biased plug-in (all
// index pairs, diagonals included).

struct PairedSample {
    Eigen::MatrixXd xs;  // n x d
    Eigen::MatrixXd ys;  // n x d'

    Eigen::Index n() const { return xs.rows(); }
    void validate() const;
};

// w[i][k] = (1/n) [i == k] - 1/n^2; every row and column sums to zero.
Eigen::MatrixXd delta_weights(Eigen::Index n);

// T = sum_{i,k,j,l} w[i][k] w[j][l] I((x_i, y_k), (x_j, y_l)), the O(n^4)
// reference path. Fixed row-major order with compensated accumulation.
double statistic_direct(const PdiKernel& spec, const PairedSample& sample);

// Kronecker path: (1/n^2) <H Gx H, H Gy H>_F with H = I - J/n. O(n^2).
double statistic_kronecker_fast(const CndKernel& gamma, const CndKernel& varsigma,
                                const PairedSample& sample);

// Atom-wise path for finite-mixture composition kernels: each atom reduces
// to a Kronecker statistic on transformed factor Grams. Raises Unsupported
// for kernels that are not finite mixtures.
double statistic_decomposed(const PdiKernel& spec, const PairedSample& sample);

// Doubly-centered kernel at grid entries ((i,k),(j,l)): all sixteen signed
// terms with empirical averages over the sample marginals in place of the
// integrals. The full grid matrix is positive semidefinite whenever the
// kernel passes the product-constrained certification. Quartic in n, so
// capped at n <= 64; the factorized statistic paths cover larger samples.
double centered_kernel_pq(const PdiKernel& spec, const PairedSample& sample, Eigen::Index i,
                          Eigen::Index k, Eigen::Index j, Eigen::Index l);

// Full (n*n) x (n*n) doubly-centered grid matrix. Capped at n <= 64.
Eigen::MatrixXd centered_grid_gram(const PdiKernel& spec, const PairedSample& sample);

// (1/n^2) sum_{i,j} of the doubly-centered kernel at ((i,i),(j,j));
// equals statistic_direct.
double dcov_statistic(const PdiKernel& spec, const PairedSample& sample);

// Fastest applicable path: decomposed, then kronecker, then direct.
enum class StatisticPath { Direct, Kronecker, Decomposed };
const char* to_string(StatisticPath path);
StatisticPath select_statistic_path(const PdiKernel& spec);
double statistic_auto(const PdiKernel& spec, const PairedSample& sample);

struct IndependenceTestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int n_permutations = 0;
    std::uint64_t seed = 0;
    std::string kernel;
    StatisticPath path = StatisticPath::Direct;
    double elapsed_ms = 0.0;
};

// Permutes the y rows n_perm times (Fisher-Yates over mt19937_64, replica
// seeds seed + 1 .. seed + n_perm) and applies the add-one convention:
// p = (1 + #{permuted >= observed}) / (1 + n_perm).
IndependenceTestResult permutation_test(const PdiKernel& spec, const PairedSample& sample,
                                        int n_perm, std::uint64_t seed);

// D^2 = w^T K w for a PD Gram; weights are a difference of probability
// vectors and must sum to zero.
double mmd_squared(const Eigen::MatrixXd& K, const Eigen::VectorXd& w);

// E^2 = -w^T G w for a CND Gram.
double energy_distance_squared(const Eigen::MatrixXd& G, const Eigen::VectorXd& w);

// Deterministic Fisher-Yates permutation of 0..n-1.
std::vector<Eigen::Index> seeded_permutation(Eigen::Index n, std::uint64_t seed);

}  // namespace pdikit
